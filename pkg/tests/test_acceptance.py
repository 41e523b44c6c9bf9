"""The ten acceptance criteria, each at its stated tolerance.

Every test prints one ``ACCEPTANCE <n> PASS|FAIL`` line to the terminal
before asserting, so the run log carries the verdicts even under capture.
"""
import math
import time

import numpy as np
import pytest

from nonhered.construct import GEval, construct
from nonhered.verify import (check_contract, check_generating, check_misc, check_norm_bound,
                             check_norm_equivalence, check_ratio, chain_bounds, defect_experiment,
                             defect_monotone, norms)
from nonhered.weights import (WeightSpec, K_asymptotic_report, _second_difference,
                              flat_region_numeric, legendre_second_closed)
from nonhered.xform import Space, kernel_time, pair_entire

pytestmark = pytest.mark.acceptance


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}  {detail}", flush=True)
        return ok
    return emit


def test_1_conjugate(verdict):
    t0 = time.perf_counter()
    worst, flat_err = 0.0, 0.0
    for a in (0.3, 0.5, 0.7):
        spec = WeightSpec.canonical(a)
        for y in np.geomspace(1.0, 1e3, 50):
            ref = legendre_second_closed(a, y)
            worst = max(worst, abs(_second_difference(spec, y) - ref) / ref)
        flat_err = max(flat_err, abs(flat_region_numeric(spec) - a / (2 * math.pi)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and flat_err <= 1e-8 and dt < 10
    verdict(1, ok, f"h~'' rel err {worst:.2e} (<=1e-6), flat region err {flat_err:.2e} "
                   f"(<=1e-8), {dt:.1f}s (<10s)")
    assert ok


def test_2_K_asymptotics(verdict):
    t0 = time.perf_counter()
    rep = K_asymptotic_report(WeightSpec.canonical(0.5), np.geomspace(20, 500, 40))
    r = {row["y"]: row["ratio"] for row in rep["rows"]}
    r250 = K_asymptotic_report(WeightSpec.canonical(0.5), [250.0, 500.0])["rows"]
    stab = abs(r250[1]["ratio"] / r250[0]["ratio"] - 1)
    dt = time.perf_counter() - t0
    ok = rep["spread"] <= 1.5 and stab <= 0.05 and rep["c1"] > 0 and dt < 30
    verdict(2, ok, f"max/min {rep['spread']:.4f} (<=1.5), |r(500)/r(250)-1| {stab:.2e} (<=0.05), "
                   f"c1 = {rep['c1']:.5f}, {dt:.1f}s (<30s)")
    assert ok and len(r) == 40


def test_3_kernel_identities(verdict, built256):
    sp = Space(0.5)
    a0_err = abs(sp.A0 - 2 * math.pi ** 1.5 / 1.5) / sp.A0
    quoted = abs(sp.A0 - 7.4244372) <= 2e-7
    norm_err = max(abs(sp.kernel_norm(lam) ** 2 - sp.A0) / sp.A0 for lam in (0.0, 17.3, 1e5))
    u1 = built256.lattice.u[0]
    g = GEval(built256.products, ("v", 0))
    r = pair_entire(built256.space, g, kernel_time(u1))
    point = complex(g.at(u1, 0.0)[0])
    samp_err = abs(r.value - point) / abs(point)
    ok = a0_err <= 1e-10 and quoted and norm_err <= 1e-10 and samp_err <= 1e-4
    verdict(3, ok, f"A(0) rel err {a0_err:.1e}, ||k||^2 rel err {norm_err:.1e}, "
                   f"sampling identity rel err {samp_err:.1e} (<=1e-4)")
    assert ok


def test_4_construction_invariants(verdict):
    t0 = time.perf_counter()
    st = construct(alpha=0.5, Q=256.0, N_lat=12, R=25.0)
    dt = time.perf_counter() - t0
    from nonhered.construct import ZERO_TOL, local_scale, rebuild
    b = rebuild(st)
    u = b.lattice.u
    in_third = bool(np.all((st.beta > 1 / 3) & (st.beta < 2 / 3)))
    res = max(abs(complex(b.F.at(np.array([x]), np.array([o]))[0])) / max(1.0, local_scale(b.F, x, o))
              for x, o in zip(u, st.beta))
    trend = st.audit["beta_trend_nonincreasing"]
    audit = st.audit["winding_zeros"] == st.audit["lambda2_in_radius"] + \
        st.audit["beta_points_in_radius"]
    ok = in_third and res <= ZERO_TOL and trend and audit and dt < 300
    verdict(4, ok, f"beta in (1/3,2/3): {in_third}, root residual {res:.1e}, trend: {trend}, "
                   f"winding {st.audit['winding_zeros']} zeros = {st.lambda2.size} + "
                   f"{st.audit['beta_points_in_radius']}, {dt:.1f}s (<300s)")
    assert ok


def test_5_linear_system(verdict, state1e5):
    st = state1e5
    A = st.A
    n = A.shape[0]
    off = np.abs(A) * (1 - np.eye(n))
    sums = off.sum(axis=0)                         # equation n is column n of A
    resid = float(np.max(np.abs(st.d @ A - st.Gamma)))
    u = st.lattice.u[:n]
    decay = off * np.minimum.outer(u, u) ** (1 / 6)
    vals = decay[~np.eye(n, dtype=bool)]
    spread = float(vals.max() / np.median(vals))
    ok = bool(np.all(sums < 1)) and bool(np.all(np.abs(st.d) < 1)) and resid <= 1e-10 \
        and spread <= 10
    verdict(5, ok, f"max off-diagonal sum {sums.max():.4f} (<1), max|d| {np.abs(st.d).max():.4f} "
                   f"(<1), ||DA-Gamma|| {resid:.1e}, decay max/median {spread:.2f} (<=10)")
    assert ok


def test_6_norm_bound(verdict, built1e5):
    rep = check_norm_bound(built1e5)
    s = rep.get("normbound.sum")
    ok = rep.passed and not s.exploratory and s.passed
    cb = chain_bounds(1e5, built1e5.state.d, 12)
    verdict(6, ok, f"||F-s||+||H-s|| = {s.measured:.5f} <= {cb['displayed']:.4f}; chain "
                   f"F {rep.get('normbound.chain_F').passed}, H {rep.get('normbound.chain_H').passed}")
    assert ok


def test_7_contract(verdict, built1e5):
    rep = check_contract(built1e5)
    f = rep.get("contract.F_on_lambda2")
    h = rep.get("contract.H_perp_g")
    fh = rep.get("contract.FH_nonzero")
    ok = rep.passed
    verdict(7, ok, f"max|F(Lambda_2)| {f.measured:.1e}, (H,g) rel {h.measured:.1e} "
                   f"(budget {h.error_budget:.1e}), |(F,H)| {fh.measured:.5f} >= {fh.bound:.4f}")
    assert ok, rep.failures()


def test_8_sampled_inequalities(verdict, built1e5):
    misc = check_misc(built1e5)
    gen = check_generating(built1e5)
    rat = check_ratio(built1e5)
    l42 = misc.get("decay.sigma_g")
    l43 = rat.get("ratio.ratio_upper")
    low = gen.get("growth.F_lower")
    ok = l42.passed and l43.passed and low.passed and l43.fitted["samples"] == 1000
    verdict(8, ok, f"sigma decay max/median {l42.measured:.3f} (<=5), G1/S ratio max "
                   f"{l43.measured:.3f} (<=1), F lower constant {low.measured:.3e} (>0)")
    assert ok


def test_9_norm_equivalence(verdict):
    rep = check_norm_equivalence(Space(0.5), 256.0)
    ratios = {c.name.split(".")[1]: c.measured for c in rep.checks}
    ok = rep.passed and len(ratios) == 4
    verdict(9, ok, "ratios " + ", ".join(f"{k} {v:.3f}" for k, v in ratios.items())
            + " (in [0.1, 10])")
    assert ok


def test_10_defect(verdict, built256):
    rows, info = defect_experiment(built256, R_list=(40.0, 120.0, 250.0, 300.0))
    fams = {(r.orientation, r.candidate) for r in rows}
    emitted = fams == {(o, c) for o in ("L2-L1", "L1-L2", "control") for c in ("F", "H")}
    mono = defect_monotone(rows)
    Rmax = max(r.R for r in rows)
    pick = {r.orientation: r.residual for r in rows if r.R == Rmax and r.candidate == "F"}
    order = pick["control"] < pick["L2-L1"]
    ok = emitted and mono and order
    verdict(10, ok, f"curves emitted {emitted}, non-increasing {mono}; at R={Rmax:g} control "
                    f"{pick['control']:.5f} vs mixed {pick['L2-L1']:.5f} (need control < mixed)")
    assert ok
