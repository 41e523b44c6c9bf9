"""Verification suites for a built construction and the mixed-system experiment."""
from dataclasses import dataclass, field, asdict
import functools
import math
import time

import numpy as np

from .construct import ZERO_TOL, GEval, H_time, find_lambda2, local_scale
from .weights import WeightSpec, conjugate_profile
from .xform import (PlaneQuadSpec, TimeRepEval, biortho_gram, make_grid, pair_columns,
                    plane_norm, sigma_time, sinpi)

EPS = np.finfo(float).eps


@dataclass
class Check:
    name: str
    anchor: str
    measured: object
    bound: object
    passed: bool
    error_budget: float = 0.0
    tolerance: float = None
    fitted: dict = field(default_factory=dict)
    exploratory: bool = False
    inconclusive: bool = False
    runtime: float = 0.0

    def __post_init__(self):
        # an error budget larger than the tolerance cannot certify a pass
        if self.tolerance is not None and self.error_budget > self.tolerance and self.passed:
            self.passed = False
            self.inconclusive = True


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    def add(self, check):
        self.checks.append(check)
        return check

    def extend(self, other):
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self):
        return all(c.passed for c in self.checks if not c.exploratory)

    def failures(self):
        return [c.name for c in self.checks if not c.exploratory and not c.passed]

    def get(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        checks = sorted((asdict(c) for c in self.checks), key=lambda c: c["name"])
        return {"schema": 1, "passed": self.passed, "failures": self.failures(), "checks": checks}


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        dt = time.perf_counter() - t0
        for c in rep.checks:
            c.runtime = dt / max(len(rep.checks), 1)
        return rep
    return wrapper


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def norms(built):
    """Exact ||sigma||, ||F - sigma||, ||H - sigma||, ||F||, ||H|| and (F, H)."""
    sp = built.space
    sig = sigma_time()
    Fr, Hr = built.F.rep, built.H.rep
    return {
        "sigma": sp.norm_time(sig),
        "F_minus_sigma": sp.norm_time(Fr - sig),
        "H_minus_sigma": sp.norm_time(Hr - sig),
        "F": sp.norm_time(Fr),
        "H": sp.norm_time(Hr),
        "FH": sp.inner_time(Fr, Hr),
    }


# -- contract ------------------------------------------------------------------------

@_timed
def check_contract(built, X=2.0e4, tol=1e-6):
    st = built.state
    sp, F, P = built.space, built.F, built.products
    rep = VerificationReport()
    u = built.lattice.u[:st.trunc]

    # (i) zeros: Lambda_2 and the beta points
    lam = np.abs(F.at(st.lambda2_a, st.lambda2_o)) if st.lambda2_a.size else np.zeros(1)
    rep.add(Check("contract.F_on_lambda2", "(F, K_lam) = 0 on Lambda_2", float(lam.max()), ZERO_TOL,
                  bool(lam.max() <= ZERO_TOL)))
    rb = np.abs(F.at(u, st.beta))
    scales = np.array([max(1.0, local_scale(F, a, o)) for a, o in zip(u, st.beta)])
    rep.add(Check("contract.beta_roots", "F(u_n + beta_n) = 0", float(np.max(rb / scales)),
                  ZERO_TOL, bool(np.all(rb <= ZERO_TOL * scales))))

    # (ii) (H, g_{v_n}) from a fresh pairing against the time side of H
    lams = [("v", n) for n in range(st.trunc)]
    sampler = lambda a, o: P.g_columns(a, o, lams)  # noqa: E731
    windows = F.windows() + P.windows()
    gH, eH, _, _ = pair_columns(sp, sampler, H_time(sp, built.lattice, st.d), X=X, windows=windows,
                                m=3, check_m=4)
    gs, es, _, _ = pair_columns(sp, sampler, sigma_time(), X=X, windows=windows, m=3, check_m=4)
    gk = P.g_columns(u, np.zeros(st.trunc), lams)
    diag = np.abs(np.diag(gk)) / sp.sqrtA0
    nrm = norms(built)
    g_lb = np.maximum(diag, np.abs(gs) / nrm["sigma"])     # Cauchy-Schwarz lower bound on ||g||
    scale = nrm["H"] * g_lb
    rel = np.abs(gH) / scale
    budget = float(np.max(eH / scale))
    rep.add(Check("contract.H_perp_g", "(H, g_lam) = 0 on Lambda_1", float(rel.max()), tol,
                  bool(np.all(rel + eH / scale <= tol)), error_budget=budget, tolerance=tol,
                  fitted={"abs_max": float(np.max(np.abs(gH))), "abs_values": _jsonable(np.abs(gH)),
                          "scale": _jsonable(scale)}))
    rep.add(Check("contract.H_perp_g_abs", "(H, g_lam) = 0 on Lambda_1 (raw g)",
                  float(np.max(np.abs(gH))), tol, bool(np.max(np.abs(gH) + eH) <= tol),
                  error_budget=float(np.max(eH)), tolerance=tol))

    # (iii) (F, H) != 0 with a certified margin
    a, b, s = nrm["F_minus_sigma"], nrm["H_minus_sigma"], nrm["sigma"]
    slack = (a + b) * (2 * s + a + b)
    dev = abs(nrm["FH"] - s * s)
    margin = s * s - slack
    rep.add(Check("contract.FH_nonzero", "(F, H) != 0", abs(nrm["FH"]), margin,
                  bool(margin > 0 and dev <= slack and abs(nrm["FH"]) >= margin),
                  fitted={"FH": _jsonable(nrm["FH"]), "sigma_sq": s * s, "slack": slack}))

    # exploratory: (F, g_v) on Lambda_1, about which nothing is claimed
    gF, eF, _, _ = pair_columns(sp, sampler, F.rep, X=X, windows=windows)
    rep.add(Check("explore.F_g_lambda1", "(F, g_lam) on Lambda_1", _jsonable(np.abs(gF)), None, True,
                  error_budget=float(np.max(eF)), exploratory=True))
    return rep


# -- norm bound ----------------------------------------------------------------------

def chain_bounds(Q, d, trunc):
    u = Q * 2.0 ** np.arange(trunc)
    return {"sum_2_over_sqrt_u": float(np.sum(2.0 / np.sqrt(u))),
            "sum_abs_d_cbrt": float(np.sum(np.abs(d) / np.cbrt(u))),
            "sum_inv_cbrt": float(np.sum(1.0 / np.cbrt(u))),
            "displayed": 6.0 * Q ** (-1.0 / 3.0)}


def chain_implies_display(Q):
    """The proof's two geometric sums fit under 6 Q^(-1/3) only for large Q."""
    r2, r3 = 1.0 / (1.0 - 2 ** -0.5), 1.0 / (1.0 - 2 ** (-1.0 / 3.0))
    return 2 * r2 * Q ** -0.5 + r3 * Q ** (-1.0 / 3.0) <= 6.0 * Q ** (-1.0 / 3.0)


@_timed
def check_norm_bound(built):
    st = built.state
    nrm = norms(built)
    cb = chain_bounds(st.Q, st.d, st.trunc)
    a, b = nrm["F_minus_sigma"], nrm["H_minus_sigma"]
    rep = VerificationReport()
    required = chain_implies_display(st.Q)
    rep.add(Check("normbound.sum", "||F-sigma|| + ||H-sigma|| <= 6 Q^(-1/3)", a + b, cb["displayed"],
                  bool(a + b <= cb["displayed"]), exploratory=not required,
                  fitted={"F_minus_sigma": a, "H_minus_sigma": b}))
    rep.add(Check("normbound.chain_F", "||F-sigma|| <= sum 2/sqrt(u_n)", a, cb["sum_2_over_sqrt_u"],
                  bool(a <= cb["sum_2_over_sqrt_u"])))
    rep.add(Check("normbound.chain_H", "||H-sigma|| <= sum |d_n| u_n^(-1/3) <= sum u_n^(-1/3)", b,
                  cb["sum_abs_d_cbrt"], bool(b <= cb["sum_abs_d_cbrt"] * (1 + 1e-12)
                                             and cb["sum_abs_d_cbrt"] <= cb["sum_inv_cbrt"])))
    return rep


# -- growth off the exceptional set --------------------------------------------------

def _random_points(rng, n, xmax, ymax, reject):
    out = []
    while len(out) < n:
        x = rng.uniform(-xmax, xmax, 4 * n)
        y = rng.uniform(-ymax, ymax, 4 * n)
        z = x + 1j * y
        out.extend(z[~reject(z)].tolist())
    return np.array(out[:n])


def excluded_X(u):
    def reject(z):
        bad = np.zeros(z.shape, dtype=bool)
        for un in u:
            bad |= np.abs(z - un) < 2 * math.sqrt(un)
        k = np.round(z.real)
        near_int = (np.abs(z - k) < 0.1) & (k != 0) & (k != 1)
        return bad | near_int
    return reject


@_timed
def check_generating(built, n=1000, seed=0, xmax=1.0e4, ymax=3.0):
    st = built.state
    F, P = built.F, built.products
    u = built.lattice.u[:st.trunc]
    rng = np.random.default_rng(seed)
    rep = VerificationReport()

    z = _random_points(rng, n, xmax, ymax, excluded_X(u))
    za = np.round(z.real)
    vals = np.abs(F.at(za, z - za)) * (1 + np.abs(z)) ** 2
    rep.add(Check("growth.F_lower", "|F(z)| >= C (1+|z|)^-2 off X", float(vals.min()), 0.0,
                  bool(vals.min() > 0), fitted={"C": float(vals.min())}))

    pts = []
    for un, b in zip(u, st.beta):
        r = rng.uniform(0, 1.0 / 3.0, n)
        th = rng.uniform(0, 2 * np.pi, n)
        o = b + r * np.exp(1j * th)
        ok = (np.abs(o.imag) >= 0.1) & (np.abs(o.imag) <= 1.0)
        pts.append((np.full(ok.sum(), un), o[ok]))
    za = np.concatenate([p[0] for p in pts])
    zo = np.concatenate([p[1] for p in pts])
    sel = rng.permutation(za.size)[:n]
    za, zo = za[sel], zo[sel]
    G = np.abs(P.P(za, zo)) * np.exp(-2 * np.pi * np.abs(zo.imag))
    rep.add(Check("growth.G_near_lattice", "|G(z)| >= C e^{2 pi |y|} on B_1/3(u_n)", float(G.min()),
                  0.0, bool(G.min() > 0), fitted={"C": float(G.min())}))

    x = rng.uniform(-50, 50, n)
    y = rng.uniform(1, 6, n) * rng.choice([-1, 1], n)
    a = np.round(x)
    s = np.abs(sinpi(a, (x - a) + 1j * y)) * np.exp(-np.pi * np.abs(y))
    rep.add(Check("growth.sin_classical", "|sin pi z| e^{-pi|y|} in [0.4, 1.1], |y| >= 1",
                  [float(s.min()), float(s.max())], [0.4, 1.1],
                  bool(s.min() >= 0.4 and s.max() <= 1.1)))
    rep.add(Check("growth.L_polynomial", "L is a polynomial of degree <= 2", "out of numerical scope",
                  None, True, exploratory=True))
    return rep


# -- G1/S ratio ----------------------------------------------------------------------

@_timed
def check_ratio(built, n=1000, seed=1, zmax=1.0e4):
    st = built.state
    P = built.products
    u = built.lattice.u[:st.trunc]
    s = u + st.beta
    rng = np.random.default_rng(seed)
    rep = VerificationReport()

    def off_balls(radius):
        def reject(z):
            bad = np.abs(z) > zmax
            for c, r in zip(s, radius):
                bad |= np.abs(z - c) < r
            return bad
        return reject

    z = _random_points(rng, n, zmax, zmax, off_balls(np.ones_like(s)))
    za = np.round(z.real)
    r = np.abs(P.ratio(za, z - za))
    q = r / np.sqrt(1 + np.abs(z))
    rep.add(Check("ratio.ratio_upper", "|G1/S| <= sqrt(1+|z|)", float(q.max()), 1.0,
                  bool(q.max() <= 1.0), fitted={"samples": int(z.size)}))
    z = _random_points(rng, n, zmax, zmax, off_balls(2 * np.sqrt(u)))
    za = np.round(z.real)
    r = np.abs(P.ratio(za, z - za))
    rep.add(Check("ratio.ratio_const", "|G1/S| ~ const off B_{2 sqrt(u_n)}(u_n)",
                  [float(r.min()), float(r.max())], None, bool(r.min() > 0 and np.isfinite(r.max())),
                  fitted={"c1": float(r.min()), "c2": float(r.max())}))
    return rep


# -- sigma pairings, membership, kernel growth ---------------------------------------

def lambda_sample(built, lo=10.0, hi=1.0e3, count=40, lam2=None):
    """Points of Lambda with |lam| in [lo, hi]: Lambda_1 in range plus log-spaced Lambda_2."""
    st = built.state
    lams, vals = [], []
    for n, v in enumerate(st.v):
        if lo <= abs(v) <= hi:
            lams.append(("v", n))
            vals.append(v)
    za, zo = lam2 if lam2 is not None else (st.lambda2_a, st.lambda2_o)
    x = za + zo
    idx = np.flatnonzero((np.abs(x) >= lo) & (np.abs(x) <= hi))
    if idx.size:
        targets = np.geomspace(lo, hi, count)
        chosen = sorted({int(idx[np.argmin(np.abs(np.abs(x[idx]) - t))]) for t in targets})
        for i in chosen:
            lams.append(("z", float(za[i]), float(zo[i])))
            vals.append(x[i])
    return lams, np.array(vals)


@_timed
def check_misc(built, R_decay=1.0e3, X=2.0e4, plane=None):
    st = built.state
    sp, F, P = built.space, built.F, built.products
    rep = VerificationReport()
    u = built.lattice.u[:st.trunc]

    # (i) |(sigma, g_lam)| |lam| over |lam| in [10, 1e3]
    zs = find_lambda2(F, R_decay, s_points=u + st.beta)
    lams, lv = lambda_sample(built, lam2=(zs.zeros_a, zs.zeros_o))
    vals, errs, _, _ = pair_columns(sp, lambda a, o: P.g_columns(a, o, lams), sigma_time(), X=X,
                                    windows=F.windows() + P.windows())
    prod = np.abs(vals) * np.abs(lv)
    ratio = float(prod.max() / np.median(prod))
    rep.add(Check("decay.sigma_g", "|(sigma, g_lam)| <= C/|lam|", ratio, 5.0, bool(ratio <= 5.0),
                  fitted={"C": float(prod.max()), "median": float(np.median(prod)),
                          "points": int(len(lams))},
                  error_budget=float(np.max(errs * np.abs(lv)) / np.median(prod))))

    # (ii) membership of g_lam by the plane norm
    plane = plane or PlaneQuadSpec(x_extent=1024.0, y_extent=20.0, y_nodes=32)
    big = PlaneQuadSpec(x_extent=2 * plane.x_extent, y_extent=2 * plane.y_extent,
                        y_nodes=plane.y_nodes + 8)
    weight = WeightSpec.canonical(st.alpha)
    prof = conjugate_profile(weight)
    first = ("z", float(zs.zeros_a[np.argmin(np.abs(zs.values))]),
             float(zs.zeros_o[np.argmin(np.abs(zs.values))]))
    for label, lam in (("v1", ("v", 0)), ("lambda2_first", first)):
        g = GEval(P, lam)
        r1 = plane_norm(sp, g, plane, prof, weight)
        r2 = plane_norm(sp, g, big, prof, weight)
        change = abs(r2["value"] - r1["value"]) / r2["value"]
        ok = bool(np.isfinite(r1["value"]) and r1["value"] > 0 and change <= 0.01)
        rep.add(Check(f"membership.plane_norm_{label}", "g_lam in the space", r1["value"], 0.01, ok,
                      fitted={"refined": r2["value"], "relative_change": change,
                              "captured_fraction": r1["captured_fraction"]}))

    # (iii) |K_0(iy)| e^{-2 h~(y)} bounded on [1, 50]
    ys = np.linspace(1.0, 50.0, 50)
    logk = np.log(np.abs(sp.A(1j * ys))) - math.log(sp.sqrtA0)
    logb = logk - 2.0 * prof.htilde(ys)
    rep.add(Check("growth.kernel", "|K_0(z)| <= C e^{2 h~(y)}", float(np.exp(logb.max())),
                  None, bool(np.all(np.isfinite(logb))),
                  fitted={"C": float(np.exp(logb.max())), "at_y": float(ys[np.argmax(logb)])}))
    return rep


def check_norm_equivalence(space, Q, spec=None, profile=None, weight=None, bounds=(0.1, 10.0)):
    """plane_norm / inner_time for sigma, K_0, K_Q and sigma - K_Q."""
    from .xform import kernel_time
    rep = VerificationReport()
    c = 1.0 / space.sqrtA0
    cases = {"sigma": sigma_time(), "K0": kernel_time(0.0, 0.0, c), "Ku1": kernel_time(Q, 0.0, c),
             "sigma_minus_Ku1": sigma_time() - kernel_time(Q, 0.0, c)}
    for name, f in cases.items():
        it = space.inner_time(f, f).real
        pn = plane_norm(space, TimeRepEval(space, f), spec, profile, weight)
        r = pn["value"] / it
        rep.add(Check(f"equiv.{name}", "plane norm ~ space norm", r, list(bounds),
                      bool(bounds[0] <= r <= bounds[1]),
                      fitted={"plane": pn["value"], "time": it,
                              "captured_fraction": pn["captured_fraction"]}))
    return rep


def run_all(built, plane=None):
    """Every suite; a suite that raises becomes one failed check."""
    rep = VerificationReport()
    suites = [check_contract, check_norm_bound, check_generating, check_ratio,
              functools.partial(check_misc, plane=plane)]
    for fn in suites:
        name = getattr(fn, "__name__", None) or fn.func.__name__
        try:
            rep.extend(fn(built))
        except Exception as exc:  # noqa: BLE001 - reported, not swallowed
            rep.add(Check(f"{name}.error", "suite completed", f"{type(exc).__name__}: {exc}",
                          None, False))
    return rep


# -- defect experiment ---------------------------------------------------------------

ORIENTATIONS = {"L2-L1": ("lambda2", "lambda1"), "L1-L2": ("lambda1", "lambda2")}


@dataclass
class DefectRow:
    R: float
    orientation: str
    candidate: str
    residual: float
    error_budget: float
    inconclusive: bool = False


def _residual(gram, b, cnorm2, floor):
    """Relative distance of a vector to a span from its Gram data."""
    dn = np.sqrt(np.real(np.diag(gram)))
    G = gram / np.outer(dn, dn)
    bb = b / dn
    w, U = np.linalg.eigh(G)
    keep = w > floor * w.max()
    coef = U[:, keep].conj().T @ bb
    proj = float(np.sum(np.abs(coef) ** 2 / w[keep]))
    res2 = max(cnorm2 - proj, 0.0)
    return math.sqrt(res2 / cnorm2), float(w.min()), coef, w[keep]


def defect_experiment(built, R_list=(40.0, 120.0, 250.0, 300.0), orientations=("L2-L1", "L1-L2"),
                      candidates=("F", "H"), X=None, node_budget=2.0e8):
    """Projection residuals of F and H against mixed systems and the kernel control."""
    st = built.state
    sp, F, P = built.space, built.F, built.products
    u = built.lattice.u[:st.trunc]
    Rmax = float(max(R_list))
    if st.R >= Rmax:
        sel = np.abs(st.lambda2) <= Rmax + 0.5
        l2a, l2o = st.lambda2_a[sel], st.lambda2_o[sel]
    else:
        zs = find_lambda2(F, Rmax, s_points=u + st.beta)
        l2a, l2o = zs.zeros_a, zs.zeros_o
    pts = {"lambda2": [("z", float(a), float(o)) for a, o in zip(l2a, l2o)],
           "lambda1": [("v", n) for n, v in enumerate(st.v) if abs(v) <= Rmax + 0.5]}
    absval = {}
    anch = {}
    for lam in pts["lambda2"]:
        absval[lam] = abs(lam[1] + lam[2])
        anch[lam] = (lam[1], lam[2])
    for lam in pts["lambda1"]:
        absval[lam] = abs(st.v[lam[1]])
        anch[lam] = (st.v_a[lam[1]], st.v_o[lam[1]])
    allpts = pts["lambda2"] + pts["lambda1"]
    la = np.array([anch[p][0] for p in allpts])
    lo = np.array([anch[p][1] for p in allpts])
    nk = len(allpts)

    # kernel block and kernel-g block (closed forms)
    Kk = sp.A((la[None, :] - la[:, None]) + (lo[None, :] - lo[:, None])) / sp.A0
    gvals = P.g_columns(la, lo, allpts)                    # [point i, g_j] = g_j(lam_i)
    Kg = np.conj(gvals) / sp.sqrtA0                        # (K_i, g_j)

    # g-g block by the double pairing; two kernel columns ride along as a check
    X = X or 2.0 * Rmax + 64.0
    grid = make_grid(X, 2, F.windows() + P.windows())
    a, o = grid.points()
    probe = [0, nk - 1]
    Vk = sp.A((a[:, None] - la[probe][None, :]) + (o[:, None] - lo[probe][None, :])) / sp.sqrtA0
    V = np.concatenate([P.g_columns(a, o, allpts), Vk], axis=1)
    full = biortho_gram(sp, V, grid, node_budget)
    Gg = full[:nk, :nk]
    gram_err = float(np.max(np.abs(full[probe, nk:].T - Kg[probe][:, probe].T.conj()))
                     / np.max(np.abs(Kg[probe][:, probe])))
    gram_err = max(gram_err, float(np.max(np.abs(full[nk:, nk:] - Kk[np.ix_(probe, probe)]))))

    cand = {"F": F, "H": built.H}
    cnorm2 = {k: built.space.inner_time(v.rep, v.rep).real for k, v in cand.items()}
    ck = {k: v.at(la, lo) / sp.sqrtA0 for k, v in cand.items()}       # (c, K_i)
    cg, cge = {}, {}
    for k, v in cand.items():
        vals, errs, _, _ = pair_columns(sp, lambda a_, o_: P.g_columns(a_, o_, allpts), v.rep,
                                        X=2.0e4, windows=F.windows() + P.windows())
        cg[k] = np.conj(vals)
        cge[k] = errs

    rows = []
    floor = 1e3 * EPS
    families = [(name, ORIENTATIONS[name]) for name in orientations] + [("control", None)]
    for R in sorted(R_list):
        inside = np.array([absval[p] <= R + 0.5 for p in allpts])
        is_l1 = np.array([p[0] == "v" for p in allpts])
        for fam, spec in families:
            if spec is None:
                kern = inside
                gs = np.zeros(nk, dtype=bool)
            else:
                kpart = is_l1 if spec[0] == "lambda1" else ~is_l1
                kern = inside & kpart
                gs = inside & ~kpart
            ki, gi = np.flatnonzero(kern), np.flatnonzero(gs)
            gram = np.block([[Kk[np.ix_(ki, ki)], Kg[np.ix_(ki, gi)]],
                             [Kg[np.ix_(ki, gi)].conj().T, Gg[np.ix_(gi, gi)]]])
            for c in candidates:
                b = np.concatenate([ck[c][ki], cg[c][gi]])
                berr = np.concatenate([np.zeros(ki.size), cge[c][gi]])
                if b.size == 0:
                    rows.append(DefectRow(R, fam, c, 1.0, 0.0))
                    continue
                res, wmin, coef, w = _residual(gram, b, cnorm2[c], floor)
                dn = np.sqrt(np.real(np.diag(gram)))
                x = np.abs(coef) / np.sqrt(w)
                d_res2 = (2 * np.linalg.norm(x) * np.linalg.norm(berr / dn) / math.sqrt(w.min())
                          + np.sum(x ** 2) * gram_err * len(gi) / w.min() * (gi.size > 0))
                budget = d_res2 / cnorm2[c] / max(2 * res, math.sqrt(d_res2 / cnorm2[c]))
                rows.append(DefectRow(R, fam, c, res, float(budget),
                                      inconclusive=bool(wmin < floor or budget > res)))
    return rows, {"gram_check_error": gram_err, "lambda1_points": len(pts["lambda1"]),
                  "lambda2_points": len(pts["lambda2"]), "grid_nodes": grid.size}


def defect_monotone(rows):
    """True when every (orientation, candidate) curve is non-increasing in R."""
    curves = {}
    for r in rows:
        curves.setdefault((r.orientation, r.candidate), []).append((r.R, r.residual))
    ok = True
    for pts in curves.values():
        pts.sort()
        vals = [v for _, v in pts]
        ok &= all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    return bool(ok)
