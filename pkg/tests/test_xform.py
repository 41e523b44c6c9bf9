import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nonhered.weights import WeightSpec, K_scaled, legendre_second_closed
from nonhered.xform import (BudgetExceeded, PlaneQuadSpec, Space, TailError, TimeRep,
                            TimeRepEval, kernel_time, make_grid, pair_biortho, pair_entire,
                            plane_norm, sigma_time, sinc_anchored, sinpi, split)

SP = Space(0.5)


def test_split_and_sinpi():
    a, o = split(np.array([1e8 + 0.25, -3.5, 2.0 + 1j]))
    assert list(a) == [1e8, -4.0, 2.0] or list(a) == [1e8, -3.0, 2.0]
    assert np.allclose(a + o, [1e8 + 0.25, -3.5, 2.0 + 1j])
    assert sinpi(1e8, 0.25) == pytest.approx(math.sin(math.pi / 4), rel=1e-15)
    assert sinpi(3.0, 0.5) == pytest.approx(-1.0)
    assert sinc_anchored(0.0, 0.0) == pytest.approx(2 * math.pi)


def test_sigma_values():
    assert SP.sigma(0.5) == pytest.approx(-4.0, abs=1e-14)
    assert SP.sigma(0.0) == pytest.approx(-math.pi, abs=1e-14)
    assert SP.sigma(1.0) == pytest.approx(-math.pi, abs=1e-14)
    k = np.array([-7.0, -1.0, 2.0, 3.0, 1e6])
    assert np.all(np.abs(SP.sigma(k)) <= 1e-12)


def test_phi_sigma_matches_closed_form():
    f = sigma_time()
    for z in (0.5, 2 + 1j, -3.25 + 0.5j):
        a, o = split(z)
        assert SP.phi(f, a, o) == pytest.approx(complex(SP.sigma(z)), abs=1e-10)


def test_sigma_norm_oracle():
    # ||sigma||^2 = int w(t) cos^2(t/2) dt, by a weight='alg' quadrature
    ref, _ = integrate.quad(lambda s: 2 * math.cos((math.pi - s) / 2) ** 2, 0, math.pi,
                            weight="alg", wvar=(-0.5, 0.0), epsabs=0, epsrel=1e-13)
    assert SP.inner_time(sigma_time(), sigma_time()).real == pytest.approx(ref, rel=1e-10)
    assert ref == pytest.approx(2.2191730753, rel=1e-9)


@pytest.mark.parametrize("lam", [0.0, 17.3, 1e5])
def test_kernel_norm(lam):
    assert SP.kernel_norm(lam) ** 2 == pytest.approx(SP.A0, rel=1e-12)
    f = kernel_time(*split(lam))
    assert SP.inner_time(f, f).real == pytest.approx(SP.A0, rel=1e-12)


def test_kernel_translation_and_symmetry(rng):
    lam = rng.uniform(-1e3, 1e3, 20)
    z = rng.uniform(-1e3, 1e3, 20) + 1j * rng.uniform(-2, 2, 20)
    assert np.allclose(SP.kernel_eval(lam, z), SP.kernel_eval(0.0, z - lam), rtol=1e-10)
    mu = rng.uniform(-1e3, 1e3, 20)
    assert np.allclose(SP.kernel_eval(lam, mu), SP.kernel_eval(mu, lam), rtol=1e-12)
    assert np.all(np.abs(SP.kernel_eval(lam, mu).imag) <= 1e-12 * SP.A0)


def test_kernel_decay_slope():
    x = np.geomspace(1e2, 1e4, 400)
    v = np.abs(SP.kernel_eval(0.0, x))
    # the oscillation has period 2; fit the envelope by block maxima
    blocks = np.array_split(np.arange(x.size), 20)
    xm = np.array([x[b].mean() for b in blocks])
    vm = np.array([v[b].max() for b in blocks])
    slope = np.polyfit(np.log(xm), np.log(vm), 1)[0]
    assert -1.6 <= slope <= -1.4


def test_reproducing_identity():
    reps = [sigma_time(), sigma_time() - kernel_time(256.0, 0.0, 0.3),
            TimeRep.from_terms([(3.7, 1.0), (-1.2, 0.5j)], [(0.5, -0.25)])]
    for G in reps:
        for lam in (0.0, 0.5, 256.5):
            a, o = split(lam)
            val = SP.inner_time(G, kernel_time(a, o))
            ref = complex(SP.phi(G, a, o))
            assert abs(val - ref) <= 1e-9 * max(1.0, abs(ref))


reps = st.lists(st.tuples(st.floats(-50, 50), st.floats(-2, 2), st.floats(-2, 2)),
                min_size=1, max_size=4)


@settings(max_examples=40, deadline=None)
@given(reps, reps)
def test_inner_product_properties(e, w):
    f = TimeRep.from_terms([(m, a + 1j * b) for m, a, b in e], [(m, a - 1j * b) for m, a, b in w])
    g = TimeRep.from_terms([(m + 0.3, b) for m, a, b in w])
    ff = SP.inner_time(f, f)
    assert ff.real >= -1e-10 * (1 + abs(ff))
    assert abs(ff.imag) <= 1e-10 * (1 + abs(ff))
    fg, gf = SP.inner_time(f, g), SP.inner_time(g, f)
    assert abs(fg - gf.conjugate()) <= 1e-10 * (1 + abs(fg))


def test_kernel_time_rejects_complex_frequency():
    with pytest.raises(ValueError):
        kernel_time(0.0, 0.5j)


def test_empty_rep_has_zero_norm():
    assert TimeRep().is_empty()
    assert SP.norm_time(TimeRep()) == 0.0
    assert SP.norm_time(kernel_time(2.0)) > 0


def test_pair_entire_kernels():
    g = SP.kernel_entire(3.3, normed=False)
    r = pair_entire(SP, g, kernel_time(17.0, 0.2))
    exact = SP.A(17.2 - 3.3)
    assert abs(r.value - exact) <= max(r.error_bound, 1e-12)
    assert r.error_bound < 1e-5
    assert r.tail_exponent <= -1.3


def test_pair_entire_sigma():
    r = pair_entire(SP, SP.sigma_entire(), sigma_time(), X=2e4)
    exact = SP.inner_time(sigma_time(), sigma_time())
    assert abs(r.value - exact) <= 1e-6


def test_pair_entire_refuses_slow_tail():
    with pytest.raises(TailError):
        pair_entire(SP, SP.kernel_entire(0.0), kernel_time(0.0), tail_floor=-3.0)


def test_pair_biortho_matches_inner_time():
    k1, k2 = SP.kernel_entire(0.3, normed=False), SP.kernel_entire(5.7, normed=False)
    g12 = pair_biortho(SP, k1, k2, X=400)
    g21 = pair_biortho(SP, k2, k1, X=400)
    assert abs(g12 - g21.conjugate()) <= 1e-12 * abs(g12)
    assert abs(g12 - SP.A(5.4)) <= 1e-3 * SP.A0
    g11 = pair_biortho(SP, k1, k1, X=400)
    assert g11.real > 0
    with pytest.raises(BudgetExceeded):
        pair_biortho(SP, k1, k2, X=400, node_budget=10)


def test_grid_windows():
    g = make_grid(100, 2, [(10_000, 64)])
    a, o = g.points()
    x = a + o
    assert g.size == x.size
    assert np.all(np.diff(g.lattice_index()) > 0)
    assert np.any(np.abs(x - 10_000) < 1) and not np.any((x > 200) & (x < 9_000))


def test_plane_norm_kernel_oracle():
    # int |k_0(x+iy)|^2 dx = 2 pi M_{2 alpha}(2iy) = 2 pi (cosh(2 pi y) - 1) / (2 y^2) at alpha=1/2
    spec = PlaneQuadSpec(x_extent=4096.0, y_extent=20.0, y_nodes=48)
    w = WeightSpec.canonical(0.5)
    lo = 0.5 / (2 * math.pi)

    def marginal(y):
        scaled = 2 * math.pi * (0.5 * (1 - math.exp(-2 * math.pi * y)) ** 2) / (2 * y * y)
        return 2 * scaled * legendre_second_closed(0.5, y) / K_scaled(w, y) / SP.A0

    ref, _ = integrate.quad(lambda s: marginal(math.exp(s)) * math.exp(s), math.log(lo),
                            math.log(20.0), epsabs=0, epsrel=1e-11, limit=200)
    got = plane_norm(SP, SP.kernel_entire(0.0), spec)
    assert got["value"] == pytest.approx(ref, rel=1e-3)
    assert got["y_slope"] < -1
    unit = kernel_time(0.0, 0.0, 1 / SP.sqrtA0)
    assert 0.1 <= got["value"] / SP.inner_time(unit, unit).real <= 10


def test_plane_norm_sigma_stable():
    small = plane_norm(SP, SP.sigma_entire(), PlaneQuadSpec(1024.0, 20.0, 2, 32))
    big = plane_norm(SP, SP.sigma_entire(), PlaneQuadSpec(2048.0, 40.0, 2, 40))
    assert small["value"] > 0 and np.isfinite(small["value"])
    assert abs(big["value"] - small["value"]) <= 0.01 * big["value"]


def test_timerep_eval_real_on_axis(rng):
    f = TimeRepEval(SP, sigma_time() - kernel_time(256.0, 0.0, 1 / SP.sqrtA0))
    x = rng.uniform(-1e3, 1e3, 50)
    v = f(x)
    assert np.all(np.abs(v.imag) <= 1e-12 * np.maximum(np.abs(v), 1e-3))
