import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonhered import _kernels_numba as nb
from nonhered import _kernels_numpy as npk
from nonhered.quad import (ASYM_KMAX, AccuracyLoss, Transforms, endpoint_rule, master,
                           master_overlap_check, sinc_block)
from scipy.special import gamma


def mp_master(u, p):
    # 2 Re e^{i pi u} int_0^pi s^p e^{-ius} ds, in closed form through 1F1
    mp.mp.dps = 40
    u, p = mp.mpf(u), mp.mpf(p)
    inner = mp.pi ** (p + 1) / (p + 1) * mp.hyp1f1(p + 1, p + 2, -1j * u * mp.pi)
    return float(2 * mp.re(mp.exp(1j * mp.pi * u) * inner))


@pytest.mark.parametrize("p", [0.5, -0.5, 0.3, -0.7])
@pytest.mark.parametrize("u", [0.0, 1.3, 7.5, 15.9, 16.1, 40.0, 333.3])
def test_master_matches_mpmath(p, u):
    ref = mp_master(u, p)
    got = master(u, p)
    assert abs(got.imag) <= 1e-13 * max(1.0, abs(got))
    assert abs(got.real - ref) <= 1e-9 * max(abs(ref), abs(u) ** (-1 - p) if u else 1.0)


def test_A0_B0_closed_forms():
    tr = Transforms(0.5)
    assert tr.A0 == pytest.approx(4.0 / 3.0 * math.pi ** 1.5, rel=1e-12)
    assert tr.A0 == pytest.approx(7.4244372, abs=2e-7)   # quoted value is truncated
    assert tr.B(0.0).real == pytest.approx(4.0 * math.sqrt(math.pi), rel=1e-12)
    for a in (0.3, 0.7):
        t = Transforms(a)
        assert t.A0 == pytest.approx(2 * math.pi ** (1 + a) / (1 + a), rel=1e-10)


def test_overlap_check_passes_and_detects_loss():
    assert Transforms(0.5).check_overlap() < 1e-6
    # a crossover far below the series' range must be refused
    with pytest.raises(AccuracyLoss):
        master_overlap_check(0.5, u0=0.5)


@settings(max_examples=40, deadline=None)
@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_A_even_and_real(u):
    tr = Transforms(0.5)
    a, b = tr.A(u), tr.A(-u)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))
    assert abs(a.imag) <= 1e-12 * max(1.0, abs(a))


def test_sinc_block():
    d = np.array([0.0, 1e-8, 0.5, 1.0, 2.5 + 0.3j])
    ref = np.array([2 * np.pi, 2 * np.pi, 4.0, 0.0, 2 * np.sin(np.pi * d[4]) / d[4]])
    assert np.allclose(sinc_block(d), ref, atol=1e-14)


def test_backends_agree(rng):
    s, W = endpoint_rule(256, 0.5)
    u = np.concatenate([rng.uniform(-16, 16, 500), rng.uniform(16, 1e8, 500),
                        rng.uniform(-40, 40, 200) + 1j * rng.uniform(-3, 3, 200)])
    g = float(gamma(1.5))
    a = nb.master_integral(u.astype(complex), 0.5, s, W, g, 16.0, ASYM_KMAX)
    b = npk.master_integral(u.astype(complex), 0.5, s, W, g, 16.0, ASYM_KMAX)
    assert np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)) < 1e-10
    za = np.round(rng.uniform(-1e4, 1e4, 300))
    zo = rng.uniform(-0.5, 0.5, 300) + 0.2j
    ca, co = 256.0 * 2.0 ** np.arange(12), np.full(12, 0.49)
    pa = nb.lacunary_product(za, zo, ca, co)
    pb = npk.lacunary_product(za, zo, ca, co)
    assert np.allclose(pa, pb, rtol=1e-13, atol=0)


def test_lacunary_product_oracle(rng):
    za = np.round(rng.uniform(-3e3, 3e3, 50))
    zo = rng.uniform(-0.5, 0.5, 50) + 0j
    ca, co = 256.0 * 2.0 ** np.arange(6), np.full(6, 0.4)
    c = ca + co
    z = za + zo
    ref = np.prod(1.0 - z[:, None] / c[None, :], axis=1)
    assert np.allclose(npk.lacunary_product(za, zo, ca, co), ref, rtol=1e-12)


@pytest.mark.parametrize("flag,expected", [("numpy", "numpy"), ("numba", "numba")])
def test_backend_flag(flag, expected):
    import os
    import subprocess
    import sys
    env = dict(os.environ, NONHERED_BACKEND=flag)
    code = "import nonhered; from nonhered.quad import master; print(nonhered.BACKEND, master(3.0, 0.5))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out[0] == expected
    assert complex(out[1]) == pytest.approx(master(3.0, 0.5), rel=1e-12)
