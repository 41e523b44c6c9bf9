"""numba versions of the hot kernels (same contracts as ``_kernels_numpy``)."""
import cmath
import math
import os

import numpy as np
from numba import config, njit, prange

# the TBB probe warns on older TBB builds; callers here are single-threaded
if "NUMBA_THREADING_LAYER" not in os.environ:
    config.THREADING_LAYER = "workqueue"


@njit(cache=True, parallel=True)
def _gj_flat(u, s, W, out):
    n = u.size
    m = s.size
    for i in prange(n):
        acc = 0j
        ui = u[i]
        for j in range(m):
            acc += W[j] * 2.0 * cmath.cos(ui * (math.pi - s[j]))
        out[i] = acc


@njit(cache=True)
def _asym_one(u, p, gamma_a, kmax):
    a = 1.0 + p
    iu = 1j * u
    lead = gamma_a * (cmath.exp(1j * math.pi * u) * iu ** (-a)
                      + cmath.exp(-1j * math.pi * u) * (-iu) ** (-a))
    term = 1.0 / iu
    step = 1.0 / (math.pi * iu)
    acc = 0j
    for k in range(1, kmax + 1):
        term = term * (p - k + 1) * step
        if k % 2 == 1:
            acc += term
            if abs(term) <= 1e-18 * (abs(lead) + abs(acc)):
                break
    return lead - 2.0 * math.pi ** p * acc


@njit(cache=True, parallel=True)
def _master_flat(u, p, s, W, gamma_a, u0, kmax, out):
    n = u.size
    m = s.size
    for i in prange(n):
        ui = u[i]
        if abs(ui) >= u0:
            out[i] = _asym_one(ui, p, gamma_a, kmax)
        else:
            acc = 0j
            for j in range(m):
                acc += W[j] * 2.0 * cmath.cos(ui * (math.pi - s[j]))
            out[i] = acc


@njit(cache=True, parallel=True)
def _lacunary_flat(za, zo, ca, co, out):
    n = za.size
    for i in prange(n):
        acc = 1.0 + 0j
        for m in range(ca.size):
            acc *= ((ca[m] - za[i]) + (co[m] - zo[i])) / (ca[m] + co[m])
        out[i] = acc


def master_gj(u, s, W):
    u = np.ascontiguousarray(u, dtype=np.complex128)
    out = np.empty(u.size, dtype=np.complex128)
    _gj_flat(u.ravel(), s, W, out)
    return out.reshape(u.shape)


def master_asym(u, p, gamma_a, kmax):
    u = np.ascontiguousarray(u, dtype=np.complex128)
    out = np.empty(u.size, dtype=np.complex128)
    flat = u.ravel()
    for i in range(flat.size):
        out[i] = _asym_one(flat[i], p, gamma_a, kmax)
    return out.reshape(u.shape)


def master_integral(u, p, s, W, gamma_a, u0, kmax):
    u = np.ascontiguousarray(u, dtype=np.complex128)
    out = np.empty(u.size, dtype=np.complex128)
    _master_flat(u.ravel(), float(p), s, W, float(gamma_a), float(u0), int(kmax), out)
    return out.reshape(u.shape)


def lacunary_product(za, zo, ca, co):
    za, zo = np.broadcast_arrays(np.asarray(za, dtype=np.float64),
                                 np.asarray(zo, dtype=np.complex128))
    shape = za.shape
    za = np.ascontiguousarray(za).ravel()
    zo = np.ascontiguousarray(zo).ravel()
    out = np.empty(za.size, dtype=np.complex128)
    _lacunary_flat(za, zo, np.ascontiguousarray(ca, dtype=np.float64),
                   np.ascontiguousarray(co, dtype=np.float64), out)
    return out.reshape(shape)
