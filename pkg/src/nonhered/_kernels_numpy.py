"""Pure-numpy reference versions of the hot kernels.

Every function here has a numba twin in ``_kernels_numba`` with the same
signature; ``nonhered.kernels`` picks one of the two at import time.
"""
import numpy as np

_CHUNK = 4096


def master_gj(u, s, W):
    """sum_j W_j * 2 cos(u (pi - s_j)) for every entry of ``u``."""
    u = np.asarray(u, dtype=np.complex128)
    out = np.empty(u.shape, dtype=np.complex128)
    flat_u = u.ravel()
    flat_out = out.ravel()
    arg = np.pi - s
    for lo in range(0, flat_u.size, _CHUNK):
        blk = flat_u[lo:lo + _CHUNK]
        flat_out[lo:lo + _CHUNK] = (2.0 * np.cos(np.outer(blk, arg))) @ W
    return out


def master_asym(u, p, gamma_a, kmax):
    """Endpoint expansion of int_{-pi}^{pi} e^{iut} (pi-|t|)^p dt, |u| large."""
    u = np.asarray(u, dtype=np.complex128)
    a = 1.0 + p
    iu = 1j * u
    lead = gamma_a * (np.exp(1j * np.pi * u) * iu ** (-a)
                      + np.exp(-1j * np.pi * u) * (-iu) ** (-a))
    term = 1.0 / iu
    acc = np.zeros_like(u)
    step = 1.0 / (np.pi * iu)
    for k in range(1, kmax + 1):
        term = term * (p - k + 1) * step
        if k % 2 == 1:
            acc = acc + term
            if np.all(np.abs(term) <= 1e-18 * (np.abs(lead) + np.abs(acc))):
                break
    return lead - 2.0 * np.pi ** p * acc


def master_integral(u, p, s, W, gamma_a, u0, kmax):
    u = np.asarray(u, dtype=np.complex128)
    out = np.empty(u.shape, dtype=np.complex128)
    big = np.abs(u) >= u0
    if np.any(big):
        out[big] = master_asym(u[big], p, gamma_a, kmax)
    if not np.all(big):
        out[~big] = master_gj(u[~big], s, W)
    return out


def lacunary_product(za, zo, ca, co):
    """prod_m (c_m - z) / c_m with c_m = ca[m] + co[m] and z = za + zo.

    Differences are formed anchor-first so that a query sitting next to a
    large node loses no digits.
    """
    za = np.asarray(za, dtype=np.float64)
    zo = np.asarray(zo, dtype=np.complex128)
    out = np.ones(np.broadcast(za, zo).shape, dtype=np.complex128)
    for m in range(len(ca)):
        out *= ((ca[m] - za) + (co[m] - zo)) / (ca[m] + co[m])
    return out
