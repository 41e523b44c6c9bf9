"""Gauss-Jacobi rules and the master integrals A, B.

The master integral ``M_p(u) = int_{-pi}^{pi} e^{iut} (pi-|t|)^p dt`` covers
both transforms of the canonical weight: A = M_alpha (the 1/w moment) and
B = M_{-alpha} (the w moment).
"""
from functools import lru_cache

import numpy as np
from scipy.special import gamma, roots_jacobi

from . import kernels

DEFAULT_NODES = 256
DEFAULT_U0 = 16.0
ASYM_KMAX = 80


class AccuracyLoss(RuntimeError):
    """Quadrature and asymptotic branches disagree in their overlap window."""


@lru_cache(maxsize=64)
def endpoint_rule(n, p):
    """Nodes s_j and weights W_j with sum W_j f(s_j) ~ int_0^pi s^p f(s) ds."""
    x, w = roots_jacobi(int(n), 0.0, float(p))
    s = np.pi * (1.0 + x) / 2.0
    W = (np.pi / 2.0) ** (p + 1.0) * w
    s.setflags(write=False)
    W.setflags(write=False)
    return s, W


def master(u, p, nodes=DEFAULT_NODES, u0=DEFAULT_U0):
    """M_p(u) for scalar or array ``u`` (complex allowed)."""
    s, W = endpoint_rule(nodes, p)
    arr = np.asarray(u, dtype=np.complex128)
    out = kernels.master_integral(np.atleast_1d(arr), float(p), s, W,
                                  float(gamma(1.0 + p)), float(u0), ASYM_KMAX)
    return out.reshape(arr.shape) if arr.ndim else out[0]


def master_overlap_check(p, nodes=DEFAULT_NODES, u0=DEFAULT_U0, tol=1e-6, n=33):
    """Compare both branches over |u| in [u0, 2 u0]; raise on disagreement."""
    s, W = endpoint_rule(nodes, p)
    u = np.linspace(u0, 2.0 * u0, n).astype(np.complex128)
    u = np.concatenate([u, u + 0.5j, -u])
    q = kernels.master_gj(u, s, W)
    a = kernels.master_asym(u, float(p), float(gamma(1.0 + p)), ASYM_KMAX)
    scale = np.maximum(np.abs(q), np.abs(u) ** (-1.0 - p))
    worst = float(np.max(np.abs(q - a) / scale))
    if worst > tol:
        raise AccuracyLoss(f"branch disagreement {worst:.3e} > {tol:g} for p={p}")
    return worst


class Transforms:
    """A(u), B(u) for the canonical weight (pi-|t|)^(-alpha)."""

    def __init__(self, alpha, nodes=DEFAULT_NODES, u0=DEFAULT_U0):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0,1), got {alpha}")
        self.alpha = float(alpha)
        self.nodes = int(nodes)
        self.u0 = float(u0)
        self.A0 = float(master(0.0, self.alpha, self.nodes, self.u0).real)
        self.sqrtA0 = float(np.sqrt(self.A0))

    def A(self, u):
        return master(u, self.alpha, self.nodes, self.u0)

    def B(self, u):
        return master(u, -self.alpha, self.nodes, self.u0)

    def check_overlap(self, tol=1e-6):
        return max(master_overlap_check(self.alpha, self.nodes, self.u0, tol),
                   master_overlap_check(-self.alpha, self.nodes, self.u0, tol))


def sinc_block(d):
    """int_{-pi}^{pi} e^{idt} dt = 2 sin(pi d)/d, with the value 2 pi at d = 0."""
    d = np.asarray(d, dtype=np.complex128)
    out = np.empty_like(d)
    small = np.abs(d) < 1e-6
    ds = d[small]
    out[small] = 2.0 * np.pi * (1.0 - (np.pi * ds) ** 2 / 6.0)
    db = d[~small]
    out[~small] = 2.0 * np.sin(np.pi * db) / db
    return out
