"""Transform model of the space and its inner-product calculus.

Model
-----
Time side: ``||f||^2 = int |f|^2 / w dt`` on (-pi, pi) with the canonical
weight ``w(t) = (pi-|t|)^(-alpha)``.  Frequency side:
``Phi(f)(z) = int f(t)/w(t) e^{itz} dt``.  Under this map

* ``e^{-i lam t}``      is the reproducing kernel ``k_lam(z) = A(z - lam)``,
* ``w(t) e^{-i mu t}``  maps to ``2 sin(pi (z-mu)) / (z-mu)``,
* ``sigma(z) = sin(pi z) / (z(z-1))`` comes from ``-w(t)(1 + e^{-it})/2``.

Points
------
Lattice points reach ~1e8 while the features they carry live on unit
scales, so arguments are passed as an integer-valued *anchor* plus a small
*offset*; differences are formed anchor-first.  ``split`` converts a plain
complex number.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import quad

TWO_PI = 2.0 * np.pi


class TailError(RuntimeError):
    """Fitted decay of a pairing integrand is too slow to truncate safely."""


class BudgetExceeded(RuntimeError):
    pass


# -- anchored arithmetic --------------------------------------------------------

def split(z):
    z = np.asarray(z, dtype=np.complex128)
    a = np.round(z.real)
    return a, z - a


def sinpi(a, o):
    """sin(pi (a + o)) for integer-valued ``a``."""
    sign = 1.0 - 2.0 * np.abs(np.fmod(a, 2.0))
    return sign * np.sin(np.pi * np.asarray(o, dtype=np.complex128))


def sin_over(o):
    """sin(pi o)/o with the removable value pi at o = 0."""
    o = np.asarray(o, dtype=np.complex128)
    out = np.empty_like(o)
    small = np.abs(o) < 1e-4
    x = np.pi * o[small]
    out[small] = np.pi * (1.0 - x * x / 6.0 + x ** 4 / 120.0)
    out[~small] = np.sin(np.pi * o[~small]) / o[~small]
    return out


def sinc_anchored(a, o):
    """2 sin(pi d)/d for d = a + o (the exact cross block), value 2 pi at d = 0."""
    a = np.asarray(a, dtype=np.float64)
    o = np.asarray(o, dtype=np.complex128)
    a, o = np.broadcast_arrays(a, o)
    out = np.empty(a.shape, dtype=np.complex128)
    zero = a == 0
    out[zero] = 2.0 * sin_over(o[zero])
    nz = ~zero
    out[nz] = 2.0 * sinpi(a[nz], o[nz]) / (a[nz] + o[nz])
    return out


# -- time representations -------------------------------------------------------

def _arr(x, dtype):
    return np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=dtype)))


@dataclass
class TimeRep:
    """Finite combination of ``c e^{-i mu t}`` and ``c w(t) e^{-i mu t}`` terms.

    Frequencies are stored as anchor + offset.
    """

    exp_a: np.ndarray = field(default_factory=lambda: np.zeros(0))
    exp_o: np.ndarray = field(default_factory=lambda: np.zeros(0))
    exp_c: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    w_a: np.ndarray = field(default_factory=lambda: np.zeros(0))
    w_o: np.ndarray = field(default_factory=lambda: np.zeros(0))
    w_c: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        self.exp_a = _arr(self.exp_a, np.float64)
        self.exp_o = _arr(self.exp_o, np.float64)
        self.exp_c = _arr(self.exp_c, np.complex128)
        self.w_a = _arr(self.w_a, np.float64)
        self.w_o = _arr(self.w_o, np.float64)
        self.w_c = _arr(self.w_c, np.complex128)

    @classmethod
    def from_terms(cls, exp_terms=(), wexp_terms=()):
        """Build from lists of ``(mu, c)`` or ``(anchor, offset, c)`` tuples."""
        def unpack(terms):
            a, o, c = [], [], []
            for t in terms:
                if len(t) == 2:
                    mu, cc = t
                    aa = float(round(mu))
                    a.append(aa)
                    o.append(float(mu) - aa)
                else:
                    aa, oo, cc = t
                    a.append(float(aa))
                    o.append(float(oo))
                c.append(complex(cc))
            return a, o, c
        ea, eo, ec = unpack(exp_terms)
        wa, wo, wc = unpack(wexp_terms)
        return cls(ea, eo, ec, wa, wo, wc)

    @property
    def exp_terms(self):
        return list(zip((self.exp_a + self.exp_o).tolist(), self.exp_c.tolist()))

    @property
    def wexp_terms(self):
        return list(zip((self.w_a + self.w_o).tolist(), self.w_c.tolist()))

    def is_empty(self):
        return not (np.any(self.exp_c != 0) or np.any(self.w_c != 0))

    def __add__(self, other):
        return TimeRep(np.concatenate([self.exp_a, other.exp_a]),
                       np.concatenate([self.exp_o, other.exp_o]),
                       np.concatenate([self.exp_c, other.exp_c]),
                       np.concatenate([self.w_a, other.w_a]),
                       np.concatenate([self.w_o, other.w_o]),
                       np.concatenate([self.w_c, other.w_c]))

    def __mul__(self, s):
        return TimeRep(self.exp_a, self.exp_o, self.exp_c * s, self.w_a, self.w_o, self.w_c * s)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def __sub__(self, other):
        return self + (-other)


def kernel_time(lam_anchor, lam_offset=0.0, scale=1.0):
    """Time side of ``scale * k_lam``: the exponential ``e^{-i lam t}``."""
    if np.imag(lam_offset) != 0:
        raise ValueError("kernel time representation needs a real frequency")
    return TimeRep([lam_anchor], [np.real(lam_offset)], [scale])


def sigma_time():
    """sigma = Phi(-w (1 + e^{-it}) / 2)."""
    return TimeRep(w_a=[0.0, 1.0], w_o=[0.0, 0.0], w_c=[-0.5, -0.5])


# -- the transform model --------------------------------------------------------

class Space:
    """Transforms, kernels and inner products for one value of alpha."""

    def __init__(self, alpha, nodes=quad.DEFAULT_NODES, u0=quad.DEFAULT_U0):
        self.tr = quad.Transforms(alpha, nodes, u0)
        self.alpha = self.tr.alpha
        self.A0 = self.tr.A0
        self.sqrtA0 = self.tr.sqrtA0

    # frequency-side primitives
    def A(self, u):
        return self.tr.A(u)

    def B(self, u):
        return self.tr.B(u)

    def kernel_eval(self, lam, z, normed=False):
        """k_lam(z) = A(z - lam) (or the unit-norm kernel)."""
        la, lo = split(lam)
        za, zo = split(z)
        val = self.A((za - la) + (zo - lo))
        return val / self.sqrtA0 if normed else val

    def kernel_norm(self, lam=0.0):
        """||k_lam|| = sqrt(k_lam(lam)) = sqrt(A(0)) for real lam."""
        return float(np.sqrt(self.kernel_eval(lam, lam).real))

    def phi(self, f, za, zo):
        """Phi(f) at anchored points."""
        za = np.asarray(za, dtype=np.float64)
        zo = np.asarray(zo, dtype=np.complex128)
        za, zo = np.broadcast_arrays(za, zo)
        out = np.zeros(za.shape, dtype=np.complex128)
        for a, o, c in zip(f.exp_a, f.exp_o, f.exp_c):
            out += c * self.A((za - a) + (zo - o))
        for a, o, c in zip(f.w_a, f.w_o, f.w_c):
            out += c * sinc_anchored(za - a, zo - o)
        return out

    def chi(self, f, xa, xo):
        """chi_f(x) = int f(t) e^{ixt} dt (Fourier side used by the pairings)."""
        xa = np.asarray(xa, dtype=np.float64)
        xo = np.asarray(xo, dtype=np.complex128)
        out = np.zeros(np.broadcast(xa, xo).shape, dtype=np.complex128)
        for a, o, c in zip(f.exp_a, f.exp_o, f.exp_c):
            out += c * sinc_anchored(xa - a, xo - o)
        for a, o, c in zip(f.w_a, f.w_o, f.w_c):
            out += c * self.B((xa - a) + (xo - o))
        return out

    def inner_time(self, f, g):
        """(f, g) = int f conj(g) / w dt via exact block formulas."""
        total = 0j
        # exp - exp
        if f.exp_c.size and g.exp_c.size:
            d = (g.exp_a[None, :] - f.exp_a[:, None]) + (g.exp_o[None, :] - f.exp_o[:, None])
            total += np.sum(f.exp_c[:, None] * np.conj(g.exp_c)[None, :] * self.A(d))
        # cross blocks
        if f.w_c.size and g.exp_c.size:
            da = g.exp_a[None, :] - f.w_a[:, None]
            do = g.exp_o[None, :] - f.w_o[:, None]
            total += np.sum(f.w_c[:, None] * np.conj(g.exp_c)[None, :] * sinc_anchored(da, do))
        if f.exp_c.size and g.w_c.size:
            da = g.w_a[None, :] - f.exp_a[:, None]
            do = g.w_o[None, :] - f.exp_o[:, None]
            total += np.sum(f.exp_c[:, None] * np.conj(g.w_c)[None, :] * sinc_anchored(da, do))
        # w - w
        if f.w_c.size and g.w_c.size:
            d = (g.w_a[None, :] - f.w_a[:, None]) + (g.w_o[None, :] - f.w_o[:, None])
            total += np.sum(f.w_c[:, None] * np.conj(g.w_c)[None, :] * self.B(d))
        return complex(total)

    def norm_time(self, f):
        return math.sqrt(max(self.inner_time(f, f).real, 0.0))

    # evaluators
    def sigma(self, z):
        za, zo = split(z)
        return sigma_anchored(za, zo)

    def kernel_entire(self, lam, normed=True):
        la, lo = split(lam)
        scale = 1.0 / self.sqrtA0 if normed else 1.0
        return TimeRepEval(self, kernel_time(float(la), float(lo.real), scale),
                           kind=f"kernel({float(la + lo.real):g})")

    def sigma_entire(self):
        return SigmaEval()


def sigma_anchored(za, zo):
    """sin(pi z) / (z (z-1)) with removable points z = 0, 1 handled by series."""
    za = np.asarray(za, dtype=np.float64)
    zo = np.asarray(zo, dtype=np.complex128)
    za, zo = np.broadcast_arrays(za, zo)
    out = np.empty(za.shape, dtype=np.complex128)
    m0 = za == 0
    m1 = za == 1
    rest = ~(m0 | m1)
    out[m0] = sin_over(zo[m0]) / (zo[m0] - 1.0)
    out[m1] = -sin_over(zo[m1]) / (1.0 + zo[m1])
    a, o = za[rest], zo[rest]
    out[rest] = sinpi(a, o) / ((a + o) * ((a - 1.0) + o))
    return out


# -- entire-function evaluators ------------------------------------------------

class EntireEval:
    """Entire function evaluated at anchored points, with a truncation bound."""

    kind = "entire"
    truncation = None

    def at(self, za, zo):
        raise NotImplementedError

    def tail_bound(self, za, zo):
        """Rigorous bound on |exact - truncated| at the given points."""
        return np.zeros(np.broadcast(np.asarray(za), np.asarray(zo)).shape)

    def __call__(self, z):
        za, zo = split(z)
        out = self.at(za, zo)
        return out if np.ndim(out) else complex(out)

    def windows(self):
        """Integer anchors (centre, half width) where the function has features
        beyond the core pairing range."""
        return []


class SigmaEval(EntireEval):
    kind = "sigma"

    def at(self, za, zo):
        return sigma_anchored(za, zo)


class TimeRepEval(EntireEval):
    """Phi(f) for a TimeRep f (exact; no truncation)."""

    def __init__(self, space, rep, kind="timerep"):
        self.space = space
        self.rep = rep
        self.kind = kind

    def at(self, za, zo):
        return self.space.phi(self.rep, za, zo)

    def windows(self):
        cents = np.concatenate([self.rep.exp_a, self.rep.w_a])
        return [(float(c), 64) for c in cents]


class ScaledEval(EntireEval):
    """c * g(z) * r(z) for a rational prefactor handled by the caller."""

    def __init__(self, base, scale):
        self.base = base
        self.scale = scale
        self.kind = base.kind

    def at(self, za, zo):
        return self.scale * self.base.at(za, zo)

    def tail_bound(self, za, zo):
        return abs(self.scale) * self.base.tail_bound(za, zo)

    def windows(self):
        return self.base.windows()


# -- real-line grids ------------------------------------------------------------

@dataclass
class LineGrid:
    """Union of unit-anchored intervals sampled at offsets j/m, j = 0..m-1."""

    anchors: np.ndarray
    m: int
    X: float
    windows: list

    @property
    def h(self):
        return 1.0 / self.m

    def points(self):
        a = np.repeat(self.anchors, self.m)
        o = np.tile(np.arange(self.m) / self.m, self.anchors.size)
        return a, o

    @property
    def size(self):
        return self.anchors.size * self.m

    def lattice_index(self):
        a, o = self.points()
        return (a * self.m + np.round(o * self.m)).astype(np.int64)


def make_grid(X, m=2, windows=()):
    """Core [-X, X) plus windows ``(centre, half_width)`` lying outside it."""
    X = int(math.ceil(X))
    pieces = [np.arange(-X, X, dtype=np.float64)]
    kept = []
    for c, w in windows:
        c = float(round(c))
        lo, hi = c - w, c + w
        if hi <= -X or lo >= X:
            pieces.append(np.arange(lo, hi, dtype=np.float64))
            kept.append((c, w))
        elif lo < -X or hi > X:
            pieces.append(np.arange(lo, hi, dtype=np.float64))
            kept.append((c, w))
    anchors = np.unique(np.concatenate(pieces))
    return LineGrid(anchors=anchors, m=int(m), X=float(X), windows=kept)


def feature_mask(x, centres):
    """True away from the neighbourhoods max(64, |c|/4) of feature centres.

    Lattice features carry wings of width ~sqrt|c|; the relative radius keeps
    them out of the far-field fit.
    """
    keep = np.ones(x.shape, dtype=bool)
    for c in centres:
        keep &= np.abs(x - c) > max(64.0, 0.25 * abs(c))
    return keep


def _envelope_fit(xabs, vals, X, keep=None):
    """Power-law fit c x^p to the block maxima of |vals| on [X/8, X]."""
    sel = (xabs >= X / 8.0) & (xabs <= X)
    if keep is not None:
        sel &= keep
    if sel.sum() < 16:
        return 0.0, -np.inf
    edges = np.geomspace(X / 8.0, X, 9)
    xs, ms = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        blk = sel & (xabs >= lo) & (xabs < hi)
        if blk.any():
            mx = np.max(vals[blk])
            if mx > 0:
                xs.append(math.sqrt(lo * hi))
                ms.append(mx)
    if len(xs) < 3:
        return 0.0, -np.inf
    p, logc = np.polyfit(np.log(xs), np.log(ms), 1)
    return math.exp(logc), p


@dataclass
class PairResult:
    value: complex
    error_bound: float
    tail_exponent: float
    nodes: int

    def to_dict(self):
        return {"value": [self.value.real, self.value.imag], "error_bound": self.error_bound,
                "tail_exponent": self.tail_exponent, "nodes": self.nodes}


def _tail_and_edges(grid, x, integrand, tail_floor, keep=None):
    """Truncation budget for one column of lattice integrand values."""
    c, p = _envelope_fit(np.abs(x), np.abs(integrand), grid.X, keep)
    if p > tail_floor:
        raise TailError(f"pairing integrand decays like x^{p:.2f}, need <= {tail_floor}")
    tail = 0.0 if c == 0 else 2.0 * c * grid.X ** (p + 1.0) / (-p - 1.0) / TWO_PI
    edge = 0.0
    for cen, w in grid.windows:
        near = (np.abs(x - (cen - w)) < 1.0) | (np.abs(x - (cen + w - 1)) < 1.0)
        if near.any():
            edge += float(np.max(np.abs(integrand[near]))) * w / TWO_PI
    return tail + edge, p


def pair_columns(space, sampler, f, X=2.0e4, windows=(), m=2, check_m=3, tail_floor=-1.3):
    """(g_j, Phi f) for every column g_j produced by ``sampler(a, o) -> (n, k)``.

    Same rule as :func:`pair_entire`; sharing the grid lets a family of
    functions with common features reuse one set of samples.
    """
    windows = list(windows) + list(TimeRepEval(space, f).windows())

    def run(mm):
        grid = make_grid(X, mm, windows)
        a, o = grid.points()
        V = np.asarray(sampler(a, o))
        if V.ndim == 1:
            V = V[:, None]
        integrand = V * np.conj(space.chi(f, a, o))[:, None]
        return grid, a + o, integrand, integrand.sum(axis=0) / (mm * TWO_PI)

    grid, x, integrand, vals = run(m)
    keep = feature_mask(x, sorted({c for c, _ in windows}))
    k = integrand.shape[1]
    errs = np.empty(k)
    slopes = np.empty(k)
    eps = 64 * np.finfo(float).eps / (m * TWO_PI)
    for j in range(k):
        errs[j], slopes[j] = _tail_and_edges(grid, x, integrand[:, j], tail_floor, keep)
        errs[j] += eps * float(np.sum(np.abs(integrand[:, j])))
    if check_m:
        errs += np.abs(run(check_m)[3] - vals)
    return vals, errs, slopes, grid.size


def pair_entire(space, g, f, X=2.0e4, m=2, tail_floor=-1.3, check_m=3, extra_windows=()):
    """(g, Phi f) = (1/2pi) int g(x) conj(chi_f(x)) dx on a truncated lattice.

    Both factors have exponential type pi, so the lattice sum with step
    1/m < 1 is exact on the whole line; what remains is truncation, which
    is bounded by a fitted power-law tail plus the edges of the windows.
    The rule is repeated with step ``1/check_m`` and the discrepancy is
    folded into the error bound.
    """
    vals, errs, slopes, n = pair_columns(space, g.at, f, X, list(g.windows()) + list(extra_windows),
                                         m, check_m, tail_floor)
    return PairResult(complex(vals[0]), float(errs[0]), float(slopes[0]), int(n))


def _b_on_index_range(space, lo, hi, m):
    k = np.arange(lo, hi + 1, dtype=np.int64)
    a = np.floor_divide(k, m).astype(np.float64)
    o = (k - a.astype(np.int64) * m) / m
    return space.B(a + o)


def biortho_gram(space, samples, grid, node_budget=2.0e8):
    """Gram matrix (g_p, g_q)_w for columns of ``samples`` taken on ``grid``.

    (g1, g2) = (1/2pi)^2 sum_i sum_j h^2 g1(x_i) conj(g2(x_j)) B(x_i - x_j),
    exact for lattice step h < 1 up to truncation.
    """
    n = grid.size
    if float(n) * n > node_budget:
        raise BudgetExceeded(f"{n}^2 node pairs exceed budget {node_budget:g}")
    idx = grid.lattice_index()
    # contiguous runs of lattice indices share one Toeplitz block each
    breaks = np.flatnonzero(np.diff(idx) != 1) + 1
    runs = np.split(np.arange(n), breaks)
    V = np.asarray(samples, dtype=np.complex128)
    if V.ndim == 1:
        V = V[:, None]
    gram = np.zeros((V.shape[1], V.shape[1]), dtype=np.complex128)
    m = grid.m
    for rp in runs:
        ip = idx[rp]
        for rq in runs:
            iq = idx[rq]
            lo = ip[0] - iq[-1]
            hi = ip[-1] - iq[0]
            bvec = _b_on_index_range(space, lo, hi, m)
            T = bvec[(ip[:, None] - iq[None, :]) - lo]
            gram += V[rp].T @ (T @ np.conj(V[rq]))
    return gram / (m * m * TWO_PI * TWO_PI)


def pair_biortho(space, g1, g2, X=400.0, m=2, node_budget=2.0e8):
    windows = list(g1.windows()) + list(g2.windows())
    grid = make_grid(X, m, windows)
    a, o = grid.points()
    V = np.stack([g1.at(a, o), g2.at(a, o)], axis=1)
    G = biortho_gram(space, V, grid, node_budget)
    return complex(G[0, 1])


# -- plane norm -----------------------------------------------------------------

@dataclass
class PlaneQuadSpec:
    x_extent: float = 2048.0
    y_extent: float = 30.0
    x_density: int = 2
    y_nodes: int = 48
    flat_halfwidth: float = None


def plane_norm(space, g, spec=None, profile=None, weight=None):
    """Equivalent norm  int int |g(x+iy)|^2 h~''(y) / K(y) dx dy  (squared).

    The x-integral is a lattice sum (|g(. + iy)|^2 has type 2 pi, exact for
    step < 1); the y-integral is Gauss-Legendre in log|y| over
    flat_halfwidth <= |y| <= y_extent, plus a power-law tail estimate.
    """
    from .weights import WeightSpec, conjugate_profile, K_scaled

    spec = spec or PlaneQuadSpec()
    weight = weight or WeightSpec.canonical(space.alpha)
    profile = profile or conjugate_profile(weight)
    lo = spec.flat_halfwidth or profile.flat_region_halfwidth
    grid = make_grid(spec.x_extent, spec.x_density, g.windows())
    a, o = grid.points()
    s, ws = np.polynomial.legendre.leggauss(spec.y_nodes)
    L0, L1 = math.log(lo), math.log(spec.y_extent)
    ys = np.exp(L0 + (L1 - L0) * (s + 1.0) / 2.0)
    wy = ws * (L1 - L0) / 2.0 * ys
    marg = np.zeros(ys.size)
    for sign in (1.0, -1.0):
        for i, y in enumerate(ys):
            vals = g.at(a, o + 1j * sign * y)
            # |g|^2 / K with the e^{2 pi |y|} growth divided out first
            mass = np.sum(np.abs(vals * math.exp(-math.pi * y)) ** 2) / grid.m
            marg[i] += mass * float(profile.htilde_second(y)) / K_scaled(weight, y)
    total = float(np.sum(wy * marg))
    # the y-marginal must decay over the last decade
    tail_sel = ys > spec.y_extent / 10.0
    slope = np.polyfit(np.log(ys[tail_sel]), np.log(marg[tail_sel]), 1)[0]
    if slope >= -1.0:
        raise TailError(f"y-marginal does not decay (slope {slope:.2f})")
    tail = marg[-1] * ys[-1] / (-slope - 1.0)
    return {"value": total, "tail_estimate": float(tail), "y_slope": float(slope),
            "captured_fraction": total / (total + tail), "nodes": int(grid.size * ys.size * 2)}
