"""The counterexample: lattice, F, its zeros, the products, d_n and H.

Objects are finite sections: every sum and product runs over
n = 1..trunc of the doubling lattice u_n = 2^(n-1) Q, and tail bounds for
the omitted part are reported alongside.
"""
from dataclasses import dataclass, field
import hashlib
import json
import logging
import math

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .xform import (EntireEval, Space, TimeRep, TimeRepEval, pair_columns, sigma_time, split)

log = logging.getLogger(__name__)

STATE_SCHEMA = 1
ZERO_TOL = 1e-10
XTOL = 1e-14
CONTOUR_RADIUS = 0.25
CONTOUR_NODES = 64
NEAR_POLE = 0.05


class ConstructionError(RuntimeError):
    pass


class NoSignChange(ConstructionError):
    def __init__(self, n, lo, hi):
        super().__init__(f"F has no sign change on (u_{n}+1/3, u_{n}+2/3): F = {lo:.3e} .. {hi:.3e}; "
                         "increase Q or the truncation")
        self.n = n


class WindingMismatch(ConstructionError):
    def __init__(self, k, counted, located):
        super().__init__(f"cell at {k:g}: winding number {counted} but {located} real zeros located")
        self.k = k


class PoleMismatch(ConstructionError):
    pass


class DominanceFailure(ConstructionError):
    pass


class OutOfBox(ConstructionError):
    pass


class NudgeExhausted(ConstructionError):
    pass


# -- lattice -------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeParams:
    Q: float
    N_lat: int = 12
    min_Q: float = 64.0

    def __post_init__(self):
        if self.Q != round(self.Q) or self.Q < 2:
            raise ValueError(f"Q must be an integer >= 2 (anchored lattice), got {self.Q}")
        if self.N_lat < 1:
            raise ValueError("N_lat must be positive")

    @property
    def u(self):
        return self.Q * 2.0 ** np.arange(self.N_lat)

    @property
    def small(self):
        """Q below the recommended floor; construction is attempted but may fail."""
        return self.Q < self.min_Q


def geometric_tail(lattice, trunc, power=0.5, coef=2.0):
    """sum_{n > trunc} coef / u_n^power for the infinite doubling lattice."""
    r = 2.0 ** (-power)
    return coef * (lattice.Q * 2.0 ** trunc) ** (-power) / (1.0 - r)


def anchor_of(x):
    a = math.floor(x + 0.5)
    return float(a), float(x - a)


# -- F -------------------------------------------------------------------------

class FEval(TimeRepEval):
    """F = sigma + sum_{n<=trunc} (K_{u_n} - K_{u_n+1}) / sqrt(u_n)."""

    def __init__(self, space, lattice, trunc):
        u = lattice.u[:trunc]
        c = 1.0 / (np.sqrt(u) * space.sqrtA0)
        rep = sigma_time() + TimeRep(np.concatenate([u, u + 1.0]), np.zeros(2 * trunc),
                                     np.concatenate([c, -c]))
        super().__init__(space, rep, kind="Fsum")
        self.lattice = lattice
        self.truncation = trunc
        self.norm_tail = geometric_tail(lattice, trunc)

    def tail_bound(self, za, zo):
        y = np.abs(np.imag(zo))
        kz = np.sqrt(np.abs(self.space.A(2j * y)) / self.space.A0)
        return self.norm_tail * kz

    def windows(self):
        return [(float(u), 64) for u in self.lattice.u[:self.truncation]]

    def real_at(self, a, o):
        return float(self.at(np.array([a]), np.array([o]))[0].real)


def build_F(space, lattice, trunc=None):
    trunc = lattice.N_lat if trunc is None else trunc
    if trunc > lattice.N_lat:
        raise ValueError("trunc exceeds the lattice size")
    return FEval(space, lattice, trunc)


def _refine(F, a, lo, hi, flo, fhi):
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    return brentq(lambda o: F.real_at(a, o), lo, hi, xtol=XTOL, rtol=4 * np.finfo(float).eps,
                  maxiter=200)


def find_betas(F, lattice=None, trunc=None):
    """beta_n in (1/3, 2/3) with F(u_n + beta_n) = 0, found in local offsets."""
    lattice = lattice or F.lattice
    trunc = trunc or F.truncation
    betas = np.empty(trunc)
    for n, u in enumerate(lattice.u[:trunc]):
        lo, hi = 1.0 / 3.0, 2.0 / 3.0
        flo, fhi = F.real_at(u, lo), F.real_at(u, hi)
        if flo * fhi > 0:
            raise NoSignChange(n + 1, flo, fhi)
        b = _refine(F, u, lo, hi, flo, fhi)
        if abs(F.real_at(u, b)) > ZERO_TOL:
            raise PoleMismatch(f"root residual at u_{n + 1}+beta exceeds {ZERO_TOL:g}")
        betas[n] = b
    return betas


def beta_trend(betas):
    """True when |beta_n - 1/2| is non-increasing from n = 3 on."""
    dev = np.abs(np.asarray(betas) - 0.5)
    return bool(np.all(np.diff(dev[2:]) <= 0.0))


# -- zeros of F near the integers -----------------------------------------------

def winding_number(f, a, corners, n0=32, max_rounds=14):
    """Winding number of f around a closed polygon of offsets about anchor ``a``.

    The boundary is sampled adaptively until every argument step is below
    pi/4.
    """
    corners = list(corners) + [corners[0]]
    t = np.linspace(0.0, len(corners) - 1.0, n0 * (len(corners) - 1) + 1)

    def path(tt):
        i = np.minimum(np.floor(tt).astype(int), len(corners) - 2)
        frac = tt - i
        c0 = np.array([corners[j] for j in i])
        c1 = np.array([corners[j + 1] for j in i])
        return c0 + frac * (c1 - c0)

    vals = f(np.full(t.size, a), path(t))
    for _ in range(max_rounds):
        step = np.angle(vals[1:] / vals[:-1])
        bad = np.flatnonzero(np.abs(step) > np.pi / 4)
        if bad.size == 0:
            break
        mids = 0.5 * (t[bad] + t[bad + 1])
        mv = f(np.full(mids.size, a), path(mids))
        t = np.insert(t, bad + 1, mids)
        vals = np.insert(vals, bad + 1, mv)
    else:
        raise WindingMismatch(a, "unresolved", "?")
    total = np.sum(np.angle(vals[1:] / vals[:-1])) / (2 * np.pi)
    w = int(round(total))
    if abs(total - w) > 1e-6:
        raise WindingMismatch(a, f"non-integer {total:.4f}", "?")
    return w


@dataclass
class ZeroSearch:
    zeros_a: np.ndarray
    zeros_o: np.ndarray
    R: float
    cells: int
    audited_zeros: int

    @property
    def values(self):
        return self.zeros_a + self.zeros_o


def _cells(R, s_points):
    """Unit cells [k-1/2, k+1/2] covering [-R, R]; a boundary lying within 0.1 of
    a beta-point is dropped so the point sits inside a merged cell."""
    K = int(math.ceil(R))
    bounds = [k + 0.5 for k in range(-K - 1, K + 1)]
    s = np.asarray(s_points, dtype=float)
    keep = [b for b in bounds if not np.any(np.abs(s - b) < 0.1)]
    return list(zip(keep[:-1], keep[1:]))


def find_lambda2(F, R, s_points=(), samples_per_cell=64, audit=True):
    """Real zeros of F in [-R, R] apart from the beta-points, with a winding audit
    of each cell x [-1, 1]."""
    if R < 3:
        raise ValueError("search radius R must be at least 3")
    s_points = np.asarray(s_points, dtype=float)
    za, zo = [], []
    audited = 0
    cells = _cells(R, s_points)
    for lo, hi in cells:
        a = float(math.floor(0.5 * (lo + hi)))
        olo, ohi = lo - a, hi - a
        grid = np.linspace(olo, ohi, int(samples_per_cell * (hi - lo)) + 1)
        vals = F.at(np.full(grid.size, a), grid).real
        found = []
        for i in range(grid.size - 1):
            if vals[i] == 0.0:
                found.append(grid[i])
            elif vals[i] * vals[i + 1] < 0:
                found.append(_refine(F, a, grid[i], grid[i + 1], vals[i], vals[i + 1]))
        if audit:
            corners = [olo - 1j, ohi - 1j, ohi + 1j, olo + 1j]
            w = winding_number(lambda aa, oo: F.at(aa, oo), a, corners)
            if w != len(found):
                raise WindingMismatch(a, w, len(found))
            audited += w
        for o in found:
            if s_points.size and np.min(np.abs(s_points - (a + o))) < 1e-6:
                continue
            za.append(a)
            zo.append(o)
    za, zo = np.array(za), np.array(zo)
    order = np.argsort(za + zo)
    return ZeroSearch(za[order], zo[order], float(R), len(cells), audited)


def local_scale(F, a, o, radius=1.0, n=33):
    """max |F| over a real neighbourhood; zero tolerances are relative to it."""
    probe = o + np.linspace(-radius, radius, n)
    return float(np.max(np.abs(F.at(np.full(n, a), probe))))


# -- Lambda_1 -------------------------------------------------------------------

def choose_v(F, lattice=None, trunc=None, step=0.1, clearance=0.05, attempts=9):
    """v_n = u_n - sqrt(u_n), nudged by +step while a zero of F is within ``clearance``."""
    lattice = lattice or F.lattice
    trunc = trunc or F.truncation
    va, vo = np.empty(trunc), np.empty(trunc)
    for n, u in enumerate(lattice.u[:trunc]):
        r = math.sqrt(u)
        a = u - math.floor(r)
        o = -(r - math.floor(r))
        if o < -0.5:
            a -= 1.0
            o += 1.0
        for _ in range(attempts):
            probe = o + np.linspace(-clearance, clearance, 11)
            f = F.at(np.full(probe.size, a), probe).real
            tol = ZERO_TOL * local_scale(F, a, o)
            if np.all(f > tol) or np.all(f < -tol):
                break
            o += step
        else:
            raise NudgeExhausted(f"could not place v_{n + 1} away from zeros of F")
        va[n], vo[n] = a, o
    return va, vo


# -- products and biorthogonal functions ---------------------------------------

class Products:
    """S, G1, G2 = F/S, G = G1 G2 and g_lam = G/(z - lam) at anchored points."""

    def __init__(self, F, s_a, s_o, v_a, v_o):
        self.F = F
        self.s_a, self.s_o = np.asarray(s_a, float), np.asarray(s_o, float)
        self.v_a, self.v_o = np.asarray(v_a, float), np.asarray(v_o, float)
        th = 2 * np.pi * (np.arange(CONTOUR_NODES) + 0.5) / CONTOUR_NODES
        self._circle = CONTOUR_RADIUS * np.exp(1j * th)

    def check_poles(self, tol=ZERO_TOL):
        f = self.F.at(self.s_a, self.s_o)
        worst = float(np.max(np.abs(f))) if f.size else 0.0
        if worst > tol:
            raise PoleMismatch(f"|F| = {worst:.3e} at a zero of S (tolerance {tol:g})")
        return worst

    # plain products
    def S(self, za, zo):
        return kernels.lacunary_product(za, zo, self.s_a, self.s_o)

    def G1(self, za, zo, omit=None):
        if omit is None:
            return kernels.lacunary_product(za, zo, self.v_a, self.v_o)
        keep = np.arange(self.v_a.size) != omit
        return kernels.lacunary_product(za, zo, self.v_a[keep], self.v_o[keep])

    def ratio(self, za, zo):
        """G1/S."""
        return self.G1(za, zo) / self.S(za, zo)

    def divided(self, za, zo, ca, co):
        """F(z) / (z - c) for a zero c of F, via a Cauchy mean near c."""
        za = np.asarray(za, float)
        zo = np.asarray(zo, complex)
        out = np.empty(za.shape, dtype=complex)
        dz = (za - ca) + (zo - co)
        near = np.abs(dz) < NEAR_POLE
        far = ~near
        out[far] = self.F.at(za[far], zo[far]) / dz[far]
        if near.any():
            ring = self.F.at(np.full(self._circle.size, ca), co + self._circle)
            d = dz[near][:, None]
            out[near] = np.mean(ring[None, :] / (self._circle[None, :] - d), axis=1)
        return out

    def P(self, za, zo, omit_v=None, fzero=None):
        """F G1 / S, optionally with the G1 factor at v_omit replaced by 1/(z - v)
        (giving g_v) or with F divided by (z - fzero) (giving g at a zero of F)."""
        za, zo = np.broadcast_arrays(np.atleast_1d(np.asarray(za, float)),
                                     np.atleast_1d(np.asarray(zo, complex)))
        za, zo = za.ravel().copy(), zo.ravel().copy()
        # nearest zero of S for each point
        ds = (za[:, None] - self.s_a[None, :]) + (zo[:, None] - self.s_o[None, :])
        n_near = np.full(za.shape, -1)
        if ds.size:
            j = np.argmin(np.abs(ds), axis=1)
            close = np.abs(ds[np.arange(za.size), j]) < NEAR_POLE
            n_near[close] = j[close]
        if fzero is not None:
            fa, fo = fzero
            dz = (za - fa) + (zo - fo)
            if np.any((n_near >= 0) & (np.abs(dz) < NEAR_POLE)):
                raise PoleMismatch("zero of F closer than the contour guard to a zero of S")
            f = self.divided(za, zo, fa, fo)
        else:
            f = self.F.at(za, zo)
        # F / (1 - z/s_n) near s_n: -s_n * F/(z - s_n)
        for n in np.unique(n_near[n_near >= 0]):
            sel = n_near == n
            if fzero is not None:
                raise PoleMismatch("combined removable points are not supported")
            f[sel] = -(self.s_a[n] + self.s_o[n]) * self.divided(za[sel], zo[sel],
                                                                   self.s_a[n], self.s_o[n])
        Sfull = self.S(za, zo)
        for n in np.unique(n_near[n_near >= 0]):
            sel = n_near == n
            keep = np.arange(self.s_a.size) != n
            Sfull[sel] = kernels.lacunary_product(za[sel], zo[sel], self.s_a[keep], self.s_o[keep])
        if omit_v is None:
            g1 = self.G1(za, zo)
        else:
            g1 = -self.G1(za, zo, omit=omit_v) / (self.v_a[omit_v] + self.v_o[omit_v])
        return f * g1 / Sfull

    def g_columns(self, za, zo, lams):
        """g_lam for each ``lam`` in ``lams``: ``('v', n)`` or ``('z', anchor, offset)``."""
        za = np.asarray(za, float)
        zo = np.asarray(zo, complex)
        base = self.P(za, zo)
        out = np.empty((za.size, len(lams)), dtype=complex)
        for j, lam in enumerate(lams):
            if lam[0] == "v":
                n = lam[1]
                la, lo = self.v_a[n], self.v_o[n]
            else:
                la, lo = lam[1], lam[2]
            dz = (za - la) + (zo - lo)
            near = np.abs(dz) < 0.5
            col = np.empty(za.size, dtype=complex)
            col[~near] = base[~near] / dz[~near]
            if near.any():
                if lam[0] == "v":
                    col[near] = self.P(za[near], zo[near], omit_v=lam[1])
                else:
                    col[near] = self.P(za[near], zo[near], fzero=(la, lo))
            out[:, j] = col
        return out

    def windows(self):
        w = [(float(a), 64) for a in self.s_a] + [(float(a), 64) for a in self.v_a]
        return w


class GEval(EntireEval):
    """g_lam = G/(z - lam) as an evaluator."""

    def __init__(self, products, lam):
        self.products = products
        self.lam = lam
        self.kind = f"gfun({lam})"
        self.truncation = products.F.truncation

    def at(self, za, zo):
        za = np.atleast_1d(np.asarray(za, float))
        zo = np.atleast_1d(np.asarray(zo, complex))
        za, zo = np.broadcast_arrays(za, zo)
        return self.products.g_columns(za.ravel(), zo.ravel(), [self.lam])[:, 0].reshape(za.shape)

    def windows(self):
        return self.products.F.windows() + self.products.windows()


class ProductEval(EntireEval):
    def __init__(self, products, which):
        self.products = products
        self.kind = f"product({which})"
        self.which = which

    def at(self, za, zo):
        p = self.products
        if self.which == "S":
            return p.S(za, zo)
        if self.which == "G1":
            return p.G1(za, zo)
        if self.which == "G2":
            return p.P(za, zo) / p.G1(za, zo)
        return p.P(za, zo)


# -- linear system and H -------------------------------------------------------

@dataclass
class LinearSystem:
    A: np.ndarray
    Gamma: np.ndarray
    D: np.ndarray = None
    g_at_u: np.ndarray = None          # (g_{v_n}, K_{u_m}) as [m, n]
    g_sigma: np.ndarray = None         # (g_{v_n}, sigma)
    g_sigma_err: np.ndarray = None
    imag_max: float = 0.0

    @property
    def off_diagonal_sums(self):
        """sum_{m != n} |a_mn| for each equation n."""
        off = np.abs(self.A) * (1.0 - np.eye(self.A.shape[0]))
        return off.sum(axis=0)

    @property
    def dominant(self):
        return bool(np.all(self.off_diagonal_sums < 1.0))


def assemble_system(space, products, lattice, trunc, X=1.0e4):
    """a_mn = (g_n,K_{u_m}) cbrt(u_n) / (cbrt(u_m) (g_n,K_{u_n})),
    gamma_n = -(g_n, sigma) cbrt(u_n) / (g_n, K_{u_n})."""
    u = lattice.u[:trunc]
    lams = [("v", n) for n in range(trunc)]
    gu = products.g_columns(u, np.zeros(trunc), lams) / space.sqrtA0    # [m, n]
    vals, errs, _, _ = pair_columns(space, lambda a, o: products.g_columns(a, o, lams),
                                    sigma_time(), X=X,
                                    windows=products.F.windows() + products.windows())
    cb = np.cbrt(u)
    diag = np.diag(gu)
    A = gu * cb[None, :] / (cb[:, None] * diag[None, :])
    Gamma = -vals * cb / diag
    imag = float(max(np.max(np.abs(A.imag)), np.max(np.abs(Gamma.imag))))
    return LinearSystem(A=A.real.copy(), Gamma=Gamma.real.copy(), g_at_u=gu, g_sigma=vals,
                        g_sigma_err=errs, imag_max=imag)


def solve_d(system):
    if not system.dominant:
        gap = float(np.min(1.0 - system.off_diagonal_sums))
        raise DominanceFailure(f"not diagonally dominant; minimal row gap {gap:.3f}")
    d = np.linalg.solve(system.A.T, system.Gamma)
    system.D = d
    if np.any(np.abs(d) >= 1.0):
        raise OutOfBox(f"max |d_n| = {np.max(np.abs(d)):.4f} >= 1")
    return d


def system_residuals(system, lattice):
    d = system.D
    n = d.size
    scaled = float(np.max(np.abs(d @ system.A - system.Gamma)))
    cb = np.cbrt(lattice.u[:n])
    unscaled = (d / cb) @ system.g_at_u + system.g_sigma
    return {"scaled_inf": scaled, "unscaled_inf": float(np.max(np.abs(unscaled)))}


def H_time(space, lattice, d):
    u = lattice.u[:d.size]
    return sigma_time() + TimeRep(u, np.zeros(d.size), d / (np.cbrt(u) * space.sqrtA0))


class HEval(TimeRepEval):
    def __init__(self, space, lattice, d):
        super().__init__(space, H_time(space, lattice, np.asarray(d, float)), kind="Hsum")
        self.lattice = lattice
        self.truncation = len(d)

    def windows(self):
        return [(float(u), 64) for u in self.lattice.u[:self.truncation]]


def build_H(space, lattice, d):
    return HEval(space, lattice, d)


# -- state ---------------------------------------------------------------------

def config_hash(fields):
    blob = json.dumps(fields, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class ConstructionState:
    alpha: float
    Q: float
    N_lat: int
    trunc: int
    R: float
    beta: np.ndarray
    lambda2_a: np.ndarray
    lambda2_o: np.ndarray
    v_a: np.ndarray
    v_o: np.ndarray
    d: np.ndarray
    A: np.ndarray
    Gamma: np.ndarray
    residuals: dict
    settings: dict
    config_hash: str
    audit: dict = field(default_factory=dict)

    @property
    def lattice(self):
        return LatticeParams(self.Q, self.N_lat)

    @property
    def v(self):
        return self.v_a + self.v_o

    @property
    def lambda2(self):
        return self.lambda2_a + self.lambda2_o

    def to_json(self):
        def arr(x):
            return [float(t) for t in np.ravel(x)]
        doc = {
            "schema": STATE_SCHEMA,
            "config_hash": self.config_hash,
            "alpha": self.alpha, "Q": self.Q, "N_lat": self.N_lat, "trunc": self.trunc,
            "R": self.R,
            "beta": arr(self.beta),
            "lambda2": {"anchor": arr(self.lambda2_a), "offset": arr(self.lambda2_o)},
            "v": {"anchor": arr(self.v_a), "offset": arr(self.v_o)},
            "d": arr(self.d),
            "A": {"shape": list(self.A.shape), "row_major": arr(self.A)},
            "Gamma": arr(self.Gamma),
            "residuals": self.residuals,
            "settings": self.settings,
            "audit": self.audit,
        }
        return json.dumps(doc, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("schema") != STATE_SCHEMA:
            raise ValueError(f"unsupported state schema {doc.get('schema')}")
        shape = tuple(doc["A"]["shape"])
        return cls(alpha=doc["alpha"], Q=doc["Q"], N_lat=doc["N_lat"], trunc=doc["trunc"],
                   R=doc["R"], beta=np.array(doc["beta"]),
                   lambda2_a=np.array(doc["lambda2"]["anchor"]),
                   lambda2_o=np.array(doc["lambda2"]["offset"]),
                   v_a=np.array(doc["v"]["anchor"]), v_o=np.array(doc["v"]["offset"]),
                   d=np.array(doc["d"]), A=np.array(doc["A"]["row_major"]).reshape(shape),
                   Gamma=np.array(doc["Gamma"]), residuals=doc["residuals"],
                   settings=doc["settings"], config_hash=doc["config_hash"],
                   audit=doc.get("audit", {}))


@dataclass
class Built:
    """Live evaluators rebuilt from a state."""
    space: Space
    lattice: LatticeParams
    F: FEval
    H: HEval
    products: Products
    state: ConstructionState


def rebuild(state, nodes=None, u0=None):
    s = state.settings
    space = Space(state.alpha, nodes or s.get("jacobi_nodes", 256), u0 or s.get("u0", 16.0))
    lattice = state.lattice
    F = build_F(space, lattice, state.trunc)
    u = lattice.u[:state.trunc]
    products = Products(F, u, state.beta, state.v_a, state.v_o)
    H = build_H(space, lattice, state.d)
    return Built(space, lattice, F, H, products, state)


def construct(alpha=0.5, Q=256.0, N_lat=12, trunc=None, R=25.0, jacobi_nodes=256, u0=16.0,
              X=1.0e4, hash_fields=None):
    """Run the whole pipeline and return a :class:`ConstructionState`."""
    trunc = trunc or N_lat
    lattice = LatticeParams(float(Q), int(N_lat))
    if lattice.small:
        log.warning("Q = %g is below the recommended floor %g", Q, lattice.min_Q)
    space = Space(alpha, jacobi_nodes, u0)
    space.tr.check_overlap()
    F = build_F(space, lattice, trunc)
    betas = find_betas(F, lattice, trunc)
    u = lattice.u[:trunc]
    zs = find_lambda2(F, R, s_points=u + betas)
    va, vo = choose_v(F, lattice, trunc)
    products = Products(F, u, betas, va, vo)
    products.check_poles()
    system = assemble_system(space, products, lattice, trunc, X=X)
    d = solve_d(system)
    res = system_residuals(system, lattice)
    res["off_diagonal_sums"] = [float(t) for t in system.off_diagonal_sums]
    res["system_imag_max"] = system.imag_max
    res["g_sigma_err_max"] = float(np.max(system.g_sigma_err))
    settings = {"jacobi_nodes": int(jacobi_nodes), "u0": float(u0), "X": float(X),
                "zero_tol": ZERO_TOL, "xtol": XTOL}
    audit = {"cells": zs.cells, "winding_zeros": zs.audited_zeros,
             "lambda2_in_radius": int(zs.zeros_a.size),
             "beta_points_in_radius": int(np.sum(np.abs(u + betas) <= R)),
             "beta_trend_nonincreasing": beta_trend(betas)}
    fields = hash_fields if hash_fields is not None else {
        "alpha": alpha, "Q": Q, "N_lat": N_lat, "trunc": trunc, "R": R,
        "jacobi_nodes": jacobi_nodes, "u0": u0, "X": X}
    return ConstructionState(alpha=float(alpha), Q=float(Q), N_lat=int(N_lat), trunc=int(trunc),
                             R=float(R), beta=betas, lambda2_a=zs.zeros_a, lambda2_o=zs.zeros_o,
                             v_a=va, v_o=vo, d=d, A=system.A, Gamma=system.Gamma, residuals=res,
                             settings=settings, config_hash=config_hash(fields), audit=audit)
