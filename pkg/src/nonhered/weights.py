"""Weights of polynomial blow-up type, their modified Legendre conjugates, and K(y).

The canonical weight is ``w_alpha(t) = (pi - |t|)^(-alpha)``.  A perturbed
weight multiplies it by a bounded smooth even factor ``p(|t|)`` given as a
cubic-spline table on ``[0, pi]``.  Everything is written in terms of the
distance ``d = pi - |t|`` to the nearest endpoint so that evaluations near
``+-pi`` do not cancel.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicSpline
from scipy.special import gamma, gammainc

from .quad import DEFAULT_NODES, AccuracyLoss, endpoint_rule

K_CROSSOVER = 8.0
PERTURBED_K_CROSSOVER = 150.0
FLAT_THRESHOLD = 1e-12


class DomainError(ValueError):
    pass


class ClassViolation(ValueError):
    pass


@dataclass(frozen=True)
class Perturbation:
    """Smooth even factor p(|t|) > 0 tabulated on [0, pi]."""

    knots: tuple
    values: tuple

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.size != v.size or k.size < 4:
            raise ValueError("perturbation table needs >= 4 matching knots/values")
        if abs(k[0]) > 0 or abs(k[-1] - np.pi) > 1e-12 or np.any(np.diff(k) <= 0):
            raise ValueError("knots must increase from 0 to pi")
        if np.any(v <= 0):
            raise ValueError("perturbation values must be positive")
        # zero slope at t = 0 keeps the even extension C^1
        object.__setattr__(self, "_spline",
                           CubicSpline(k, v, bc_type=((1, 0.0), "not-a-knot")))

    @classmethod
    def cosine(cls, eps, n=129):
        k = np.linspace(0.0, np.pi, n)
        return cls(tuple(k), tuple(1.0 + eps * np.cos(k)))

    def __call__(self, abs_t, nu=0):
        return self._spline(abs_t, nu)

    def endpoint_taylor(self, order=5):
        """Taylor coefficients of q(s) = 1/p(pi - s) at s = 0."""
        sp = self._spline
        pc = [float(sp(np.pi, k)) * (-1) ** k / math.factorial(k) for k in range(4)]
        pc += [0.0] * (order + 1 - len(pc))
        q = [1.0 / pc[0]]
        for k in range(1, order + 1):
            q.append(-sum(pc[j] * q[k - j] for j in range(1, k + 1)) / pc[0])
        return q


@dataclass(frozen=True)
class WeightSpec:
    alpha: float
    kind: str = "canonical"
    perturbation: Perturbation = None
    comparison_constant: float = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0,1), got {self.alpha}")
        if self.kind not in ("canonical", "perturbed"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "perturbed" and self.perturbation is None:
            raise ValueError("perturbed weight needs a perturbation table")
        if self.comparison_constant is not None and self.comparison_constant <= 0:
            raise ValueError("comparison constant must be positive")

    @classmethod
    def canonical(cls, alpha):
        return cls(alpha=alpha)

    @classmethod
    def perturbed(cls, alpha, perturbation, C=None):
        return cls(alpha=alpha, kind="perturbed", perturbation=perturbation,
                   comparison_constant=C)

    def factor(self, abs_t, nu=0):
        if self.kind == "canonical":
            return np.ones_like(np.asarray(abs_t, dtype=float)) if nu == 0 else \
                np.zeros_like(np.asarray(abs_t, dtype=float))
        return self.perturbation(abs_t, nu)


def weight_from_distance(spec, d):
    """w at |t| = pi - d, for d in (0, pi]."""
    d = np.asarray(d, dtype=float)
    return d ** (-spec.alpha) * spec.factor(np.pi - d)


def eval_weight(spec, t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) >= np.pi):
        raise DomainError("weight is defined on the open interval (-pi, pi)")
    out = weight_from_distance(spec, np.pi - np.abs(t))
    return float(out) if out.ndim == 0 else out


def log_sqrt_weight_from_distance(spec, d):
    """h = ln sqrt(w) as a function of the endpoint distance."""
    return -0.5 * spec.alpha * np.log(d) + 0.5 * np.log(spec.factor(np.pi - d))


# -- modified Legendre transform ---------------------------------------------

def legendre_closed(alpha, y):
    """Closed form of the conjugate of h_alpha = -(alpha/2) ln(pi - |t|)."""
    y = np.abs(np.asarray(y, dtype=float))
    flat = alpha / (2.0 * np.pi)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        outer = np.pi * y - alpha / 2.0 + 0.5 * alpha * np.log(alpha / (2.0 * y))
    out = np.where(y <= flat, 0.5 * alpha * np.log(np.pi), outer)
    return float(out) if out.ndim == 0 else out


def legendre_second_closed(alpha, y):
    y = np.asarray(y, dtype=float)
    flat = alpha / (2.0 * np.pi)
    with np.errstate(divide="ignore"):
        out = np.where(np.abs(y) > flat, alpha / (2.0 * y * y), 0.0)
    return float(out) if out.ndim == 0 else out


def legendre_prime_closed(alpha, y):
    y = np.asarray(y, dtype=float)
    flat = alpha / (2.0 * np.pi)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(y) > flat, np.sign(y) * (np.pi - alpha / (2.0 * np.abs(y))), 0.0)
    return float(out) if out.ndim == 0 else out


def _legendre_min(spec, y):
    """Minimum and minimiser d of y d + h(d) over d in (0, pi].

    Minimised over s = ln d, which keeps minimisers hugging the endpoint
    (d ~ alpha/2y) well resolved.
    """
    y = abs(float(y))

    def m(s):
        d = math.exp(s)
        return y * d + float(log_sqrt_weight_from_distance(spec, d))

    top = math.log(np.pi)
    res = optimize.minimize_scalar(m, bounds=(-60.0, top), method="bounded",
                                   options={"xatol": 1e-10, "maxiter": 500})
    at_top = m(top)
    if at_top <= float(res.fun):
        return at_top, np.pi
    return float(res.fun), math.exp(float(res.x))


def _legendre_remainder(spec, y):
    """r(y) = min_{d in (0, pi]} (y d + h(d)), so that h~(y) = pi |y| - r(|y|)."""
    return _legendre_min(spec, y)[0]


def legendre_argmin(spec, y):
    """Distance pi - |t*| of the maximiser t* in the conjugate (pi on the flat region)."""
    return _legendre_min(spec, y)[1]


def flat_region_numeric(spec, hi=10.0, rtol=1e-12):
    """Largest y whose maximiser sits at t = 0, by bisection on the numeric minimiser."""
    lo = 0.0
    if legendre_argmin(spec, hi) >= np.pi * (1 - 1e-9):
        raise RuntimeError(f"flat region extends beyond y = {hi}")
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if legendre_argmin(spec, mid) >= np.pi * (1 - 1e-9):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def legendre_transform(spec, y):
    """h~(y) = -inf_t (y t + ln sqrt w(t)) by bounded 1-D minimisation."""
    return np.pi * abs(float(y)) - _legendre_remainder(spec, y)


def _second_difference(spec, y):
    # five-point stencil on the remainder; the pi|y| part has zero curvature
    ay = abs(float(y))
    flat = spec.alpha / (2.0 * np.pi)
    h = max(0.02 * ay, 1e-3)
    if ay - 2.0 * h <= flat < ay + 2.0 * h:
        h = max(abs(ay - flat) / 2.5, 1e-7)
    f = [_legendre_remainder(spec, ay + k * h) for k in (-2, -1, 0, 1, 2)]
    return -(-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)


def legendre_second(spec, y):
    """h~''(y): closed form for the canonical weight, finite differences otherwise.

    For a perturbed weight the class bound |h~''| <= C |h~''_alpha| is
    enforced at the evaluation point.
    """
    if spec.kind == "canonical":
        return legendre_second_closed(spec.alpha, y)
    val = _second_difference(spec, y)
    if abs(val) < FLAT_THRESHOLD:
        val = 0.0
    ref = legendre_second_closed(spec.alpha, y)
    C = spec.comparison_constant
    if C is not None and abs(val) > C * abs(ref) + 1e-9:
        raise ClassViolation(
            f"|h~''({y})| = {abs(val):.3e} exceeds C|h~''_alpha| = "
            f"{C * abs(ref):.3e}")
    return val


@dataclass
class ConjugateProfile:
    htilde: object
    htilde_prime: object
    htilde_second: object
    flat_region_halfwidth: float
    spec: WeightSpec = field(default=None, repr=False)


def conjugate_profile(spec):
    a = spec.alpha
    if spec.kind == "canonical":
        return ConjugateProfile(
            htilde=lambda y: legendre_closed(a, y),
            htilde_prime=lambda y: legendre_prime_closed(a, y),
            htilde_second=lambda y: legendre_second_closed(a, y),
            flat_region_halfwidth=a / (2.0 * np.pi),
            spec=spec,
        )

    def prime(y, h=1e-4):
        return (legendre_transform(spec, y + h) - legendre_transform(spec, y - h)) / (2 * h)

    # the flat region is where the minimiser sits at t = 0: y <= h'(0+)
    d0 = np.pi
    slope0 = 0.5 * a / d0 + 0.5 * float(spec.factor(0.0, 1)) / float(spec.factor(0.0))
    return ConjugateProfile(
        htilde=lambda y: legendre_transform(spec, y),
        htilde_prime=prime,
        htilde_second=lambda y: legendre_second(spec, y),
        flat_region_halfwidth=max(slope0, 0.0),
        spec=spec,
    )


def rho_integral(profile, x, rho):
    """int_{x-rho}^{x+rho} |h~'(x) - h~'(t)| dt.

    h~ is convex, so h~' is monotone and the integral collapses to the
    symmetric second difference of h~ itself.
    """
    h = profile.htilde
    return float(h(x + rho) + h(x - rho) - 2.0 * h(x))


def solve_rho(profile, x, tol=1e-8, rho_cap=1e6):
    """rho(x) with int_{x-rho}^{x+rho} |h~'(x) - h~'(t)| dt = 1, by bracketing."""
    x = abs(float(x))
    if rho_integral(profile, x, rho_cap) < 1.0:
        raise RuntimeError(f"defining integral stays below 1 up to rho = {rho_cap:g}")
    lo, hi = 0.0, 1.0
    while rho_integral(profile, x, hi) < 1.0:
        lo, hi = hi, 2.0 * hi
    root = optimize.brentq(lambda r: rho_integral(profile, x, r) - 1.0, lo, hi,
                           xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(rho_integral(profile, x, root) - 1.0) > tol:
        raise RuntimeError("rho bisection did not meet tolerance")
    return root


# -- K(y) ---------------------------------------------------------------------

def _q_values(spec, s):
    return 1.0 / spec.factor(np.pi - s)


def K_scaled_quadrature(spec, y, nodes=DEFAULT_NODES):
    """K(y) e^{-2 pi |y|} by Gauss-Jacobi with the (pi-|t|)^alpha factor in the rule."""
    y = abs(float(y))
    s, W = endpoint_rule(nodes, spec.alpha)
    f = np.exp(-2.0 * y * s) + np.exp(-2.0 * y * (2.0 * np.pi - s))
    return float(np.sum(W * _q_values(spec, s) * f))


def K_scaled_asymptotic(spec, y):
    """Endpoint (Watson) expansion of K(y) e^{-2 pi |y|} and a remainder estimate.

    Terms that are O(e^{-2 pi |y|}) relative to the leading one are dropped.
    """
    y = abs(float(y))
    a = spec.alpha
    if spec.kind == "canonical":
        q = [1.0]
    else:
        q = spec.perturbation.endpoint_taylor(6)
    terms = [q[k] * gamma(a + 1.0 + k) / (2.0 * y) ** (a + 1.0 + k) for k in range(len(q))]
    val = float(sum(terms))
    if spec.kind == "canonical":
        rem = math.exp(-2.0 * math.pi * y) * abs(val)
    else:
        rem = abs(terms[-1]) + abs(terms[-2])
    return val, rem


def K_scaled(spec, y, nodes=DEFAULT_NODES, overlap_tol=1e-6):
    y = abs(float(y))
    cross = K_CROSSOVER if spec.kind == "canonical" else PERTURBED_K_CROSSOVER
    if y < cross:
        return K_scaled_quadrature(spec, y, nodes)
    val, _ = K_scaled_asymptotic(spec, y)
    if y <= 2.0 * cross:
        q = K_scaled_quadrature(spec, y, nodes)
        if abs(q - val) > overlap_tol * abs(val):
            raise AccuracyLoss(f"K branches disagree at y={y}: {q!r} vs {val!r}")
    return val


def log_K(spec, y, nodes=DEFAULT_NODES):
    return math.log(K_scaled(spec, y, nodes)) + 2.0 * math.pi * abs(float(y))


def K_eval(spec, y, nodes=DEFAULT_NODES):
    """K(y) = int e^{-2yt} / w(t) dt (overflows to inf for |y| beyond ~110)."""
    with np.errstate(over="ignore"):
        return float(np.exp(log_K(spec, y, nodes)))


def K_ratio(spec, y, nodes=DEFAULT_NODES):
    """r(y) = K(y) |y|^{1+alpha} e^{-2 pi |y|}."""
    y = abs(float(y))
    return K_scaled(spec, y, nodes) * y ** (1.0 + spec.alpha)


def I_eps_direct(alpha, a, eps):
    if eps > alpha / a:
        raise ValueError("need eps <= alpha/a so that alpha/a - t stays non-negative")
    val, _ = integrate.quad(lambda t: math.exp(a * t) * (alpha / a - t) ** alpha, 0.0, eps,
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def I_eps_gamma(alpha, a, eps):
    """Same integral through the incomplete gamma substitution tau = alpha - a t."""
    if eps > alpha / a:
        raise ValueError("need eps <= alpha/a so that alpha/a - t stays non-negative")
    lo = alpha - eps * a
    inner = gamma(alpha + 1.0) * (gammainc(alpha + 1.0, alpha) - gammainc(alpha + 1.0, lo))
    return math.exp(alpha) / a ** (alpha + 1.0) * inner


def K_asymptotic_report(spec, y_grid, eps_frac=0.5):
    y_grid = np.asarray(y_grid, dtype=float)
    if np.any(np.diff(y_grid) <= 0) or y_grid.min() < 10:
        raise ValueError("y_grid must be increasing with min >= 10")
    rows = []
    for y in y_grid:
        ks = K_scaled(spec, y)
        a = 2.0 * y
        eps = eps_frac * spec.alpha / a
        rows.append({
            "y": float(y),
            "K_scaled": ks,
            "log_K": math.log(ks) + 2.0 * math.pi * y,
            "ratio": ks * y ** (1.0 + spec.alpha),
            "I_eps_direct": I_eps_direct(spec.alpha, a, eps),
            "I_eps_gamma": I_eps_gamma(spec.alpha, a, eps),
        })
    ratios = np.array([r["ratio"] for r in rows])
    return {"rows": rows, "c1": float(ratios.min()), "c2": float(ratios.max()),
            "spread": float(ratios.max() / ratios.min())}


# -- class membership ---------------------------------------------------------

def check_class(spec, nodes=DEFAULT_NODES):
    """Numerically verify the three defining conditions of the weight class."""
    violations = []
    a = spec.alpha

    # 1. integrability of w and 1/w (the singular factor is inside the rule)
    s, W = endpoint_rule(nodes, -a)
    int_w = 2.0 * float(np.sum(W * spec.factor(np.pi - s)))
    s2, W2 = endpoint_rule(nodes, a)
    int_inv_w = 2.0 * float(np.sum(W2 / spec.factor(np.pi - s2)))
    t_probe = np.linspace(-np.pi, np.pi, 2001)[1:-1]
    wv = eval_weight(spec, t_probe)
    if not (np.all(np.isfinite(wv)) and np.all(wv > 0)):
        violations.append("w is not strictly positive and finite on (-pi, pi)")
    if not np.allclose(wv, wv[::-1], rtol=1e-13, atol=0):
        violations.append("w is not even")
    if not (np.isfinite(int_w) and np.isfinite(int_inv_w)):
        violations.append("w or 1/w not integrable")

    # 2. convexity of h = ln sqrt w on each half, then the curvature comparison
    d = np.pi - np.linspace(0.0, np.pi, 4001)[1:-1][::-1]
    d = np.concatenate([np.geomspace(1e-8, d[0], 200, endpoint=False), d])
    hv = log_sqrt_weight_from_distance(spec, d)
    # non-uniform second divided difference
    h1, h2 = np.diff(d)[:-1], np.diff(d)[1:]
    dd = 2.0 * (h1 * hv[2:] - (h1 + h2) * hv[1:-1] + h2 * hv[:-2]) / (h1 * h2 * (h1 + h2))
    min_curv = float(dd.min())
    if min_curv < -1e-9:
        violations.append(f"h = ln sqrt w is not convex (min second difference {min_curv:.3e})")
    # kink at t = 0 must open upward: h'(0+) >= 0
    slope0 = 0.5 * a / np.pi + 0.5 * float(spec.factor(0.0, 1)) / float(spec.factor(0.0))
    if slope0 < -1e-12:
        violations.append("h has a concave kink at t = 0")

    y_grid = np.concatenate([np.geomspace(0.2, 1e3, 60)])
    if spec.kind == "canonical":
        curv_const = 1.0
    else:
        ratios = []
        for y in y_grid:
            val = _second_difference(spec, y)
            ref = legendre_second_closed(a, y)
            if ref > 0:
                ratios.append(abs(val) / ref)
            elif abs(val) > FLAT_THRESHOLD:
                violations.append(f"h~'' nonzero at y={y} inside the canonical flat region")
        curv_const = float(max(ratios))
        # the ratio must settle to a finite limit at large |y|
        if not np.isfinite(curv_const) or abs(ratios[-1] - ratios[-5]) > 1e-2 * ratios[-1]:
            violations.append("curvature ratio does not stabilise at large |y|")
    C = spec.comparison_constant
    if C is not None and curv_const > C * (1 + 1e-6):
        violations.append(f"curvature comparison constant {curv_const:.4f} exceeds C = {C}")

    # 3. w <= C w_alpha near the endpoints
    dn = np.geomspace(1e-10, 0.1, 400)
    growth_const = float(np.max(spec.factor(np.pi - dn)))
    if not np.isfinite(growth_const):
        violations.append("w / w_alpha unbounded near the endpoints")
    if C is not None and growth_const > C * (1 + 1e-9):
        violations.append(f"endpoint comparison constant {growth_const:.4f} exceeds C = {C}")

    return {
        "alpha": a,
        "kind": spec.kind,
        "int_w": int_w,
        "int_inv_w": int_inv_w,
        "min_second_difference_h": min_curv,
        "curvature_constant": curv_const,
        "endpoint_constant": growth_const,
        "violations": violations,
        "passed": not violations,
    }
