"""Damping-law families f(|u|) and the pointwise inequalities they satisfy.

A damping law is a scalar function f on [0, inf) that multiplies the
velocity pointwise, f(|u|)u.  The solver and the uniqueness diagnostics
rely on a handful of properties: f(0) = 0, f increasing and convex, a
power-type lower bound f(x) >= c*x^p, a Lipschitz bound on bounded
intervals, and a vector monotonicity inequality.  This module evaluates
the laws, certifies those properties on sampled grids, and computes the
sharp Young-splitting constant used by the contraction bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

POLYNOMIAL = "polynomial"
EXPONENTIAL = "exponential"
CUSTOM = "custom"

# relative slack for all pointwise inequality checks (double rounding floor)
INEQ_RTOL = 1e-12


@dataclass
class DampingLaw:
    """A damping function f: [0, inf) -> [0, inf) with derivative access.

    family "polynomial":  f(x) = alpha * x**(beta - 1),  alpha > 0, beta >= 2
    family "exponential": f(x) = alpha * (exp(beta * x**r) - 1),
                          alpha > 0, beta > 0, r >= 1
    family "custom":      caller-supplied eval/deriv pair (no autodiff)
    """

    family: str
    alpha: float = 1.0
    beta: float = 1.0
    r_exp: float = 1.0
    custom_eval: Optional[Callable] = None
    custom_deriv: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        if self.family == POLYNOMIAL:
            if not (self.alpha > 0 and self.beta >= 2):
                raise ValueError(
                    "polynomial law requires alpha > 0 and beta >= 2, got "
                    f"alpha={self.alpha}, beta={self.beta}")
        elif self.family == EXPONENTIAL:
            if not (self.alpha > 0 and self.beta > 0 and self.r_exp >= 1):
                raise ValueError(
                    "exponential law requires alpha > 0, beta > 0, r >= 1, got "
                    f"alpha={self.alpha}, beta={self.beta}, r={self.r_exp}")
        elif self.family == CUSTOM:
            if self.custom_eval is None or self.custom_deriv is None:
                raise ValueError("custom law requires custom_eval and custom_deriv")
        else:
            raise ValueError(f"unknown damping family {self.family!r}")

    # -- constructors -------------------------------------------------

    @staticmethod
    def polynomial(alpha: float, beta: float) -> "DampingLaw":
        return DampingLaw(POLYNOMIAL, alpha=alpha, beta=beta)

    @staticmethod
    def exponential(alpha: float, beta: float, r: float) -> "DampingLaw":
        return DampingLaw(EXPONENTIAL, alpha=alpha, beta=beta, r_exp=r)

    @staticmethod
    def custom(f: Callable, fprime: Callable, name: str = "custom") -> "DampingLaw":
        return DampingLaw(CUSTOM, custom_eval=f, custom_deriv=fprime, name=name)

    @staticmethod
    def zero() -> "DampingLaw":
        """The identically-zero law (plain Navier-Stokes)."""
        return DampingLaw(CUSTOM,
                          custom_eval=lambda x: np.zeros_like(np.asarray(x, float)),
                          custom_deriv=lambda x: np.zeros_like(np.asarray(x, float)),
                          name="zero")

    @property
    def is_zero(self) -> bool:
        return self.family == CUSTOM and self.name == "zero"

    def label(self) -> str:
        if self.family == POLYNOMIAL:
            return f"polynomial(alpha={self.alpha:g}, beta={self.beta:g})"
        if self.family == EXPONENTIAL:
            return (f"exponential(alpha={self.alpha:g}, beta={self.beta:g}, "
                    f"r={self.r_exp:g})")
        return f"custom({self.name})"


def eval_law(law: DampingLaw, x):
    """Evaluate f(x) for scalar or array x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("damping law evaluated at negative x")
    if law.family == POLYNOMIAL:
        out = law.alpha * x ** (law.beta - 1.0)
    elif law.family == EXPONENTIAL:
        # expm1 keeps f(0) = 0 exact and avoids cancellation for small arguments
        with np.errstate(over="ignore"):
            out = law.alpha * np.expm1(law.beta * x ** law.r_exp)
    else:
        out = np.asarray(law.custom_eval(x), dtype=float)
    return out if out.ndim else float(out)


def eval_derivative(law: DampingLaw, x):
    """Evaluate f'(x) for scalar or array x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("damping law derivative evaluated at negative x")
    if law.family == POLYNOMIAL:
        # x**0 == 1 at x=0 covers the beta=2 endpoint
        out = law.alpha * (law.beta - 1.0) * x ** (law.beta - 2.0)
    elif law.family == EXPONENTIAL:
        a, b, r = law.alpha, law.beta, law.r_exp
        with np.errstate(over="ignore"):
            out = a * b * r * x ** (r - 1.0) * np.exp(b * x ** r)
    else:
        out = np.asarray(law.custom_deriv(x), dtype=float)
    return out if out.ndim else float(out)


# -- certification ----------------------------------------------------

@dataclass
class LowerBoundCert:
    """Constants (c, p) for the bound f(x) >= c*x^p with sampled evidence.

    violations holds (x, f(x), c*x^p) triples for every sampled x at which
    the bound failed beyond the rounding slack; empty means the bound held
    at every sampled point up to verified_up_to.
    """

    c: float
    p: float
    verified_up_to: float = 0.0
    violations: list = field(default_factory=list)
    uniqueness_applicable: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class AdmissibilityReport:
    """Sampled evidence that f is increasing, convex and null at zero.

    Each violation is a (x, kind, value) triple, kind in
    {"f(0)!=0", "f'<0", "f' not nondecreasing", "f<0"}.
    """

    x_max: float
    n_samples: int
    violations: list = field(default_factory=list)
    rows: list = field(default_factory=list)  # (x, f(x), f'(x), flag)

    @property
    def ok(self) -> bool:
        return not self.violations


def _mixed_sample_grid(x_max: float, n_samples: int) -> np.ndarray:
    """Geometric points catch x->0 behaviour, uniform points cover the bulk."""
    n_geo = n_samples // 2
    n_lin = n_samples - n_geo
    geo = np.geomspace(x_max * 1e-9, x_max, n_geo)
    lin = np.linspace(x_max / n_lin, x_max, n_lin)
    return np.unique(np.concatenate([geo, lin]))


def verify_admissible(law: DampingLaw, x_max: float, n_samples: int) -> AdmissibilityReport:
    """Sample [0, x_max] and record any violation of the standing hypotheses."""
    if not (x_max > 0):
        raise ValueError("x_max must be positive")
    if n_samples < 3:
        raise ValueError("need at least 3 samples")
    xs = np.concatenate([[0.0], _mixed_sample_grid(x_max, n_samples - 1)])
    fx = eval_law(law, xs)
    dfx = eval_derivative(law, xs)
    report = AdmissibilityReport(x_max=x_max, n_samples=len(xs))

    tol = INEQ_RTOL
    if fx[0] != 0.0:
        report.violations.append((0.0, "f(0)!=0", fx[0]))
    neg = fx < -tol * (1.0 + np.abs(fx))
    for i in np.nonzero(neg)[0]:
        report.violations.append((xs[i], "f<0", fx[i]))
    dneg = dfx < -tol * (1.0 + np.abs(dfx))
    for i in np.nonzero(dneg)[0]:
        report.violations.append((xs[i], "f'<0", dfx[i]))
    # convexity: f' nondecreasing along the sorted sample
    drops = np.nonzero(dfx[1:] < dfx[:-1] - tol * (1.0 + np.abs(dfx[:-1])))[0]
    for i in drops:
        report.violations.append((xs[i + 1], "f' not nondecreasing", dfx[i + 1] - dfx[i]))

    bad = set()
    for x, _, _ in report.violations:
        bad.add(x)
    report.rows = [(x, f, d, int(x in bad)) for x, f, d in zip(xs, fx, dfx)]
    return report


def lower_bound_constants(law: DampingLaw) -> LowerBoundCert:
    """The closed-form (c, p) attached to the polynomial/exponential families.

    polynomial:  p = beta - 1, c = alpha  (exact equality f(x) = c*x^p)
    exponential: p = r + 1,    c = alpha * beta**(r/(r+1)) / (r+1)

    The exponential constant is known to fail for small beta; nothing is
    asserted here, run verify_lower_bound to collect the evidence.  The
    uniqueness flag records whether p > 2 (the contraction argument needs
    it); p == 2 cases (polynomial beta = 3, exponential r = 1) are left
    inapplicable rather than guessed.
    """
    if law.family == POLYNOMIAL:
        c, p = law.alpha, law.beta - 1.0
    elif law.family == EXPONENTIAL:
        r = law.r_exp
        c = law.alpha * law.beta ** (r / (r + 1.0)) / (r + 1.0)
        p = r + 1.0
    else:
        raise ValueError("no closed-form constants for custom laws; "
                         "supply (c, p) manually to verify_lower_bound")
    return LowerBoundCert(c=c, p=p, uniqueness_applicable=p > 2.0)


def verify_lower_bound(law: DampingLaw, c: float, p: float,
                       x_max: float, n_samples: int = 10_000) -> LowerBoundCert:
    """Sample (0, x_max] and record every x at which f(x) < c*x^p."""
    if not (c > 0 and p > 0 and x_max > 0):
        raise ValueError("need c > 0, p > 0, x_max > 0")
    xs = _mixed_sample_grid(x_max, n_samples)
    fx = eval_law(law, xs)
    bound = c * xs ** p
    bad = fx < bound - INEQ_RTOL * (1.0 + bound)
    violations = [(xs[i], fx[i], bound[i]) for i in np.nonzero(bad)[0]]
    return LowerBoundCert(c=c, p=p, verified_up_to=x_max, violations=violations,
                          uniqueness_applicable=p > 2.0)


def monotonicity_gap(law: DampingLaw, u, v, c: float, p: float):
    """Both sides of the vector monotonicity inequality.

    lhs = (f(|u|)u - f(|v|)v) . (u - v)
    rhs = (c/4) (|u|^p + |v|^p) |u - v|^2

    Under a valid lower bound (c, p), lhs >= rhs pointwise.  u and v may be
    single 3-vectors or (..., 3) batches.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu_ = np.linalg.norm(u, axis=-1)
    nv = np.linalg.norm(v, axis=-1)
    fu = np.asarray(eval_law(law, nu_))
    fv = np.asarray(eval_law(law, nv))
    w = u - v
    lhs = np.sum((fu[..., None] * u - fv[..., None] * v) * w, axis=-1)
    rhs = 0.25 * c * (nu_ ** p + nv ** p) * np.sum(w * w, axis=-1)
    if lhs.ndim == 0:
        return float(lhs), float(rhs)
    return lhs, rhs


def lipschitz_gap(law: DampingLaw, x, y, R: float):
    """Both sides of |f(x) - f(y)| <= f'(R)|x - y| on [0, R]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0) or np.any(x > R) or np.any(y > R):
        raise ValueError("lipschitz_gap requires 0 <= x, y <= R")
    lhs = np.abs(eval_law(law, x) - eval_law(law, y))
    rhs = eval_derivative(law, R) * np.abs(x - y)
    if lhs.ndim == 0:
        return float(lhs), float(rhs)
    return lhs, rhs


def young_constant(nu: float, c: float, p: float) -> float:
    """Smallest K with a^2/(4 nu) <= K + (c/2) a^p for all a >= 0.

    K = sup_{a>=0} [a^2/(4 nu) - (c/2) a^p], attained at
    a* = (1/(nu c p))**(1/(p-2)).
    """
    if not (nu > 0 and c > 0):
        raise ValueError("need nu > 0 and c > 0")
    if p <= 2:
        raise ValueError("young_constant needs p > 2 (supremum infinite otherwise)")
    a_star = (1.0 / (nu * c * p)) ** (1.0 / (p - 2.0))
    return a_star ** 2 * (p - 2.0) / (4.0 * nu * p)


# -- plain-text serialization ----------------------------------------

def law_to_text(law: DampingLaw) -> str:
    lines = [f"family = {law.family}"]
    if law.family == POLYNOMIAL:
        lines += [f"alpha = {law.alpha!r}", f"beta = {law.beta!r}"]
    elif law.family == EXPONENTIAL:
        lines += [f"alpha = {law.alpha!r}", f"beta = {law.beta!r}", f"r = {law.r_exp!r}"]
    else:
        lines += [f"name = {law.name}"]
    return "\n".join(lines) + "\n"


def law_from_text(text: str) -> DampingLaw:
    kv = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, val = line.partition("=")
        kv[key.strip()] = val.strip()
    family = kv.get("family", "")
    if family == POLYNOMIAL:
        return DampingLaw.polynomial(float(kv["alpha"]), float(kv["beta"]))
    if family == EXPONENTIAL:
        return DampingLaw.exponential(float(kv["alpha"]), float(kv["beta"]), float(kv["r"]))
    if family == CUSTOM:
        return named_custom_law(kv.get("name", ""))
    raise ValueError(f"cannot parse damping law family {family!r}")


# Named custom laws constructible from plain-text configs.  "sin" is the
# standard inadmissibility negative control; "zero" switches damping off.
_CUSTOM_REGISTRY = {
    "zero": DampingLaw.zero,
    "sin": lambda: DampingLaw.custom(np.sin, np.cos, name="sin"),
}


def named_custom_law(name: str) -> DampingLaw:
    try:
        return _CUSTOM_REGISTRY[name]()
    except KeyError:
        raise ValueError(f"unknown custom law name {name!r}; "
                         f"known: {sorted(_CUSTOM_REGISTRY)}") from None
