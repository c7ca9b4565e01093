"""Saddle-point evaluation of semiclassical Gaussian integrals.

Target integrals have the form

    I_{h,r}(u) = integral_{-a}^{a} exp(-xi^2/(2h) + r(xi)/h^alpha) u(xi) dxi

with r holomorphic on a disc of radius > a and alpha in (0, 1).  Writing
h' = h^{1-alpha}, the phase -xi^2/2 + h' r(xi) has a unique critical point
xi_c solving xi = h' r'(xi) near 0 (a contraction for small h'), and

    I_{h,r}(u) = exp(c/h) sqrt(2 pi h) (u(xi_c) + O(h')),
    c = -xi_c^2/2 + h' r(xi_c).

`saddle_estimate` computes the leading term; `quadrature_oracle` evaluates
the same integral by adaptive quadrature so the two can be compared at the
expected O(h^{1-alpha}) relative accuracy.

Derivatives of a HoloFunction without a supplied analytic derivative are
taken with a Cauchy circle rule (trapezoid on a small circle inside the
disc of holomorphy), which is spectrally accurate and stable at complex
evaluation points.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.integrate import quad

from .errors import ConvergenceError, ParameterError

__all__ = [
    "HoloFunction",
    "SaddleResult",
    "find_critical_point",
    "critical_value",
    "saddle_estimate",
    "quadrature_oracle",
    "evaluate",
    "expansion_terms",
]

# nodes for the Cauchy circle derivative; truncation error decays like
# (r_circle / r_holomorphy)^N so 32 nodes is ample for the radii used here
_CAUCHY_NODES = 32


class HoloFunction:
    """A function holomorphic on the disc |z| < radius.

    Parameters
    ----------
    fn : callable
        Evaluates the function at a complex point (vectorization not
        required).
    radius : float
        Radius of a disc centered at 0 on which fn is holomorphic.
    deriv : callable, optional
        Analytic first derivative.  When absent, derivatives are computed
        with the Cauchy circle rule.
    """

    def __init__(self, fn, radius: float, deriv=None):
        if radius <= 0:
            raise ParameterError("radius must be positive")
        self._fn = fn
        self.radius = float(radius)
        self._deriv = deriv

    def __call__(self, z: complex) -> complex:
        return complex(self._fn(z))

    def deriv(self, z: complex, order: int = 1) -> complex:
        """Derivative of the given order at z (inside the disc)."""
        if order < 1:
            raise ParameterError("order must be >= 1")
        z = complex(z)
        if abs(z) >= self.radius:
            raise ParameterError("evaluation point outside disc of holomorphy")
        if order == 1 and self._deriv is not None:
            return complex(self._deriv(z))
        rc = 0.5 * (self.radius - abs(z))
        rc = min(rc, 0.25 * self.radius)
        theta = 2.0 * np.pi * np.arange(_CAUCHY_NODES) / _CAUCHY_NODES
        ring = np.exp(1j * theta)
        samples = np.array([self._fn(z + rc * w) for w in ring], dtype=complex)
        coeff = np.mean(samples * np.exp(-1j * order * theta))
        return complex(coeff * factorial(order) / rc**order)


@dataclass(frozen=True)
class SaddleResult:
    """Critical point, critical value, estimate, and optional oracle data.

    oracle and rel_err are populated by :func:`evaluate`;
    rel_err = |estimate - oracle| / |oracle| whenever oracle is nonzero.
    """

    xi_crit: complex
    c_crit: complex
    estimate: complex
    oracle: complex | None = None
    rel_err: float | None = None


def _check_scales(h: float, alpha: float):
    if h <= 0:
        raise ParameterError("h must be positive")
    if not 0.0 < alpha < 1.0:
        raise ParameterError("alpha must lie in (0, 1)")


def find_critical_point(
    r: HoloFunction,
    h: float,
    alpha: float,
    *,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> complex:
    """Solve xi = h^{1-alpha} r'(xi) by damped Newton iteration.

    The map xi -> h' r'(xi) is required to be a contraction near the
    starting point h' r'(0); its sampled Lipschitz constant must be < 1.
    """
    _check_scales(h, alpha)
    hp = h ** (1.0 - alpha)
    start = hp * r.deriv(0.0)
    # Lipschitz sampling on a ring around the expected fixed point
    ring_radius = min(2.0 * abs(start) + hp, 0.5 * r.radius)
    probes = [0.0 + 0j] + [
        ring_radius * np.exp(2j * np.pi * k / 8) for k in range(8)
    ]
    lip = max(abs(hp * r.deriv(p, order=2)) for p in probes)
    if lip >= 1.0:
        raise ParameterError(
            f"phase is too curved for a contracting fixed point "
            f"(sampled Lipschitz constant {lip:.3g} >= 1)"
        )

    xi = start
    trace = [xi]
    for _ in range(max_iter):
        g = xi - hp * r.deriv(xi)
        if abs(g) < tol:
            return complex(xi)
        gp = 1.0 - hp * r.deriv(xi, order=2)
        step = g / gp
        # damping: halve the step while it fails to reduce |g|
        for _ in range(8):
            cand = xi - step
            if abs(cand) >= r.radius:
                step *= 0.5
                continue
            if abs(cand - hp * r.deriv(cand)) < abs(g):
                break
            step *= 0.5
        xi = xi - step
        trace.append(xi)
    g = xi - hp * r.deriv(xi)
    if abs(g) < tol:
        return complex(xi)
    raise ConvergenceError(
        f"critical-point iteration stalled at residual {abs(g):.3e}",
        diagnostics={"trace": trace, "residual": abs(g)},
    )


def critical_value(r: HoloFunction, h: float, alpha: float, xi_crit: complex) -> complex:
    """Critical value c = -xi_c^2/2 + h^{1-alpha} r(xi_c); I ~ e^{c/h}."""
    _check_scales(h, alpha)
    hp = h ** (1.0 - alpha)
    xi_crit = complex(xi_crit)
    return -(xi_crit**2) / 2.0 + hp * r(xi_crit)


def saddle_estimate(u, r: HoloFunction, h: float, alpha: float, a: float) -> SaddleResult:
    """Leading-order saddle approximation exp(c/h) sqrt(2 pi h) u(xi_c)."""
    _check_scales(h, alpha)
    if not 0 < a < r.radius:
        raise ParameterError("need 0 < a < radius of holomorphy of the phase")
    xi_c = find_critical_point(r, h, alpha)
    c = critical_value(r, h, alpha, xi_c)
    est = np.exp(c / h) * np.sqrt(2.0 * np.pi * h) * complex(u(xi_c))
    return SaddleResult(xi_crit=xi_c, c_crit=c, estimate=complex(est))


def quadrature_oracle(
    u, r, h: float, alpha: float, a: float, *, rel_tol: float = 1e-10
) -> complex:
    """Adaptive quadrature of the defining integral along [-a, a].

    Independent of the saddle machinery: only pointwise evaluations of u
    and r on the real segment are used.
    """
    _check_scales(h, alpha)
    if a <= 0:
        raise ParameterError("a must be positive")

    def integrand(xi: float) -> complex:
        return np.exp(-(xi**2) / (2.0 * h) + complex(r(xi)) / h**alpha) * complex(u(xi))

    re, _ = quad(lambda s: integrand(s).real, -a, a, limit=400, epsabs=0.0, epsrel=rel_tol)
    im, _ = quad(lambda s: integrand(s).imag, -a, a, limit=400, epsabs=0.0, epsrel=rel_tol)
    return complex(re, im)


def evaluate(
    u, r: HoloFunction, h: float, alpha: float, a: float, *, rel_tol: float = 1e-10
) -> SaddleResult:
    """Saddle estimate and quadrature oracle side by side."""
    res = saddle_estimate(u, r, h, alpha, a)
    orc = quadrature_oracle(u, r, h, alpha, a, rel_tol=rel_tol)
    rel = abs(res.estimate - orc) / abs(orc) if orc != 0 else None
    return SaddleResult(
        xi_crit=res.xi_crit,
        c_crit=res.c_crit,
        estimate=res.estimate,
        oracle=orc,
        rel_err=rel,
    )


def expansion_terms(u, r, h: float, alpha: float, order: int) -> tuple[complex, complex]:
    """Leading expansion data (c_1, u_0) = (r(0), sqrt(2 pi) u(0)).

    Only orders 0 and 1 are supported; higher orders are out of scope.
    """
    _check_scales(h, alpha)
    if order not in (0, 1):
        raise ParameterError("expansion supports only order 0 or 1")
    return complex(r(0.0)), complex(np.sqrt(2.0 * np.pi) * complex(u(0.0)))
