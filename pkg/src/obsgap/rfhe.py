"""Coherent-state solutions of the rotated fractional heat equation.

The adjoint model is (d_t + conj(z) (-Laplace)^{alpha/2}) g = 0 with
Re(z) > 0 and alpha in [0, 1), posed on the line or on the torus.  On the
frequency side the flow is the multiplier exp(-t conj(z) |xi|^alpha /
h^alpha) acting on the semiclassical transform, and on the torus it is
exp(-t conj(z) |n|^alpha) acting on Fourier coefficients.

Initial states are band-limited Gaussian coherent states: the transform of
phi_{xi0,h}(x) = (pi h)^{-1/4} exp(i x xi0 / h - x^2 / (2 h)) is the
Gaussian (pi h)^{-1/4} exp(-(xi - xi0)^2 / (2 h)), which is multiplied by
a smooth cutoff chi(xi - xi0) equal to 1 for |xi - xi0| <= xi0/4 and 0 for
|xi - xi0| >= xi0/2.  The frequency support then stays inside
[xi0/2, 3 xi0/2], away from the singularity of |xi|^alpha at 0, and is
invariant under the flow.

`verify_pointwise_bounds` measures the two pointwise features that drive
the observability experiments: the exterior sup M_out(h) of |x|^2 |g_h|
over |x| > eps, whose logarithm must fall off linearly in 1/h, and the
interior defect M_in(h) = h^alpha sup |log|g_h| + x^2/(2h)| over
|x| < xi0/8, which must stay bounded along an h-sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .spectral_core import (
    FREQUENCY,
    FourierCoeffs,
    Grid1D,
    SampledField,
    inverse_semiclassical_fourier,
)

__all__ = [
    "EvolutionParams",
    "CoherentStateSpec",
    "CutoffSpec",
    "smooth_step",
    "cutoff_eval",
    "coherent_state",
    "frequency_profile",
    "default_frequency_grid",
    "bandlimited_state",
    "evolve_line",
    "evolve_torus",
    "PointwiseBoundReport",
    "verify_pointwise_bounds",
]


@dataclass(frozen=True)
class EvolutionParams:
    """Fractional order alpha in [0, 1), rotation z with Re(z) > 0, horizon T."""

    alpha: float
    z: complex
    T: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ParameterError("alpha must lie in [0, 1)")
        if complex(self.z).real <= 0.0:
            raise ParameterError("z must have positive real part")
        if self.T <= 0.0:
            raise ParameterError("T must be positive")


@dataclass(frozen=True)
class CoherentStateSpec:
    """Center frequency xi0 > 0 and semiclassical parameter h > 0."""

    xi0: float
    h: float

    def __post_init__(self):
        if self.xi0 <= 0.0:
            raise ParameterError("xi0 must be positive")
        if self.h <= 0.0:
            raise ParameterError("h must be positive")


@dataclass(frozen=True)
class CutoffSpec:
    """Plateau and support radii of the even C^infinity cutoff."""

    inner: float
    outer: float

    def __post_init__(self):
        if not 0.0 < self.inner < self.outer:
            raise ParameterError("cutoff requires 0 < inner < outer")

    @classmethod
    def for_xi0(cls, xi0: float) -> "CutoffSpec":
        """Standard radii xi0/4 and xi0/2, keeping the band inside (0, 2 xi0)."""
        return cls(inner=xi0 / 4.0, outer=xi0 / 2.0)


def _bump(t: np.ndarray) -> np.ndarray:
    # exp(-1/t) continued by 0 for t <= 0
    out = np.zeros_like(t)
    pos = t > 0.0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t) -> np.ndarray:
    """C^infinity monotone step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    a = _bump(t)
    b = _bump(1.0 - t)
    # a + b > 0 everywhere: at least one branch is active for every t
    out = a / (a + b)
    return out[0] if scalar else out


def cutoff_eval(cut: CutoffSpec, s) -> np.ndarray:
    """Even cutoff chi(s): 1 on [-inner, inner], 0 outside (-outer, outer)."""
    s = np.abs(np.asarray(s, dtype=float))
    return smooth_step((cut.outer - s) / (cut.outer - cut.inner))


def coherent_state(cs: CoherentStateSpec, grid: Grid1D) -> SampledField:
    """phi_{xi0,h}(x) = (pi h)^{-1/4} exp(i x xi0 / h - x^2 / (2 h))."""
    x = grid.nodes()
    vals = (np.pi * cs.h) ** -0.25 * np.exp(1j * x * cs.xi0 / cs.h - x**2 / (2.0 * cs.h))
    return SampledField(grid, vals)


def frequency_profile(cs: CoherentStateSpec, cut: CutoffSpec, xi: np.ndarray) -> np.ndarray:
    """Band-limited Gaussian profile chi(xi-xi0) (pi h)^{-1/4} e^{-(xi-xi0)^2/2h}."""
    xi = np.asarray(xi, dtype=float)
    gauss = (np.pi * cs.h) ** -0.25 * np.exp(-((xi - cs.xi0) ** 2) / (2.0 * cs.h))
    return cutoff_eval(cut, xi - cs.xi0) * gauss


def default_frequency_grid(
    cs: CoherentStateSpec, cut: CutoffSpec, x_max: float, n_min: int = 1025
) -> Grid1D:
    """Frequency grid covering the cutoff support and resolving exp(i x xi / h).

    The spacing obeys d_xi <= h / (8 x_max) so the inverse transform kernel
    is well sampled out to the largest requested |x|.
    """
    lo, hi = cs.xi0 - cut.outer, cs.xi0 + cut.outer
    width = hi - lo
    n = n_min
    if x_max > 0:
        n = max(n, int(np.ceil(width * 8.0 * x_max / cs.h)) + 1)
    return Grid1D(lo, hi, n)


def _synthesize(
    cs: CoherentStateSpec,
    cut: CutoffSpec,
    x_grid: Grid1D,
    multiplier=None,
    n_freq: int | None = None,
) -> SampledField:
    x_max = float(np.max(np.abs(x_grid.nodes())))
    fgrid = default_frequency_grid(cs, cut, x_max, n_min=n_freq or 1025)
    xi = fgrid.nodes()
    vals = frequency_profile(cs, cut, xi).astype(complex)
    if multiplier is not None:
        vals = vals * multiplier(xi)
    fhat = SampledField(fgrid, vals, side=FREQUENCY)
    return inverse_semiclassical_fourier(fhat, cs.h, x_grid)


def bandlimited_state(
    cs: CoherentStateSpec, cut: CutoffSpec, grid: Grid1D, *, n_freq: int | None = None
) -> SampledField:
    """Initial state g_{0,h} = F_h^{-1}(chi(. - xi0) F_h(phi_{xi0,h}))."""
    return _synthesize(cs, cut, grid, multiplier=None, n_freq=n_freq)


def evolve_line(
    cs: CoherentStateSpec,
    cut: CutoffSpec,
    evo: EvolutionParams,
    t: float,
    x_grid: Grid1D,
    *,
    n_freq: int | None = None,
) -> SampledField:
    """Line solution at time t >= 0 via the frequency-side multiplier."""
    if t < 0:
        raise ParameterError("t must be nonnegative")
    zbar = np.conj(complex(evo.z))
    h, alpha = cs.h, evo.alpha

    def multiplier(xi):
        # the band excludes xi = 0, so |xi|^alpha is smooth on the support
        return np.exp(-t * zbar * np.abs(xi) ** alpha / h**alpha)

    return _synthesize(cs, cut, x_grid, multiplier=multiplier, n_freq=n_freq)


def evolve_torus(c0: FourierCoeffs, evo: EvolutionParams, t: float) -> FourierCoeffs:
    """Torus solution coefficients c_n(t) = c_n(0) exp(-t conj(z) |n|^alpha)."""
    if t < 0:
        raise ParameterError("t must be nonnegative")
    zbar = np.conj(complex(evo.z))
    n = c0.modes()
    mult = np.exp(-t * zbar * np.abs(n).astype(float) ** evo.alpha)
    return FourierCoeffs(c0.n_min, c0.n_max, c0.c * mult)


@dataclass
class PointwiseBoundReport:
    """Exterior/interior pointwise diagnostics along an h-sweep.

    m_out[i] = sup_{|x| > eps} |x|^2 |g_h(t, x)| and
    m_in[i] = h^alpha sup_{|x| < xi0/8} |log|g_h(t, x)| + x^2/(2h)|
    for h = h_list[i].
    """

    h_list: np.ndarray
    m_out: np.ndarray
    m_in: np.ndarray
    eps: float
    t: float

    @property
    def h_log_m_out(self) -> np.ndarray:
        return self.h_list * np.log(self.m_out)

    @property
    def slope_out(self) -> float:
        """Fitted slope of log m_out against 1/h; negative means decay."""
        return float(np.polyfit(1.0 / self.h_list, np.log(self.m_out), 1)[0])

    @property
    def max_in(self) -> float:
        return float(np.max(self.m_in))


def verify_pointwise_bounds(
    cs: CoherentStateSpec,
    cut: CutoffSpec,
    evo: EvolutionParams,
    h_list,
    eps: float,
    *,
    t: float = 1.0,
    x_far: float = 6.0,
    n_arc: int | None = None,
    n_inner: int = 801,
) -> PointwiseBoundReport:
    """Measure the exterior and interior pointwise estimates along a sweep.

    cs supplies the center frequency; its h is superseded by each h_list
    entry in turn.
    """
    h_arr = np.asarray(list(h_list), dtype=float)
    if h_arr.size < 2:
        raise ParameterError("need at least two h values to fit a slope")
    if np.any(h_arr <= 0):
        raise ParameterError("h values must be positive")
    if eps <= 0:
        raise ParameterError("eps must be positive")
    m_out = np.empty(h_arr.size)
    m_in = np.empty(h_arr.size)
    for i, h in enumerate(h_arr):
        csh = CoherentStateSpec(cs.xi0, float(h))
        n_pts = n_arc or max(1001, int(np.ceil((x_far - eps) * 12.0 * cs.xi0 / h)) + 1)
        sup = 0.0
        for sgn in (-1.0, 1.0):
            a, b = (eps, x_far) if sgn > 0 else (-x_far, -eps)
            arc = Grid1D(a, b, n_pts)
            g = evolve_line(csh, cut, evo, t, arc)
            sup = max(sup, float(np.max(arc.nodes() ** 2 * np.abs(g.values))))
        m_out[i] = sup
        inner = Grid1D(-cs.xi0 / 8.0, cs.xi0 / 8.0, n_inner)
        g_in = evolve_line(csh, cut, evo, t, inner)
        defect = np.log(np.abs(g_in.values)) + inner.nodes() ** 2 / (2.0 * h)
        m_in[i] = h**evo.alpha * float(np.max(np.abs(defect)))
    return PointwiseBoundReport(h_list=h_arr, m_out=m_out, m_in=m_in, eps=eps, t=t)
