"""Observability quotients along h-sweeps for each equation family.

For a solution family g_h the observability inequality would require

    |g_h(T)|_{L2(Omega)} <= C |g_h|_{L2((0,T) x omega)},
    omega = {x : |x| > eps}  (times the full v-domain when v is present).

The quotient of the two norms is computed per h; its blow-up as h -> 0
(log-quotient increasing, denominator decaying exponentially in 1/h)
disproves the inequality for the chosen equation.

Equations:
    rfhe_line      fractional heat with rotated coefficient, x on R
    rfhe_torus     same equation on the torus (periodized data)
    kolm_line_v    adjoint Kolmogorov, x on the torus, v on R
    kolm_interval_v  same with v on (-1, 1), Dirichlet ends

Torus norms go through the mode sums directly: the numerator by the
Parseval identity, the denominator by Gauss-Legendre quadrature on the
two arcs of omega and in v and t.  Line norms use grid quadrature on a
truncation window wide enough for the state's stretched-exponential tail.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kolmogorov as kolm
from . import rfhe
from .errors import ObsgapError, ParameterError
from .spectral_core import Grid1D, gauss_legendre, l2_norm

__all__ = [
    "EQUATIONS",
    "ExperimentConfig",
    "QuotientRow",
    "ObservabilityReport",
    "quotient",
    "sweep",
    "export_csv",
    "load_csv",
    "CSV_HEADER",
]

EQUATIONS = ("rfhe_line", "rfhe_torus", "kolm_line_v", "kolm_interval_v")

CSV_HEADER = (
    "h,alpha,z_re,z_im,xi0,epsilon,T,num_l2,den_l2,quotient,"
    "log_quotient,h_log_quotient"
)

# the Kolmogorov mode damping is e^{-sqrt(-i n) t}: structurally the
# fractional order 1/2 with rotation e^{i pi/4}
_KOLM_ALPHA = 0.5
_KOLM_Z = cmath.exp(1j * math.pi / 4.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """One h-sweep: equation, physical parameters, quadrature resolutions.

    grid_n overrides the per-arc (torus) or full-window (line) node count;
    v_nodes the v-quadrature count; trunc_l is the half-width of the x
    truncation window for rfhe_line.
    """

    equation: str
    evo: rfhe.EvolutionParams
    h_list: tuple
    xi0: float = 1.0
    eps: float = 0.5
    t_nodes: int = 16
    trunc_l: float = 16.0
    grid_n: int | None = None
    v_nodes: int | None = None
    tail_tol: float = 1e-12
    cutoff_spec: rfhe.CutoffSpec | None = None

    def __post_init__(self):
        if self.equation not in EQUATIONS:
            raise ParameterError(f"unknown equation {self.equation!r}")
        if isinstance(self.evo, kolm.KolmSolutionSpec):
            # a solution spec may stand in for the evolution parameters on
            # the Kolmogorov side; its h is superseded by h_list
            if not self.equation.startswith("kolm"):
                raise ParameterError(
                    "a KolmSolutionSpec only configures the kolm equations"
                )
            object.__setattr__(self, "xi0", self.evo.xi0)
            object.__setattr__(self, "cutoff_spec", self.evo.cutoff)
            object.__setattr__(
                self,
                "evo",
                rfhe.EvolutionParams(alpha=_KOLM_ALPHA, z=_KOLM_Z, T=self.evo.T),
            )
        hs = tuple(float(h) for h in self.h_list)
        if len(hs) == 0 or any(h <= 0 for h in hs):
            raise ParameterError("h_list must contain positive values")
        if any(b >= a for a, b in zip(hs, hs[1:])):
            raise ParameterError("h_list must be strictly decreasing")
        object.__setattr__(self, "h_list", hs)
        if not 0.0 < self.eps < math.pi:
            raise ParameterError("eps must lie in (0, pi)")
        if self.t_nodes < 8:
            raise ParameterError("need at least 8 time quadrature nodes")
        if not self.xi0 > 0:
            raise ParameterError("xi0 must be positive")
        if self.equation.startswith("kolm"):
            if abs(self.evo.alpha - _KOLM_ALPHA) > 1e-12 or (
                abs(complex(self.evo.z) - _KOLM_Z) > 1e-12
            ):
                raise ParameterError(
                    "Kolmogorov mode damping is structural: requires "
                    "alpha = 1/2 and z = e^{i pi/4}"
                )
        if self.equation == "rfhe_line" and not self.trunc_l > self.eps:
            raise ParameterError("truncation window must contain the band edge")

    @property
    def cutoff(self) -> rfhe.CutoffSpec:
        return self.cutoff_spec or rfhe.CutoffSpec.for_xi0(self.xi0)

    def kolm_spec(self, h: float) -> kolm.KolmSolutionSpec:
        domain_v = "line" if self.equation == "kolm_line_v" else "interval"
        return kolm.KolmSolutionSpec(
            h=h, xi0=self.xi0, cutoff=self.cutoff, domain_v=domain_v, T=self.evo.T
        )


@dataclass(frozen=True)
class QuotientRow:
    """Norms and quotient for one h; degenerate marks an all-zero state."""

    h: float
    num: float
    den: float
    quotient: float
    log_quotient: float
    h_log_quotient: float
    degenerate: bool = False

    @classmethod
    def from_norms(cls, h: float, num: float, den: float) -> "QuotientRow":
        if num == 0.0 and den == 0.0:
            nan = float("nan")
            return cls(h, 0.0, 0.0, nan, nan, nan, degenerate=True)
        if num <= 0.0 or den <= 0.0:
            raise ParameterError(
                f"norms must be positive (num={num:g}, den={den:g} at h={h:g})"
            )
        q = num / den
        return cls(h, num, den, q, math.log(q), h * math.log(q))


@dataclass(frozen=True)
class ObservabilityReport:
    """Sweep rows plus the fitted slopes backing the blow-up claim."""

    equation: str
    alpha: float
    z: complex
    xi0: float
    eps: float
    T: float
    rows: tuple
    failures: tuple = field(default_factory=tuple)

    def _clean(self):
        return [r for r in self.rows if not r.degenerate]

    @property
    def slope_log_quotient(self) -> float:
        """Fitted slope of log(quotient) against 1/h; blow-up if positive."""
        rows = self._clean()
        if len(rows) < 2:
            raise ParameterError("need two nondegenerate rows to fit a slope")
        inv_h = np.array([1.0 / r.h for r in rows])
        return float(np.polyfit(inv_h, [r.log_quotient for r in rows], 1)[0])

    @property
    def slope_log_den(self) -> float:
        """Fitted slope of log(den) against 1/h; decay if negative."""
        rows = self._clean()
        if len(rows) < 2:
            raise ParameterError("need two nondegenerate rows to fit a slope")
        inv_h = np.array([1.0 / r.h for r in rows])
        return float(np.polyfit(inv_h, [math.log(r.den) for r in rows], 1)[0])


def _thread_count(n_jobs: int) -> int:
    cap = os.environ.get("OBSGAP_THREADS", "")
    try:
        cap_n = int(cap) if cap else (os.cpu_count() or 1)
    except ValueError:
        cap_n = os.cpu_count() or 1
    return max(1, min(n_jobs, cap_n))


def _active_mode_set(cfg: ExperimentConfig, h: float) -> np.ndarray:
    lo = (cfg.xi0 - cfg.cutoff.outer) / h
    hi = (cfg.xi0 + cfg.cutoff.outer) / h
    n = np.arange(math.floor(lo) + 1, math.ceil(hi))
    keep = rfhe.cutoff_eval(cfg.cutoff, h * n - cfg.xi0) > 0
    return n[keep]


def _rfhe_amplitudes(cfg: ExperimentConfig, h: float, n: np.ndarray) -> np.ndarray:
    # a_{h,n} = (2 pi)^{-1/2} sqrt(h) F_h(g_0)(h n); real and nonnegative
    cs = rfhe.CoherentStateSpec(xi0=cfg.xi0, h=h)
    prof = rfhe.frequency_profile(cs, cfg.cutoff, h * n)
    return prof * math.sqrt(h) / math.sqrt(2.0 * math.pi)


def quotient(cfg: ExperimentConfig, h: float, *, scale: complex = 1.0, _cache=None):
    """One sweep row at the given h.

    scale multiplies the initial state; the quotient is invariant under
    it, which is exercised by the property tests.
    """
    h = float(h)
    if not h > 0:
        raise ParameterError("h must be positive")
    try:
        if cfg.equation == "rfhe_line":
            num, den = _rfhe_line_norms(cfg, h, scale)
        else:
            num, den = _torus_norms(cfg, h, scale, _cache)
    except ObsgapError as exc:
        exc.args = (f"h={h:g}: {exc.args[0]}",) + exc.args[1:]
        raise
    return QuotientRow.from_norms(h, num, den)


def _torus_norms(cfg: ExperimentConfig, h: float, scale: complex, cache):
    n = _active_mode_set(cfg, h)
    if n.size == 0:
        return 0.0, 0.0
    T = cfg.evo.T

    if cfg.equation == "rfhe_torus":
        amps = _rfhe_amplitudes(cfg, h, n)
        zbar = np.conj(complex(cfg.evo.z))
        rates = zbar * np.abs(n).astype(float) ** cfg.evo.alpha
        profiles = np.ones((n.size, 1), dtype=complex)
        v_weights = np.ones(1)
    else:
        spec = cfg.kolm_spec(h)
        amps = kolm.mode_amplitudes(spec, n)
        rates = kolm.mode_rates(spec, n, eigensolver=cache)
        if cfg.equation == "kolm_line_v":
            V = kolm.gaussian_v_extent(spec, tol=cfg.tail_tol)
            v, wv = gauss_legendre(-V, V, cfg.v_nodes or 256)
        else:
            v, wv = gauss_legendre(-1.0, 1.0, cfg.v_nodes or 128)
        profiles = kolm.mode_profiles(spec, n, v, eigensolver=cache)
        v_weights = wv

    amps = amps * scale
    if not np.any(amps != 0):
        return 0.0, 0.0

    prof_sq = (np.abs(profiles) ** 2) @ v_weights
    c_T = amps * np.exp(-rates * T)
    num = math.sqrt(2.0 * math.pi * float(np.sum(np.abs(c_T) ** 2 * prof_sq)))

    n_arc = cfg.grid_n or max(64, 4 * int(np.max(np.abs(n))))
    xr, wr = gauss_legendre(cfg.eps, math.pi, n_arc)
    xl, wl = gauss_legendre(-math.pi, -cfg.eps, n_arc)
    x = np.concatenate([xl, xr])
    wx = np.concatenate([wl, wr])
    E = np.exp(1j * np.outer(x, n))
    t_q, t_w = gauss_legendre(0.0, T, cfg.t_nodes)
    den_sq = 0.0
    for t_k, w_k in zip(t_q, t_w):
        c_t = amps * np.exp(-rates * t_k)
        F = E @ (c_t[:, None] * profiles)
        mass = float(wx @ (np.abs(F) ** 2 @ v_weights))
        den_sq += w_k * mass
    return num, math.sqrt(den_sq)


def _rfhe_line_norms(cfg: ExperimentConfig, h: float, scale: complex):
    cs = rfhe.CoherentStateSpec(xi0=cfg.xi0, h=h)
    cut = cfg.cutoff
    L = cfg.trunc_l
    xi_max = cfg.xi0 + cut.outer
    n_x = cfg.grid_n or (int(np.ceil(2.0 * L * 8.0 * xi_max / h)) + 1)
    grid = Grid1D(-L, L, n_x)
    T = cfg.evo.T
    s = abs(scale)

    def norms_at(t):
        f = rfhe.evolve_line(cs, cut, cfg.evo, t, grid)
        full = l2_norm(f)
        left = l2_norm(f, sub=(-L, -cfg.eps))
        right = l2_norm(f, sub=(cfg.eps, L))
        return full, left**2 + right**2

    num, _ = norms_at(T)
    t_q, t_w = gauss_legendre(0.0, T, cfg.t_nodes)
    den_sq = 0.0
    for t_k, w_k in zip(t_q, t_w):
        _, arc_sq = norms_at(t_k)
        den_sq += w_k * arc_sq
    return s * num, s * math.sqrt(den_sq)


def sweep(cfg: ExperimentConfig) -> ObservabilityReport:
    """Evaluate every h in parallel; failed rows become failure markers."""
    cache = None
    if cfg.equation == "kolm_interval_v":
        cache = kolm.EigenSolverCache()

    def run(h):
        return quotient(cfg, h, _cache=cache)

    results: dict[float, QuotientRow] = {}
    failures = []
    workers = _thread_count(len(cfg.h_list))
    if workers == 1:
        for h in cfg.h_list:
            try:
                results[h] = run(h)
            except ObsgapError as exc:
                failures.append((h, str(exc)))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = {h: pool.submit(run, h) for h in cfg.h_list}
            for h, fut in futs.items():
                try:
                    results[h] = fut.result()
                except ObsgapError as exc:
                    failures.append((h, str(exc)))
    rows = tuple(results[h] for h in cfg.h_list if h in results)
    return ObservabilityReport(
        equation=cfg.equation,
        alpha=cfg.evo.alpha,
        z=complex(cfg.evo.z),
        xi0=cfg.xi0,
        eps=cfg.eps,
        T=cfg.evo.T,
        rows=rows,
        failures=tuple(sorted(failures)),
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def export_csv(report: ObservabilityReport, path) -> None:
    """Write the report in the fixed column order, one line per row."""
    lines = [CSV_HEADER]
    for r in report.rows:
        cells = [
            r.h,
            report.alpha,
            report.z.real,
            report.z.imag,
            report.xi0,
            report.eps,
            report.T,
            r.num,
            r.den,
            r.quotient,
            r.log_quotient,
            r.h_log_quotient,
        ]
        lines.append(",".join(_fmt(c) for c in cells))
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ObsgapError(f"cannot write CSV to {path}: {exc}") from exc


def load_csv(path):
    """Parse an exported CSV back into a list of per-row dicts."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise ObsgapError(f"cannot read CSV from {path}: {exc}") from exc
    if not lines or lines[0] != CSV_HEADER:
        raise ObsgapError(f"unrecognized CSV header in {path}")
    cols = CSV_HEADER.split(",")
    out = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(cols):
            raise ObsgapError(f"malformed CSV row in {path}: {ln!r}")
        out.append({k: float(v) for k, v in zip(cols, parts)})
    return out
