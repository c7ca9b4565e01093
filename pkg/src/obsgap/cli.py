"""Command-line interface running the experiments and verification suites.

Subcommands map one-to-one onto module operations:

    rfhe-sweep        observability sweep for the fractional heat equation
    kolmogorov-sweep  observability sweep for the Kolmogorov equation
    eigen-table       solved vs asymptotic eigenvalue corrections
    saddle-verify     saddle estimate against the quadrature oracle
    periodize-verify  periodization coefficient identity deviation
    estimates-verify  pointwise off-band decay and on-band phase defect

Each writes a CSV report (every row echoes the parameter set that
produced it) and, unless --no-figure is given, a PNG figure next to it.
Exit codes: 0 success, 1 numeric or convergence failure, 2 usage error.

A config file (--config) holds flat `key = value` lines using the flag
names; explicit flags win over file values.  OBSGAP_THREADS caps sweep
parallelism.
"""

from __future__ import annotations

import argparse
import cmath
import math
import sys

import numpy as np

from . import eigen_bounded, figures, observability, rfhe, saddle
from .errors import ObsgapError, ParameterError
from .spectral_core import coeff_identity_check, line_grid_for_torus

__all__ = ["run", "main"]

_Z_DEFAULT = cmath.exp(1j * math.pi / 4.0)


def _float_list(text: str) -> tuple:
    try:
        vals = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _bool_flag(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


# config-file keys and their converters; mirrors the flag vocabulary
_CONFIG_TYPES = {
    "alpha": float,
    "z_re": float,
    "z_im": float,
    "xi0": float,
    "epsilon": float,
    "t_final": float,
    "h_list": _float_list,
    "domain": str,
    "omega_v": str,
    "grid_n": int,
    "trunc_l": float,
    "t_nodes": int,
    "tol": float,
    "out": str,
    "xi_re": _float_list,
    "no_figure": _bool_flag,
}

_DEFAULTS_COMMON = {
    "alpha": 0.5,
    "z_re": _Z_DEFAULT.real,
    "z_im": _Z_DEFAULT.imag,
    "xi0": 1.0,
    "epsilon": 0.5,
    "t_final": 1.0,
    "domain": "torus",
    "omega_v": "line",
    "grid_n": None,
    "trunc_l": 16.0,
    "t_nodes": 16,
    "out": None,
    "xi_re": (8.0, 12.0, 16.0, 20.0),
    "no_figure": False,
}

# per-subcommand defaults for h_list and the tolerance knob
_DEFAULTS_SUB = {
    "rfhe-sweep": {"h_list": (0.2, 0.1, 0.05, 0.025), "tol": 1e-12},
    "kolmogorov-sweep": {"h_list": (0.2, 0.1, 0.05), "tol": 1e-12},
    "eigen-table": {"h_list": (), "tol": 1e-12},
    "saddle-verify": {"h_list": (0.1, 0.05, 0.02), "tol": 1e-10},
    "periodize-verify": {"h_list": (0.1,), "tol": 1e-12},
    "estimates-verify": {"h_list": (0.2, 0.1, 0.05), "tol": 1e-12},
}

_TOL_DOC = {
    "rfhe-sweep": "v-support tail tolerance (default 1e-12)",
    "kolmogorov-sweep": "v-support tail tolerance (default 1e-12)",
    "eigen-table": "Newton boundary-value tolerance (default 1e-12)",
    "saddle-verify": "oracle quadrature relative tolerance (default 1e-10)",
    "periodize-verify": "periodization tail tolerance (default 1e-12)",
    "estimates-verify": "unused placeholder (default 1e-12)",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obsgap",
        description="observability-gap experiments and verification suites",
        epilog="OBSGAP_THREADS caps sweep parallelism.",
    )
    subs = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    for name in _DEFAULTS_SUB:
        sp = subs.add_parser(name, help=f"{name} report")
        sp.add_argument("--alpha", type=float, help="fractional order (default 0.5)")
        sp.add_argument("--z-re", type=float, dest="z_re",
                        help="Re z (default cos(pi/4))")
        sp.add_argument("--z-im", type=float, dest="z_im",
                        help="Im z (default sin(pi/4))")
        sp.add_argument("--xi0", type=float, help="center frequency (default 1)")
        sp.add_argument("--epsilon", type=float,
                        help="control-band half-gap (default 0.5)")
        sp.add_argument("--t-final", type=float, dest="t_final",
                        help="final time T (default 1)")
        sp.add_argument("--h-list", type=_float_list, dest="h_list",
                        help=f"semiclassical sweep (default "
                             f"{','.join(str(h) for h in _DEFAULTS_SUB[name]['h_list']) or 'n/a'})")
        sp.add_argument("--domain", choices=("line", "torus"),
                        help="rfhe spatial domain (default torus)")
        sp.add_argument("--omega-v", choices=("line", "interval"), dest="omega_v",
                        help="Kolmogorov v-domain (default line)")
        sp.add_argument("--grid-n", type=int, dest="grid_n",
                        help="override quadrature node count")
        sp.add_argument("--trunc-l", type=float, dest="trunc_l",
                        help="line-domain truncation half-width (default 16)")
        sp.add_argument("--t-nodes", type=int, dest="t_nodes",
                        help="time quadrature nodes (default 16)")
        sp.add_argument("--tol", type=float, help=_TOL_DOC[name])
        sp.add_argument("--out", help="output CSV path (default <subcommand>.csv)")
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--xi-re", type=_float_list, dest="xi_re",
                        help="eigen-table abscissas (default 8,12,16,20)")
        sp.add_argument("--dry-run", action="store_true", dest="dry_run",
                        help="print the resolved configuration and exit")
        sp.add_argument("--no-figure", action="store_true", dest="no_figure",
                        help="skip the PNG figure next to the CSV")
    return parser


def _parse_config_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ParameterError(f"cannot read config file {path}: {exc}") from exc
    out = {}
    for ln_no, line in enumerate(raw.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ParameterError(f"{path}:{ln_no}: expected key = value")
        key, _, value = stripped.partition("=")
        key = key.strip().lower().replace("-", "_")
        if key not in _CONFIG_TYPES:
            raise ParameterError(f"{path}:{ln_no}: unknown key {key!r}")
        try:
            out[key] = _CONFIG_TYPES[key](value.strip())
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ParameterError(f"{path}:{ln_no}: bad value for {key}: {exc}") from exc
    return out


def _resolve(args) -> dict:
    """defaults < config file < explicit flags."""
    sub = args.subcommand
    cfg = dict(_DEFAULTS_COMMON)
    cfg.update(_DEFAULTS_SUB[sub])
    if args.config:
        cfg.update(_parse_config_file(args.config))
    for key in _CONFIG_TYPES:
        flag_val = getattr(args, key, None)
        if key == "no_figure":
            if args.no_figure:
                cfg[key] = True
        elif flag_val is not None:
            cfg[key] = flag_val
    if cfg["out"] is None:
        cfg["out"] = sub.replace("-", "_") + ".csv"
    return cfg


def _print_resolved(sub: str, cfg: dict) -> None:
    print(f"subcommand = {sub}")
    for key in sorted(cfg):
        val = cfg[key]
        if isinstance(val, tuple):
            val = ",".join(format(v, "g") for v in val)
        print(f"{key} = {val}")


def _figure_path(out: str) -> str:
    return (out[:-4] if out.endswith(".csv") else out) + ".png"


def _write_csv(path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(format(float(c), ".17g") for c in row))
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise ObsgapError(f"cannot write CSV to {path}: {exc}") from exc


def _evo_from(cfg: dict) -> rfhe.EvolutionParams:
    return rfhe.EvolutionParams(
        alpha=cfg["alpha"], z=complex(cfg["z_re"], cfg["z_im"]), T=cfg["t_final"]
    )


def _cmd_sweep(sub: str, cfg: dict) -> int:
    if sub == "rfhe-sweep":
        equation = "rfhe_torus" if cfg["domain"] == "torus" else "rfhe_line"
    else:
        equation = "kolm_line_v" if cfg["omega_v"] == "line" else "kolm_interval_v"
    xcfg = observability.ExperimentConfig(
        equation=equation,
        evo=_evo_from(cfg),
        h_list=cfg["h_list"],
        xi0=cfg["xi0"],
        eps=cfg["epsilon"],
        t_nodes=cfg["t_nodes"],
        trunc_l=cfg["trunc_l"],
        grid_n=cfg["grid_n"],
        tail_tol=cfg["tol"],
    )
    report = observability.sweep(xcfg)
    observability.export_csv(report, cfg["out"])
    print(f"wrote {cfg['out']} ({len(report.rows)} rows, equation {equation})")
    if not cfg["no_figure"] and report.rows:
        print(f"wrote {figures.sweep_figure(report, _figure_path(cfg['out']))}")
    if len(report.rows) >= 2:
        print(
            f"slope log quotient vs 1/h = {report.slope_log_quotient:+.6g}; "
            f"slope log den vs 1/h = {report.slope_log_den:+.6g}"
        )
    for h, msg in report.failures:
        print(f"FAILED row h={h:g}: {msg}", file=sys.stderr)
    return 1 if report.failures else 0


def _cmd_eigen_table(cfg: dict) -> int:
    rows = []
    ratios = []
    for xi in cfg["xi_re"]:
        ed = eigen_bounded.solve_rho(complex(xi), tol=cfg["tol"])
        asym = eigen_bounded.asymptotic_rho(complex(xi))
        ratio = abs(ed.rho / asym)
        ratios.append(ratio)
        rows.append((xi, 0.0, ed.rho.real, ed.rho.imag, asym.real, asym.imag,
                     ratio, cfg["tol"]))
        print(f"xi={xi:>6g}  rho={ed.rho.real:.9e}  asym={asym.real:.9e}  "
              f"ratio={ratio:.6f}")
    _write_csv(cfg["out"],
               "xi_re,xi_im,rho_re,rho_im,asym_re,asym_im,ratio_abs,newton_tol",
               rows)
    print(f"wrote {cfg['out']} ({len(rows)} rows)")
    if not cfg["no_figure"]:
        print(f"wrote {figures.eigen_ratio_figure(list(cfg['xi_re']), ratios, _figure_path(cfg['out']))}")
    return 0


def _cmd_saddle_verify(cfg: dict) -> int:
    xi0 = cfg["xi0"]
    t = cfg["t_final"]
    zbar = complex(cfg["z_re"], -cfg["z_im"])

    def phase(zeta: complex) -> complex:
        return -zbar * cmath.sqrt(zeta + xi0) * t

    holo = saddle.HoloFunction(phase, radius=0.97 * xi0)
    window = 0.9 * xi0
    rows = []
    errs = []
    for h in cfg["h_list"]:
        res = saddle.evaluate(lambda _z: 1.0 + 0j, holo, h, cfg["alpha"], window,
                              rel_tol=cfg["tol"])
        rows.append((h, cfg["alpha"], cfg["z_re"], cfg["z_im"], xi0, t,
                     abs(res.estimate), abs(res.oracle), res.rel_err))
        errs.append(res.rel_err)
        print(f"h={h:<6g} estimate={abs(res.estimate):.9e} "
              f"oracle={abs(res.oracle):.9e} rel_err={res.rel_err:.6e}")
    order = float("nan")
    if len(errs) >= 2:
        order = float(np.polyfit(np.log(cfg["h_list"]), np.log(errs), 1)[0])
        print(f"fitted order = {order:.4f}")
    _write_csv(cfg["out"],
               "h,alpha,z_re,z_im,xi0,t,est_abs,oracle_abs,rel_err", rows)
    print(f"wrote {cfg['out']} ({len(rows)} rows)")
    if not cfg["no_figure"] and len(errs) >= 2:
        print(f"wrote {figures.order_figure(cfg['h_list'], errs, order, _figure_path(cfg['out']))}")
    return 0


def _wrap_shells(h: float, tol: float) -> int:
    # stretched-exponential tail e^{-sqrt(x/h)}: shells to push the last
    # fold increment below tol, with margin for the measured prefactor
    def shells(target):
        return int(math.ceil(1.3 * h * (math.log(1.0 / target) + 5.0) ** 2 / (2.0 * math.pi)))

    # the transform inside the identity check requires endpoint decay to
    # 1e-10 of the peak whatever the fold tolerance, so the grid never
    # shrinks below the shell count for that
    return max(shells(tol), shells(1e-11))


def _cmd_periodize_verify(cfg: dict) -> int:
    rows = []
    for h in cfg["h_list"]:
        cs = rfhe.CoherentStateSpec(xi0=cfg["xi0"], h=h)
        cut = rfhe.CutoffSpec.for_xi0(cfg["xi0"])
        n_per = 256 * int(math.ceil(2.0 * math.pi * 12.0 * cfg["xi0"] / h / 256.0))
        K = _wrap_shells(h, cfg["tol"])
        grid = line_grid_for_torus(n_per, K)
        f = rfhe.bandlimited_state(cs, cut, grid)
        dev = coeff_identity_check(f, h, tol=cfg["tol"])
        rows.append((h, cfg["xi0"], K, dev))
        print(f"h={h:<6g} shells={K} coefficient deviation = {dev:.6e}")
    _write_csv(cfg["out"], "h,xi0,shells,deviation", rows)
    print(f"wrote {cfg['out']} ({len(rows)} rows)")
    return 0


def _cmd_estimates_verify(cfg: dict) -> int:
    cs = rfhe.CoherentStateSpec(xi0=cfg["xi0"], h=cfg["h_list"][0])
    cut = rfhe.CutoffSpec.for_xi0(cfg["xi0"])
    rep = rfhe.verify_pointwise_bounds(
        cs, cut, _evo_from(cfg), cfg["h_list"], cfg["epsilon"], t=cfg["t_final"]
    )
    rows = []
    for i, h in enumerate(rep.h_list):
        rows.append((h, cfg["alpha"], cfg["z_re"], cfg["z_im"], cfg["xi0"],
                     rep.eps, rep.t, rep.m_out[i], rep.h_log_m_out[i], rep.m_in[i]))
        print(f"h={h:<6g} off-band sup = {rep.m_out[i]:.6e}  "
              f"h*log = {rep.h_log_m_out[i]:+.6f}  phase defect = {rep.m_in[i]:.6f}")
    print(f"slope log off-band sup vs 1/h = {rep.slope_out:+.6f}; "
          f"max phase defect = {rep.max_in:.6f}")
    _write_csv(cfg["out"],
               "h,alpha,z_re,z_im,xi0,epsilon,t,m_out,h_log_m_out,m_in", rows)
    print(f"wrote {cfg['out']} ({len(rows)} rows)")
    if not cfg["no_figure"]:
        print(f"wrote {figures.decay_figure(rep.h_list, np.log(rep.m_out), rep.slope_out, _figure_path(cfg['out']), ylabel='log off-band sup')}")
    return 0


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = _resolve(args)
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    if args.dry_run:
        _print_resolved(args.subcommand, cfg)
        return 0
    try:
        if args.subcommand in ("rfhe-sweep", "kolmogorov-sweep"):
            return _cmd_sweep(args.subcommand, cfg)
        if args.subcommand == "eigen-table":
            return _cmd_eigen_table(cfg)
        if args.subcommand == "saddle-verify":
            return _cmd_saddle_verify(cfg)
        if args.subcommand == "periodize-verify":
            return _cmd_periodize_verify(cfg)
        return _cmd_estimates_verify(cfg)
    except ObsgapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
