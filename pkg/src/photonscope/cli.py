"""Command line interface.

Subcommands:
  fisher    Fisher information at a single operating point (lossless, lossy,
            or thermal-source model selected by flags).
  curve     Plot-ready data series: F(phi) lossless or lossy, F(epsilon), or
            delta-theta(alpha).
  table     Optimal operating points per photon number.
  validate  Cross-validation suite (oracle vs permanent path, decomposition
            identity, finite-difference derivatives, normalization).

Unit conventions at the boundary: phases in units of pi, wavelengths in nm,
attenuation lengths in km.  Everything is converted to SI and radians on
parse.  Exit codes: 0 success, 2 input validation, 3 internal consistency,
4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import report
from .circuit import CircuitSpec
from .amplitudes import oracle_distribution
from .errors import (
    DimensionLimitError,
    EnumerationLimitError,
    InternalConsistencyError,
    ValidationError,
)
from .fisher import (
    detection_distribution,
    fisher_lossless,
    fisher_thermal,
    fisher_with_loss,
    loss_fisher_curve,
    thermal_fisher_curve,
)
from .fock import ModeLayout
from .telescope import (
    DEFAULT_ATTENUATION_LENGTH,
    DEFAULT_EPSILON,
    DEFAULT_WAVELENGTH,
    MICROARCSEC_PER_RAD,
    best_instrument_phase,
    loss_probability,
    optimize,
    resolution_curve,
)

ORACLE_TOL = 1e-10
DERIVATIVE_TOL = 1e-7
NORMALIZATION_TOL = 1e-10
DECOMPOSITION_TOL = 1e-10


def _default_workers() -> int:
    raw = os.environ.get("PHOTONSCOPE_WORKERS", "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(value, 1)


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse number list {text!r}") from exc


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse integer list {text!r}") from exc


def _resolve_loss(args) -> float:
    """Loss probability from exactly one of --p / --alpha."""
    has_p = getattr(args, "p", None) is not None
    has_alpha = getattr(args, "alpha", None) is not None
    if has_p == has_alpha:
        raise ValidationError("give exactly one of --p or --alpha")
    if has_p:
        if not 0.0 <= args.p <= 1.0:
            raise ValidationError(f"loss probability must be in [0, 1], got {args.p}")
        return args.p
    return loss_probability(args.alpha)


def _add_output_args(sub, default_output: str | None) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default="csv",
                     help="output file format (default csv)")
    sub.add_argument("--output", default=default_output,
                     help="output file path")
    sub.add_argument("--no-plot", action="store_true",
                     help="skip rendering the companion PNG figure")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="photonscope",
        description="Photon-assisted two-receiver telescope simulator.",
    )
    parser.add_argument("--config", help="JSON file with default parameter values "
                                         "(field names match the long flags)")
    subs = parser.add_subparsers(dest="command", required=True)
    submap = {}

    fisher = subs.add_parser("fisher", help="Fisher information at one point")
    fisher.add_argument("--n", type=int, help="photon number N >= 2")
    fisher.add_argument("--phi", type=float,
                        help="total phase in units of pi")
    fisher.add_argument("--lossless", action="store_true",
                        help="no transmission loss, star photon certain")
    fisher.add_argument("--p", type=float, help="ground-photon loss probability")
    fisher.add_argument("--alpha", type=float,
                        help="baseline over attenuation length; sets p = 1 - e^(-alpha/2)")
    fisher.add_argument("--epsilon", type=float,
                        help="star emission rate; selects the thermal-source model")
    _add_output_args(fisher, None)
    submap["fisher"] = fisher

    curve = subs.add_parser("curve", help="plot-ready data series")
    curve.add_argument("--kind",
                       choices=("lossless-phi", "loss-phi", "epsilon", "resolution"))
    curve.add_argument("--n", type=int, help="photon number (single-n kinds)")
    curve.add_argument("--n-list", default="2,3,4,5",
                       help="comma list of photon numbers (kind lossless-phi)")
    curve.add_argument("--p-list", default="0,0.25,0.5,0.9",
                       help="comma list of loss probabilities (kind loss-phi)")
    curve.add_argument("--p", type=float, help="loss probability (kind epsilon)")
    curve.add_argument("--alpha", type=float, help="alpha standing in for --p")
    curve.add_argument("--phi", type=float,
                       help="total phase in units of pi (kind epsilon)")
    curve.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON,
                       help="star emission rate (kind resolution)")
    curve.add_argument("--epsilon-list", default="1e-4,3e-4,1e-3,3e-3,1e-2",
                       help="comma list of emission rates (kind epsilon)")
    curve.add_argument("--phi-points", type=int, default=721,
                       help="phase samples over [0, 2 pi] (phi kinds)")
    curve.add_argument("--alpha-min", type=float, default=1.0)
    curve.add_argument("--alpha-max", type=float, default=12.0)
    curve.add_argument("--alpha-step", type=float, default=0.1)
    curve.add_argument("--wavelength-nm", type=float,
                       default=DEFAULT_WAVELENGTH * 1e9)
    curve.add_argument("--attenuation-km", type=float,
                       default=DEFAULT_ATTENUATION_LENGTH / 1e3)
    curve.add_argument("--workers", type=int, default=_default_workers())
    _add_output_args(curve, None)
    submap["curve"] = curve

    table = subs.add_parser("table", help="optimal operating points per N")
    table.add_argument("--n-list", default="2,3,4,5",
                       help="comma list of photon numbers")
    table.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    table.add_argument("--wavelength-nm", type=float,
                       default=DEFAULT_WAVELENGTH * 1e9)
    table.add_argument("--attenuation-km", type=float,
                       default=DEFAULT_ATTENUATION_LENGTH / 1e3)
    table.add_argument("--p-override", type=float,
                       help="fix the loss probability instead of p(alpha)")
    table.add_argument("--alpha-min", type=float, default=1.0)
    table.add_argument("--alpha-max", type=float, default=10.0)
    table.add_argument("--alpha-step", type=float, default=0.05)
    table.add_argument("--workers", type=int, default=_default_workers())
    _add_output_args(table, None)
    submap["table"] = table

    validate = subs.add_parser("validate", help="cross-validation suite")
    validate.add_argument("--max-n", type=int, default=3,
                          help="largest N for the oracle comparison (<= 4)")
    validate.add_argument("--trials", type=int, default=3,
                          help="randomized parameter draws per N")
    validate.add_argument("--seed", type=int, default=7)
    submap["validate"] = validate

    return parser, submap


def _echo(args, keys: list[str]) -> dict:
    return {key: getattr(args, key) for key in keys if getattr(args, key) is not None}


def cmd_fisher(args) -> int:
    if args.n is None or args.phi is None:
        raise ValidationError("fisher needs --n and --phi (flags or config)")
    if args.n < 2:
        raise ValidationError(f"need --n >= 2, got {args.n}")
    phi = args.phi * math.pi
    if args.lossless:
        if args.p is not None or args.alpha is not None or args.epsilon is not None:
            raise ValidationError("--lossless excludes --p/--alpha/--epsilon")
        result = fisher_lossless(args.n, phi)
        model = "lossless"
    else:
        p = _resolve_loss(args)
        if args.epsilon is not None:
            result = fisher_thermal(args.n, phi, p, args.epsilon)
            model = "thermal"
        else:
            result = fisher_with_loss(args.n, phi, p)
            model = "loss"

    print(f"model = {model}")
    for key, value in result.params.items():
        print(f"{key} = {report.format_value(value)}")
    print(f"fisher = {report.format_value(result.value)}")
    if model == "loss":
        print("breakdown (D, q_D, F'_D):")
        for detected, weight, conditional in result.breakdown:
            print(f"  D={detected}  q={report.format_value(weight)}  "
                  f"F'={report.format_value(conditional)}")

    if args.output:
        meta = report.metadata_block("fisher", {"model": model, **result.params,
                                                "fisher": result.value})
        rows = [(d, q, f) for d, q, f in result.breakdown]
        report.write_table(args.output, args.format,
                           ["detected", "q_D", "F_prime_D"], rows, meta)
    return 0


def _phi_grid(points: int) -> np.ndarray:
    return np.linspace(0.0, 2.0 * math.pi, points)


def cmd_curve(args) -> int:
    kind = args.kind
    if kind is None:
        raise ValidationError("curve needs --kind (flag or config)")
    meta_extra: dict = {}
    if kind == "lossless-phi":
        ns = _parse_int_list(args.n_list)
        phis = _phi_grid(args.phi_points)
        columns = ["phi_over_pi"] + [f"fisher_n{n}" for n in ns]
        series = {f"N={n}": loss_fisher_curve(n, 0.0, phis) for n in ns}
        rows = list(zip(phis / math.pi, *series.values()))
        meta_extra = {"n_list": args.n_list, "phi_points": args.phi_points}
        xlabel, ylabel, x = "phi / pi", "Fisher information", phis / math.pi
        title, logy = "Lossless Fisher information", False
    elif kind == "loss-phi":
        if args.n is None:
            raise ValidationError("kind loss-phi needs --n")
        ps = _parse_float_list(args.p_list)
        for p in ps:
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"loss probability must be in [0, 1], got {p}")
        phis = _phi_grid(args.phi_points)
        columns = ["phi_over_pi"] + [f"fisher_p{p:g}" for p in ps]
        series = {f"p={p:g}": loss_fisher_curve(args.n, p, phis) for p in ps}
        rows = list(zip(phis / math.pi, *series.values()))
        meta_extra = {"n": args.n, "p_list": args.p_list,
                      "phi_points": args.phi_points}
        xlabel, ylabel, x = "phi / pi", "Fisher information", phis / math.pi
        title, logy = f"Lossy Fisher information, N={args.n}", False
    elif kind == "epsilon":
        if args.n is None or args.phi is None:
            raise ValidationError("kind epsilon needs --n and --phi")
        p = _resolve_loss(args)
        phi = args.phi * math.pi
        epsilons = _parse_float_list(args.epsilon_list)
        values = [fisher_thermal(args.n, phi, p, eps).value for eps in epsilons]
        columns = ["epsilon", "fisher"]
        rows = list(zip(epsilons, values))
        series = {f"N={args.n}": values}
        meta_extra = {"n": args.n, "phi_over_pi": args.phi, "p": p}
        xlabel, ylabel, x = "epsilon", "Fisher information", epsilons
        title, logy = f"Thermal Fisher information vs epsilon, N={args.n}", False
    elif kind == "resolution":
        if args.n is None:
            raise ValidationError("kind resolution needs --n")
        alphas = np.arange(args.alpha_min, args.alpha_max + 1e-9, args.alpha_step)
        data = resolution_curve(
            args.n, epsilon=args.epsilon,
            wavelength=args.wavelength_nm * 1e-9,
            attenuation_length=args.attenuation_km * 1e3,
            alphas=alphas, workers=args.workers,
        )
        columns = ["alpha", "phi_opt_rad", "fisher", "delta_theta_uas"]
        rows = data
        series = {f"N={args.n}": [row[3] for row in data]}
        meta_extra = {"n": args.n, "epsilon": args.epsilon,
                      "wavelength_nm": args.wavelength_nm,
                      "attenuation_km": args.attenuation_km}
        xlabel, ylabel = "alpha = L / L0", "delta-theta (uas)"
        x = [row[0] for row in data]
        title, logy = f"Angular resolution vs baseline, N={args.n}", True
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown curve kind {kind!r}")

    output = args.output or f"photonscope_{kind}.{args.format}"
    meta = report.metadata_block("curve", {"kind": kind, **meta_extra})
    report.write_table(output, args.format, columns, rows, meta)
    print(f"wrote {output} ({len(rows)} rows)")
    if not args.no_plot:
        fig = report.render_figure(output, x, series, xlabel, ylabel, title,
                                   logy=logy)
        print(f"wrote {fig}")
    return 0


def _table_row_fixed_p(n, p, epsilon, wavenumber, attenuation, lo, hi):
    """Operating point when the loss is pinned instead of following alpha.

    The Fisher information no longer depends on the baseline, so delta-theta
    falls off as 1/alpha and the optimum sits at the window edge.
    """
    phi_opt, f_opt, flat = best_instrument_phase(n, p, epsilon)
    alpha = hi
    dtheta = (MICROARCSEC_PER_RAD / (wavenumber * alpha * attenuation *
                                     math.sqrt(f_opt))
              if f_opt > 0.0 else math.inf)
    return (n, dtheta, alpha, phi_opt / math.pi, f_opt, flat, True), []


def cmd_table(args) -> int:
    ns = _parse_int_list(args.n_list)
    if any(n < 2 or n > 8 for n in ns):
        raise ValidationError(f"photon numbers must lie in 2..8, got {ns}")
    wavelength = args.wavelength_nm * 1e-9
    attenuation = args.attenuation_km * 1e3
    wavenumber = 2.0 * math.pi / wavelength
    rows = []
    curves = {}
    for n in ns:
        if args.p_override is not None:
            if not 0.0 <= args.p_override <= 1.0:
                raise ValidationError(
                    f"--p-override must be in [0, 1], got {args.p_override}")
            row, curve = _table_row_fixed_p(
                n, args.p_override, args.epsilon, wavenumber, attenuation,
                args.alpha_min, args.alpha_max)
        else:
            result = optimize(
                n, epsilon=args.epsilon, wavelength=wavelength,
                attenuation_length=attenuation,
                alpha_window=(args.alpha_min, args.alpha_max),
                alpha_step=args.alpha_step, collect_curve=True,
                workers=args.workers,
            )
            row = (n, result.delta_theta_min_uas, result.alpha_opt,
                   result.phi_opt / math.pi, result.fisher_at_opt,
                   result.phase_flat, result.boundary_minimum)
            curve = result.curve
        rows.append(row)
        curves[n] = curve

    header = (f"{'N':>2}  {'dtheta_min_uas':>14}  {'alpha_opt':>9}  "
              f"{'phi_opt/pi':>10}  {'fisher':>12}  flat  boundary")
    print(header)
    for n, dtheta, alpha, phi, fisher, flat, boundary in rows:
        print(f"{n:>2}  {dtheta:>14.4f}  {alpha:>9.4f}  {phi:>10.4f}  "
              f"{fisher:>12.6g}  {int(flat):>4}  {int(boundary):>8}")

    output = args.output or f"photonscope_table.{args.format}"
    meta = report.metadata_block("table", {
        "n_list": args.n_list, "epsilon": args.epsilon,
        "wavelength_nm": args.wavelength_nm,
        "attenuation_km": args.attenuation_km,
        "alpha_window": f"{args.alpha_min}..{args.alpha_max}",
        "p_override": args.p_override if args.p_override is not None else "none",
    })
    columns = ["n", "delta_theta_min_uas", "alpha_opt", "phi_opt_over_pi",
               "fisher_at_opt", "phase_flat", "boundary_minimum"]
    report.write_table(output, args.format, columns, rows, meta)
    print(f"wrote {output}")
    if not args.no_plot and any(curves.values()):
        first = next(c for c in curves.values() if c)
        x = [row[0] for row in first]
        series = {f"N={n}": [row[3] for row in curve]
                  for n, curve in curves.items() if curve}
        fig = report.render_figure(output, x, series, "alpha = L / L0",
                                   "delta-theta (uas)",
                                   "Angular resolution vs baseline", logy=True)
        print(f"wrote {fig}")
    return 0


def cmd_validate(args) -> int:
    if not 2 <= args.max_n <= 4:
        raise ValidationError(f"--max-n must be in 2..4, got {args.max_n}")
    rng = np.random.default_rng(args.seed)
    failures = []

    def check(label: str, deviation: float, tol: float) -> None:
        status = "pass" if deviation <= tol else "FAIL"
        print(f"{status}  {label}: max deviation {deviation:.3e} (tol {tol:g})")
        if deviation > tol:
            failures.append(label)

    # Permanent path against the symbolic-expansion oracle.
    worst = 0.0
    for n in range(2, args.max_n + 1):
        layout = ModeLayout(n)
        for _ in range(args.trials):
            spec = CircuitSpec(
                layout=layout,
                signal_phase=float(rng.uniform(0.0, 2.0 * math.pi)),
                instrument_phase=float(rng.uniform(0.0, 2.0 * math.pi)),
                loss_probability=float(rng.uniform(0.0, 0.95)),
            )
            engine = detection_distribution(spec)
            marginal: dict = {}
            for config, (prob, deriv) in oracle_distribution(spec).entries.items():
                key = config.counts[:2 * n]  # trace out the loss modes
                acc = marginal.get(key, (0.0, 0.0))
                marginal[key] = (acc[0] + prob, acc[1] + deriv)
            for config, (prob, deriv) in engine.entries.items():
                o_prob, o_deriv = marginal.get(config.counts, (0.0, 0.0))
                worst = max(worst, abs(prob - o_prob), abs(deriv - o_deriv))
    check("oracle vs permanent path", worst, ORACLE_TOL)

    # Analytic derivatives against central finite differences.
    step = 1e-6
    worst = 0.0
    for n in range(2, args.max_n + 1):
        layout = ModeLayout(n)
        phi = float(rng.uniform(0.1, 2.0 * math.pi - 0.1))
        p = float(rng.uniform(0.0, 0.9))
        spec = CircuitSpec(layout=layout, signal_phase=phi, loss_probability=p)
        mid = detection_distribution(spec)
        hi_d = detection_distribution(
            CircuitSpec(layout=layout, signal_phase=phi + step,
                        loss_probability=p))
        lo_d = detection_distribution(
            CircuitSpec(layout=layout, signal_phase=phi - step,
                        loss_probability=p))
        for config, (_, deriv) in mid.entries.items():
            fd = (hi_d.entries[config][0] - lo_d.entries[config][0]) / (2.0 * step)
            worst = max(worst, abs(deriv - fd))
    check("derivative vs finite difference", worst, DERIVATIVE_TOL)

    # Loss decomposition identity (fisher_with_loss also self-checks).
    worst = 0.0
    for n in range(2, args.max_n + 1):
        for p in (0.0, 0.25, 0.5, 0.9):
            for phi in np.linspace(0.2, 2.0 * math.pi - 0.2, 6):
                result = fisher_with_loss(n, float(phi), p)
                worst = max(worst, abs(result.value - result.weighted_sum()))
    check("loss decomposition identity", worst, DECOMPOSITION_TOL)

    # Normalization of full output distributions.
    worst = 0.0
    for n in range(2, args.max_n + 1):
        layout = ModeLayout(n)
        for star in (True, False):
            spec = CircuitSpec(
                layout=layout,
                signal_phase=float(rng.uniform(0.0, 2.0 * math.pi)),
                loss_probability=float(rng.uniform(0.0, 0.9)),
                star_present=star,
            )
            dist = detection_distribution(spec)
            worst = max(worst, abs(dist.total_probability() - 1.0))
    check("distribution normalization", worst, NORMALIZATION_TOL)

    if failures:
        print(f"{len(failures)} check(s) failed")
        return 3
    print("all checks passed")
    return 0


_COMMANDS = {
    "fisher": cmd_fisher,
    "curve": cmd_curve,
    "table": cmd_table,
    "validate": cmd_validate,
}


def _apply_config(parser_map: dict, argv: list[str], config_path: str) -> None:
    try:
        with open(config_path) as handle:
            config = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {config_path}: {exc}") from exc
    if not isinstance(config, dict):
        raise ValidationError("config file must hold a JSON object")
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    sub = parser_map.get(command)
    if sub is None:
        raise ValidationError("config file requires a recognized subcommand")
    known = {action.dest for action in sub._actions}
    overrides = {}
    for key, value in config.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise ValidationError(f"config field {key!r} unknown for {command!r}")
        overrides[dest] = value
    sub.set_defaults(**overrides)


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser, submap = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, rest = pre.parse_known_args(argv)
        if known.config:
            _apply_config(submap, rest, known.config)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (EnumerationLimitError, DimensionLimitError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 4
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
