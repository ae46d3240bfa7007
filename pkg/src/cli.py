"""
Command-line front end.
Subcommands `measures`, `qrt`, `photonic`, `oracle` and `check`; sweeps are written as CSV or
JSON, the check suite as a JSON report. Every number comes from the library modules.
"""
import argparse
import json
import logging
import sys
import tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import ValidationError

import config.settings as settings
from src.check_suite import CHECKS, run_check_suite
from src.dephasing import InverseTemperature
from src.exceptions import ConfigurationError, DephasingError, NumericalError
from src.spectral import LorentzianMixture, OhmicFamilySpectralDensity
from src.sweeps import SweepSpec, format_sweep_summary, run_sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_CHECK_FAILED = 3

SWEEP_COMMANDS = ("measures", "qrt", "photonic", "oracle")


class UsageArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _beta(text: str) -> Optional[float]:
    """`inf` (zero temperature) or a positive inverse temperature."""
    if text.strip().lower() in ("inf", "infinity"):
        return None
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"beta must be positive or inf, got {text!r}")
    return value


def _add_model_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model")
    group.add_argument("--model-file", type=Path, help="TOML file with [model], [sweep] and [output] tables")
    group.add_argument("--lambda", dest="lam", type=float, help="coupling strength λ")
    group.add_argument("--s", type=float, help="spectral exponent s")
    group.add_argument("--omega", type=float, help="cutoff frequency Ω")
    group.add_argument("--beta", type=_beta, help="inverse temperature, `inf` for zero temperature")
    group.add_argument("--omega-s", dest="omega_s", type=float, help="system frequency ω_s")


def _add_sweep_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("sweep")
    group.add_argument("--t1", type=float, help="first time, in units of the model time scale")
    group.add_argument("--t2", type=float, help="second time, in units of the model time scale")
    group.add_argument(
        "--grid",
        action="append",
        metavar="AXIS:MIN:MAX:COUNT[:lin|log]",
        help="sweep axis; repeat for several axes (replaces the default axis of the same name)",
    )
    group.add_argument("--quantities", help="comma-separated quantities to compute")
    group.add_argument("--threads", type=int, help="worker threads (default: machine parallelism)")
    group.add_argument("--out", type=Path, help="output file (default: stdout)")
    group.add_argument("--format", dest="output_format", choices=("csv", "json"), help="output format")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    parser = UsageArgumentParser(prog="app.py", description=settings.APP_TITLE)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=UsageArgumentParser)

    measures = subparsers.add_parser("measures", help="BLP and RHP measures over λ and s")
    _add_model_arguments(measures)
    _add_sweep_arguments(measures)
    measures.add_argument("--horizon", type=float, help="interval scan horizon (default: 50 characteristic times)")

    qrt = subparsers.add_parser("qrt", help="regression-theorem violation Z over λ and s")
    _add_model_arguments(qrt)
    _add_sweep_arguments(qrt)
    qrt.add_argument("--oracle-check", action="store_true", help="add a discretized-bath z_oracle column")
    qrt.add_argument("--modes", type=int, help="oracle bath modes")
    qrt.add_argument("--omega-max", dest="omega_max", type=float, help="oracle frequency cut")

    photonic = subparsers.add_parser("photonic", help="photonic dephasing Z maps")
    _add_model_arguments(photonic)
    _add_sweep_arguments(photonic)
    photonic.add_argument("--panel", choices=("a", "b"), help="a: width split, b: center split")
    photonic.add_argument("--delta-n", dest="delta_n", type=float, help="refractive-index difference Δn")

    oracle = subparsers.add_parser("oracle", help="closed forms next to the discretized-bath oracle")
    _add_model_arguments(oracle)
    _add_sweep_arguments(oracle)
    oracle.add_argument("--modes", type=int, help="bath modes")
    oracle.add_argument("--omega-max", dest="omega_max", type=float, help="frequency cut")

    check = subparsers.add_parser("check", help="run the invariant check suite")
    _add_model_arguments(check)
    check.add_argument("--only", action="append", choices=[name for name, _, _ in CHECKS], help="run only these checks")
    check.add_argument("--out", type=Path, help="report file (default: stdout)")
    return parser


def load_model_file(path: Path) -> Dict[str, Any]:
    """
    Read a TOML configuration file into SweepSpec keyword arguments.

    Layout:
        [model]          omega_s, beta ("inf" or a number)
        [model.ohmic]    lambda, s, omega
        [model.lorentzian_mixture]   delta_n, components = [{A, omega0, delta_omega}, ...]
        [sweep]          t1, t2, grid = ["axis:min:max:count:lin|log", ...], quantities, panel
        [output]         path, format

    Raises:
        ConfigurationError: If the file cannot be read or has unknown tables/keys
    """
    try:
        with open(path, "rb") as f:
            document = tomllib.load(f)
    except OSError as e:
        raise ConfigurationError(f"cannot read model file {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"{path}: {e}") from e

    unknown = set(document) - {"model", "sweep", "output"}
    if unknown:
        raise ConfigurationError(f"{path}: unknown tables {sorted(unknown)}")

    model = dict(document.get("model", {}))
    sweep = dict(document.get("sweep", {}))
    output = dict(document.get("output", {}))
    values: Dict[str, Any] = {}

    ohmic = model.pop("ohmic", None)
    mixture = model.pop("lorentzian_mixture", None)
    if ohmic is not None and mixture is not None:
        raise ConfigurationError(f"{path}: [model] names both ohmic and lorentzian_mixture")
    if ohmic is not None:
        values["ohmic"] = dict(ohmic)
    if mixture is not None:
        values["mixture"] = dict(mixture)
    if "beta" in model:
        beta = model.pop("beta")
        values["beta"] = _beta(str(beta))
    if "omega_s" in model:
        values["omega_s"] = model.pop("omega_s")

    for key in ("t1", "t2", "grid", "quantities", "panel"):
        if key in sweep:
            values[key] = sweep.pop(key)
    if "path" in output:
        values["output_path"] = output.pop("path")
    if "format" in output:
        values["output_format"] = output.pop("format")

    leftover = [f"model.{k}" for k in model] + [f"sweep.{k}" for k in sweep] + [f"output.{k}" for k in output]
    if leftover:
        raise ConfigurationError(f"{path}: unknown keys {leftover}")
    logger.debug("loaded model file %s: %s", path, sorted(values))
    return values


def _ohmic_values(args: argparse.Namespace, base: Dict[str, Any]) -> Dict[str, Any]:
    """File values for the ohmic block with flags on top; λ = 1, s = 3 when neither gives them."""
    merged = {"lambda": 1.0, "s": 3.0, **base}
    if "lam" in merged:
        merged["lambda"] = merged.pop("lam")
    for flag, key in (("lam", "lambda"), ("s", "s"), ("omega", "omega")):
        value = getattr(args, flag, None)
        if value is not None:
            merged[key] = value
    return merged


def spec_from_args(args: argparse.Namespace) -> SweepSpec:
    """
    Build the sweep specification: model file first, command-line flags override.

    Raises:
        ConfigurationError: For an unreadable model file
        ValidationError: For invalid field values
    """
    values = load_model_file(args.model_file) if args.model_file else {}
    values["command"] = args.command
    values["ohmic"] = _ohmic_values(args, values.get("ohmic", {}))

    if args.command == "photonic":
        # the panel defines the peaks; only Δn is taken from the model
        file_mixture = values.get("mixture", {})
        if "components" in file_mixture:
            logger.warning(
                "⚠ lorentzian_mixture components are ignored by the photonic command; panel %s defines the peaks",
                args.panel or values.get("panel", "a"),
            )
        delta_n = args.delta_n if args.delta_n is not None else file_mixture.get("delta_n", 1.0)
        values["mixture"] = LorentzianMixture.single(settings.PHOTONIC_BASE_WIDTH, delta_n=delta_n).model_dump(
            by_alias=True
        )

    if args.grid:
        values["grid"] = args.grid
    if args.quantities:
        values["quantities"] = [q.strip() for q in args.quantities.split(",") if q.strip()]
    if args.out is not None:
        values["output_path"] = str(args.out)
    for name in (
        "beta",
        "omega_s",
        "t1",
        "t2",
        "threads",
        "output_format",
        "horizon",
        "modes",
        "omega_max",
        "panel",
    ):
        value = getattr(args, name, None)
        if value is not None:
            values[name] = value
    if getattr(args, "oracle_check", False):
        values["oracle_check"] = True
    return SweepSpec(**values)


def cmd_measures(spec: SweepSpec) -> pd.DataFrame:
    """BLP/RHP table over the (λ, s) grid."""
    return run_sweep(spec)


def cmd_qrt(spec: SweepSpec) -> pd.DataFrame:
    """Z table over the (λ, s) grid, with z_oracle when oracle_check is set."""
    return run_sweep(spec)


def cmd_photonic(spec: SweepSpec) -> pd.DataFrame:
    """Z map over the panel grid; rows near zeros of γ are flagged rather than aborting the sweep."""
    return run_sweep(spec, strict=False)


def cmd_oracle(spec: SweepSpec) -> pd.DataFrame:
    return run_sweep(spec)


COMMANDS = {
    "measures": cmd_measures,
    "qrt": cmd_qrt,
    "photonic": cmd_photonic,
    "oracle": cmd_oracle,
}


def render_csv(spec: SweepSpec, frame: pd.DataFrame) -> str:
    """Headered CSV with `# key: value` metadata lines; 17 significant digits, fixed row order."""
    header = "".join(f"# {key}: {value}\n" for key, value in spec.metadata().items())
    body = frame.to_csv(
        index=False,
        float_format=f"%.{settings.CSV_SIGNIFICANT_DIGITS}g",
        lineterminator="\n",
        na_rep="nan",
    )
    return header + body


def render_json(spec: SweepSpec, frame: pd.DataFrame) -> str:
    rows = json.loads(frame.to_json(orient="records", double_precision=15))
    return json.dumps({"metadata": spec.metadata(), "rows": rows}, indent=2) + "\n"


def write_output(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    logger.info("✓ wrote %s", target)


def cmd_check(args: argparse.Namespace) -> int:
    """
    Run the check suite and write the JSON report.

    Returns:
        EXIT_OK if every non-skipped check passed, otherwise EXIT_CHECK_FAILED
    """
    values = load_model_file(args.model_file) if args.model_file else {}
    if "mixture" in values:
        logger.info("check suite uses its own photonic model; lorentzian_mixture block ignored")
    sd = OhmicFamilySpectralDensity(**_ohmic_values(args, values.get("ohmic", {})))
    beta_value = args.beta if args.beta is not None else values.get("beta")
    beta = InverseTemperature(beta_value) if beta_value is not None else None
    omega_s = args.omega_s if args.omega_s is not None else values.get("omega_s", 0.0)

    report = run_check_suite(sd, beta, omega_s, only=args.only)
    write_output(json.dumps(report.to_dict(), indent=2) + "\n", str(args.out) if args.out else None)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def configure_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point.

    Args:
        argv: Arguments without the program name (sys.argv[1:] by default)

    Returns:
        Process exit status: 0 ok, 1 usage, 2 numerical failure, 3 check-suite failure
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging(args.verbose)
    if not settings.validate_config():
        logger.error("❌ invalid settings; see warnings above")
        return EXIT_USAGE

    try:
        if args.command == "check":
            return cmd_check(args)
        spec = spec_from_args(args)
        frame = COMMANDS[args.command](spec)
        text = render_json(spec, frame) if spec.output_format == "json" else render_csv(spec, frame)
        write_output(text, spec.output_path)
        print(format_sweep_summary(spec, frame), file=sys.stderr)
        return EXIT_OK
    except ValidationError as e:
        print(f"❌ invalid parameters:\n{e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as e:
        print(f"❌ numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigurationError, DephasingError, ValueError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
