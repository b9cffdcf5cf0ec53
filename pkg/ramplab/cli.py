"""
Command-line front end.

    ramplab fit --data loans.csv --y approve --x hrat,obrat,white --full-interact white
    ramplab table 7 --seed 42 --format csv
    ramplab simulate --design asym --error uniform:1 --beta 0.1,0.2,-0.3 --reps 200
    ramplab serve --port 8000

Exit codes: 0 success, 2 bad input, 3 estimation failure (whatever was
computed is still written).
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable, Sequence

from pydantic import ValidationError

from ramplab.config import APP_VERSION, get_settings
from ramplab.dataset import DesignSpec, load_csv
from ramplab.estimators import DEFAULT_ESTIMATORS
from ramplab.exceptions import DataError, EstimationError, TooManyFailures
from ramplab.models import CliConfig, SimReport
from ramplab.montecarlo import reproduce_table, run_mc
from ramplab.report import build_fit_report, render_fit, render_simulation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ESTIMATION = 3


def _names(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _pair(value: str) -> tuple[str, str]:
    parts = value.split(":")
    if len(parts) != 2 or not all(parts):
        raise argparse.ArgumentTypeError(f"expected A:B, got '{value}'")
    return parts[0], parts[1]


def _floats(value: str) -> list[float]:
    try:
        return [float(item) for item in _names(value)]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{value}'") from exc


def _error_law(value: str) -> tuple[str, float | None]:
    if value == "normal":
        return "normal", None
    law, _, a = value.partition(":")
    if law != "uniform" or not a:
        raise argparse.ArgumentTypeError(f"expected uniform:A or normal, got '{value}'")
    try:
        return "uniform", float(a)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad half-width in '{value}'") from exc


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=["csv", "markdown"], default="markdown")
    output.add_argument("--out", help="write the report here instead of stdout")
    output.add_argument("--precision", type=int, default=settings.precision)
    output.add_argument("--seed", type=int, default=settings.seed)
    output.add_argument("--jobs", type=int, default=settings.jobs, help="worker processes")

    simulation = argparse.ArgumentParser(add_help=False)
    simulation.add_argument("--reps", type=int)
    simulation.add_argument("--n", type=int, dest="n_obs", help="observations per replication")
    simulation.add_argument("--with-se", action="store_true", help="also average delta-method SEs")

    parser = argparse.ArgumentParser(
        prog="ramplab",
        description="Binary-response estimators, APEs and Monte Carlo tables.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", parents=[common, output], help="fit models on a CSV file")
    fit.add_argument("--data", required=True, help="CSV path")
    fit.add_argument("--y", required=True, dest="outcome", help="binary outcome column")
    fit.add_argument("--x", required=True, type=_names, dest="regressors", help="comma-separated regressors")
    fit.add_argument(
        "--interact",
        type=_pair,
        action="append",
        default=[],
        dest="interactions",
        help="interaction A:B (repeatable)",
    )
    fit.add_argument(
        "--full-interact",
        dest="full_interactions_with",
        help="interact this binary with every regressor",
    )
    fit.add_argument(
        "--estimators",
        type=_names,
        default=[k.value for k in DEFAULT_ESTIMATORS],
        help="subset of ols,ramp,probit,logit,trimmed",
    )
    fit.add_argument(
        "--ape", type=_names, dest="ape_variables", help="APE variables (default: all regressors)"
    )
    fit.add_argument("--bootstrap", type=int, default=0, help="bootstrap replications for APE SEs")

    table = sub.add_parser("table", parents=[common, output, simulation], help="reproduce a simulation table")
    table.add_argument("table_id", type=int)

    simulate = sub.add_parser("simulate", parents=[common, output, simulation], help="run a custom scenario")
    simulate.add_argument("--design", choices=["sym", "asym", "uniwide"], required=True)
    simulate.add_argument("--error", type=_error_law, required=True, help="uniform:A or normal")
    simulate.add_argument("--beta", type=_floats, required=True, help="b0,b1,b2[,b3]")
    simulate.add_argument("--interaction", action="store_true")

    serve = sub.add_parser("serve", parents=[common], help="run the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _configure_logging(verbose: int) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, get_settings().log_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s")


def _config(args: argparse.Namespace) -> CliConfig:
    skip = ("verbose", "error", "beta")
    values = {k: v for k, v in vars(args).items() if v is not None and k not in skip}
    if args.command == "simulate":
        law, a = args.error
        scenario = {
            "design": args.design,
            "error_law": law,
            "a": a,
            "betas": args.beta,
            "interaction": args.interaction,
        }
        scenario.update({k: values[k] for k in ("reps", "n_obs", "seed") if k in values})
        values = {k: v for k, v in values.items() if k not in ("design", "interaction")}
        values["scenario"] = scenario
    return CliConfig.model_validate(values)


def _emit(text: str, config: CliConfig) -> None:
    if config.out is None:
        sys.stdout.write(text)
    else:
        config.out.write_text(text, encoding="utf-8")
        logger.info("Wrote %s", config.out)


def cmd_fit(config: CliConfig) -> int:
    dataset = load_csv(config.data, config.outcome, _used_columns(config))
    spec = DesignSpec(
        regressors=tuple(config.regressors),
        interactions=tuple(config.interactions),
        full_interactions_with=config.full_interactions_with,
    )
    report = build_fit_report(
        dataset,
        spec,
        config.estimators,
        config.ape_variables,
        bootstrap_reps=config.bootstrap,
        seed=config.seed,
        n_jobs=config.jobs,
    )
    _emit(render_fit(report, config.format, config.precision), config)
    return EXIT_ESTIMATION if report.failed else EXIT_OK


def _used_columns(config: CliConfig) -> list[str]:
    names = [*config.regressors, *(p for pair in config.interactions for p in pair)]
    if config.full_interactions_with:
        names.append(config.full_interactions_with)
    return list(dict.fromkeys(names))


def _emit_simulation(run: Callable[[], SimReport], config: CliConfig) -> int:
    try:
        report = run()
    except TooManyFailures as exc:
        # write the partial report before failing
        if exc.report is not None:
            _emit(render_simulation(exc.report, config.format, config.precision), config)
        raise
    _emit(render_simulation(report, config.format, config.precision), config)
    return EXIT_OK


def cmd_table(config: CliConfig) -> int:
    return _emit_simulation(
        lambda: reproduce_table(
            config.table_id,
            config.seed,
            reps=config.reps,
            n_obs=config.n_obs,
            with_se=config.with_se,
            n_jobs=config.jobs,
        ),
        config,
    )


def cmd_simulate(config: CliConfig) -> int:
    return _emit_simulation(
        lambda: run_mc(config.scenario, with_se=config.with_se, n_jobs=config.jobs),
        config,
    )


def cmd_serve(config: CliConfig) -> int:
    from ramplab.main import serve

    serve(config.host, config.port)
    return EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "table": cmd_table,
    "simulate": cmd_simulate,
    "serve": cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    try:
        config = _config(args)
        return COMMANDS[config.command](config)
    except (ValidationError, DataError) as exc:
        print(f"ramplab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EstimationError as exc:
        print(f"ramplab: estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION


if __name__ == "__main__":
    sys.exit(main())
