"""
Command-line front end.

Usage: python main.py <command> [options]

Commands write machine-readable output (JSON or CSV) to stdout and
diagnostics to stderr. Exit codes: 0 success/PASS, 1 domain failure
(broken hypothesis or FAIL verdict), 2 usage or parse error.
"""
import argparse
import json
import logging
import sys
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from phaseforge import __version__, equiv, phtype, possys, scenarios, xform
from phaseforge.config import settings
from phaseforge.errors import NoConvergence, PhaseForgeError, UsageError
from phaseforge.models import ContPH, Realization, SystemKind
from phaseforge.schemas import (
    CheckReport,
    EvalTarget,
    RealizationDocument,
    SampleSummary,
    ScenarioInfo,
    TransformDocument,
)

logger = logging.getLogger(__name__)


# Input helpers

def load_document(path: str, schema: type) -> BaseModel:
    """Read and validate a JSON document; any failure is a usage error."""
    try:
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    try:
        return schema.model_validate(payload)
    except ValidationError as e:
        raise UsageError(f"{path}: {e}")


def parse_rates(spec: Optional[str]) -> Dict[str, str]:
    """'xi1=0.7,beta2=0.1' -> {'xi1': '0.7', 'beta2': '0.1'}; the rate models coerce the values."""
    rates = {}
    if not spec:
        return rates
    for item in spec.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"rate override {item!r} is not key=value")
        rates[key.strip()] = value.strip()
    return rates


def parse_grid(spec: str) -> np.ndarray:
    """
    Grid specification.

    'K0..K1' integer steps, 'start:stop:step' an evenly spaced range with
    stop included, 'a,b,c' an explicit list.
    """
    try:
        if ".." in spec:
            first, last = spec.split("..")
            return np.arange(int(first), int(last) + 1)
        if ":" in spec:
            start, stop, step = (float(part) for part in spec.split(":"))
            if step <= 0 or stop < start:
                raise UsageError(f"grid {spec!r} needs start <= stop and a positive step")
            count = int(round((stop - start) / step)) + 1
            return start + step * np.arange(count)
        values = np.array([float(part) for part in spec.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse grid {spec!r}")
    if np.all(values == np.round(values)):
        return values.astype(int)
    return values


def realization_from_args(args) -> Realization:
    if args.input and args.scenario:
        raise UsageError("give either --input or --scenario, not both")
    if args.scenario:
        return scenarios.build_scenario(args.scenario, parse_rates(args.rates))
    if not args.input:
        raise UsageError("one of --input or --scenario is required")
    if args.rates:
        raise UsageError("--rates only applies to --scenario")
    document = load_document(args.input, RealizationDocument)
    return document.to_realization()


# Output helpers

def write_csv(frame: pd.DataFrame):
    frame.to_csv(
        sys.stdout,
        index=False,
        float_format=f"%.{settings.CSV_DIGITS}g",
        lineterminator="\n",
    )


def write_json(model: BaseModel, **dump):
    sys.stdout.write(model.model_dump_json(indent=2, **dump) + "\n")


def flatten(prefix: str, value, rows: List[tuple]):
    """Flatten nested lists/dicts into (key, value) rows with 1-based indices."""
    if isinstance(value, dict):
        for key, item in value.items():
            flatten(f"{prefix}.{key}" if prefix else key, item, rows)
    elif isinstance(value, list):
        for i, item in enumerate(value, start=1):
            flatten(f"{prefix}[{i}]", item, rows)
    elif value is not None:
        rows.append((prefix, value))


# Commands

def cmd_check(args) -> int:
    document = load_document(args.input, RealizationDocument)
    A = np.array(document.A, dtype=float)
    continuous = document.kind is SystemKind.CONTINUOUS
    structural = possys.is_metzler(A) if continuous else possys.is_nonnegative(A)
    excitable = possys.is_excitable(A, document.B)

    stable = None
    if structural:
        try:
            stable = possys.is_stable(document.to_realization())
        except NoConvergence as e:
            logger.warning("stability undecided: %s", e)

    flag = "metzler" if continuous else "nonneg"
    report = CheckReport(order=A.shape[0], excitable=excitable, stable=stable, **{flag: structural})
    write_json(report, exclude={"nonneg"} if continuous else {"metzler"})
    return 0 if report.hypotheses_hold() else 1


def cmd_convert(args) -> int:
    r = realization_from_args(args)
    tr = xform.to_ph(r)
    document = TransformDocument.from_result(r, tr)

    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(document.model_dump_json(indent=2) + "\n")
        logger.info("wrote %s", args.output)

    if args.format == "csv":
        rows: List[tuple] = []
        flatten("", document.model_dump(mode="json"), rows)
        write_csv(pd.DataFrame(rows, columns=["key", "value"]))
    else:
        write_json(document)
    return 0


def cmd_eval(args) -> int:
    document = load_document(args.input, TransformDocument)
    d = document.to_ph(raw_alpha=args.raw_alpha)
    what = EvalTarget(args.what)
    continuous = isinstance(d, ContPH)

    if args.raw_alpha:
        print(f"# point_mass={d.deficit:.{settings.CSV_DIGITS}g}", file=sys.stderr)

    if what in (EvalTarget.MEAN, EvalTarget.VARIANCE):
        value = phtype.ph_mean(d) if what is EvalTarget.MEAN else phtype.ph_variance(d)
        write_csv(pd.DataFrame({"x": [what.value], "value": [value]}))
        return 0

    if what is EvalTarget.EDGES:
        write_csv(pd.DataFrame(phtype.exit_edges(d), columns=["from", "to", "weight"]))
        return 0

    if not args.grid:
        raise UsageError(f"--what {what.value} needs --grid")
    grid = parse_grid(args.grid)

    if what is EvalTarget.TPM:
        rows = []
        for s in grid:
            P = phtype.tpm(d, s)
            for i in range(P.shape[0]):
                for j in range(P.shape[1]):
                    rows.append((s, i + 1, j + 1, P[i, j]))
        write_csv(pd.DataFrame(rows, columns=["s", "i", "j", "p"]))
        return 0

    if what is EvalTarget.QUANTILE:
        values = [phtype.ph_quantile(d, p) for p in grid]
    elif what is EvalTarget.CDF:
        values = [phtype.cdf(d, x) for x in grid]
    elif what is EvalTarget.PDF:
        if not continuous:
            raise UsageError("pdf applies to continuous distributions; use pmf")
        values = [phtype.cph_pdf(d, x) for x in grid]
    else:
        if continuous:
            raise UsageError("pmf applies to discrete distributions; use pdf")
        values = [phtype.dph_pmf(d, x) for x in grid]

    write_csv(pd.DataFrame({"x": grid, "value": values}))
    return 0


def cmd_simulate(args) -> int:
    document = load_document(args.input, TransformDocument)
    d = document.to_ph()
    seed = settings.SEED if args.seed is None else args.seed
    samples = phtype.ph_sample(d, args.samples, seed)

    values = samples.values
    if document.kind is SystemKind.DISCRETE:
        values = values.astype(int)
    write_csv(pd.DataFrame({"value": values}))

    summary = SampleSummary(mean=samples.mean, var=samples.variance, n=samples.count, seed=seed)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as handle:
            handle.write(summary.model_dump_json(indent=2) + "\n")
    else:
        print(summary.model_dump_json(), file=sys.stderr)
    return 0


def cmd_compare(args) -> int:
    r = realization_from_args(args)
    scenario = scenarios.SCENARIOS.get(args.scenario) if args.scenario else None
    u_level = args.u if args.u is not None else (scenario.default_u if scenario else None)
    grid_spec = args.grid or (scenario.default_grid if scenario else None)
    if u_level is None or grid_spec is None:
        raise UsageError("--u and --grid are required with --input")

    tr = xform.to_ph(r)
    report = equiv.verify_equivalence(r, tr, u_level, parse_grid(grid_spec))
    write_csv(pd.DataFrame({"t": report.grid, "y_system": report.y_system, "y_ph": report.y_ph}))
    verdict = "PASS" if report.passed else "FAIL"
    sys.stdout.write(f"MAX_ABS_ERR={report.max_abs_err:.6e} {verdict}\n")
    return 0 if report.passed else 1


def cmd_scenarios(args) -> int:
    infos = [
        ScenarioInfo(name=s.name, description=s.description, rates=scenarios.default_rates(s.name)).model_dump()
        for s in scenarios.SCENARIOS.values()
    ]
    sys.stdout.write(json.dumps(infos, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phaseforge",
        description="Turn positive linear systems into phase-type distributions",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help=f"logging level (default: {settings.LOG_LEVEL})")
    commands = parser.add_subparsers(dest="command", required=True)

    def add_source(sub):
        sub.add_argument("--input", help="realization JSON document")
        sub.add_argument("--scenario", choices=sorted(scenarios.SCENARIOS), help="built-in example")
        sub.add_argument("--rates", help="scenario rate overrides, e.g. xi1=0.7,beta1=0.1")

    check = commands.add_parser("check", help="test the transform hypotheses of a realization")
    check.add_argument("--input", required=True, help="realization JSON document")
    check.set_defaults(handler=cmd_check)

    convert = commands.add_parser("convert", help="transform a realization into a PH representation")
    add_source(convert)
    convert.add_argument("--format", choices=["json", "csv"], default="json")
    convert.add_argument("--output", help="also write the transform document to this file")
    convert.set_defaults(handler=cmd_convert)

    evaluate = commands.add_parser("eval", help="evaluate a converted distribution on a grid")
    evaluate.add_argument("--input", required=True, help="transform JSON document")
    evaluate.add_argument("--what", required=True, choices=[t.value for t in EvalTarget])
    evaluate.add_argument("--grid", help="'start:stop:step', 'K0..K1' or 'a,b,c'")
    evaluate.add_argument("--raw-alpha", action="store_true",
                          help="use the unnormalized initial vector (point mass 1 - psi at zero)")
    evaluate.set_defaults(handler=cmd_eval)

    simulate = commands.add_parser("simulate", help="sample absorption times")
    simulate.add_argument("--input", required=True, help="transform JSON document")
    simulate.add_argument("--samples", type=int, required=True)
    simulate.add_argument("--seed", type=int, default=None, help="default: PHASEFORGE_SEED")
    simulate.add_argument("--summary", help="write the JSON summary here instead of stderr")
    simulate.set_defaults(handler=cmd_simulate)

    compare = commands.add_parser("compare", help="check y(t) = psi * u * F(t) against simulation")
    add_source(compare)
    compare.add_argument("--u", type=float, default=None, help="constant input level")
    compare.add_argument("--grid", default=None)
    compare.set_defaults(handler=cmd_compare)

    listing = commands.add_parser("scenarios", help="list built-in scenarios and default rates")
    listing.set_defaults(handler=cmd_scenarios)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    level = (args.log_level or settings.LOG_LEVEL).upper()
    if not isinstance(logging.getLevelName(level), int):
        print(f"error: unknown log level {level!r}", file=sys.stderr)
        return UsageError.exit_code
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.handler(args)
    except PhaseForgeError as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
