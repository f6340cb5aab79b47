"""
hyperconv command line

    hyperconv construct  --inline '{"builtin": "max_deformation", "v": "2^n", "n_max": 20}'
    hyperconv verify     --inline '{"builtin": "dunkl_ramirez", "a": "1/3"}' --window 12
    hyperconv convolve   --inline '{"builtin": "cp2"}' 1 2
    hyperconv experiment --spec experiment.json --format md
    hyperconv reproduce  cp2-alpha

Exit codes: 0 success or witness, 1 failed check or reproduction mismatch,
2 invalid input, 3 bounded exhaustion.
"""
import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from . import __version__
from .config import LOG_LEVELS, HyperconvSettings, get_settings
from .core.elements import element_from_json
from .core.errors import HyperconvError, SpecError
from .core.hypergroup import center_report, check_bracketing, descriptor_to_dict, verify_axioms
from .core.ramsey import ExperimentReport, Verdict, check_criterion, search_sequence
from .core.reproduce import REPRODUCERS, ReproductionReport, run_reproducer
from .specs import ExperimentSpec, RunConfig, build

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INVALID = 2
EXIT_EXHAUSTED = 3

BRACKETING_TRIALS = 50


class _Output:
    """A rendered payload and the exit code it implies"""

    def __init__(self, text: str, code: int = EXIT_OK):
        self.text = text if text.endswith("\n") else text + "\n"
        self.code = code


def _dump(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)


def _load_spec(args: argparse.Namespace) -> Dict[str, Any]:
    if args.spec and args.inline:
        raise SpecError("pass either --spec or --inline, not both")
    if args.spec:
        raw = Path(args.spec).read_text(encoding="utf-8")
    elif args.inline:
        raw = args.inline
    else:
        raise SpecError("a construction or experiment spec is required (--spec FILE or --inline JSON)")
    data = json.loads(raw)
    if not isinstance(data, dict):
        raise SpecError("spec must be a JSON object")
    return data


def _json_only(config: RunConfig) -> None:
    if config.output_format != "json":
        raise SpecError(f"format {config.output_format!r} is only available for experiment and reproduce")


# ==================== Commands ====================

def cmd_construct(config: RunConfig) -> _Output:
    _json_only(config)
    built = build(config.spec or {}, allow_failed=True)
    K = built.descriptor
    payload = {
        "descriptor": descriptor_to_dict(K),
        "conditions": built.conditions.to_dict() if built.conditions is not None else None,
        "seed": config.seed,
    }
    if built.conditions is not None and not built.conditions.passed:
        failing = ", ".join(c.name for c in built.conditions.failures())
        print(f"error: ConditionsNotVerified: {failing}", file=sys.stderr)
        return _Output(_dump(payload), EXIT_INVALID)
    return _Output(_dump(payload))


def cmd_verify(config: RunConfig) -> _Output:
    _json_only(config)
    K = build(config.spec or {}).descriptor
    window = K.window(config.window)
    axioms = verify_axioms(K, window)
    bracketing = check_bracketing(K, window, random.Random(config.seed), trials=BRACKETING_TRIALS)
    payload = {
        "subject": K.name,
        "spec_hash": K.spec_hash,
        "claims": sorted(c.value for c in K.claims),
        "axioms": axioms.to_dict(),
        "bracketing": bracketing.to_dict(),
        "center": center_report(K, window),
        "seed": config.seed,
    }
    passed = axioms.passed and bracketing.passed
    if not passed:
        logger.warning(f"{K.name}: verification failed on a window of {len(window)} elements")
    return _Output(_dump(payload), EXIT_OK if passed else EXIT_MISMATCH)


def cmd_convolve(config: RunConfig, operands: Sequence[str]) -> _Output:
    _json_only(config)
    if not operands:
        raise SpecError("convolve needs at least one element")
    K = build(config.spec or {}).descriptor
    elements = [element_from_json(json.loads(raw)) for raw in operands]
    mu = K.convolve_sequence(elements)
    payload = {
        "subject": K.name,
        "spec_hash": K.spec_hash,
        "operands": [json.loads(raw) for raw in operands],
        "measure": mu.to_json(),
        "seed": config.seed,
    }
    return _Output(_dump(payload))


def run_experiment(spec: ExperimentSpec, config: RunConfig) -> ExperimentReport:
    K = build(spec.hypergroup).descriptor
    coloring = spec.coloring.to_coloring()
    criterion = spec.criterion.to_criterion()
    depth = spec.depth or config.depth
    if spec.sequence is not None:
        xs = [element_from_json(x) for x in spec.sequence]
        report = check_criterion(K, xs, coloring, depth, criterion)
    else:
        # window N: the identity plus the next N carrier elements
        window = K.window((spec.window or config.window) + 1)
        report = search_sequence(K, coloring, depth, window, criterion, threads=config.threads)
    report.seed = config.seed
    return report


def cmd_experiment(config: RunConfig) -> _Output:
    spec = ExperimentSpec.model_validate(config.spec or {})
    report = run_experiment(spec, config)
    code = EXIT_OK if report.verdict is Verdict.WITNESS else EXIT_EXHAUSTED
    if config.output_format == "md":
        return _Output(report.markdown(), code)
    if config.output_format == "csv":
        return _Output("\n".join(report.csv_rows()), code)
    return _Output(_dump(report.to_dict()), code)


def _reproduction_markdown(reports: List[ReproductionReport]) -> str:
    lines = ["| reproducer | passed | checked | failures |", "|---|---|---|---|"]
    for r in reports:
        lines.append(f"| {r.name} | {'yes' if r.passed else 'NO'} | {r.checked} | {len(r.failures)} |")
    return "\n".join(lines)


def cmd_reproduce(config: RunConfig) -> _Output:
    reports = run_reproducer(config.name or "", seed=config.seed)
    code = EXIT_OK if all(r.passed for r in reports) else EXIT_MISMATCH
    for r in reports:
        if not r.passed:
            logger.warning(f"Reproducer {r.name} failed on {len(r.failures)} of {r.checked} cases")
    if config.output_format == "md":
        return _Output(_reproduction_markdown(reports), code)
    if config.output_format == "csv":
        rows = ["name;passed;checked;failures"] + [f"{r.name};{r.passed};{r.checked};{len(r.failures)}" for r in reports]
        return _Output("\n".join(rows), code)
    payload = {"seed": config.seed, "reports": [r.to_dict() for r in reports]}
    return _Output(_dump(payload), code)


# ==================== Entry point ====================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperconv", description="Exact convolution engine for discrete hypergroups")
    parser.add_argument("--version", action="version", version=f"hyperconv {__version__}")
    parser.add_argument("--log-level", choices=LOG_LEVELS, type=str.upper, default=None,
                        help="Logging level (default: HYPERCONV_LOG_LEVEL or WARNING)")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="Path to a JSON spec")
    common.add_argument("--inline", help="Inline JSON spec")
    common.add_argument("--out", help="Write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "md"), default="json", help="Report format")
    common.add_argument("--window", type=int, help="Window size (default: HYPERCONV_WINDOW)")
    common.add_argument("--depth", type=int, help="Search depth (default: HYPERCONV_DEPTH)")
    common.add_argument("--seed", type=int, help="Seed for randomized sweeps (default: HYPERCONV_SEED)")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("construct", parents=[common], help="Build a descriptor and report its conditions")
    sub.add_parser("verify", parents=[common], help="Check the axioms on a window")
    convolve = sub.add_parser("convolve", parents=[common], help="Convolve point masses left to right")
    convolve.add_argument("operands", nargs="*", help="Elements as JSON, e.g. 3 or [1,2]")
    sub.add_parser("experiment", parents=[common], help="Run a bounded Ramsey experiment")
    reproduce = sub.add_parser("reproduce", parents=[common], help="Run an exact reproducer")
    reproduce.add_argument("name", choices=sorted(REPRODUCERS) + ["all"])
    return parser


def _run_config(args: argparse.Namespace, settings: HyperconvSettings) -> RunConfig:
    spec = _load_spec(args) if args.command != "reproduce" else None
    return RunConfig(
        command=args.command,
        spec=spec,
        name=getattr(args, "name", None),
        out=args.out,
        format=args.format,
        seed=args.seed if args.seed is not None else settings.seed,
        window=args.window if args.window is not None else settings.window,
        depth=args.depth if args.depth is not None else settings.depth,
        threads=settings.threads,
    )


def _dispatch(config: RunConfig, args: argparse.Namespace) -> _Output:
    if config.command == "construct":
        return cmd_construct(config)
    if config.command == "verify":
        return cmd_verify(config)
    if config.command == "convolve":
        return cmd_convolve(config, args.operands)
    if config.command == "experiment":
        return cmd_experiment(config)
    return cmd_reproduce(config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code"""
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
    except ValidationError as exc:
        print(f"error: ValidationError: {exc}", file=sys.stderr)
        return EXIT_INVALID

    logging.basicConfig(
        level=getattr(logging, settings.effective_log_level(args.log_level)),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        config = _run_config(args, settings)
        output = _dispatch(config, args)
    except (HyperconvError, ValidationError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if config.out:
        Path(config.out).write_text(output.text, encoding="utf-8")
        logger.info(f"Wrote {config.command} report to {config.out}")
    else:
        sys.stdout.write(output.text)
    return output.code


if __name__ == "__main__":
    sys.exit(main())
