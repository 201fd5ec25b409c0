"""Command-line front end: parse, analyse, monomorphise, encode, check and measure.

Exit codes: 0 on success, 1 for input problems (bad flags, unreadable or
ill-formed problems, level mismatches), 2 for anything else.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from polyenc import config
from polyenc.analysis import CoverPolicy, InfRegistry, classify_args, types_of
from polyenc.clausify import is_clausifiable
from polyenc.encode import WitnessPolicy
from polyenc.errors import InputError
from polyenc.logic import Level, Problem, Type
from polyenc.monomorph import MonoConfig, monomorphise
from polyenc.oracle import Budget, CheckResult, Expectation, Status, check_status, check_with_prover
from polyenc.pipeline import Encoding, SchemeId, analyze, encode_problem, scheme_table
from polyenc.stats import ProblemStats, problem_stats
from polyenc.tptp import TptpLevel, detect_level, format_type, parse, parse_type, print_problem, provenance
from polyenc.typecheck import ensure_well_typed
from polyenc.unify import normalize_type_vars
from polyenc.variables import undercover_vars

logger = logging.getLogger(__name__)

Command = Literal["encode", "analyze", "monomorphise", "check", "stats"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2


class RunConfig(BaseModel):
    command: Command
    input: Optional[str] = None
    output: Optional[str] = None
    scheme: Optional[str] = None
    mono: bool = False
    from_level: Optional[TptpLevel] = None
    to_level: Optional[TptpLevel] = None
    infinite_types_file: Optional[str] = None
    infinite: List[str] = Field(default_factory=list)
    protect_extra: List[str] = Field(default_factory=list)
    cover_policy: CoverPolicy = CoverPolicy(config.COVER_POLICY)
    witness_policy: WitnessPolicy = WitnessPolicy(config.WITNESS_POLICY)
    emit_provenance: Optional[str] = None
    mono_iterations: int = Field(default=config.MONO_ITERATIONS, ge=0)
    mono_budget: int = Field(default=config.MONO_BUDGET, ge=0)
    report_dropped: bool = False
    expect: Optional[str] = None
    steps: int = Field(default=config.STEP_LIMIT, ge=1)
    bound: int = Field(default=config.MODEL_BOUND, ge=1)
    time_limit: Optional[float] = Field(default=config.REFUTE_SECONDS, gt=0)
    prover: bool = False
    clausify: bool = True
    check_stages: bool = False

    @field_validator("expect")
    @classmethod
    def _expectation(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            Expectation.parse(value)
        return value

    @model_validator(mode="after")
    def _flags(self) -> "RunConfig":
        if self.scheme is not None:
            SchemeId.parse(self.scheme, self.mono)
        elif self.mono:
            raise ValueError("--mono needs --scheme")
        if self.command == "encode" and self.scheme is None:
            raise ValueError("encode needs --scheme")
        if self.command == "check" and self.expect is None:
            raise ValueError("check needs --expect")
        if self.prover and not config.PROVER:
            raise ValueError("--prover needs POLYENC_PROVER to name a prover command")
        for text in self.infinite + self.protect_extra:
            parse_type(text)
        return self

    @property
    def scheme_id(self) -> Optional[SchemeId]:
        return SchemeId.parse(self.scheme, self.mono) if self.scheme is not None else None

    @property
    def mono_config(self) -> MonoConfig:
        return MonoConfig(self.mono_iterations, self.mono_budget)

    @property
    def budget(self) -> Budget:
        return Budget(self.steps, self.time_limit)

    @property
    def expectation(self) -> Optional[Expectation]:
        if self.expect is None:
            return None
        expected = Expectation.parse(self.expect)
        if expected.status is Status.SAT and ":" not in self.expect:
            expected = Expectation(expected.status, self.bound)
        return expected

    def registry(self) -> InfRegistry:
        reg = InfRegistry(tuple(parse_type(t) for t in self.infinite))
        if self.infinite_types_file:
            reg = reg.merged(InfRegistry.from_file(self.infinite_types_file).declared)
        return reg

    def forced(self) -> List[Type]:
        return [parse_type(t) for t in self.protect_extra]


# --- operations shared with the HTTP service ------------------------------------


def load_problem(text: str, level: Optional[TptpLevel] = None, include_dir: Optional[Path] = None) -> Problem:
    level = level or detect_level(text)
    problem, _ = parse(text, level, allow_reserved=level is TptpLevel.FOF, include_dir=include_dir)
    ensure_well_typed(problem)
    return problem


def run_encode(problem: Problem, cfg: RunConfig) -> Encoding:
    return encode_problem(
        problem,
        cfg.scheme_id,
        inf=cfg.registry(),
        mono_cfg=cfg.mono_config,
        cover_policy=cfg.cover_policy,
        witness_policy=cfg.witness_policy,
        forced=cfg.forced(),
        check_stages=cfg.check_stages,
    )


def encoding_text(encoding: Encoding, level: Optional[TptpLevel] = None) -> str:
    return print_problem(encoding.encoded.problem, level or TptpLevel.FOF)


def _queried_types(problem: Problem, polymorphic: bool) -> List[Type]:
    out: List[Type] = []
    for ty in types_of(problem):
        if polymorphic:
            ty = normalize_type_vars(ty)
        if ty not in out:
            out.append(ty)
    return out


def analysis_report(problem: Problem, cfg: RunConfig) -> Dict[str, Any]:
    """Verdicts with reasons, naked and undercover variables, covers and argument classes."""
    if problem.level is Level.UNTYPED:
        raise InputError("analysis needs a typed problem")
    polymorphic = not problem.is_monomorphic()
    ctx = analyze(problem, cfg.registry(), polymorphic, cfg.cover_policy, cfg.witness_policy, cfg.forced())
    verdicts = ctx.verdicts
    types = []
    for ty in _queried_types(problem, polymorphic):
        types.append({
            "type": format_type(ty),
            "monotonic": verdicts(ty),
            "quick": verdicts.quick(ty),
            "reason": verdicts.reason(ty),
        })
    undercover = {}
    for nf in problem.formulas:
        found = sorted(v.name for v in undercover_vars(nf.formula, ctx.covers))
        if found:
            undercover[nf.name] = found
    return {
        "polymorphic": polymorphic,
        "types": types,
        "infinite": [format_type(t) for t in ctx.inf.declared],
        "U": [format_type(t) for t in ctx.V],
        "naked": [
            {"var": occ.var.name, "type": format_type(occ.var.ty), "formula": occ.formula}
            for occ in verdicts.naked
        ],
        "undercover": undercover,
        "covers": {sym: sorted(idx) for sym, idx in sorted(ctx.covers.items())},
        "classes": {
            sym: {
                "phantom": sorted(c.phantom),
                "inferable": sorted(c.inferable),
                "noninferable": sorted(c.noninferable),
            }
            for sym, c in classify_args(problem.signature).items()
        },
    }


def format_analysis(report: Dict[str, Any]) -> str:
    lines = []
    for row in report["types"]:
        word = "monotonic" if row["monotonic"] else "nonmonotonic"
        lines.append(f"{row['type']}: {word} ({row['reason']})")
    if report["U"]:
        lines.append("U: " + ", ".join(report["U"]))
    for occ in report["naked"]:
        lines.append(f"naked: {occ['var']}:{occ['type']} in {occ['formula']}")
    for name, names in report["undercover"].items():
        lines.append(f"undercover in {name}: {', '.join(names)}")
    for sym, idx in report["covers"].items():
        cls = report["classes"].get(sym, {})
        lines.append(
            f"{sym}: cover {idx}, phantom {cls.get('phantom', [])}, noninferable {cls.get('noninferable', [])}"
        )
    return "\n".join(lines)


def run_check(problem: Problem, cfg: RunConfig) -> CheckResult:
    if cfg.scheme is not None:
        problem = run_encode(problem, cfg).encoded.problem
    expected = cfg.expectation
    if cfg.prover:
        return check_with_prover(problem, expected)
    return check_status(problem, expected, cfg.budget)


def run_stats(problem: Problem, cfg: RunConfig) -> ProblemStats:
    if cfg.scheme is not None:
        problem = run_encode(problem, cfg).encoded.problem
    clausified = cfg.clausify
    if clausified and problem.level is not Level.UNTYPED and not is_clausifiable(problem):
        logger.warning("Problem has type variables; measuring formulas instead of clauses")
        clausified = False
    return problem_stats(problem, clausified)


# --- commands --------------------------------------------------------------------


def _read_input(cfg: RunConfig) -> Problem:
    if cfg.input in (None, "-"):
        return load_problem(sys.stdin.read(), cfg.from_level)
    path = Path(cfg.input)
    return load_problem(path.read_text(), cfg.from_level, include_dir=path.parent)


def _write_output(cfg: RunConfig, text: str) -> None:
    if cfg.output and cfg.output != "-":
        Path(cfg.output).write_text(text)
        logger.info("Wrote %s", cfg.output)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_encode(cfg: RunConfig) -> int:
    encoding = run_encode(_read_input(cfg), cfg)
    _write_output(cfg, encoding_text(encoding, cfg.to_level))
    if cfg.emit_provenance:
        data = provenance(encoding.encoded.problem)
        Path(cfg.emit_provenance).write_text(json.dumps(data, indent=2))
    if encoding.mono is not None and encoding.mono.dropped:
        logger.warning("Monomorphisation dropped %d formulas", len(encoding.mono.dropped))
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    report = analysis_report(_read_input(cfg), cfg)
    _write_output(cfg, format_analysis(report))
    return EXIT_OK


def cmd_monomorphise(cfg: RunConfig) -> int:
    result = monomorphise(_read_input(cfg), cfg.mono_config)
    _write_output(cfg, print_problem(result.problem, cfg.to_level or TptpLevel.TFF0))
    if cfg.report_dropped:
        for name in result.dropped:
            print(f"dropped: {name}", file=sys.stderr)
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    result = run_check(_read_input(cfg), cfg)
    _write_output(cfg, f"{result.verdict.value}: {result.detail}")
    return EXIT_OK


def cmd_stats(cfg: RunConfig) -> int:
    _write_output(cfg, str(run_stats(_read_input(cfg), cfg)))
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "encode": cmd_encode,
    "analyze": cmd_analyze,
    "monomorphise": cmd_monomorphise,
    "check": cmd_check,
    "stats": cmd_stats,
}


def _scheme_help() -> str:
    rows = [f"  {row['name']:<10} {' > '.join(row['stages']):<16} {row['description']}" for row in scheme_table()]
    return "schemes (name, stages applied left to right):\n" + "\n".join(rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyenc",
        description="Translate polymorphic TPTP problems into untyped ones via type encodings.",
        epilog=_scheme_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--log-level", default=config.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("input", nargs="?", default="-", help="problem file (default: stdin)")
        p.add_argument("-o", "--output")
        p.add_argument("--from", dest="from_level", choices=[lv.value for lv in TptpLevel])
        p.add_argument("--infinite-types", dest="infinite_types_file", help="file with one infinite type per line")
        p.add_argument("--infinite", action="append", default=[], help="an infinite type, e.g. 'list(A)'")
        p.add_argument("--protect-extra", action="append", default=[], help="treat this type as nonmonotonic")
        p.add_argument("--cover-policy", default=config.COVER_POLICY, choices=[c.value for c in CoverPolicy])
        p.add_argument("--witness-policy", default=config.WITNESS_POLICY, choices=[w.value for w in WitnessPolicy])
        p.add_argument("--mono-iterations", type=int, default=config.MONO_ITERATIONS)
        p.add_argument("--mono-budget", type=int, default=config.MONO_BUDGET)

    def scheme_flags(p: argparse.ArgumentParser, required: bool) -> None:
        p.add_argument("--scheme", required=required)
        p.add_argument("--mono", action="store_true", help="use the monomorphic variant (monomorphising first)")
        p.add_argument("--check-stages", action="store_true", help="type-check after every stage")

    p = sub.add_parser("encode", help="encode a typed problem as FOF", epilog=_scheme_help(),
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    scheme_flags(p, required=True)
    p.add_argument("--to", dest="to_level", choices=[lv.value for lv in TptpLevel])
    p.add_argument("--emit-provenance", help="write a JSON sidecar mapping output names to sources")

    p = sub.add_parser("analyze", help="report monotonicity verdicts, covers and argument classes")
    common(p)

    p = sub.add_parser("monomorphise", help="instantiate type variables and mangle symbols")
    common(p)
    p.add_argument("--to", dest="to_level", choices=[lv.value for lv in TptpLevel])
    p.add_argument("--report-dropped", action="store_true")

    p = sub.add_parser("check", help="check a problem against its expected status")
    common(p)
    scheme_flags(p, required=False)
    p.add_argument("--expect", required=True, help="'sat:N' or 'unsat'")
    p.add_argument("--steps", type=int, default=config.STEP_LIMIT)
    p.add_argument("--bound", type=int, default=config.MODEL_BOUND)
    p.add_argument("--time-limit", type=float, default=config.REFUTE_SECONDS)
    p.add_argument("--prover", action="store_true", help="ask the external prover in POLYENC_PROVER")

    p = sub.add_parser("stats", help="clause, literal and symbol counts")
    common(p)
    scheme_flags(p, required=False)
    p.add_argument("--no-clausify", dest="clausify", action="store_false")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if k != "log_level" and v is not None}
    return RunConfig(**values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; bad flags are input errors here
        return EXIT_OK if e.code in (0, None) else EXIT_INPUT
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(message)s",
        stream=sys.stderr,
    )
    started = time.perf_counter()
    try:
        cfg = config_from_args(args)
        code = COMMANDS[cfg.command](cfg)
    except ValidationError as e:
        logger.error("Invalid options: %s", "; ".join(err["msg"] for err in e.errors()))
        return EXIT_INPUT
    except (InputError, OSError) as e:
        logger.error("%s", e)
        return EXIT_INPUT
    except Exception as e:
        logger.exception("Internal error: %s", e)
        return EXIT_INTERNAL
    logger.debug("%s finished in %.2fs", args.command, time.perf_counter() - started)
    return code


if __name__ == "__main__":
    sys.exit(main())
