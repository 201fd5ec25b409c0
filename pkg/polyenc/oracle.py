"""Satisfiability checks against an expected status.

``check_status`` combines the model finder and the refuter: a model proves
satisfiability, a refutation proves unsatisfiability, and running out of
budget in either direction is inconclusive.
"""

from __future__ import annotations

import logging
import re
import shlex
import subprocess
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from polyenc import config
from polyenc.clausify import clausify, is_clausifiable
from polyenc.errors import InputError
from polyenc.logic import Level, Problem
from polyenc.models import FiniteModel, find_model
from polyenc.refute import RefuteResult, refute

logger = logging.getLogger(__name__)

SZS_STATUS_PATTERN = re.compile(r"%?\s*SZS status\s+(\w+)")

# SZS statuses grouped by what they say about the printed (negated-conjecture) problem
SZS_UNSAT = frozenset({"Theorem", "Unsatisfiable", "ContradictoryAxioms"})
SZS_SAT = frozenset({"Satisfiable", "CounterSatisfiable"})


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class Status(str, Enum):
    SAT = "sat"
    UNSAT = "unsat"


@dataclass(frozen=True)
class Expectation:
    status: Status
    bound: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "Expectation":
        """``unsat`` or ``sat:N`` with N >= 1 (plain ``sat`` uses the configured bound)."""
        head, _, rest = text.strip().partition(":")
        head = head.lower()
        if head == Status.UNSAT.value and not rest:
            return cls(Status.UNSAT)
        if head == Status.SAT.value:
            if not rest:
                return cls(Status.SAT, config.MODEL_BOUND)
            try:
                bound = int(rest)
            except ValueError:
                raise InputError(f"bad model bound in expectation {text!r}") from None
            if bound < 1:
                raise InputError(f"model bound must be at least 1, got {bound}")
            return cls(Status.SAT, bound)
        raise InputError(f"expected status must be 'sat:N' or 'unsat', got {text!r}")

    def __str__(self) -> str:
        if self.status is Status.SAT:
            return f"sat:{self.bound}"
        return "unsat"


@dataclass(frozen=True)
class Budget:
    step_limit: int = config.STEP_LIMIT
    time_limit: Optional[float] = config.REFUTE_SECONDS
    # bound for the cross-check model search when an unsat claim is not refuted
    model_bound: int = 2


@dataclass
class CheckResult:
    verdict: Verdict
    expected: Expectation
    detail: str
    model: Optional[FiniteModel] = None
    refutation: Optional[RefuteResult] = None
    prover_status: Optional[str] = None
    encoded_for_oracle: bool = False

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "expected": str(self.expected),
            "detail": self.detail,
            "encoded_for_oracle": self.encoded_for_oracle,
        }
        if self.model is not None:
            out["model"] = self.model.to_dict()
        if self.refutation is not None:
            out["refutation"] = {
                "outcome": self.refutation.outcome.value,
                "steps": self.refutation.steps,
                "saturated": self.refutation.saturated,
            }
        if self.prover_status is not None:
            out["prover_status"] = self.prover_status
        return out


def oracle_problem(problem: Problem) -> Problem:
    """A problem the finder and refuter accept, equisatisfiable with ``problem``.

    Untyped and ground-typed problems are used as they are; anything with type
    variables goes through the traditional guards encoding.
    """
    if problem.level is Level.UNTYPED or is_clausifiable(problem):
        return problem
    from polyenc.pipeline import Scheme, SchemeId, run_pipeline

    logger.debug("Encoding a polymorphic problem with guards before checking it")
    return run_pipeline(problem, SchemeId(Scheme.GUARDS_TRAD)).problem


def _refute(problem: Problem, budget: Budget) -> RefuteResult:
    return refute(clausify(problem), budget.step_limit, budget.time_limit)


def check_status(problem: Problem, expected: Expectation, budget: Optional[Budget] = None) -> CheckResult:
    budget = budget or Budget()
    target = oracle_problem(problem)
    encoded = target is not problem
    if expected.status is Status.SAT:
        model = find_model(target, expected.bound or config.MODEL_BOUND, budget.time_limit)
        if model is not None:
            return CheckResult(Verdict.PASS, expected, f"model of size {model.size}", model=model,
                               encoded_for_oracle=encoded)
        result = _refute(target, budget)
        if result.refuted:
            return CheckResult(Verdict.FAIL, expected, f"refuted in {result.steps} steps", refutation=result,
                               encoded_for_oracle=encoded)
        return CheckResult(Verdict.INCONCLUSIVE, expected, f"no model within bound {expected.bound}",
                           refutation=result, encoded_for_oracle=encoded)
    result = _refute(target, budget)
    if result.refuted:
        return CheckResult(Verdict.PASS, expected, f"refuted in {result.steps} steps", refutation=result,
                           encoded_for_oracle=encoded)
    model = find_model(target, budget.model_bound, budget.time_limit)
    if model is not None:
        return CheckResult(Verdict.FAIL, expected, f"model of size {model.size}", model=model, refutation=result,
                           encoded_for_oracle=encoded)
    return CheckResult(Verdict.INCONCLUSIVE, expected, f"gave up after {result.steps} steps", refutation=result,
                       encoded_for_oracle=encoded)


# --- external prover bridge ------------------------------------------------------


def szs_status(output: str) -> Optional[str]:
    match = SZS_STATUS_PATTERN.search(output)
    return match.group(1) if match else None


def status_of_szs(status: Optional[str]) -> Optional[Status]:
    if status in SZS_UNSAT:
        return Status.UNSAT
    if status in SZS_SAT:
        return Status.SAT
    return None


def run_prover(text: str, command: Optional[str] = None, timeout: Optional[float] = None) -> Optional[str]:
    """Pipe FOF ``text`` into the configured prover and return its SZS status, or None."""
    command = command or config.PROVER
    if not command:
        logger.warning("No external prover configured (POLYENC_PROVER)")
        return None
    timeout = config.PROVER_TIMEOUT if timeout is None else timeout
    try:
        proc = subprocess.run(
            shlex.split(command),
            input=text,
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    except subprocess.TimeoutExpired:
        logger.info("Prover timed out after %.1fs", timeout)
        return "Timeout"
    except OSError as e:
        logger.warning("Failed to run prover %r: %s", command, e)
        return None
    status = szs_status(proc.stdout)
    if status is None:
        logger.warning("Prover exited with %s and printed no SZS status", proc.returncode)
    return status


def check_with_prover(
    problem: Problem,
    expected: Expectation,
    command: Optional[str] = None,
    timeout: Optional[float] = None,
) -> CheckResult:
    """Like :func:`check_status`, but asks the external prover about the printed FOF problem."""
    if problem.level is not Level.UNTYPED:
        raise InputError("the external prover takes untyped problems; encode the problem first")
    from polyenc.tptp import TptpLevel, print_problem

    status = run_prover(print_problem(problem, TptpLevel.FOF), command, timeout)
    found = status_of_szs(status)
    if found is None:
        verdict = Verdict.INCONCLUSIVE
    elif found is expected.status:
        verdict = Verdict.PASS
    else:
        verdict = Verdict.FAIL
    return CheckResult(verdict, expected, f"prover says {status or 'nothing'}", prover_status=status)
