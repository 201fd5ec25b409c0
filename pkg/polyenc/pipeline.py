"""Scheme table and stage composition."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

from polyenc import config
from polyenc.analysis import (
    CoverPolicy,
    InfRegistry,
    MonoVerdicts,
    choose_covers,
    compute_U,
    infer_mono_monomorphic,
    infer_mono_polymorphic,
)
from polyenc.encode import (
    ArgFilter,
    EncodedProblem,
    WitnessPolicy,
    add_type_args,
    erase,
    guards_cover,
    guards_feather,
    guards_light,
    guards_traditional,
    tags_cover,
    tags_feather,
    tags_light,
    tags_traditional,
)
from polyenc.errors import InputError, InternalError, LevelMismatch
from polyenc.logic import Level, Problem, Type
from polyenc.monomorph import MonoConfig, MonoResult, monomorphise
from polyenc.typecheck import check_well_typed
from polyenc.variables import CoverAssignment

logger = logging.getLogger(__name__)


class Scheme(str, Enum):
    ERASED = "e"
    ARGS = "a"
    ARGS_PHAN = "a_phan"
    ARGS_NINF = "a_ninf"
    TAGS_TRAD = "t"
    GUARDS_TRAD = "g"
    TAGS_COVER = "t_at"
    GUARDS_COVER = "g_at"
    TAGS_LIGHT = "t_q"
    TAGS_FEATHER = "t_qq"
    GUARDS_LIGHT = "g_q"
    GUARDS_FEATHER = "g_qq"


_POLY_STAGES: Dict[Scheme, Tuple[str, ...]] = {
    Scheme.ERASED: ("e",),
    Scheme.ARGS: ("a", "e"),
    Scheme.ARGS_PHAN: ("a_phan", "e"),
    Scheme.ARGS_NINF: ("a_ninf", "e"),
    Scheme.TAGS_TRAD: ("t", "a_phan", "e"),
    Scheme.GUARDS_TRAD: ("g", "a_ninf", "e"),
    Scheme.TAGS_COVER: ("t_at", "a_ninf", "e"),
    Scheme.GUARDS_COVER: ("g_at", "a_ninf", "e"),
    Scheme.TAGS_LIGHT: ("t_q", "a", "e"),
    Scheme.TAGS_FEATHER: ("t_qq", "a", "e"),
    Scheme.GUARDS_LIGHT: ("g_q", "a", "e"),
    Scheme.GUARDS_FEATHER: ("g_qq", "a", "e"),
}

# Type arguments and covers have no monomorphic variant.
_MONO_SCHEMES = (
    Scheme.ERASED,
    Scheme.TAGS_TRAD,
    Scheme.GUARDS_TRAD,
    Scheme.TAGS_LIGHT,
    Scheme.TAGS_FEATHER,
    Scheme.GUARDS_LIGHT,
    Scheme.GUARDS_FEATHER,
)

_DESCRIPTIONS: Dict[Scheme, str] = {
    Scheme.ERASED: "full type erasure (unsound)",
    Scheme.ARGS: "all type arguments",
    Scheme.ARGS_PHAN: "phantom type arguments only",
    Scheme.ARGS_NINF: "noninferable type arguments only",
    Scheme.TAGS_TRAD: "traditional type tags",
    Scheme.GUARDS_TRAD: "traditional type guards",
    Scheme.TAGS_COVER: "cover-based type tags",
    Scheme.GUARDS_COVER: "cover-based type guards",
    Scheme.TAGS_LIGHT: "lightweight monotonicity-based tags",
    Scheme.TAGS_FEATHER: "featherweight monotonicity-based tags",
    Scheme.GUARDS_LIGHT: "lightweight monotonicity-based guards",
    Scheme.GUARDS_FEATHER: "featherweight monotonicity-based guards",
}

UNSOUND = frozenset({Scheme.ERASED, Scheme.ARGS, Scheme.ARGS_PHAN, Scheme.ARGS_NINF})


@dataclass(frozen=True)
class SchemeId:
    scheme: Scheme
    mono: bool = False

    @classmethod
    def parse(cls, name: str, mono: bool = False) -> "SchemeId":
        try:
            scheme = Scheme(name)
        except ValueError:
            valid = ", ".join(s.value for s in Scheme)
            raise InputError(f"unknown scheme {name!r}; valid schemes: {valid}") from None
        if mono and scheme not in _MONO_SCHEMES:
            valid = ", ".join(s.value for s in _MONO_SCHEMES)
            raise InputError(f"scheme {name!r} has no monomorphic variant; choose one of {valid}")
        return cls(scheme, mono)

    @property
    def name(self) -> str:
        return ("mono_" if self.mono else "") + self.scheme.value

    @property
    def stages(self) -> Tuple[str, ...]:
        stages = _POLY_STAGES[self.scheme]
        if self.mono:
            return tuple(s for s in stages if not s.startswith("a"))
        return stages

    @property
    def sound(self) -> bool:
        return self.scheme not in UNSOUND

    @property
    def description(self) -> str:
        return _DESCRIPTIONS[self.scheme]


def all_schemes() -> List[SchemeId]:
    out = [SchemeId(s) for s in Scheme]
    out += [SchemeId(s, mono=True) for s in _MONO_SCHEMES]
    return out


def scheme_table() -> List[Dict[str, object]]:
    return [
        {
            "name": s.name,
            "scheme": s.scheme.value,
            "mono": s.mono,
            "stages": list(s.stages),
            "sound": s.sound,
            "description": s.description,
        }
        for s in all_schemes()
    ]


@dataclass(frozen=True)
class AnalysisContext:
    inf: InfRegistry
    covers: CoverAssignment
    verdicts: MonoVerdicts
    V: Tuple[Type, ...]
    witness_policy: WitnessPolicy = WitnessPolicy.UNCOVERED


def analyze(
    problem: Problem,
    inf: Optional[InfRegistry] = None,
    polymorphic: Optional[bool] = None,
    cover_policy: Union[CoverPolicy, str] = config.COVER_POLICY,
    witness_policy: Union[WitnessPolicy, str] = config.WITNESS_POLICY,
    forced: Sequence[Type] = (),
) -> AnalysisContext:
    """Everything the encodings need to know about ``problem``."""
    if problem.level is Level.UNTYPED:
        raise LevelMismatch("analysis needs a typed problem")
    registry = InfRegistry(tuple(problem.infinite))
    if inf is not None:
        registry = registry.merged(inf.declared)
    if polymorphic is None:
        polymorphic = not problem.is_monomorphic()
    if polymorphic:
        verdicts = infer_mono_polymorphic(problem, registry, forced)
        V = compute_U(problem, verdicts, registry)
    else:
        verdicts = infer_mono_monomorphic(problem, registry, forced)
        V = ()
    covers = choose_covers(problem.signature, cover_policy)
    return AnalysisContext(registry, covers, verdicts, V, WitnessPolicy(witness_policy))


def _stage(name: str, problem: Problem, ctx: AnalysisContext, level: Level) -> EncodedProblem:
    if name == "e":
        return erase(problem)
    if name == "a":
        return add_type_args(problem, ArgFilter.FULL)
    if name == "a_phan":
        return add_type_args(problem, ArgFilter.PHAN)
    if name == "a_ninf":
        return add_type_args(problem, ArgFilter.NINF)
    if name == "t":
        return tags_traditional(problem, level)
    if name == "g":
        return guards_traditional(problem, level)
    if name == "t_at":
        return tags_cover(problem, ctx.covers)
    if name == "g_at":
        return guards_cover(problem, ctx.covers)
    if name == "t_q":
        return tags_light(problem, ctx.verdicts, ctx.V, level)
    if name == "t_qq":
        return tags_feather(problem, ctx.verdicts, ctx.V, level, ctx.witness_policy)
    if name == "g_q":
        return guards_light(problem, ctx.verdicts, ctx.V, level, ctx.witness_policy)
    if name == "g_qq":
        return guards_feather(problem, ctx.verdicts, ctx.V, level, ctx.witness_policy)
    raise InternalError(f"unknown stage {name}")


def run_pipeline(
    problem: Problem,
    scheme: SchemeId,
    ctx: Optional[AnalysisContext] = None,
    check_stages: bool = False,
) -> EncodedProblem:
    """Compose the scheme's stages; the result is an untyped problem."""
    level = Level.MONOMORPHIC if scheme.mono else Level.POLYMORPHIC
    if problem.level is Level.UNTYPED:
        raise LevelMismatch("problem is already untyped")
    if scheme.mono and not problem.is_monomorphic():
        raise LevelMismatch(f"scheme {scheme.name} needs a monomorphic problem; monomorphise it first")
    needs_ctx = any(s not in ("e", "a", "a_phan", "a_ninf", "t", "g") for s in scheme.stages)
    if ctx is None and needs_ctx:
        ctx = analyze(problem, polymorphic=not scheme.mono)
    logger.info("Encoding %d formulas with %s = <%s>", len(problem.formulas), scheme.name, ", ".join(scheme.stages))
    current = problem
    for name in scheme.stages:
        current = _stage(name, current, ctx, level).problem
        logger.debug("Stage %s: %d formulas", name, len(current.formulas))
        if check_stages:
            errors = check_well_typed(current)
            if errors:
                raise InternalError(f"stage {name} produced an ill-typed problem: {errors[0]}")
    axioms = tuple(nf for nf in current.formulas if nf.is_added_axiom)
    return EncodedProblem(current, axioms)


@dataclass(frozen=True)
class Encoding:
    """Result of :func:`encode_problem`, with the monomorphisation step if one ran."""

    encoded: EncodedProblem
    scheme: SchemeId
    context: Optional[AnalysisContext]
    mono: Optional[MonoResult] = None


def encode_problem(
    problem: Problem,
    scheme: SchemeId,
    inf: Optional[InfRegistry] = None,
    mono_cfg: Optional[MonoConfig] = None,
    cover_policy: Union[CoverPolicy, str] = config.COVER_POLICY,
    witness_policy: Union[WitnessPolicy, str] = config.WITNESS_POLICY,
    forced: Sequence[Type] = (),
    check_stages: bool = False,
) -> Encoding:
    """Monomorphise when a monomorphic scheme meets a polymorphic problem, analyse, then encode."""
    mono_result = None
    if scheme.mono and problem.level is not Level.UNTYPED and not problem.is_monomorphic():
        mono_result = monomorphise(problem, mono_cfg)
        problem = mono_result.problem
        if inf is not None:
            inf = inf.for_monomorphised(mono_result.type_origin)
    ctx = None
    if problem.level is not Level.UNTYPED:
        ctx = analyze(problem, inf, not scheme.mono, cover_policy, witness_policy, forced)
    encoded = run_pipeline(problem, scheme, ctx, check_stages)
    return Encoding(encoded, scheme, ctx, mono_result)
