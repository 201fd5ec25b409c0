"""Reading and writing TPTP problems in the TFF1, TFF0 and FOF dialects."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from polyenc.errors import InputError, LevelMismatch, TptpSyntaxError, UnsupportedInput
from polyenc.logic import (
    IOTA,
    IOTA_NAME,
    MANGLE_SEP,
    RESERVED_PREFIX,
    TYVAR_TERM_PREFIX,
    And,
    Eq,
    Exists,
    Fn,
    Forall,
    ForallType,
    Formula,
    FunDecl,
    Level,
    NamedFormula,
    Or,
    Pred,
    PredDecl,
    Problem,
    Signature,
    Term,
    TyApp,
    TyVar,
    Type,
    Var,
)
from polyenc.normalize import Iff, Implies, Not, Surface, normalize

logger = logging.getLogger(__name__)


class TptpLevel(str, Enum):
    TFF1 = "tff1"
    TFF0 = "tff0"
    FOF = "fof"

    @property
    def logic_level(self) -> Level:
        return {
            TptpLevel.TFF1: Level.POLYMORPHIC,
            TptpLevel.TFF0: Level.MONOMORPHIC,
            TptpLevel.FOF: Level.UNTYPED,
        }[self]


ROLES = {
    "axiom",
    "hypothesis",
    "definition",
    "assumption",
    "lemma",
    "theorem",
    "corollary",
    "conjecture",
    "negated_conjecture",
    "plain",
    "type",
    "unknown",
}
ARITHMETIC = {"$int", "$rat", "$real", "$less", "$lesseq", "$greater", "$greatereq", "$sum", "$difference",
              "$product", "$quotient", "$uminus", "$to_int", "$to_rat", "$to_real", "$is_int", "$is_rat"}
BUILTINS = {"$true", "$false", "$i", "$o", "$tType"}
INFINITE_ANNOTATION = re.compile(r"^\s*%\s*infinite\s*:\s*(.+?)\s*$", re.MULTILINE)


@dataclass(frozen=True)
class AnnotatedFormula:
    name: str
    role: str
    payload: Union[Formula, FunDecl, PredDecl, int]


# --- grammar -----------------------------------------------------------------

_GRAMMAR = r"""
start: _statement*
_statement: include | annotated

include: "include" "(" QUOTED selection? ")" "."
selection: "," "[" (_name ("," _name)*)? "]"
annotated: LANGUAGE "(" _name "," LOWER_WORD "," _body annotations? ")" "."
_body: declaration | formula
_name: LOWER_WORD | UPPER_WORD | NUMBER | QUOTED | LANGUAGE

annotations: "," general_term ("," general_term)*
?general_term: general_data | general_data ":" general_term | general_list
general_data: _general_word ("(" general_term ("," general_term)* ")")? | UPPER_WORD | NUMBER | DISTINCT
_general_word: LOWER_WORD | QUOTED | DOLLAR_WORD | LANGUAGE
general_list: "[" (general_term ("," general_term)*)? "]"

declaration: _functor ":" type_expr
           | "(" declaration ")"

?type_expr: ty_forall | ty_arrow | _ty_unit
ty_forall: "!>" "[" ty_binder ("," ty_binder)* "]" ":" type_expr
ty_binder: UPPER_WORD ":" _ty_unit
ty_arrow: _ty_unit ">" _ty_unit
_ty_unit: "(" type_expr ")" | ty_product | ty_term
ty_product: "(" type_expr ("*" type_expr)+ ")"
ty_term: term

?formula: _unitary | and_formula | or_formula | iff | implies | implied | xor | nor | nand
and_formula: _unitary ("&" _unitary)+
or_formula: _unitary ("|" _unitary)+
iff: _unitary "<=>" _unitary
implies: _unitary "=>" _unitary
implied: _unitary "<=" _unitary
xor: _unitary "<~>" _unitary
nor: _unitary "~|" _unitary
nand: _unitary "~&" _unitary

_unitary: forall | exists | ty_quantified | ty_exists | negation | "(" formula ")"
        | equation | disequation | atom | ho_application
forall: "!" "[" _binders "]" ":" _unitary
exists: "?" "[" _binders "]" ":" _unitary
ty_quantified: "!>" "[" _binders "]" ":" _unitary
ty_exists: "?*" "[" _binders "]" ":" _unitary
_binders: binder ("," binder)*
binder: UPPER_WORD (":" type_expr)?
negation: "~" _unitary
equation: term "=" term
disequation: term "!=" term
atom: term
ho_application: term "@" term

?term: variable | application | number | distinct
variable: UPPER_WORD
application: _functor ("(" term ("," term)* ")")?
number: NUMBER
distinct: DISTINCT
_functor: LOWER_WORD | QUOTED | DOLLAR_WORD

LANGUAGE.2: /(thf|tff|tcf|fof|cnf)\b/
LOWER_WORD: /[a-z][A-Za-z0-9_]*/
UPPER_WORD: /[A-Z][A-Za-z0-9_]*/
DOLLAR_WORD: /\$\$?[a-zA-Z][A-Za-z0-9_]*/
QUOTED: /'(?:[^'\\]|\\.)*'/
DISTINCT: /"(?:[^"\\]|\\.)*"/
NUMBER: /[+-]?[0-9]+(?:[.\/][0-9]+)?(?:[eE][+-]?[0-9]+)?/
LINE_COMMENT: /%[^\n]*/
BLOCK_COMMENT: /\/\*[\s\S]*?\*\//

%import common.WS
%ignore WS
%ignore LINE_COMMENT
%ignore BLOCK_COMMENT
"""

_UNSUPPORTED_LANGUAGES = {"thf": "higher-order formula", "tcf": "tcf", "cnf": "cnf"}


def _reject_language(tok: Token) -> Token:
    # raised while lexing, so a thf body never reaches the tff grammar
    if tok.value in _UNSUPPORTED_LANGUAGES:
        raise UnsupportedInput(_UNSUPPORTED_LANGUAGES[tok.value])
    return tok


_LARK = Lark(
    _GRAMMAR,
    start=["start", "term"],
    parser="earley",
    lexer="basic",
    lexer_callbacks={"LANGUAGE": _reject_language},
)


def decode_name(text: str) -> str:
    """Symbol name of a functor token.

    Quoted atoms are taken verbatim; in an unquoted word ``__`` is the
    printed form of the mangling separator.
    """
    if text.startswith("'"):
        return re.sub(r"\\(.)", r"\1", text[1:-1])
    return text.replace("__", MANGLE_SEP)


def encode_name(name: str) -> str:
    text = name.replace(MANGLE_SEP, "__")
    if "__" not in name and re.fullmatch(r"[a-z][A-Za-z0-9_]*|\$\$?[a-z][A-Za-z0-9_]*", text):
        return text
    # a literal "__" must stay quoted or it would read back as the separator
    quoted = name if "__" in name else text
    return "'" + quoted.replace("\\", "\\\\").replace("'", "\\'") + "'"


def encode_var(name: str) -> str:
    return name.replace(MANGLE_SEP, "__")


# --- raw syntax --------------------------------------------------------------


@dataclass(frozen=True)
class _RawVar:
    name: str
    token: Token


@dataclass(frozen=True)
class _RawApp:
    name: str
    args: Tuple["_Raw", ...]
    token: Token


_Raw = Union[_RawVar, _RawApp]

# Raw type expressions: a Type-shaped _Raw, "$tType", "$o", a product tuple or an arrow.
_TTYPE = "$tType"
_BOOL = "$o"


@dataclass(frozen=True)
class _Arrow:
    args: Tuple[object, ...]
    result: object


@dataclass(frozen=True)
class _TyForall:
    tyvars: Tuple[str, ...]
    body: object


@dataclass(frozen=True)
class _Decl:
    sym: str
    token: Token
    type_expr: object


@dataclass(frozen=True)
class _Include:
    path: Token
    selection: bool


@dataclass(frozen=True)
class _Statement:
    language: Token
    name: str
    role: Token
    body: object


def _formula_name(tok: Token) -> str:
    return decode_name(tok.value) if tok.type == "QUOTED" else tok.value


@v_args(inline=True)
class _Syntax(Transformer):
    """Turns the lark tree into raw statements, checking names on the way."""

    def __init__(self, allow_reserved: bool) -> None:
        super().__init__()
        self.allow_reserved = allow_reserved

    def _symbol(self, tok: Token) -> str:
        name = decode_name(tok.value)
        if name.startswith(RESERVED_PREFIX) and not self.allow_reserved:
            raise InputError(f"reserved symbol name {name} at line {tok.line}, column {tok.column}")
        if name in ARITHMETIC:
            raise UnsupportedInput("arithmetic", name)
        if name in ("$ite", "$let", "$ite_f", "$ite_t", "$let_tf", "$let_ff"):
            raise UnsupportedInput(name)
        if name.startswith("$") and not name.startswith(RESERVED_PREFIX) and name not in BUILTINS:
            raise UnsupportedInput("interpreted symbol", name)
        return name

    def _variable_name(self, tok: Token) -> str:
        if tok.value.startswith(TYVAR_TERM_PREFIX) and not self.allow_reserved:
            raise InputError(f"reserved variable name {tok.value} at line {tok.line}, column {tok.column}")
        return tok.value

    # statements

    def start(self, *statements):
        return list(statements)

    def include(self, path: Token, *selection) -> _Include:
        return _Include(path, bool(selection))

    def selection(self, *names):
        return list(names)

    def annotated(self, language: Token, name: Token, role: Token, body, *annotations) -> _Statement:
        return _Statement(language, _formula_name(name), role, body)

    def annotations(self, *items):
        return None

    def general_data(self, *items):
        return None

    def general_list(self, *items):
        return None

    def declaration(self, *children) -> _Decl:
        if len(children) == 1:
            return children[0]
        functor, type_expr = children
        return _Decl(self._symbol(functor), functor, type_expr)

    # types

    def ty_forall(self, *children) -> _TyForall:
        return _TyForall(tuple(children[:-1]), children[-1])

    def ty_binder(self, var: Token, kind) -> str:
        if kind != _TTYPE:
            raise TptpSyntaxError("type variables must have kind $tType", var.line, var.column)
        return self._variable_name(var)

    def ty_arrow(self, left, result) -> _Arrow:
        return _Arrow(left if isinstance(left, tuple) else (left,), result)

    def ty_product(self, *items) -> tuple:
        return tuple(items)

    def ty_term(self, raw: _Raw):
        if isinstance(raw, _RawApp) and not raw.args and raw.name in (_TTYPE, _BOOL):
            return raw.name
        return raw

    # formulas

    def forall(self, *children) -> tuple:
        return ("quant", "!", list(children[:-1]), children[-1])

    def exists(self, *children) -> tuple:
        return ("quant", "?", list(children[:-1]), children[-1])

    def ty_quantified(self, *children) -> tuple:
        return ("quant", "!>", list(children[:-1]), children[-1])

    def ty_exists(self, *children):
        raise UnsupportedInput("existential type quantifier")

    def binder(self, var: Token, ty=None) -> Tuple[str, object, Token]:
        return self._variable_name(var), ty, var

    def negation(self, body) -> tuple:
        return ("not", body)

    def and_formula(self, *items) -> tuple:
        return ("and", list(items))

    def or_formula(self, *items) -> tuple:
        return ("or", list(items))

    def iff(self, lhs, rhs) -> tuple:
        return ("bin", "<=>", lhs, rhs)

    def implies(self, lhs, rhs) -> tuple:
        return ("bin", "=>", lhs, rhs)

    def implied(self, lhs, rhs) -> tuple:
        return ("bin", "<=", lhs, rhs)

    def xor(self, lhs, rhs) -> tuple:
        return ("bin", "<~>", lhs, rhs)

    def nor(self, lhs, rhs) -> tuple:
        return ("bin", "~|", lhs, rhs)

    def nand(self, lhs, rhs) -> tuple:
        return ("bin", "~&", lhs, rhs)

    def equation(self, lhs, rhs) -> tuple:
        return ("eq", True, lhs, rhs)

    def disequation(self, lhs, rhs) -> tuple:
        return ("eq", False, lhs, rhs)

    def atom(self, term) -> tuple:
        return ("atom", term)

    def ho_application(self, *terms):
        raise UnsupportedInput("higher-order application")

    # terms

    def variable(self, tok: Token) -> _RawVar:
        return _RawVar(self._variable_name(tok), tok)

    def application(self, functor: Token, *args) -> _RawApp:
        return _RawApp(self._symbol(functor), tuple(args), functor)

    def number(self, tok: Token):
        raise UnsupportedInput("arithmetic", tok.value)

    def distinct(self, tok: Token):
        raise UnsupportedInput("distinct object", tok.value)


def _syntax_error(text: str, exc: UnexpectedInput) -> TptpSyntaxError:
    if isinstance(exc, UnexpectedCharacters):
        return TptpSyntaxError(f"unexpected character {text[exc.pos_in_stream]!r}", exc.line, exc.column)
    if isinstance(exc, UnexpectedEOF) or getattr(exc, "token", None) is None or exc.token.type == "$END":
        line = text.count("\n") + 1
        return TptpSyntaxError("unexpected end of input", line, len(text) - text.rfind("\n"))
    return TptpSyntaxError(f"unexpected {exc.token.value!r}", exc.line, exc.column)


def _read(text: str, start: str, allow_reserved: bool):
    try:
        tree = _LARK.parse(text, start=start)
    except UnexpectedInput as exc:
        raise _syntax_error(text, exc) from None
    try:
        return _Syntax(allow_reserved).transform(tree)
    except VisitError as exc:
        raise exc.orig_exc from None


# --- elaboration -------------------------------------------------------------


class _Elaborator:
    """Builds the signature and typed surface formulas from raw statements, in file order."""

    def __init__(self, level: TptpLevel, allow_reserved: bool, include_dir: Optional[Path]) -> None:
        self.level = level
        self.allow_reserved = allow_reserved
        self.include_dir = include_dir
        self.type_ctors: Dict[str, int] = {}
        self.funs: Dict[str, FunDecl] = {}
        self.preds: Dict[str, PredDecl] = {}
        self.uses_iota = False

    def error(self, msg: str, tok: Token) -> TptpSyntaxError:
        return TptpSyntaxError(msg, tok.line, tok.column)

    # top level

    def parse(self, text: str) -> Tuple[List[AnnotatedFormula], List[Tuple[str, str, Surface]]]:
        annotated: List[AnnotatedFormula] = []
        formulas: List[Tuple[str, str, Surface]] = []
        for statement in _read(text, "start", self.allow_reserved):
            if isinstance(statement, _Include):
                self.include(statement, annotated, formulas)
            else:
                self.statement(statement, annotated, formulas)
        return annotated, formulas

    def statement(self, st: _Statement, annotated, formulas) -> None:
        tok = st.language
        if tok.value == "tff" and self.level is TptpLevel.FOF:
            raise LevelMismatch(f"typed formula at line {tok.line} in an untyped problem")
        typed = tok.value == "tff"
        role = st.role.value
        if role not in ROLES:
            raise self.error(f"unknown role {role!r}", st.role)
        if role == "type":
            if not typed:
                raise self.error("type declaration outside tff", st.role)
            if not isinstance(st.body, _Decl):
                raise self.error("expected a type declaration", st.role)
            annotated.append(AnnotatedFormula(st.name, role, self.declaration(st.body)))
            return
        if isinstance(st.body, _Decl):
            raise self.error(f"type declaration with role {role!r}", st.body.token)
        surface = self.elaborate(st.body, typed)
        annotated.append(AnnotatedFormula(st.name, role, surface))
        formulas.append((st.name, role, surface))

    def include(self, inc: _Include, annotated, formulas) -> None:
        if inc.selection:
            raise UnsupportedInput("include with a formula selection")
        if self.include_dir is None:
            raise UnsupportedInput("include", "no include directory configured")
        path = self.include_dir / decode_name(inc.path.value)
        logger.debug("Including %s", path)
        sub = _Elaborator(self.level, self.allow_reserved, None)
        sub.type_ctors, sub.funs, sub.preds = self.type_ctors, self.funs, self.preds
        try:
            sub_annotated, sub_formulas = sub.parse(path.read_text())
        except UnsupportedInput as exc:
            if exc.construct == "include":
                raise UnsupportedInput("nested include", str(path)) from exc
            raise
        self.uses_iota = self.uses_iota or sub.uses_iota
        annotated.extend(sub_annotated)
        formulas.extend(sub_formulas)

    # types

    def raw_to_type(self, raw: object, tyvars: Set[str], tok: Token) -> Type:
        if isinstance(raw, _RawVar):
            if raw.name not in tyvars:
                raise self.error(f"unbound type variable {raw.name}", raw.token)
            return TyVar(raw.name)
        if isinstance(raw, _RawApp):
            if raw.name == IOTA_NAME:
                self.uses_iota = True
            elif raw.name in self.type_ctors:
                if self.type_ctors[raw.name] != len(raw.args):
                    raise self.error(f"type constructor {raw.name} expects {self.type_ctors[raw.name]} arguments", raw.token)
            elif raw.name.startswith("$"):
                raise UnsupportedInput("interpreted type", raw.name)
            else:
                raise self.error(f"undeclared type constructor {raw.name}", raw.token)
            return TyApp(raw.name, tuple(self.raw_to_type(a, tyvars, raw.token) for a in raw.args))
        raise self.error("expected a type", tok)

    def declaration(self, decl: _Decl) -> Union[FunDecl, PredDecl, int]:
        sym, tok, expr = decl.sym, decl.token, decl.type_expr
        tyvars: Tuple[str, ...] = ()
        if isinstance(expr, _TyForall):
            tyvars, expr = expr.tyvars, expr.body
            if self.level is TptpLevel.TFF0:
                raise LevelMismatch(f"polymorphic declaration of {sym} in a monomorphic problem")
        args: Tuple[object, ...] = ()
        result = expr
        if isinstance(expr, _Arrow):
            args, result = expr.args, expr.result
        if result == _TTYPE:
            if tyvars or any(a != _TTYPE for a in args):
                raise self.error(f"malformed type constructor declaration for {sym}", tok)
            if args and self.level is TptpLevel.TFF0:
                raise LevelMismatch(f"type constructor {sym} with arguments in a monomorphic problem")
            if sym != IOTA_NAME:
                self.type_ctors[sym] = len(args)
            return len(args)
        scope = set(tyvars)
        arg_types = tuple(self.raw_to_type(a, scope, tok) for a in args)
        if result == _BOOL:
            out: Union[FunDecl, PredDecl] = PredDecl(tyvars, arg_types)
            self._declare(sym, out, self.preds, self.funs, tok)
        else:
            out = FunDecl(tyvars, arg_types, self.raw_to_type(result, scope, tok))
            self._declare(sym, out, self.funs, self.preds, tok)
        return out

    def _declare(self, sym, decl, table, other, tok) -> None:
        if sym in other or (sym in table and table[sym] != decl):
            raise self.error(f"conflicting declaration for {sym}", tok)
        table[sym] = decl

    # formulas

    def elaborate(self, raw: tuple, typed: bool) -> Surface:
        return self._elab(raw, {}, set(), typed)

    def _elab(self, raw: tuple, env: Dict[str, Type], tyvars: Set[str], typed: bool) -> Surface:
        tag = raw[0]
        if tag == "quant":
            _, op, binders, body = raw
            return self._elab_quant(op, list(binders), body, env, tyvars, typed)
        if tag == "not":
            return Not(self._elab(raw[1], env, tyvars, typed))
        if tag in ("and", "or"):
            items = tuple(self._elab(r, env, tyvars, typed) for r in raw[1])
            return And(items) if tag == "and" else Or(items)
        if tag == "bin":
            _, op, l, r = raw
            lhs = self._elab(l, env, tyvars, typed)
            rhs = self._elab(r, env, tyvars, typed)
            if op == "=>":
                return Implies(lhs, rhs)
            if op == "<=":
                return Implies(rhs, lhs)
            if op == "<=>":
                return Iff(lhs, rhs)
            if op == "<~>":
                return Not(Iff(lhs, rhs))
            if op == "~|":
                return Not(Or((lhs, rhs)))
            return Not(And((lhs, rhs)))
        if tag == "eq":
            _, positive, l, r = raw
            lt = self._elab_term(l, env, tyvars, typed)
            rt = self._elab_term(r, env, tyvars, typed)
            return Eq(lt, rt, positive)
        atom = raw[1]
        if isinstance(atom, _RawVar):
            raise self.error("variable used as a formula", atom.token)
        if atom.name == "$true" and not atom.args:
            return And(())
        if atom.name == "$false" and not atom.args:
            return Or(())
        return self._elab_pred(atom, env, tyvars, typed)

    def _elab_quant(self, op, binders, body, env, tyvars, typed) -> Surface:
        if not binders:
            return self._elab(body, env, tyvars, typed)
        name, ty_raw, tok = binders[0]
        rest = binders[1:]
        if ty_raw is not None and not typed:
            raise self.error("typed variable in fof", tok)
        if op == "!>" and ty_raw != _TTYPE:
            raise self.error("type quantifier over a non-type variable", tok)
        if ty_raw == _TTYPE:
            if op == "?":
                raise UnsupportedInput("existential type quantifier")
            if self.level is not TptpLevel.TFF1:
                raise LevelMismatch(f"type quantifier at line {tok.line} in a {self.level.value} problem")
            inner = self._elab_quant(op, rest, body, env, tyvars | {name}, typed)
            return ForallType(name, inner)
        if ty_raw is None:
            ty: Type = IOTA
            self.uses_iota = True
        else:
            ty = self.raw_to_type(ty_raw, tyvars, tok)
        var = Var(name, ty)
        inner = self._elab_quant(op, rest, body, {**env, name: ty}, tyvars, typed)
        return Forall(var, inner) if op in ("!", "!>") else Exists(var, inner)

    def _split_args(self, decl, raw: _RawApp, tyvars: Set[str]) -> Tuple[Tuple[Type, ...], Tuple[_Raw, ...]]:
        n = len(decl.tyvars) if decl is not None else 0
        if len(raw.args) < n:
            raise self.error(f"{raw.name} expects {n} type arguments", raw.token)
        ty_args = tuple(self.raw_to_type(a, tyvars, raw.token) for a in raw.args[:n])
        return ty_args, raw.args[n:]

    def _default_decl(self, raw: _RawApp, result: Optional[Type]):
        arg_types = tuple(IOTA for _ in raw.args)
        if result is None:
            return PredDecl((), arg_types)
        return FunDecl((), arg_types, result)

    def _elab_pred(self, raw: _RawApp, env, tyvars, typed) -> Pred:
        if raw.name in self.funs:
            raise self.error(f"function symbol {raw.name} used as a predicate", raw.token)
        decl = self.preds.get(raw.name)
        if decl is None:
            decl = self._default_decl(raw, None)
            self.preds[raw.name] = decl
            if raw.args:
                self.uses_iota = True
        ty_args, args = self._split_args(decl, raw, tyvars)
        if len(args) != decl.arity:
            raise self.error(f"{raw.name} expects {decl.arity} arguments", raw.token)
        return Pred(raw.name, ty_args, tuple(self._elab_term(a, env, tyvars, typed) for a in args))

    def _elab_term(self, raw: _Raw, env, tyvars, typed) -> Term:
        if isinstance(raw, _RawVar):
            if raw.name not in env:
                raise self.error(f"unbound variable {raw.name}", raw.token)
            return Var(raw.name, env[raw.name])
        if raw.name in self.preds:
            raise self.error(f"predicate symbol {raw.name} used as a term", raw.token)
        decl = self.funs.get(raw.name)
        if decl is None:
            decl = self._default_decl(raw, IOTA)
            self.funs[raw.name] = decl
            self.uses_iota = True
        ty_args, args = self._split_args(decl, raw, tyvars)
        if len(args) != decl.arity:
            raise self.error(f"{raw.name} expects {decl.arity} arguments", raw.token)
        return Fn(raw.name, ty_args, tuple(self._elab_term(a, env, tyvars, typed) for a in args))

    def signature(self) -> Signature:
        level = self.level.logic_level
        if level is Level.UNTYPED:
            return Signature(Level.UNTYPED, {}, dict(self.funs), dict(self.preds))
        ctors = dict(self.type_ctors)
        if self.uses_iota:
            ctors[IOTA_NAME] = 0
        return Signature(level, ctors, dict(self.funs), dict(self.preds)).ensure_inhabited()


def parse_type(text: str) -> Type:
    """Parse a standalone type such as ``list(A)``; upper-case names are type variables."""
    raw = _read(text, "term", True)

    def convert(r: _Raw) -> Type:
        if isinstance(r, _RawVar):
            return TyVar(r.name)
        return TyApp(r.name, tuple(convert(a) for a in r.args))

    return convert(raw)


def detect_level(text: str) -> TptpLevel:
    stripped = re.sub(r"%[^\n]*|/\*.*?\*/", "", text, flags=re.DOTALL)
    if not re.search(r"\btff\s*\(", stripped):
        return TptpLevel.FOF
    if "!>" in stripped or re.search(r"\$tType\s*[>*]", stripped) or re.search(r"!\s*\[[^\]]*:\s*\$tType", stripped):
        return TptpLevel.TFF1
    return TptpLevel.TFF0


def parse(
    text: str,
    level: Optional[TptpLevel] = None,
    allow_reserved: bool = False,
    include_dir: Optional[Path] = None,
) -> Tuple[Problem, List[AnnotatedFormula]]:
    """Parse a problem; conjectures come back negated as one ``negated_conjecture``."""
    level = TptpLevel(level) if level is not None else detect_level(text)
    parser = _Elaborator(level, allow_reserved, include_dir)
    annotated, raw_formulas = parser.parse(text)
    named: List[NamedFormula] = []
    conjectures: List[Tuple[str, Surface]] = []
    for name, role, surface in raw_formulas:
        if role == "conjecture":
            conjectures.append((name, surface))
        else:
            named.append(NamedFormula(name, normalize(surface), role))
    if conjectures:
        goal = conjectures[0][1] if len(conjectures) == 1 else And(tuple(c for _, c in conjectures))
        named.append(NamedFormula(conjectures[0][0], normalize(Not(goal)), "negated_conjecture"))
    infinite = tuple(parse_type(m.group(1)) for m in INFINITE_ANNOTATION.finditer(text))
    problem = Problem(parser.signature(), tuple(named), infinite)
    logger.debug("Parsed %d formulas at level %s", len(named), level.value)
    return problem, annotated


# --- printer -----------------------------------------------------------------


def _sanitize(name: str) -> str:
    text = re.sub(r"[^A-Za-z0-9_]", "_", name.replace(MANGLE_SEP, "__").lstrip("$"))
    if not text or not text[0].islower():
        text = "n" + text
    return text


def output_names(problem: Problem) -> List[str]:
    """Printed statement names: ``f_<i>`` for translations, ``ax_<schema>_<symbol>`` for added axioms."""
    names: List[str] = []
    taken: Set[str] = set()
    index = 0
    for nf in problem.formulas:
        if nf.source is not None and nf.schema is None:
            index += 1
            base = f"f_{index}"
        else:
            base = _sanitize(nf.name)
        name, k = base, 1
        while name in taken:
            k += 1
            name = f"{base}_{k}"
        taken.add(name)
        names.append(name)
    return names


def provenance(problem: Problem) -> Dict[str, Dict[str, Optional[str]]]:
    return {
        name: {"source": nf.source, "schema": nf.schema}
        for name, nf in zip(output_names(problem), problem.formulas)
    }


def format_type(ty: Type) -> str:
    if isinstance(ty, TyVar):
        return encode_var(ty.name)
    if not ty.args:
        return encode_name(ty.ctor)
    return f"{encode_name(ty.ctor)}({', '.join(format_type(a) for a in ty.args)})"


def format_term(t: Term, typed: bool = True) -> str:
    if isinstance(t, Var):
        return encode_var(t.name)
    parts = ([format_type(a) for a in t.ty_args] if typed else []) + [format_term(a, typed) for a in t.args]
    if not parts:
        return encode_name(t.sym)
    return f"{encode_name(t.sym)}({', '.join(parts)})"


def format_formula(phi: Formula, typed: bool = True) -> str:
    if isinstance(phi, Pred):
        parts = ([format_type(a) for a in phi.ty_args] if typed else []) + [format_term(a, typed) for a in phi.args]
        atom = encode_name(phi.sym) + (f"({', '.join(parts)})" if parts else "")
        return atom if phi.positive else f"~ {atom}"
    if isinstance(phi, Eq):
        op = "=" if phi.positive else "!="
        return f"{format_term(phi.lhs, typed)} {op} {format_term(phi.rhs, typed)}"
    if isinstance(phi, (And, Or)):
        if not phi.args:
            return "$true" if isinstance(phi, And) else "$false"
        if len(phi.args) == 1:
            return format_formula(phi.args[0], typed)
        sep = " & " if isinstance(phi, And) else " | "
        return "(" + sep.join(_unit(a, typed) for a in phi.args) + ")"
    if isinstance(phi, ForallType):
        names = []
        while isinstance(phi, ForallType):
            names.append(f"{encode_var(phi.tyvar)}: $tType")
            phi = phi.body
        return f"!> [{', '.join(names)}] : {_unit(phi, typed)}"
    quant = "!" if isinstance(phi, Forall) else "?"
    kind = type(phi)
    binders = []
    while isinstance(phi, kind):
        v = phi.var
        binders.append(f"{encode_var(v.name)}: {format_type(v.ty)}" if typed else encode_var(v.name))
        phi = phi.body
    return f"{quant} [{', '.join(binders)}] : {_unit(phi, typed)}"


def _unit(phi: Formula, typed: bool) -> str:
    text = format_formula(phi, typed)
    if isinstance(phi, Eq) or (isinstance(phi, (And, Or)) and len(phi.args) == 1 and isinstance(phi.args[0], Eq)):
        return f"({text})"
    return text


def _format_decl(decl: Union[FunDecl, PredDecl]) -> str:
    result = format_type(decl.result) if isinstance(decl, FunDecl) else "$o"
    if decl.arg_types:
        args = [format_type(a) for a in decl.arg_types]
        body = f"{args[0]} > {result}" if len(args) == 1 else f"({' * '.join(args)}) > {result}"
    else:
        body = result
    if decl.tyvars:
        binders = ", ".join(f"{encode_var(a)}: $tType" for a in decl.tyvars)
        body = f"!> [{binders}] : {body}" if not decl.arg_types else f"!> [{binders}] : ({body})"
    return body


def print_problem(problem: Problem, level: TptpLevel) -> str:
    """Canonical TPTP text for ``problem`` at the requested dialect."""
    level = TptpLevel(level)
    if level is TptpLevel.FOF and problem.level is not Level.UNTYPED:
        raise LevelMismatch("only untyped problems print as fof")
    if level is not TptpLevel.FOF and problem.level is Level.UNTYPED:
        raise LevelMismatch(f"an untyped problem cannot print as {level.value}")
    if level is TptpLevel.TFF0 and not problem.is_monomorphic():
        raise LevelMismatch("problem is not monomorphic; print it as tff1 or monomorphise it")
    lines: List[str] = []
    for ty in problem.infinite:
        lines.append(f"% infinite: {format_type(ty)}")
    typed = level is not TptpLevel.FOF
    keyword = "fof" if level is TptpLevel.FOF else "tff"
    taken: Set[str] = set()

    def decl_name(sym: str) -> str:
        base = f"ty_{_sanitize(sym)}"
        name, k = base, 1
        while name in taken:
            k += 1
            name = f"{base}_{k}"
        taken.add(name)
        return name

    if typed:
        sig = problem.signature
        for ctor in sorted(sig.type_ctors):
            if ctor == IOTA_NAME:
                continue
            arity = sig.type_ctors[ctor]
            if arity == 0:
                kind = "$tType"
            elif arity == 1:
                kind = "$tType > $tType"
            else:
                kind = "(" + " * ".join(["$tType"] * arity) + ") > $tType"
            lines.append(f"tff({decl_name(ctor)}, type, {encode_name(ctor)}: {kind}).")
        for sym in sorted(sig.funs):
            lines.append(f"tff({decl_name(sym)}, type, {encode_name(sym)}: {_format_decl(sig.funs[sym])}).")
        for sym in sorted(sig.preds):
            lines.append(f"tff({decl_name(sym)}, type, {encode_name(sym)}: {_format_decl(sig.preds[sym])}).")
    for name, nf in zip(output_names(problem), problem.formulas):
        role = nf.role if nf.role in ROLES else "axiom"
        lines.append(f"{keyword}({name}, {role}, {format_formula(nf.formula, typed)}).")
    return "\n".join(lines) + "\n"
