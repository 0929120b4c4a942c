"""Line-oriented text formats for varieties, algebras, equation systems and word systems.

Every format allows ``#`` comments and blank lines. Grammar (``*`` = repeat):

    variety   := ["variety" NAME] "sorts" SORT+ op* identity*
    op        := "op" NAME ":" SORT* "->" SORT
    identity  := "identity" "[" (VAR ":" SORT)* "]" term "=" term

    algebra   := ["algebra" NAME] ("carrier" SORT ":" ELEM*)* ("table" OP row*)*
    row       := ELEM* "->" ELEM

    system    := "X:" (VAR ":" SORT)* (";"? "eq" term "=" term)*
    words     := (OP ":=" term)*
    term      := NAME | NAME "(" [term ("," term)*] ")"

A bare name inside a term is a variable when declared in the alphabet and a
constant otherwise.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .finite import AlgebraError, FiniteAlgebra
from .signature import Identity, OpType, Signature, SignatureError, VarietySpec, validate_variety
from .terms import App, Term, TermError, Var, mk_app


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, expected: Sequence[str] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        where = f"{line}:{column}: " if line else ""
        hint = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{hint}")


_TOKEN = re.compile(r"\s*(?:(:=|->|[()\[\],:=;])|([A-Za-z0-9_'.]+))")


@dataclass
class _Tok:
    text: str
    col: int
    kind: str  # "punct" or "name"


class _Line:
    """Tokens of one source line with a cursor."""

    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        self.toks: list[_Tok] = []
        pos = 0
        body = text.split("#", 1)[0].rstrip()
        while pos < len(body):
            m = _TOKEN.match(body, pos)
            if not m or m.end() == pos:
                col = pos + len(body[pos:]) - len(body[pos:].lstrip()) + 1
                raise ParseError(f"unexpected character {body[col - 1]!r}", lineno, col)
            if m.group(1):
                self.toks.append(_Tok(m.group(1), m.start(1) + 1, "punct"))
            elif m.group(2):
                self.toks.append(_Tok(m.group(2), m.start(2) + 1, "name"))
            pos = m.end()
        self.i = 0
        self.end_col = len(body) + 1

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    def error(self, msg: str, expected=()) -> ParseError:
        tok = self.peek()
        return ParseError(msg, self.lineno, tok.col if tok else self.end_col, expected)

    def next(self, expected=("name",)) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of line", expected)
        self.i += 1
        return tok

    def name(self, what: str = "name") -> str:
        tok = self.peek()
        if tok is None or tok.kind != "name":
            raise self.error(f"expected {what}", [what])
        self.i += 1
        return tok.text

    def expect(self, text: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.text != text:
            raise self.error(f"expected {text!r}", [text])
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.text == text:
            self.i += 1
            return True
        return False

    def done(self) -> None:
        if not self.at_end():
            raise self.error(f"unexpected {self.peek().text!r}", ["end of line"])


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), start=1):
        line = _Line(raw, n)
        if not line.at_end():
            yield line


# -- terms ------------------------------------------------------------------------

def _parse_term(line: _Line, sig: Signature, alphabet: Mapping[str, str]) -> Term:
    tok = line.peek()
    if tok is None or tok.kind != "name":
        raise line.error("expected a term", ["variable", "operation"])
    line.i += 1
    name = tok.text
    if line.accept("("):
        args: list[Term] = []
        if not line.accept(")"):
            while True:
                args.append(_parse_term(line, sig, alphabet))
                if line.accept(")"):
                    break
                if not line.accept(","):
                    raise line.error("expected ',' or ')'", [",", ")"])
        if not sig.has_op(name):
            raise ParseError(f"undeclared operation {name!r}", line.lineno, tok.col, sig.op_names)
        try:
            return mk_app(sig, name, args)
        except TermError as exc:
            raise ParseError(str(exc), line.lineno, tok.col) from None
    if name in alphabet:
        return Var(name, alphabet[name])
    if sig.has_op(name) and sig.op(name).arity == 0:
        return App(name, (), sig.op(name).result)
    raise ParseError(f"unknown name {name!r}", line.lineno, tok.col,
                     list(alphabet) + list(sig.constants))


def parse_term(text: str, sig: Signature, alphabet: Mapping[str, str]) -> Term:
    line = _Line(text, 1)
    t = _parse_term(line, sig, alphabet)
    line.done()
    return t


def _parse_pair(line: _Line, sig, alphabet) -> tuple[Term, Term]:
    lhs = _parse_term(line, sig, alphabet)
    eq = line.expect("=")
    rhs = _parse_term(line, sig, alphabet)
    if lhs.sort != rhs.sort:
        raise ParseError(f"sides have sorts {lhs.sort!r} and {rhs.sort!r}", line.lineno, eq.col)
    return lhs, rhs


def parse_query(text: str, sig: Signature, alphabet: Mapping[str, str]) -> tuple[Term, Term]:
    """A single ``t1 = t2`` pair."""
    line = _Line(text, 1)
    pair = _parse_pair(line, sig, alphabet)
    line.done()
    return pair


def _parse_alphabet(line: _Line, sig: Signature, closer: str | None) -> dict[str, str]:
    alphabet: dict[str, str] = {}
    while not line.at_end() and (closer is None or line.peek().text != closer):
        if line.peek().text == ";":
            break
        tok = line.peek()
        x = line.name("variable")
        line.expect(":")
        s = line.name("sort")
        if s not in sig.sorts:
            raise ParseError(f"undeclared sort {s!r}", line.lineno, tok.col, sig.sorts)
        if x in alphabet:
            raise ParseError(f"variable {x!r} declared twice", line.lineno, tok.col)
        alphabet[x] = s
    return alphabet


# -- varieties ----------------------------------------------------------------------

def parse_variety(text: str) -> VarietySpec:
    name = ""
    sorts: list[str] | None = None
    ops: dict[str, OpType] = {}
    identities: list[Identity] = []
    sig: Signature | None = None
    lines = list(_lines(text))
    if not lines:
        raise ParseError("no sorts declared", 1, 1, ["sorts"])
    for line in lines:
        kw = line.name("keyword")
        if kw == "variety":
            name = line.name("variety name")
        elif kw == "sorts":
            if sorts is not None:
                raise line.error("sorts declared twice")
            sorts = []
            while not line.at_end():
                tok = line.peek()
                s = line.name("sort")
                if s in sorts:
                    raise ParseError(f"duplicate sort {s!r}", line.lineno, tok.col)
                sorts.append(s)
            if not sorts:
                raise line.error("expected at least one sort", ["sort"])
        elif kw == "op":
            if sorts is None:
                raise ParseError("operation before 'sorts'", line.lineno, 1, ["sorts"])
            if identities:
                raise ParseError("operations must precede identities", line.lineno, 1)
            tok = line.peek()
            op = line.name("operation name")
            if op in ops:
                raise ParseError(f"duplicate operation {op!r}", line.lineno, tok.col)
            line.expect(":")
            args = []
            while line.peek() is not None and line.peek().text != "->":
                stok = line.peek()
                s = line.name("sort")
                if s not in sorts:
                    raise ParseError(f"undeclared sort {s!r}", line.lineno, stok.col, sorts)
                args.append(s)
            line.expect("->")
            rtok = line.peek()
            res = line.name("sort")
            if res not in sorts:
                raise ParseError(f"undeclared sort {res!r}", line.lineno, rtok.col, sorts)
            ops[op] = OpType(tuple(args), res)
        elif kw == "identity":
            if sorts is None:
                raise ParseError("identity before 'sorts'", line.lineno, 1, ["sorts"])
            if sig is None:
                sig = Signature(tuple(sorted(sorts)), tuple(sorted(ops.items())))
            line.expect("[")
            alphabet = _parse_alphabet(line, sig, "]")
            line.expect("]")
            lhs, rhs = _parse_pair(line, sig, alphabet)
            identities.append(Identity.of(alphabet, lhs, rhs))
        else:
            raise ParseError(f"unknown keyword {kw!r}", line.lineno, 1, ["variety", "sorts", "op", "identity"])
        line.done()
    if sorts is None:
        raise ParseError("no sorts declared", lines[-1].lineno + 1, 1, ["sorts"])
    if sig is None:
        sig = Signature(tuple(sorted(sorts)), tuple(sorted(ops.items())))
    spec = VarietySpec(sig, tuple(identities), name)
    report = validate_variety(spec)
    if not report.ok:
        raise ParseError("; ".join(report.violations))
    return spec


def format_variety(v: VarietySpec) -> str:
    out = []
    if v.name:
        out.append(f"variety {v.name}")
    out.append("sorts " + " ".join(v.signature.sorts))
    for name, t in v.signature.ops:
        out.append(f"op {name} : {' '.join(t.args)}{' ' if t.args else ''}-> {t.result}")
    for ident in v.identities:
        alpha = " ".join(f"{x}:{s}" for x, s in ident.alphabet)
        out.append(f"identity [{alpha}] {ident.lhs} = {ident.rhs}")
    return "\n".join(out) + "\n"


# -- algebras ------------------------------------------------------------------------

def parse_algebra(text: str, v: VarietySpec | Signature) -> FiniteAlgebra:
    sig = v.signature if isinstance(v, VarietySpec) else v
    carriers: dict[str, list[str]] = {}
    tables: dict[str, dict[tuple, int]] = {}
    index: dict[str, dict[str, int]] = {}
    current: str | None = None
    op_line: dict[str, int] = {}
    last_line = 0

    def element(line: _Line, sort: str) -> int:
        tok = line.peek()
        name = line.name(f"element of sort {sort}")
        if name not in index[sort]:
            raise ParseError(f"{name!r} is not an element of sort {sort!r}", line.lineno, tok.col,
                             carriers[sort])
        return index[sort][name]

    for line in _lines(text):
        last_line = line.lineno
        tok = line.peek()
        if tok.text == "algebra":
            line.next()
            line.name("algebra name")
        elif tok.text == "carrier":
            line.next()
            if tables:
                raise ParseError("carriers must precede tables", line.lineno, tok.col)
            stok = line.peek()
            s = line.name("sort")
            if s not in sig.sorts:
                raise ParseError(f"undeclared sort {s!r}", line.lineno, stok.col, sig.sorts)
            if s in carriers:
                raise ParseError(f"carrier of sort {s!r} declared twice", line.lineno, stok.col)
            line.expect(":")
            names: list[str] = []
            while not line.at_end():
                etok = line.peek()
                e = line.name("element")
                if e in names:
                    raise ParseError(f"duplicate element {e!r}", line.lineno, etok.col)
                names.append(e)
            carriers[s] = names
            index[s] = {e: k for k, e in enumerate(names)}
        elif tok.text == "table":
            line.next()
            for s in sig.sorts:
                if s not in carriers:
                    carriers[s], index[s] = [], {}
            otok = line.peek()
            op = line.name("operation")
            if not sig.has_op(op):
                raise ParseError(f"undeclared operation {op!r}", line.lineno, otok.col, sig.op_names)
            if op in tables:
                raise ParseError(f"table {op!r} given twice", line.lineno, otok.col)
            tables[op] = {}
            op_line[op] = line.lineno
            current = op
        else:
            if current is None:
                raise ParseError(f"unexpected {tok.text!r}", line.lineno, tok.col, ["algebra", "carrier", "table"])
            t = sig.op(current)
            args = tuple(element(line, s) for s in t.args)
            line.expect("->")
            res = element(line, t.result)
            if args in tables[current]:
                raise ParseError(f"duplicate row for {current}{args}", line.lineno, tok.col)
            tables[current][args] = res
        line.done()

    for s in sig.sorts:
        carriers.setdefault(s, [])
    arrays = {}
    for name, t in sig.ops:
        shape = tuple(len(carriers[s]) for s in t.args)
        rows = tables.get(name)
        if rows is None:
            if int(np.prod(shape)) == 0 and t.arity:
                rows = {}
            else:
                raise ParseError(f"missing table for operation {name!r}", last_line + 1, 1, ["table"])
        arr = np.full(shape, -1, dtype=np.int64)
        for args, res in rows.items():
            arr[args] = res
        missing = np.argwhere(arr < 0)
        if missing.size:
            tup = tuple(carriers[s][i] for s, i in zip(t.args, missing[0]))
            raise ParseError(f"table {name!r} has no row for ({' '.join(tup)})", op_line.get(name, last_line), 1)
        arrays[name] = arr
    try:
        return FiniteAlgebra(sig, {s: tuple(carriers[s]) for s in sig.sorts}, arrays)
    except AlgebraError as exc:
        raise ParseError(str(exc)) from None


def format_algebra(H: FiniteAlgebra, name: str = "") -> str:
    out = [f"algebra {name}"] if name else []
    sig = H.signature
    for s in sig.sorts:
        out.append(f"carrier {s} :" + "".join(f" {e}" for e in H.carriers[s]))
    for op, t in sig.ops:
        out.append(f"table {op}")
        table = H.tables[op]
        shape = tuple(H.size(s) for s in t.args)
        for idx in np.ndindex(*shape):
            args = " ".join(H.carriers[s][i] for s, i in zip(t.args, idx))
            out.append(f"  {args}{' ' if args else ''}-> {H.carriers[t.result][int(table[idx])]}")
    return "\n".join(out) + "\n"


# -- equation systems -----------------------------------------------------------------

def parse_system(text: str, sig: Signature):
    from .closure import EquationSystem

    alphabet: dict[str, str] | None = None
    pairs = []
    for line in _lines(text):
        while not line.at_end():
            if line.accept(";"):
                continue
            tok = line.peek()
            if tok.text == "X":
                line.next()
                line.expect(":")
                if alphabet is not None:
                    raise ParseError("alphabet declared twice", line.lineno, tok.col)
                alphabet = _parse_alphabet(line, sig, None)
            elif tok.text == "eq":
                if alphabet is None:
                    raise ParseError("equation before the alphabet", line.lineno, tok.col, ["X"])
                line.next()
                pairs.append(_parse_pair(line, sig, alphabet))
            else:
                raise line.error(f"unexpected {tok.text!r}", ["X", "eq", ";"])
    if alphabet is None:
        raise ParseError("no alphabet declared", 1, 1, ["X"])
    return EquationSystem.of(alphabet, pairs)


def format_system(T) -> str:
    out = ["X:" + "".join(f" {x}:{s}" for x, s in T.alphabet)]
    out += [f"eq {a} = {b}" for a, b in T.pairs]
    return "\n".join(out) + "\n"


# -- word systems ---------------------------------------------------------------------

def parse_words(text: str, sig: Signature):
    from .verbal import VerbalError, designated_alphabet, make_word_system

    bodies: dict[str, Term] = {}
    last = 0
    for line in _lines(text):
        last = line.lineno
        tok = line.peek()
        op = line.name("operation")
        if not sig.has_op(op):
            raise ParseError(f"undeclared operation {op!r}", line.lineno, tok.col, sig.op_names)
        if op in bodies:
            raise ParseError(f"second word for {op!r}", line.lineno, tok.col)
        line.expect(":=")
        bodies[op] = _parse_term(line, sig, designated_alphabet(sig.op(op)))
        if bodies[op].sort != sig.op(op).result:
            raise ParseError(f"word for {op!r} has sort {bodies[op].sort!r}, expected {sig.op(op).result!r}",
                             line.lineno, tok.col)
        line.done()
    try:
        return make_word_system(sig, bodies)
    except VerbalError as exc:
        raise ParseError(str(exc), last + 1, 1, sorted(set(sig.op_names) - set(bodies))) from None


def format_words(W) -> str:
    return "".join(f"{w.op} := {w.body}\n" for w in W)


__all__ = [
    "ParseError", "parse_term", "parse_query", "parse_variety", "format_variety", "parse_algebra",
    "format_algebra", "parse_system", "format_system", "parse_words", "format_words",
    "SignatureError",
]
