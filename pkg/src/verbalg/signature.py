"""Sorted signatures, operation types and varieties."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping

if TYPE_CHECKING:
    from .terms import Term


@dataclass(frozen=True)
class OpType:
    """Type ``(i1, ..., in; j)`` of an operation symbol. ``args == ()`` is a constant."""

    args: tuple[str, ...]
    result: str

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        return f"({','.join(self.args)};{self.result})"


@dataclass(frozen=True)
class Signature:
    """Finite set of sorts plus operation symbols with their types.

    Construction does not validate; call :func:`validate_signature` (or
    :meth:`checked`) to obtain a report.
    """

    sorts: tuple[str, ...]
    ops: tuple[tuple[str, OpType], ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", dict(self.ops))

    @classmethod
    def build(cls, sorts, ops: Mapping[str, tuple]) -> "Signature":
        """``Signature.build(["1", "2"], {"mul": (("1", "1"), "1")})``"""
        items = []
        for name, spec in ops.items():
            if isinstance(spec, OpType):
                items.append((name, spec))
            else:
                args, result = spec
                items.append((name, OpType(tuple(args), result)))
        return cls(tuple(sorted(sorts)), tuple(sorted(items, key=lambda kv: kv[0])))

    def op(self, name: str) -> OpType:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"undeclared operation {name!r}") from None

    def has_op(self, name: str) -> bool:
        return name in self._index

    @property
    def op_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.ops)

    @property
    def constants(self) -> tuple[str, ...]:
        return tuple(name for name, t in self.ops if t.arity == 0)

    def checked(self) -> "Signature":
        report = validate_signature(self)
        if not report.ok:
            raise SignatureError("; ".join(report.violations))
        return self


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_signature(sig: Signature) -> ValidationReport:
    violations: list[str] = []
    if not sig.sorts:
        violations.append("no sorts declared")
    seen: set[str] = set()
    for s in sorted(sig.sorts):
        if s in seen:
            violations.append(f"duplicate sort {s!r}")
        seen.add(s)
    seen_ops: set[str] = set()
    for name, t in sorted(sig.ops, key=lambda kv: (kv[0], kv[1].args, kv[1].result)):
        if name in seen_ops:
            violations.append(f"duplicate operation {name!r}")
        seen_ops.add(name)
        for pos, s in enumerate(t.args):
            if s not in seen:
                violations.append(f"undeclared sort {s!r} in argument {pos} of {name!r}")
        if t.result not in seen:
            violations.append(f"undeclared sort {t.result!r} in result of {name!r}")
    return ValidationReport(tuple(violations))


@dataclass(frozen=True)
class Identity:
    """``lhs = rhs`` over its own alphabet (variable name -> sort)."""

    alphabet: tuple[tuple[str, str], ...]
    lhs: "Term"
    rhs: "Term"

    @classmethod
    def of(cls, alphabet: Mapping[str, str], lhs: "Term", rhs: "Term") -> "Identity":
        return cls(tuple(sorted(alphabet.items())), lhs, rhs)

    @property
    def variables(self) -> dict[str, str]:
        return dict(self.alphabet)

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class VarietySpec:
    signature: Signature
    identities: tuple[Identity, ...] = ()
    name: str = ""


def validate_variety(v: VarietySpec) -> ValidationReport:
    from .terms import TermError, check_term

    report = validate_signature(v.signature)
    if not report.ok:
        return report
    violations: list[str] = []
    for k, ident in enumerate(v.identities):
        alphabet = ident.variables
        if len(alphabet) != len(ident.alphabet):
            violations.append(f"identity {k}: duplicate variable in alphabet")
        for var, s in alphabet.items():
            if s not in v.signature.sorts:
                violations.append(f"identity {k}: variable {var!r} has undeclared sort {s!r}")
        sides = []
        for side in (ident.lhs, ident.rhs):
            try:
                check_term(v.signature, side, alphabet)
            except TermError as exc:
                violations.append(f"identity {k}: {exc}")
                sides.append(None)
            else:
                sides.append(side.sort)
        if None not in sides and sides[0] != sides[1]:
            violations.append(f"identity {k}: sides have different sorts {sides[0]!r} and {sides[1]!r}")
    return ValidationReport(tuple(violations))
