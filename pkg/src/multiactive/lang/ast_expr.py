"""Expression nodes, shared by both languages.

Expressions are pure: values, variables, ``this`` and arithmetic/boolean
operators. Positions never take part in equality so parse/pretty round
trips compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..diagnostics import NO_POS, Pos


@dataclass(frozen=True)
class Lit:
    value: Union[None, bool, int]
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class This:
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class Binop:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class Unop:
    op: str
    operand: "Expr"
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class MethodLit:
    """A method name as a value (``@m``); argument of execute calls."""

    name: str
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class RuntimeVal:
    """Runtime-injected value in expression position; never parsed."""

    value: object
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


Expr = Union[Lit, Var, This, Binop, Unop, MethodLit, RuntimeVal]

BINOPS = ("||", "&&", "==", "!=", "<=", ">=", "<", ">", "+", "-", "*", "/")
UNOPS = ("!", "-")


def expr_vars(e: Expr) -> set:
    """All variable names read by an expression."""
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Binop):
        return expr_vars(e.left) | expr_vars(e.right)
    if isinstance(e, Unop):
        return expr_vars(e.operand)
    return set()
