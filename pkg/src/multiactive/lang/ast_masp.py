"""Abstract syntax of the multi-active object language.

Statement sequences are kept in normal form: ``MSeq(first, rest)`` where
``first`` is never itself a sequence, ending in a plain statement. The
hole marker ``x = •`` used by the runtime call stack is not representable
here; runtime frames use their own marker.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from ..diagnostics import NO_POS, Pos
from .ast_expr import Expr


@dataclass(frozen=True)
class MInvoke:
    target: Expr
    method: Optional[str]  # static method name, or None for dynamic dispatch
    method_var: Optional[str] = None  # variable holding the method name
    args: Tuple[Expr, ...] = ()
    vararg: Optional[str] = None  # variable expanded into trailing arguments
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class MNew:
    cls: str
    args: Tuple[Expr, ...] = ()
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class MNewActive:
    cls: str
    args: Tuple[Expr, ...] = ()
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


MRhs = Union[Expr, MInvoke, MNew, MNewActive]


@dataclass(frozen=True)
class MSkip:
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class MAssign:
    target: str
    rhs: MRhs
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class MReturn:
    expr: Expr
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class MSetLimit:
    kind: str  # "S" | "H"
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class MIf:
    cond: Expr
    then: "MStmt"
    els: "MStmt"
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class MSeq:
    first: "MStmt"
    rest: "MStmt"
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


MStmt = Union[MSkip, MAssign, MReturn, MSetLimit, MIf, MSeq]


@dataclass(frozen=True)
class GroupDecl:
    name: str
    self_compatible: bool = False
    min_threads: int = 0
    max_threads: Optional[int] = None  # None = unbounded
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class GroupPolicy:
    groups: Tuple[GroupDecl, ...] = ()
    compatible_pairs: frozenset = frozenset()  # of frozenset({g, g'})
    thread_pool_size: Optional[int] = None  # None = unbounded
    hard_limit_default: bool = False
    priority_levels: Tuple[Tuple[str, ...], ...] = ()

    def group(self, name: str) -> Optional[GroupDecl]:
        for g in self.groups:
            if g.name == name:
                return g
        return None


EMPTY_POLICY = GroupPolicy()


@dataclass(frozen=True)
class MaspMethod:
    name: str
    params: Tuple[str, ...] = ()
    locals: Tuple[str, ...] = ()
    body: MStmt = MSkip()
    group: Optional[str] = None
    vararg: Optional[str] = None  # trailing rest-parameter
    pos: Pos = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class MaspClass:
    name: str
    fields: Tuple[str, ...] = ()  # constructor parameters double as fields
    methods: Tuple[MaspMethod, ...] = ()
    policy: Optional[GroupPolicy] = None
    pos: Pos = field(default=NO_POS, compare=False, repr=False)

    def method(self, name: str) -> Optional[MaspMethod]:
        for m in self.methods:
            if m.name == name:
                return m
        return None


@dataclass(frozen=True)
class MaspProgram:
    classes: Tuple[MaspClass, ...] = ()
    main_locals: Tuple[str, ...] = ()
    main_body: MStmt = MSkip()

    def cls(self, name: str) -> Optional[MaspClass]:
        for c in self.classes:
            if c.name == name:
                return c
        return None


def mseq(stmts) -> MStmt:
    """Right-associated sequence of the given statements (skip if empty)."""
    stmts = [s for s in stmts]
    if not stmts:
        return MSkip()
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = MSeq(s, out)
    return out


def mseq_list(s: MStmt) -> list:
    """Flatten a statement into its top-level sequence components."""
    out = []
    while isinstance(s, MSeq):
        out.extend(mseq_list(s.first))
        s = s.rest
    out.append(s)
    return out


def mnormalize(s: MStmt) -> MStmt:
    """Re-associate sequences to the right; idempotent, order preserving."""
    parts = mseq_list(s)
    parts = [
        MIf(p.cond, mnormalize(p.then), mnormalize(p.els), pos=p.pos)
        if isinstance(p, MIf)
        else p
        for p in parts
    ]
    return mseq(parts)
