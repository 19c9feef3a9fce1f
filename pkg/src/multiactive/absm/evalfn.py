"""Expression evaluation for the cooperative engine: locals shadow
fields, futures are first-class values, no location indirection."""

from __future__ import annotations

from ..lang.ast_expr import Binop, Lit, MethodLit, RuntimeVal, This, Unop, Var
from ..values import UNDEFINED, EngineFault, FutRef, MethodVal


def abs_evaluate(e, fields, locals_):
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, RuntimeVal):
        return e.value
    if isinstance(e, MethodLit):
        return MethodVal(e.name)
    if isinstance(e, This):
        if "this" not in locals_:
            raise EngineFault("this unbound")
        return locals_["this"]
    if isinstance(e, Var):
        if e.name in locals_:
            return locals_[e.name]
        if e.name in fields:
            return fields[e.name]
        raise EngineFault(f"unbound variable {e.name}")
    if isinstance(e, Unop):
        v = abs_evaluate(e.operand, fields, locals_)
        if e.op == "!":
            return (not v) if isinstance(v, bool) else UNDEFINED
        if _is_int(v):
            return -v
        return UNDEFINED
    if isinstance(e, Binop):
        l = abs_evaluate(e.left, fields, locals_)
        if l is UNDEFINED:
            return UNDEFINED
        r = abs_evaluate(e.right, fields, locals_)
        if r is UNDEFINED:
            return UNDEFINED
        return _binop(e.op, l, r)
    raise EngineFault(f"not an expression: {e!r}")


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _binop(op, l, r):
    if op in ("==", "!="):
        if isinstance(l, FutRef) or isinstance(r, FutRef):
            # comparing unread futures would peek through explicit reads
            return UNDEFINED
        return (l == r) if op == "==" else (l != r)
    if op in ("&&", "||"):
        if isinstance(l, bool) and isinstance(r, bool):
            return (l and r) if op == "&&" else (l or r)
        return UNDEFINED
    if not _is_int(l) or not _is_int(r):
        return UNDEFINED
    if op == "+":
        return l + r
    if op == "-":
        return l - r
    if op == "*":
        return l * r
    if op == "/":
        return UNDEFINED if r == 0 else l // r
    if op == "<":
        return l < r
    if op == "<=":
        return l <= r
    if op == ">":
        return l > r
    if op == ">=":
        return l >= r
    raise EngineFault(f"unknown operator {op}")


def abs_evaluate_list(exprs, fields, locals_):
    out = []
    for e in exprs:
        v = abs_evaluate(e, fields, locals_)
        if v is UNDEFINED:
            return None
        out.append(v)
    return tuple(out)
