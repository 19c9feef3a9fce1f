from .ast_masp import (
    MaspProgram,
    MaspClass,
    MaspMethod,
    GroupDecl,
    GroupPolicy,
    MSkip,
    MAssign,
    MReturn,
    MSeq,
    MSetLimit,
    MIf,
    MInvoke,
    MNew,
    MNewActive,
)
from .ast_abs import (
    AbsProgram,
    AbsClass,
    AbsMethod,
    ASkip,
    AAssign,
    ASuspend,
    AAwait,
    AReturn,
    AIf,
    ASeq,
    ASync,
    AAsync,
    ANew,
    AGet,
    GBool,
    GFut,
    GAnd,
)
from .ast_expr import Lit, Var, This, Binop, Unop, MethodLit, RuntimeVal
from .parser_masp import parse_masp
from .parser_abs import parse_abs
from .pretty import pretty_masp, pretty_abs
from .wellformed import check_wellformed

__all__ = [n for n in dir() if not n.startswith("_")]
