"""Canonical forms and digests of runtime configurations.

Fresh names (activity/cog names, future names, store locations) carry no
meaning beyond identity, so configurations are digested after renaming
them along a deterministic traversal: alpha-equivalent configurations
yield equal digests. Canonical choices (activity order, thread order,
unreachable store entries) are made greedily by least partially-renamed
text, recomputed after each assignment, so renamings collapse.
"""

from __future__ import annotations

import hashlib

from .lang.ast_abs import (
    AAssign,
    AAsync,
    AAwait,
    AGet,
    AIf,
    ANew,
    AReturn,
    aseq_list,
    ASkip,
    ASuspend,
    ASync,
    GBool,
    GFut,
)
from .lang.ast_expr import RuntimeVal
from .lang.ast_masp import MAssign, MIf, MInvoke, MNew, MNewActive, MReturn, MSetLimit, MSkip, mseq_list
from .lang.pretty import pp_expr
from .masp.runtime import MaspConfig, MHole, Obj
from .values import UNRESOLVED, ActRef, FutRef, Loc, MethodVal, ObjRef, show_value


def digest_of(text: str) -> str:
    return hashlib.blake2b(text.encode(), digest_size=8).hexdigest()


class _Namer:
    """Assigns canonical tokens on first use; frozen namers render '?'."""

    def __init__(self, prefix: str, mapping=None, frozen=False):
        self.prefix = prefix
        self.map = {} if mapping is None else dict(mapping)
        self.frozen = frozen

    def token(self, name) -> str:
        if name not in self.map:
            if self.frozen:
                return "?"
            self.map[name] = f"{self.prefix}{len(self.map)}"
        return self.map[name]

    def order(self, name) -> int:
        tok = self.map[name]
        return int(tok[len(self.prefix) :])

    def frozen_view(self) -> "_Namer":
        return _Namer(self.prefix, self.map, frozen=True)


def _frozen(namer: dict) -> dict:
    return {k: v.frozen_view() for k, v in namer.items()}


# -- multi-active configurations ----------------------------------------------


def _mval(v, locs, namer):
    if isinstance(v, Loc):
        return locs.token(v)
    if isinstance(v, ActRef):
        return namer["act"].token(v.name)
    if isinstance(v, FutRef):
        return namer["fut"].token(v.name)
    if isinstance(v, MethodVal):
        return f"@{v.name}"
    if isinstance(v, tuple):
        return "(" + ",".join(_mval(x, locs, namer) for x in v) + ")"
    return show_value(v)


def _mexpr(e, locs, namer):
    if isinstance(e, RuntimeVal):
        return f"<{_mval(e.value, locs, namer)}>"
    return pp_expr(e)


def _mrhs(r, locs, namer):
    if isinstance(r, MNew):
        return f"new {r.cls}({','.join(_mexpr(a, locs, namer) for a in r.args)})"
    if isinstance(r, MNewActive):
        return f"newA {r.cls}({','.join(_mexpr(a, locs, namer) for a in r.args)})"
    if isinstance(r, MInvoke):
        m = r.method if r.method is not None else f"({r.method_var})"
        args = ",".join(_mexpr(a, locs, namer) for a in r.args)
        if r.vararg:
            args += f",{r.vararg}..."
        return f"{_mexpr(r.target, locs, namer)}.{m}({args})"
    return _mexpr(r, locs, namer)


def _mstmt(s, locs, namer):
    if isinstance(s, MSkip):
        return "skip"
    if isinstance(s, MSetLimit):
        return f"limit:{s.kind}"
    if isinstance(s, MReturn):
        return f"ret {_mexpr(s.expr, locs, namer)}"
    if isinstance(s, MHole):
        return f"{s.target}=•"
    if isinstance(s, MAssign):
        return f"{s.target}={_mrhs(s.rhs, locs, namer)}"
    if isinstance(s, MIf):
        thn = ";".join(_mstmt(x, locs, namer) for x in mseq_list(s.then))
        els = ";".join(_mstmt(x, locs, namer) for x in mseq_list(s.els))
        return f"if({_mexpr(s.cond, locs, namer)}){{{thn}}}{{{els}}}"
    raise TypeError(f"bad statement {s!r}")


def _storable(s, locs, namer):
    if isinstance(s, Obj):
        fields = ",".join(
            f"{k}:{_mval(v, locs, namer)}" for k, v in sorted(s.fields.items())
        )
        return f"[{s.cls}|{fields}]"
    return _mval(s, locs, namer)


def _request_text(q, locs, namer):
    args = ",".join(_mval(a, locs, namer) for a in q.args)
    return f"({namer['fut'].token(q.future)},{q.method},[{args}])"


def _thread_text(t, locs, namer):
    req = _request_text(t.request, locs, namer)
    frames = []
    for f in t.stack:
        ls = ",".join(
            f"{k}:{_mval(v, locs, namer)}" for k, v in sorted(f.locals.items())
        )
        st = ";".join(_mstmt(s, locs, namer) for s in f.stmts)
        frames.append(f"{{{ls}|{st}}}")
    return f"thr[{t.state}] {req} " + "::".join(frames)


def _emit_store(store, locs, namer, out):
    pending = dict(store)
    while pending:
        tokened = [l for l in pending if l in locs.map]
        if tokened:
            nxt = min(tokened, key=locs.order)
            out.append(f"sto {locs.token(nxt)}={_storable(pending.pop(nxt), locs, namer)}")
        else:
            fnamer = _frozen(namer)
            best = min(
                pending,
                key=lambda l: (
                    _storable(pending[l], locs.frozen_view(), fnamer),
                    l.index,
                ),
            )
            out.append(f"sto {locs.token(best)}={_storable(pending.pop(best), locs, namer)}")


def _activity_text(act, namer):
    locs = _Namer("o")
    out = [
        f"act cls={act.cls} limit={act.limit} nextid={act.id_counter}"
        f" self={locs.token(act.active_loc)}"
    ]
    fnamer = _frozen(namer)
    threads = sorted(
        act.current.values(),
        key=lambda t: _thread_text(t, _Namer("o"), fnamer),
    )
    for t in threads:
        out.append(_thread_text(t, locs, namer))
    for q in act.queue:
        out.append(_request_text(q, locs, namer))
    for ident in sorted(act.registry, key=repr):
        out.append(f"reg {ident}->{_mval(act.registry[ident], locs, namer)}")
    _emit_store(act.store, locs, namer, out)
    return "\n".join(out)


def _binder_text(name, binder, namer):
    tok = namer["fut"].token(name)
    if not binder.resolved:
        return f"fut {tok} bot m={binder.method}"
    locs = _Namer("o")
    val = _mval(binder.value, locs, namer)
    out = []
    _emit_store(binder.piece or {}, locs, namer, out)
    return f"fut {tok} {val} [{';'.join(out)}] m={binder.method}"


def masp_canonical(config: MaspConfig) -> str:
    namer = {"act": _Namer("A"), "fut": _Namer("F")}
    remaining = list(config.activities.values())
    ordered = []
    while remaining:
        fnamer = _frozen(namer)
        best = min(
            remaining,
            key=lambda a: (_activity_text(a, fnamer), a.name),
        )
        namer["act"].token(best.name)
        _activity_text(best, namer)  # assigns future/activity tokens in order
        ordered.append(best)
        remaining = [a for a in remaining if a.name != best.name]
    parts = [_activity_text(a, namer) for a in ordered]
    pending = dict(config.futures)
    for real in sorted(
        [f for f in namer["fut"].map if f in pending], key=namer["fut"].order
    ):
        parts.append(_binder_text(real, pending.pop(real), namer))
    while pending:
        fnamer = _frozen(namer)
        best = min(pending, key=lambda f: (_binder_text(f, pending[f], fnamer), f))
        parts.append(_binder_text(best, pending.pop(best), namer))
    return "\n".join(parts)


_DIGEST_CACHE = {}


def _cached_digest(config, render) -> str:
    hit = _DIGEST_CACHE.get(id(config))
    if hit is not None and hit[0] is config:
        return hit[1]
    d = digest_of(render(config))
    if len(_DIGEST_CACHE) > 200_000:
        _DIGEST_CACHE.clear()
    _DIGEST_CACHE[id(config)] = (config, d)
    return d


def masp_digest(config: MaspConfig) -> str:
    return _cached_digest(config, masp_canonical)


# -- cooperative configurations ------------------------------------------------


def _aval(v, namer):
    if isinstance(v, ObjRef):
        return f"{v.ident}_{namer['act'].token(v.cog)}"
    if isinstance(v, ActRef):
        return namer["act"].token(v.name)
    if isinstance(v, FutRef):
        return namer["fut"].token(v.name)
    if isinstance(v, MethodVal):
        return f"@{v.name}"
    return show_value(v)


def _aexpr(e, namer):
    if isinstance(e, RuntimeVal):
        return f"<{_aval(e.value, namer)}>"
    return pp_expr(e)


def _aguard(g, namer):
    from .absm.runtime import RGFut

    if isinstance(g, GBool):
        return _aexpr(g.expr, namer)
    if isinstance(g, GFut):
        return f"{g.var}?"
    if isinstance(g, RGFut):
        return f"<{_aval(g.value, namer)}>?"
    return f"{_aguard(g.left, namer)}&&{_aguard(g.right, namer)}"


def _arhs(r, namer):
    if isinstance(r, ANew):
        kw = "newL" if r.local else "new"
        return f"{kw} {r.cls}({','.join(_aexpr(a, namer) for a in r.args)})"
    if isinstance(r, ASync):
        return f"{_aexpr(r.target, namer)}.{r.method}({','.join(_aexpr(a, namer) for a in r.args)})"
    if isinstance(r, AAsync):
        return f"{_aexpr(r.target, namer)}!{r.method}({','.join(_aexpr(a, namer) for a in r.args)})"
    if isinstance(r, AGet):
        return f"{_aexpr(r.expr, namer)}.get"
    return _aexpr(r, namer)


def _astmt(s, namer):
    if isinstance(s, ASkip):
        return "skip"
    if isinstance(s, ASuspend):
        return "suspend"
    if isinstance(s, AReturn):
        return f"ret {_aexpr(s.expr, namer)}"
    if isinstance(s, AAwait):
        return f"await {_aguard(s.guard, namer)}"
    if isinstance(s, AAssign):
        return f"{s.target}={_arhs(s.rhs, namer)}"
    if isinstance(s, AIf):
        thn = ";".join(_astmt(x, namer) for x in aseq_list(s.then))
        els = ";".join(_astmt(x, namer) for x in aseq_list(s.els))
        return f"if({_aexpr(s.cond, namer)}){{{thn}}}{{{els}}}"
    raise TypeError(f"bad statement {s!r}")


def _process_text(p, namer):
    if p is None:
        return "idle"
    ls = ",".join(f"{k}:{_aval(v, namer)}" for k, v in sorted(p.locals.items()))
    st = ";".join(_astmt(s, namer) for s in p.stmts)
    return f"{{{ls}|{st}}}"


def _cog_text(config, cog, namer):
    active = config.cogs[cog]
    nextid = config.id_counters.get(cog, 1)
    out = [f"cog nextid={nextid} act={'ε' if active is None else _aval(active, namer)}"]
    members = sorted(
        (o for o in config.objects.values() if o.name.cog == cog),
        key=lambda o: o.name.ident,
    )
    for ob in members:
        fields = ",".join(
            f"{k}:{_aval(v, namer)}" for k, v in sorted(ob.fields.items())
        )
        out.append(f"ob {ob.name.ident} cls={ob.cls} [{fields}] act={_process_text(ob.active, namer)}")
        for p in ob.queue:
            out.append(f"  q {_process_text(p, namer)}")
    return "\n".join(out)


def _abs_binder_text(name, value, namer):
    tok = namer["fut"].token(name)
    if value is UNRESOLVED:
        return f"fut {tok} bot"
    return f"fut {tok} {_aval(value, namer)}"


def abs_canonical(config) -> str:
    namer = {"act": _Namer("A"), "fut": _Namer("F")}
    remaining = list(config.cogs.keys())
    ordered = []
    while remaining:
        fnamer = _frozen(namer)
        best = min(remaining, key=lambda c: (_cog_text(config, c, fnamer), c))
        namer["act"].token(best)
        _cog_text(config, best, namer)
        ordered.append(best)
        remaining = [c for c in remaining if c != best]
    parts = [_cog_text(config, c, namer) for c in ordered]
    pending = dict(config.futures)
    for real in sorted(
        [f for f in namer["fut"].map if f in pending], key=namer["fut"].order
    ):
        parts.append(_abs_binder_text(real, pending.pop(real), namer))
    while pending:
        fnamer = _frozen(namer)
        best = min(pending, key=lambda f: (_abs_binder_text(f, pending[f], fnamer), f))
        parts.append(_abs_binder_text(best, pending.pop(best), namer))
    return "\n".join(parts)


def abs_digest(config) -> str:
    return _cached_digest(config, abs_canonical)


def canonicalize(config) -> str:
    """Digest dispatching on the configuration kind."""
    if isinstance(config, MaspConfig):
        return masp_digest(config)
    return abs_digest(config)


# -- fast structural keys (no renaming; for search-local visited sets) ---------


_SKEY_CACHE = {}


def _skey(x):
    # structure is immutable and widely shared between successor
    # configurations, so identity-keyed memoization pays off hugely
    cacheable = isinstance(x, (dict, tuple)) or hasattr(x, "__dataclass_fields__")
    if cacheable:
        hit = _SKEY_CACHE.get(id(x))
        if hit is not None and hit[0] is x:
            return hit[1]
    if isinstance(x, dict):
        key = tuple(
            sorted(((repr(k), _skey(v)) for k, v in x.items()), key=lambda kv: kv[0])
        )
    elif isinstance(x, (tuple, list)):
        key = tuple(_skey(y) for y in x)
    elif hasattr(x, "__dataclass_fields__"):
        key = (type(x).__name__,) + tuple(
            _skey(getattr(x, f)) for f in x.__dataclass_fields__ if f != "pos"
        )
    elif callable(x):
        return type(x).__name__
    else:
        return x
    if len(_SKEY_CACHE) > 800_000:
        _SKEY_CACHE.clear()
    _SKEY_CACHE[id(x)] = (x, key)
    return key


def masp_struct_key(config: MaspConfig):
    """Exact structural identity, cheap; names are NOT canonicalized."""
    return (
        _skey(config.activities),
        _skey(config.futures),
        config.act_counter,
        config.fut_counter,
    )


def abs_struct_key(config):
    return (
        _skey(config.objects),
        _skey(config.cogs),
        _skey(config.futures),
        config.cog_counter,
        config.fut_counter,
        _skey(config.id_counters),
    )
