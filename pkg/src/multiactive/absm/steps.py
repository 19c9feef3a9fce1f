"""Reduction rules of the cooperative active-object engine.

Communication is rendez-vous style (requests land in the callee queue
synchronously) and fresh requests are served FIFO: `Activate` only ever
takes the queue head, while interrupted processes re-enter the queue at
a nondeterministic position (every position in `explore` mode, the tail
in `run` mode).
"""

from __future__ import annotations

from typing import Optional

from ..lang.ast_abs import (
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
    GAnd,
    GBool,
    GFut,
)
from ..lang.ast_expr import RuntimeVal
from ..steplabel import Label
from ..values import (
    UNDEFINED,
    UNRESOLVED,
    ActRef,
    EngineFault,
    FutRef,
    ObjRef,
)
from .evalfn import abs_evaluate, abs_evaluate_list
from .runtime import AbsConfig, Ob, Process, RGFut, abs_bind


def split_guard(g):
    """First conjunct and the remainder (None when exhausted)."""
    if isinstance(g, GAnd):
        first, rest = split_guard(g.left)
        if rest is None:
            return first, g.right
        return first, GAnd(rest, g.right)
    return g, None


# -- enumeration ---------------------------------------------------------------


def abs_enabled_steps(config: AbsConfig, mode: str = "explore") -> list:
    labels = []
    for cog, active_name in config.cogs.items():
        members = sorted(
            (o for o in config.objects.values() if o.name.cog == cog),
            key=lambda o: o.name.ident,
        )
        for ob in members:
            if ob.active is not None and active_name == ob.name:
                labels.extend(_process_labels(config, ob, mode))
            if ob.active is None:
                if active_name == ob.name:
                    labels.append(
                        Label("Release-Cog", cog, None, (ob.name.ident,))
                    )
                if active_name is None and ob.queue:
                    dest = ob.queue[0].locals.get("destiny")
                    labels.append(
                        Label(
                            "Activate",
                            cog,
                            dest.name if isinstance(dest, FutRef) else None,
                            (ob.name.ident,),
                        )
                    )
    return labels


def _dest(proc) -> Optional[str]:
    d = proc.locals.get("destiny")
    return d.name if isinstance(d, FutRef) else None


def _insertion_labels(config, ob, rule, mode) -> list:
    cog = ob.name.cog
    dest = _dest(ob.active)
    if mode == "run":
        return [Label(rule, cog, dest, (ob.name.ident, len(ob.queue)))]
    return [
        Label(rule, cog, dest, (ob.name.ident, pos))
        for pos in range(len(ob.queue) + 1)
    ]


def _process_labels(config, ob, mode) -> list:
    proc = ob.active
    head = proc.stmts[0]
    cog = ob.name.cog
    dest = _dest(proc)
    fields, locals_ = ob.fields, proc.locals
    ident = (ob.name.ident,)
    if isinstance(head, ASkip):
        return [Label("Skip", cog, dest, ident)]
    if isinstance(head, ASuspend):
        return _insertion_labels(config, ob, "Suspend", mode)
    if isinstance(head, AIf):
        v = abs_evaluate(head.cond, fields, locals_)
        if v is True:
            return [Label("Cond-True", cog, dest, ident)]
        if v is False:
            return [Label("Cond-False", cog, dest, ident)]
        return []
    if isinstance(head, AReturn):
        return _return_labels(config, ob, proc)
    if isinstance(head, AAwait):
        return _await_labels(config, ob, proc, mode)
    if isinstance(head, AAssign):
        return _assign_labels(config, ob, proc, head)
    raise EngineFault(f"unknown statement {head!r}")


def _await_labels(config, ob, proc, mode) -> list:
    first, _ = split_guard(proc.stmts[0].guard)
    cog = ob.name.cog
    dest = _dest(proc)
    ident = (ob.name.ident,)
    if isinstance(first, GBool):
        v = abs_evaluate(first.expr, ob.fields, proc.locals)
        if v is True:
            return [Label("Await-True", cog, dest, ident)]
        if v is False:
            return _insertion_labels(config, ob, "Await-False", mode)
        return []
    if isinstance(first, (GFut, RGFut)):
        if isinstance(first, GFut):
            f = abs_evaluate(_var(first.var), ob.fields, proc.locals)
        else:
            f = first.value
        if not isinstance(f, FutRef):
            return []
        val = config.futures.get(f.name, UNRESOLVED)
        if val is not UNRESOLVED:
            return [Label("Await-True", cog, dest, ident)]
        return _insertion_labels(config, ob, "Await-False", mode)
    raise EngineFault(f"unknown guard {first!r}")


def _var(name):
    from ..lang.ast_expr import Var

    return Var(name)


def _return_labels(config, ob, proc) -> list:
    v = abs_evaluate(proc.stmts[0].expr, ob.fields, proc.locals)
    if v is UNDEFINED:
        return []
    cog = ob.name.cog
    dest = _dest(proc)
    ident = (ob.name.ident,)
    cont = proc.locals.get("cont")
    if cont is None:
        if config.futures.get(dest) is not UNRESOLVED:
            return []
        return [Label("Return", cog, dest, ident)]
    # a synchronous callee: hand control back to the interrupted caller
    if not isinstance(cont, FutRef):
        return []
    for pos, p in enumerate(ob.queue):
        if p.locals.get("destiny") == cont:
            return [Label("Self-Sync-Return-Sched", cog, dest, (ob.name.ident, pos))]
    for other in config.objects.values():
        if other.name.cog == cog and other.name != ob.name and other.active is None:
            for pos, p in enumerate(other.queue):
                if p.locals.get("destiny") == cont:
                    return [
                        Label(
                            "Cog-Sync-Return-Sched",
                            cog,
                            dest,
                            (ob.name.ident, other.name.ident, pos),
                        )
                    ]
    return []


def _assign_labels(config, ob, proc, head) -> list:
    rhs = head.rhs
    cog = ob.name.cog
    dest = _dest(proc)
    ident = (ob.name.ident,)
    fields, locals_ = ob.fields, proc.locals
    if isinstance(rhs, ANew):
        cls = config.program.cls(rhs.cls)
        if cls is None or len(rhs.args) != len(cls.fields):
            return []
        if abs_evaluate_list(rhs.args, fields, locals_) is None:
            return []
        rule = "New-Object" if rhs.local else "New-Cog-Object"
        return [Label(rule, cog, dest, ident)]
    if isinstance(rhs, AAsync):
        target = abs_evaluate(rhs.target, fields, locals_)
        if not isinstance(target, ObjRef) or target not in config.objects:
            return []
        callee = config.objects[target]
        args = abs_evaluate_list(rhs.args, fields, locals_)
        if args is None:
            return []
        if abs_bind(config.program, target, callee.cls, "f?", rhs.method, args) is None:
            return []
        return [Label("Rendez-vous-Comm", cog, dest, ident)]
    if isinstance(rhs, ASync):
        return _sync_labels(config, ob, proc, head)
    if isinstance(rhs, AGet):
        f = abs_evaluate(rhs.expr, fields, locals_)
        if not isinstance(f, FutRef):
            return []
        val = config.futures.get(f.name, UNRESOLVED)
        if val is UNRESOLVED:
            return []  # blocking read holds the whole cog
        return [Label("Read-Fut", cog, dest, ident)]
    v = abs_evaluate(rhs, fields, locals_)
    if v is UNDEFINED:
        return []
    if head.target in locals_:
        return [Label("Assign-Local", cog, dest, ident)]
    if head.target in fields:
        return [Label("Assign-Field", cog, dest, ident)]
    return []


def _sync_labels(config, ob, proc, head) -> list:
    rhs = head.rhs
    cog = ob.name.cog
    dest = _dest(proc)
    fields, locals_ = ob.fields, proc.locals
    target = abs_evaluate(rhs.target, fields, locals_)
    if not isinstance(target, ObjRef) or target not in config.objects:
        return []
    args = abs_evaluate_list(rhs.args, fields, locals_)
    if args is None:
        return []
    callee = config.objects[target]
    if abs_bind(config.program, target, callee.cls, "f?", rhs.method, args) is None:
        return []
    if target == ob.name:
        return [Label("Self-Sync-Call", cog, dest, (ob.name.ident,))]
    if callee.name.cog == cog:
        if callee.active is not None:
            return []
        return [Label("Cog-Sync-Call", cog, dest, (ob.name.ident, target.ident))]
    return [Label("Rem-Sync-Call", cog, dest, (ob.name.ident,))]


# -- application -----------------------------------------------------------------


def abs_apply_step(config: AbsConfig, label: Label) -> AbsConfig:
    handler = _RULES.get(label.rule)
    if handler is None:
        raise EngineFault(f"unknown rule {label.rule}")
    return handler(config, label)


def _ob(config, label) -> Ob:
    ident = label.extra[0]
    ob = config.objects.get(ObjRef(ident, label.activity))
    if ob is None or ob.active is None:
        raise EngineFault(f"step not enabled: {label.key()}")
    return ob


def _expect(cond, label):
    if not cond:
        raise EngineFault(f"step not enabled: {label.key()}")


def _pop(proc) -> Process:
    return proc.with_stmts(proc.stmts[1:])


def _apply_skip(config, label):
    ob = _ob(config, label)
    _expect(isinstance(ob.active.stmts[0], ASkip), label)
    return config.with_object(ob.update(active=_pop(ob.active)))


def _apply_cond(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AIf), label)
    v = abs_evaluate(head.cond, ob.fields, ob.active.locals)
    want = label.rule == "Cond-True"
    _expect(v is want, label)
    branch = head.then if want else head.els
    stmts = tuple(aseq_list(branch)) + ob.active.stmts[1:]
    return config.with_object(ob.update(active=ob.active.with_stmts(stmts)))


def _apply_assign_local(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AAssign) and head.target in ob.active.locals, label)
    v = abs_evaluate(head.rhs, ob.fields, ob.active.locals)
    _expect(v is not UNDEFINED, label)
    proc = Process({**ob.active.locals, head.target: v}, ob.active.stmts[1:])
    return config.with_object(ob.update(active=proc))


def _apply_assign_field(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(
        isinstance(head, AAssign)
        and head.target not in ob.active.locals
        and head.target in ob.fields,
        label,
    )
    v = abs_evaluate(head.rhs, ob.fields, ob.active.locals)
    _expect(v is not UNDEFINED, label)
    fields = dict(ob.fields)
    fields[head.target] = v
    return config.with_object(ob.update(fields=fields, active=_pop(ob.active)))


def _apply_await_true(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AAwait), label)
    first, rest = split_guard(head.guard)
    if isinstance(first, GBool):
        v = abs_evaluate(first.expr, ob.fields, ob.active.locals)
        _expect(v is True, label)
    else:
        f = first.value if isinstance(first, RGFut) else abs_evaluate(
            _var(first.var), ob.fields, ob.active.locals
        )
        _expect(isinstance(f, FutRef), label)
        _expect(config.futures.get(f.name, UNRESOLVED) is not UNRESOLVED, label)
    stmts = ob.active.stmts[1:]
    if rest is not None:
        stmts = (AAwait(rest),) + stmts
    return config.with_object(ob.update(active=ob.active.with_stmts(stmts)))


def _schedule(queue, proc, pos) -> tuple:
    return queue[:pos] + (proc,) + queue[pos:]


def _apply_await_false(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AAwait), label)
    first, _ = split_guard(head.guard)
    if isinstance(first, GBool):
        v = abs_evaluate(first.expr, ob.fields, ob.active.locals)
        _expect(v is False, label)
    else:
        f = first.value if isinstance(first, RGFut) else abs_evaluate(
            _var(first.var), ob.fields, ob.active.locals
        )
        _expect(isinstance(f, FutRef), label)
        _expect(config.futures.get(f.name, UNRESOLVED) is UNRESOLVED, label)
    pos = label.extra[1]
    _expect(0 <= pos <= len(ob.queue), label)
    queue = _schedule(ob.queue, ob.active, pos)
    return config.with_object(ob.update(active=None, queue=queue))


def _apply_suspend(config, label):
    ob = _ob(config, label)
    _expect(isinstance(ob.active.stmts[0], ASuspend), label)
    pos = label.extra[1]
    _expect(0 <= pos <= len(ob.queue), label)
    queue = _schedule(ob.queue, _pop(ob.active), pos)
    return config.with_object(ob.update(active=None, queue=queue))


def _apply_release_cog(config, label):
    ident = label.extra[0]
    ob = config.objects.get(ObjRef(ident, label.activity))
    _expect(ob is not None and ob.active is None, label)
    _expect(config.cogs.get(label.activity) == ob.name, label)
    cogs = dict(config.cogs)
    cogs[label.activity] = None
    return config.update(cogs=cogs)


def _apply_activate(config, label):
    ident = label.extra[0]
    ob = config.objects.get(ObjRef(ident, label.activity))
    _expect(ob is not None and ob.active is None and ob.queue, label)
    _expect(config.cogs.get(label.activity) is None, label)
    proc, rest = ob.queue[0], ob.queue[1:]
    cogs = dict(config.cogs)
    cogs[label.activity] = ob.name
    return config.with_object(ob.update(active=proc, queue=rest)).update(cogs=cogs)


def _apply_read_fut(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AAssign) and isinstance(head.rhs, AGet), label)
    f = abs_evaluate(head.rhs.expr, ob.fields, ob.active.locals)
    _expect(isinstance(f, FutRef), label)
    v = config.futures.get(f.name, UNRESOLVED)
    _expect(v is not UNRESOLVED, label)
    stmts = (AAssign(head.target, RuntimeVal(v)),) + ob.active.stmts[1:]
    return config.with_object(ob.update(active=ob.active.with_stmts(stmts)))


def _apply_new_object(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AAssign) and isinstance(head.rhs, ANew), label)
    _expect(head.rhs.local, label)
    cog = label.activity
    _expect(config.cogs.get(cog) == ob.name, label)
    cls = config.program.cls(head.rhs.cls)
    _expect(cls is not None, label)
    args = abs_evaluate_list(head.rhs.args, ob.fields, ob.active.locals)
    _expect(args is not None and len(args) == len(cls.fields), label)
    counters = dict(config.id_counters)
    ident = counters.get(cog, 1)
    counters[cog] = ident + 1
    name = ObjRef(ident, cog)
    fields = dict(zip(cls.fields, args))
    fields["cog"] = ActRef(cog)
    new_ob = Ob(name, cls.name, fields, None, ())
    stmts = (AAssign(head.target, RuntimeVal(name)),) + ob.active.stmts[1:]
    cfg = config.with_object(ob.update(active=ob.active.with_stmts(stmts)))
    return cfg.with_object(new_ob).update(id_counters=counters)


def _apply_new_cog_object(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AAssign) and isinstance(head.rhs, ANew), label)
    _expect(not head.rhs.local, label)
    cls = config.program.cls(head.rhs.cls)
    _expect(cls is not None, label)
    args = abs_evaluate_list(head.rhs.args, ob.fields, ob.active.locals)
    _expect(args is not None and len(args) == len(cls.fields), label)
    new_cog = f"a{config.cog_counter}"
    counters = dict(config.id_counters)
    ident = counters.get(new_cog, 1)
    counters[new_cog] = ident + 1
    name = ObjRef(ident, new_cog)
    fields = dict(zip(cls.fields, args))
    fields["cog"] = ActRef(new_cog)
    new_ob = Ob(name, cls.name, fields, None, ())
    cogs = dict(config.cogs)
    cogs[new_cog] = None
    stmts = (AAssign(head.target, RuntimeVal(name)),) + ob.active.stmts[1:]
    cfg = config.with_object(ob.update(active=ob.active.with_stmts(stmts)))
    return cfg.with_object(new_ob).update(
        cogs=cogs, cog_counter=config.cog_counter + 1, id_counters=counters
    )


def _apply_rendez_vous(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AAssign) and isinstance(head.rhs, AAsync), label)
    target = abs_evaluate(head.rhs.target, ob.fields, ob.active.locals)
    _expect(isinstance(target, ObjRef) and target in config.objects, label)
    args = abs_evaluate_list(head.rhs.args, ob.fields, ob.active.locals)
    _expect(args is not None, label)
    fut = f"f{config.fut_counter}"
    callee = config.objects[target]
    bound = abs_bind(config.program, target, callee.cls, fut, head.rhs.method, args)
    _expect(bound is not None, label)
    stmts = (AAssign(head.target, RuntimeVal(FutRef(fut))),) + ob.active.stmts[1:]
    caller = ob.update(active=ob.active.with_stmts(stmts))
    cfg = config.with_object(caller)
    callee = cfg.objects[target]  # caller may be the callee
    cfg = cfg.with_object(callee.update(queue=callee.queue + (bound,)))
    futures = dict(cfg.futures)
    futures[fut] = UNRESOLVED
    return cfg.update(futures=futures, fut_counter=config.fut_counter + 1)


def _apply_cog_sync_call(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AAssign) and isinstance(head.rhs, ASync), label)
    target = abs_evaluate(head.rhs.target, ob.fields, ob.active.locals)
    _expect(isinstance(target, ObjRef) and target in config.objects, label)
    _expect(target != ob.name and target.cog == ob.name.cog, label)
    callee = config.objects[target]
    _expect(callee.active is None, label)
    _expect(config.cogs.get(label.activity) == ob.name, label)
    args = abs_evaluate_list(head.rhs.args, ob.fields, ob.active.locals)
    fut = f"f{config.fut_counter}"
    bound = abs_bind(config.program, target, callee.cls, fut, head.rhs.method, args)
    _expect(bound is not None, label)
    bound = bound.with_local("cont", ob.active.locals["destiny"])
    cont_stmts = (
        AAwait(RGFut(FutRef(fut))),
        AAssign(head.target, AGet(RuntimeVal(FutRef(fut)))),
    ) + ob.active.stmts[1:]
    continuation = Process(ob.active.locals, cont_stmts)
    caller = ob.update(active=None, queue=ob.queue + (continuation,))
    cogs = dict(config.cogs)
    cogs[label.activity] = target
    futures = dict(config.futures)
    futures[fut] = UNRESOLVED
    cfg = config.with_object(caller).with_object(callee.update(active=bound))
    return cfg.update(
        cogs=cogs, futures=futures, fut_counter=config.fut_counter + 1
    )


def _apply_self_sync_call(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AAssign) and isinstance(head.rhs, ASync), label)
    target = abs_evaluate(head.rhs.target, ob.fields, ob.active.locals)
    _expect(target == ob.name, label)
    args = abs_evaluate_list(head.rhs.args, ob.fields, ob.active.locals)
    fut = f"f{config.fut_counter}"
    bound = abs_bind(config.program, target, ob.cls, fut, head.rhs.method, args)
    _expect(bound is not None, label)
    bound = bound.with_local("cont", ob.active.locals["destiny"])
    cont_stmts = (
        AAwait(RGFut(FutRef(fut))),
        AAssign(head.target, AGet(RuntimeVal(FutRef(fut)))),
    ) + ob.active.stmts[1:]
    continuation = Process(ob.active.locals, cont_stmts)
    futures = dict(config.futures)
    futures[fut] = UNRESOLVED
    cfg = config.with_object(
        ob.update(active=bound, queue=ob.queue + (continuation,))
    )
    return cfg.update(futures=futures, fut_counter=config.fut_counter + 1)


def _apply_rem_sync_call(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AAssign) and isinstance(head.rhs, ASync), label)
    target = abs_evaluate(head.rhs.target, ob.fields, ob.active.locals)
    _expect(isinstance(target, ObjRef) and target in config.objects, label)
    _expect(target.cog != ob.name.cog, label)
    args = abs_evaluate_list(head.rhs.args, ob.fields, ob.active.locals)
    fut = f"f{config.fut_counter}"
    callee = config.objects[target]
    bound = abs_bind(config.program, target, callee.cls, fut, head.rhs.method, args)
    _expect(bound is not None, label)
    stmts = (
        AAssign(head.target, AGet(RuntimeVal(FutRef(fut)))),
    ) + ob.active.stmts[1:]
    caller = ob.update(active=ob.active.with_stmts(stmts))
    futures = dict(config.futures)
    futures[fut] = UNRESOLVED
    cfg = config.with_object(caller)
    callee = cfg.objects[target]
    cfg = cfg.with_object(callee.update(queue=callee.queue + (bound,)))
    return cfg.update(futures=futures, fut_counter=config.fut_counter + 1)


def _apply_return(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AReturn), label)
    _expect("cont" not in ob.active.locals, label)
    v = abs_evaluate(head.expr, ob.fields, ob.active.locals)
    _expect(v is not UNDEFINED, label)
    dest = ob.active.locals.get("destiny")
    _expect(isinstance(dest, FutRef), label)
    _expect(config.futures.get(dest.name, None) is UNRESOLVED, label)
    futures = dict(config.futures)
    futures[dest.name] = v
    return config.with_object(ob.update(active=None)).update(futures=futures)


def _resolve_destiny(config, ob):
    """Shared tail of the sync-return rules: resolve the callee's future."""
    proc = ob.active
    v = abs_evaluate(proc.stmts[0].expr, ob.fields, proc.locals)
    dest = proc.locals["destiny"]
    futures = dict(config.futures)
    futures[dest.name] = v
    return futures


def _apply_self_sync_return(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AReturn), label)
    cont = ob.active.locals.get("cont")
    _expect(isinstance(cont, FutRef), label)
    pos = label.extra[1]
    _expect(pos < len(ob.queue), label)
    proc = ob.queue[pos]
    _expect(proc.locals.get("destiny") == cont, label)
    futures = _resolve_destiny(config, ob)
    queue = ob.queue[:pos] + ob.queue[pos + 1 :]
    return config.with_object(ob.update(active=proc, queue=queue)).update(
        futures=futures
    )


def _apply_cog_sync_return(config, label):
    ob = _ob(config, label)
    head = ob.active.stmts[0]
    _expect(isinstance(head, AReturn), label)
    cont = ob.active.locals.get("cont")
    _expect(isinstance(cont, FutRef), label)
    other_ident, pos = label.extra[1], label.extra[2]
    other = config.objects.get(ObjRef(other_ident, label.activity))
    _expect(other is not None and other.active is None, label)
    _expect(pos < len(other.queue), label)
    proc = other.queue[pos]
    _expect(proc.locals.get("destiny") == cont, label)
    _expect(config.cogs.get(label.activity) == ob.name, label)
    futures = _resolve_destiny(config, ob)
    queue = other.queue[:pos] + other.queue[pos + 1 :]
    cogs = dict(config.cogs)
    cogs[label.activity] = other.name
    cfg = config.with_object(ob.update(active=None))
    cfg = cfg.with_object(other.update(active=proc, queue=queue))
    return cfg.update(futures=futures, cogs=cogs)


_RULES = {
    "Skip": _apply_skip,
    "Cond-True": _apply_cond,
    "Cond-False": _apply_cond,
    "Assign-Local": _apply_assign_local,
    "Assign-Field": _apply_assign_field,
    "Await-True": _apply_await_true,
    "Await-False": _apply_await_false,
    "Suspend": _apply_suspend,
    "Release-Cog": _apply_release_cog,
    "Activate": _apply_activate,
    "Read-Fut": _apply_read_fut,
    "New-Object": _apply_new_object,
    "New-Cog-Object": _apply_new_cog_object,
    "Rendez-vous-Comm": _apply_rendez_vous,
    "Cog-Sync-Call": _apply_cog_sync_call,
    "Self-Sync-Call": _apply_self_sync_call,
    "Rem-Sync-Call": _apply_rem_sync_call,
    "Return": _apply_return,
    "Self-Sync-Return-Sched": _apply_self_sync_return,
    "Cog-Sync-Return-Sched": _apply_cog_sync_return,
}
