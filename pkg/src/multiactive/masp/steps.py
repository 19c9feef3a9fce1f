"""Reduction rules of the multi-active engine.

`enabled_steps` enumerates every applicable rule instance; `apply_step`
applies one. Each rule rewrites only the activities and futures it
mentions, leaving the rest of the configuration shared.
"""

from __future__ import annotations

from typing import Optional

from ..lang.ast_expr import RuntimeVal
from ..steplabel import Label
from ..lang.ast_masp import (
    MAssign,
    MIf,
    MInvoke,
    MNew,
    MNewActive,
    MReturn,
    MSetLimit,
    MSkip,
    mseq_list,
)
from ..policy import (
    activate_admissible,
    priority_filter,
    serve_admissible,
)
from ..values import (
    UNDEFINED,
    ActRef,
    EngineFault,
    FutRef,
    Loc,
    MethodVal,
    is_primitive,
)
from .evalfn import (
    chase,
    evaluate,
    evaluate_list,
    ground,
    rename_disjoint,
    serialise,
    serialise_all,
)
from .runtime import (
    Activity,
    FutBinder,
    Frame,
    MHole,
    MaspConfig,
    NATIVE_ARITY,
    Obj,
    Request,
    Thread,
    bind,
    bindable,
    class_policy,
    is_native,
)


def _grounder(store):
    return lambda v: ground(v, store)


def native_ready(activity, method: str, args: tuple) -> bool:
    """Natives need their identifier arguments grounded before they bind."""
    g = _grounder(activity.store)
    from ..policy import UNGROUND

    if method == "register":
        return len(args) == 2 and g(args[1]) is not UNGROUND
    if method == "retrieve":
        return len(args) == 1 and g(args[0]) is not UNGROUND
    return len(args) == NATIVE_ARITY.get(method, -1)


def _native_effects(activity, method: str, args: tuple):
    """Result value and activity updates of a native method, at bind time."""
    store = activity.store
    if method == "freshId":
        ident = activity.id_counter
        return ident, {"id_counter": ident + 1}
    if method == "register":
        ident = ground(args[1], store)
        target = args[0]
        if isinstance(target, Loc):
            target = chase(target, store)
        registry = dict(activity.registry)
        registry[ident] = target
        return ident, {"registry": registry}
    if method == "retrieve":
        ident = ground(args[0], store)
        if ident not in activity.registry:
            return None, None  # retrieve miss: permanently stuck thread
        return activity.registry[ident], {}
    raise EngineFault(f"unknown native {method}")


def _native_bind(activity, o: Loc, method: str, args: tuple):
    """Native frame: the computed result behind a plain return statement."""
    value, updates = _native_effects(activity, method, args)
    if updates is None:
        return None, None
    frame = Frame({"this": o}, (MReturn(RuntimeVal(value)),))
    return frame, updates


# -- enumeration --------------------------------------------------------------


def enabled_steps(config: MaspConfig, mode: str = "explore") -> list:
    """All applicable rule instances, in a deterministic order.

    In ``run`` mode, thread activations are offered only when the thread
    can make progress (its blocking future was updated locally).
    """
    labels = []
    for name, act in config.activities.items():
        g = _grounder(act.store)
        sched = []
        for idx, q in enumerate(act.queue):
            if not _serve_possible(config, act, q):
                continue
            if serve_admissible(act, idx, g):
                sched.append(
                    (act.policy.group_of(q.method), Label("Serve", name, q.future, (idx,)))
                )
        for fut, thread in act.current.items():
            if thread.state == "P" and activate_admissible(act, fut):
                if mode == "run" and not _progresses(config, act, thread):
                    continue
                sched.append(
                    (
                        act.policy.group_of(thread.request.method),
                        Label("Activate-Thread", name, fut),
                    )
                )
        labels.extend(priority_filter(act.policy, sched))
        for fut, thread in act.current.items():
            if thread.state != "A":
                continue
            lab = _thread_label(config, act, fut, thread)
            if lab is not None:
                labels.append(lab)
        for loc in sorted(act.store, key=lambda l: l.index):
            storable = act.store[loc]
            if isinstance(storable, FutRef):
                binder = config.futures.get(storable.name)
                if binder is not None and binder.resolved:
                    labels.append(Label("Update", name, storable.name, (loc.index,)))
    return labels


def _serve_possible(config, act, q) -> bool:
    if is_native(act.cls, q.method):
        if not native_ready(act, q.method, q.args):
            return False
        if q.method == "retrieve" and ground(q.args[0], act.store) not in act.registry:
            return False
        return True
    return bindable(config.program, act.cls, q.method, q.args)


def _progresses(config, act, thread) -> bool:
    """Would this passive thread do anything useful once activated?"""
    probe = Thread(thread.request, "A", thread.stack)
    lab = _thread_label(config, act, thread.request.future, probe)
    return lab is not None and lab.rule != "Invk-Future"


def _invoke_args(act, frame, inv):
    args = evaluate_list(inv.args, act.store, frame.locals)
    if args is None:
        return None
    if inv.vararg is not None:
        rest = frame.locals.get(inv.vararg)
        if not isinstance(rest, tuple):
            return None
        args = args + rest
    return args


def _invoke_method(frame, inv):
    if inv.method is not None:
        return inv.method
    mv = frame.locals.get(inv.method_var)
    if isinstance(mv, MethodVal):
        return mv.name
    return None


def _thread_label(config, act, fut, thread) -> Optional[Label]:
    """The single rule instance (if any) enabled for an active thread."""
    frame = thread.stack[0]
    head = frame.stmts[0]
    name = act.name
    if isinstance(head, MSkip):
        return Label("Skip", name, fut)
    if isinstance(head, MSetLimit):
        rule = "Set-Hard-Limit" if head.kind == "H" else "Set-Soft-Limit"
        return Label(rule, name, fut)
    if isinstance(head, MReturn):
        v = evaluate(head.expr, act.store, frame.locals)
        if v is UNDEFINED:
            return None
        return Label("Return-Local" if len(thread.stack) > 1 else "Return", name, fut)
    if isinstance(head, MIf):
        v = evaluate(head.cond, act.store, frame.locals)
        if v is True:
            return Label("Cond-True", name, fut)
        if v is False:
            return Label("Cond-False", name, fut)
        return None
    if isinstance(head, MHole):
        raise EngineFault("hole marker on top of stack")
    if isinstance(head, MAssign):
        rhs = head.rhs
        if isinstance(rhs, (MNew, MNewActive)):
            cls = config.program.cls(rhs.cls)
            if cls is None or len(rhs.args) != len(cls.fields):
                return None
            if evaluate_list(rhs.args, act.store, frame.locals) is None:
                return None
            rule = "New-Object" if isinstance(rhs, MNew) else "New-Active"
            return Label(rule, name, fut)
        if isinstance(rhs, MInvoke):
            return _invoke_label(config, act, fut, thread, frame, rhs)
        v = evaluate(rhs, act.store, frame.locals)
        if v is UNDEFINED:
            return None
        if head.target in frame.locals:
            return Label("Assign-Local", name, fut)
        this_obj = act.store.get(frame.locals.get("this"))
        if isinstance(this_obj, Obj) and head.target in this_obj.fields:
            return Label("Assign-Field", name, fut)
        return None
    raise EngineFault(f"unknown statement {head!r}")


def _invoke_label(config, act, fut, thread, frame, inv) -> Optional[Label]:
    method = _invoke_method(frame, inv)
    if method is None:
        return None
    target = evaluate(inv.target, act.store, frame.locals)
    if target is UNDEFINED:
        return None
    name = act.name
    if isinstance(target, ActRef):
        if _invoke_args(act, frame, inv) is None:
            return None
        rule = "Invk-Active-Self" if target.name == name else "Invk-Active"
        return Label(rule, name, fut)
    if isinstance(target, Loc):
        storable = act.store.get(target)
        if isinstance(storable, FutRef):
            if act.limit == "S":
                return Label("Invk-Future", name, fut)
            return None  # hard limit: wait-by-necessity blocks the thread
        if isinstance(storable, Obj):
            if _invoke_args(act, frame, inv) is None:
                return None
            args = _invoke_args(act, frame, inv)
            if is_native(storable.cls, method):
                if not native_ready(act, method, args):
                    return None
                if method == "retrieve" and ground(args[0], act.store) not in act.registry:
                    return None  # retrieve miss: stuck, Invariant Reg violated
                return Label("Invk-Passive", name, fut)
            if storable.cls is None and method in ("cog", "myId", "get") and not args:
                return Label("Invk-Passive", name, fut)
            if not bindable(config.program, storable.cls, method, args):
                return None
            return Label("Invk-Passive", name, fut)
        return None
    if is_primitive(target) and method == "get":
        return Label("Invk-Passive", name, fut)
    return None


# -- application ---------------------------------------------------------------


def apply_step(config: MaspConfig, label: Label) -> MaspConfig:
    handler = _RULES.get(label.rule)
    if handler is None:
        raise EngineFault(f"unknown rule {label.rule}")
    return handler(config, label)


def _activity(config, label) -> Activity:
    act = config.activities.get(label.activity)
    if act is None:
        raise EngineFault(f"no activity {label.activity}")
    return act


def _thread(act, label) -> Thread:
    th = act.current.get(label.future)
    if th is None:
        raise EngineFault(f"no thread {label.future} in {act.name}")
    return th


def _expect(cond, label):
    if not cond:
        raise EngineFault(f"step not enabled: {label.key()}")


def _set_thread(act, thread) -> Activity:
    cur = dict(act.current)
    cur[thread.request.future] = thread
    return act.update(current=cur)


def _pop_head(thread) -> Thread:
    frame = thread.stack[0]
    new_frame = frame.with_stmts(frame.stmts[1:])
    return Thread(thread.request, thread.state, (new_frame,) + thread.stack[1:])


def _replace_head(thread, *stmts) -> Thread:
    frame = thread.stack[0]
    new_frame = frame.with_stmts(tuple(stmts) + frame.stmts[1:])
    return Thread(thread.request, thread.state, (new_frame,) + thread.stack[1:])


def _apply_serve(config, label):
    act = _activity(config, label)
    (idx,) = label.extra
    _expect(idx < len(act.queue), label)
    q = act.queue[idx]
    _expect(q.future == label.future, label)
    _expect(_serve_possible(config, act, q), label)
    _expect(serve_admissible(act, idx, _grounder(act.store)), label)
    updates = {}
    if is_native(act.cls, q.method):
        frame, updates = _native_bind(act, act.active_loc, q.method, q.args)
        _expect(frame is not None, label)
    else:
        frame = bind(config.program, act.active_loc, act.cls, q.method, q.args)
        _expect(frame is not None, label)
    thread = Thread(q, "A", (frame,))
    cur = dict(act.current)
    cur[q.future] = thread
    act2 = act.update(
        current=cur, queue=act.queue[:idx] + act.queue[idx + 1 :], **updates
    )
    return config.with_activity(act2)


def _apply_skip(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    _expect(isinstance(th.stack[0].stmts[0], MSkip), label)
    return config.with_activity(_set_thread(act, _pop_head(th)))


def _apply_set_limit(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    head = th.stack[0].stmts[0]
    _expect(isinstance(head, MSetLimit), label)
    kind = "H" if label.rule == "Set-Hard-Limit" else "S"
    _expect(head.kind == kind, label)
    act2 = _set_thread(act, _pop_head(th)).update(limit=kind)
    return config.with_activity(act2)


def _apply_cond(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    frame = th.stack[0]
    head = frame.stmts[0]
    _expect(isinstance(head, MIf), label)
    v = evaluate(head.cond, act.store, frame.locals)
    want = label.rule == "Cond-True"
    _expect(v is want, label)
    branch = head.then if want else head.els
    stmts = tuple(mseq_list(branch)) + frame.stmts[1:]
    th2 = Thread(th.request, th.state, (frame.with_stmts(stmts),) + th.stack[1:])
    return config.with_activity(_set_thread(act, th2))


def _apply_assign_local(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    frame = th.stack[0]
    head = frame.stmts[0]
    _expect(isinstance(head, MAssign) and head.target in frame.locals, label)
    v = evaluate(head.rhs, act.store, frame.locals)
    _expect(v is not UNDEFINED, label)
    new_frame = Frame({**frame.locals, head.target: v}, frame.stmts[1:])
    th2 = Thread(th.request, th.state, (new_frame,) + th.stack[1:])
    return config.with_activity(_set_thread(act, th2))


def _apply_assign_field(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    frame = th.stack[0]
    head = frame.stmts[0]
    _expect(isinstance(head, MAssign) and head.target not in frame.locals, label)
    this_loc = frame.locals.get("this")
    obj = act.store.get(this_loc)
    _expect(isinstance(obj, Obj) and head.target in obj.fields, label)
    v = evaluate(head.rhs, act.store, frame.locals)
    _expect(v is not UNDEFINED, label)
    store = dict(act.store)
    store[this_loc] = obj.with_field(head.target, v)
    act2 = _set_thread(act.update(store=store), _pop_head(th))
    return config.with_activity(act2)


def _apply_new_object(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    frame = th.stack[0]
    head = frame.stmts[0]
    _expect(isinstance(head, MAssign) and isinstance(head.rhs, MNew), label)
    cls = config.program.cls(head.rhs.cls)
    _expect(cls is not None, label)
    args = evaluate_list(head.rhs.args, act.store, frame.locals)
    _expect(args is not None and len(args) == len(cls.fields), label)
    loc = Loc(act.loc_counter + 1)
    store = dict(act.store)
    store[loc] = Obj(cls.name, dict(zip(cls.fields, args)))
    th2 = _replace_head(th, MAssign(head.target, RuntimeVal(loc)))
    act2 = _set_thread(
        act.update(store=store, loc_counter=act.loc_counter + 1), th2
    )
    return config.with_activity(act2)


def _apply_new_active(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    frame = th.stack[0]
    head = frame.stmts[0]
    _expect(isinstance(head, MAssign) and isinstance(head.rhs, MNewActive), label)
    cls = config.program.cls(head.rhs.cls)
    _expect(cls is not None, label)
    args = evaluate_list(head.rhs.args, act.store, frame.locals)
    _expect(args is not None and len(args) == len(cls.fields), label)
    beta = f"a{config.act_counter}"
    piece = serialise_all(args, act.store)
    args_r, piece_r, counter = rename_disjoint({}, args, piece, counter=0)
    active_loc = Loc(counter + 1)
    new_store = dict(piece_r)
    new_store[active_loc] = Obj(cls.name, dict(zip(cls.fields, args_r)))
    policy = class_policy(cls)
    new_act = Activity(
        name=beta,
        cls=cls.name,
        active_loc=active_loc,
        store=new_store,
        current={},
        queue=(),
        limit="H" if policy.policy.hard_limit_default else "S",
        policy=policy,
        loc_counter=counter + 1,
        id_counter=1,
        registry={},
    )
    th2 = _replace_head(th, MAssign(head.target, RuntimeVal(ActRef(beta))))
    acts = dict(config.activities)
    acts[act.name] = _set_thread(act, th2)
    acts[beta] = new_act
    return config.update(activities=acts, act_counter=config.act_counter + 1)


def _invoke_parts(config, act, th, label):
    frame = th.stack[0]
    head = frame.stmts[0]
    _expect(isinstance(head, MAssign) and isinstance(head.rhs, MInvoke), label)
    inv = head.rhs
    method = _invoke_method(frame, inv)
    _expect(method is not None, label)
    target = evaluate(inv.target, act.store, frame.locals)
    _expect(target is not UNDEFINED, label)
    return frame, head, inv, method, target


def _apply_invk_active(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    frame, head, inv, method, target = _invoke_parts(config, act, th, label)
    _expect(isinstance(target, ActRef) and target.name != act.name, label)
    callee = config.activities.get(target.name)
    _expect(callee is not None, label)
    args = _invoke_args(act, frame, inv)
    _expect(args is not None, label)
    fut = f"f{config.fut_counter}"
    o_fut = Loc(act.loc_counter + 1)
    store = dict(act.store)
    store[o_fut] = FutRef(fut)
    piece = serialise_all(args, act.store)
    args_r, piece_r, counter = rename_disjoint(
        callee.store, args, piece, counter=callee.loc_counter
    )
    callee_store = dict(callee.store)
    callee_store.update(piece_r)
    callee2 = callee.update(
        store=callee_store,
        queue=callee.queue + (Request(fut, method, args_r),),
        loc_counter=counter,
    )
    th2 = _replace_head(th, MAssign(head.target, RuntimeVal(o_fut)))
    caller2 = _set_thread(
        act.update(store=store, loc_counter=act.loc_counter + 1), th2
    )
    acts = dict(config.activities)
    acts[act.name] = caller2
    acts[callee2.name] = callee2
    futures = dict(config.futures)
    futures[fut] = FutBinder(method=method)
    return config.update(
        activities=acts, futures=futures, fut_counter=config.fut_counter + 1
    )


def _apply_invk_active_self(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    frame, head, inv, method, target = _invoke_parts(config, act, th, label)
    _expect(isinstance(target, ActRef) and target.name == act.name, label)
    args = _invoke_args(act, frame, inv)
    _expect(args is not None, label)
    fut = f"f{config.fut_counter}"
    o_fut = Loc(act.loc_counter + 1)
    piece = serialise_all(args, act.store)
    args_r, piece_r, counter = rename_disjoint(
        act.store, args, piece, counter=act.loc_counter + 1
    )
    store = dict(act.store)
    store[o_fut] = FutRef(fut)
    store.update(piece_r)
    th2 = _replace_head(th, MAssign(head.target, RuntimeVal(o_fut)))
    act2 = _set_thread(
        act.update(
            store=store,
            loc_counter=counter,
            queue=act.queue + (Request(fut, method, args_r),),
        ),
        th2,
    )
    futures = dict(config.futures)
    futures[fut] = FutBinder(method=method)
    return config.with_activity(act2).update(
        futures=futures, fut_counter=config.fut_counter + 1
    )


def _apply_invk_passive(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    frame, head, inv, method, target = _invoke_parts(config, act, th, label)
    updates = {}
    if isinstance(target, Loc):
        storable = act.store.get(target)
        _expect(isinstance(storable, Obj), label)
        args = _invoke_args(act, frame, inv)
        _expect(args is not None, label)
        if is_native(storable.cls, method):
            new_frame, updates = _native_bind(act, target, method, args)
            _expect(new_frame is not None, label)
        elif storable.cls is None and method in ("cog", "myId", "get") and not args:
            # the classless main object still answers the addressing methods
            value = None if method == "get" else storable.fields.get(method)
            new_frame = Frame({"this": target}, (MReturn(RuntimeVal(value)),))
        else:
            new_frame = bind(config.program, target, storable.cls, method, args)
            _expect(new_frame is not None, label)
    else:
        _expect(is_primitive(target) and method == "get", label)
        new_frame = Frame({"this": target}, (MReturn(RuntimeVal(None)),))
    interrupted = frame.with_stmts((MHole(head.target),) + frame.stmts[1:])
    th2 = Thread(th.request, th.state, (new_frame, interrupted) + th.stack[1:])
    act2 = _set_thread(act.update(**updates) if updates else act, th2)
    return config.with_activity(act2)


def _apply_invk_future(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    frame, head, inv, method, target = _invoke_parts(config, act, th, label)
    _expect(isinstance(target, Loc), label)
    _expect(isinstance(act.store.get(target), FutRef), label)
    _expect(act.limit == "S" and th.state == "A", label)
    th2 = Thread(th.request, "P", th.stack)
    return config.with_activity(_set_thread(act, th2))


def _apply_return_local(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    _expect(len(th.stack) > 1, label)
    frame = th.stack[0]
    head = frame.stmts[0]
    _expect(isinstance(head, MReturn), label)
    v = evaluate(head.expr, act.store, frame.locals)
    _expect(v is not UNDEFINED, label)
    below = th.stack[1]
    hole = below.stmts[0]
    _expect(isinstance(hole, MHole), label)
    below2 = below.with_stmts(
        (MAssign(hole.target, RuntimeVal(v)),) + below.stmts[1:]
    )
    th2 = Thread(th.request, th.state, (below2,) + th.stack[2:])
    return config.with_activity(_set_thread(act, th2))


def _apply_return(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    _expect(len(th.stack) == 1, label)
    frame = th.stack[0]
    head = frame.stmts[0]
    _expect(isinstance(head, MReturn), label)
    v = evaluate(head.expr, act.store, frame.locals)
    _expect(v is not UNDEFINED, label)
    fut = th.request.future
    binder = config.futures.get(fut)
    _expect(binder is not None and not binder.resolved, label)
    piece = serialise(v, act.store)
    futures = dict(config.futures)
    futures[fut] = FutBinder(value=v, piece=piece, method=binder.method)
    cur = dict(act.current)
    del cur[fut]
    act2 = act.update(current=cur)
    return config.with_activity(act2).update(futures=futures)


def _apply_update(config, label):
    act = _activity(config, label)
    (loc_index,) = label.extra
    loc = Loc(loc_index)
    storable = act.store.get(loc)
    _expect(isinstance(storable, FutRef), label)
    binder = config.futures.get(storable.name)
    _expect(binder is not None and binder.resolved, label)
    (v_r,), piece_r, counter = rename_disjoint(
        act.store, (binder.value,), binder.piece, counter=act.loc_counter
    )
    store = dict(act.store)
    store[loc] = v_r
    store.update(piece_r)
    act2 = act.update(store=store, loc_counter=counter)
    return config.with_activity(act2)


def _apply_activate(config, label):
    act = _activity(config, label)
    th = _thread(act, label)
    _expect(th.state == "P", label)
    _expect(activate_admissible(act, label.future), label)
    th2 = Thread(th.request, "A", th.stack)
    return config.with_activity(_set_thread(act, th2))


_RULES = {
    "Serve": _apply_serve,
    "Skip": _apply_skip,
    "Set-Hard-Limit": _apply_set_limit,
    "Set-Soft-Limit": _apply_set_limit,
    "Cond-True": _apply_cond,
    "Cond-False": _apply_cond,
    "Assign-Local": _apply_assign_local,
    "Assign-Field": _apply_assign_field,
    "New-Object": _apply_new_object,
    "New-Active": _apply_new_active,
    "Invk-Active": _apply_invk_active,
    "Invk-Active-Self": _apply_invk_active_self,
    "Invk-Passive": _apply_invk_passive,
    "Invk-Future": _apply_invk_future,
    "Return-Local": _apply_return_local,
    "Return": _apply_return,
    "Update": _apply_update,
    "Activate-Thread": _apply_activate,
}


def stuck_threads(config: MaspConfig) -> list:
    """Threads with no enabled step, with a coarse reason classification."""
    out = []
    for name, act in config.activities.items():
        for fut, thread in act.current.items():
            if thread.state == "P":
                continue
            if _thread_label(config, act, fut, thread) is None:
                out.append((name, fut, _stuck_reason(config, act, thread)))
    return out


def _stuck_reason(config, act, thread) -> str:
    frame = thread.stack[0]
    head = frame.stmts[0]
    if isinstance(head, MAssign) and isinstance(head.rhs, MInvoke):
        inv = head.rhs
        try:
            target = evaluate(inv.target, act.store, frame.locals)
        except EngineFault:
            return "engine-fault"
        if isinstance(target, Loc):
            storable = act.store.get(target)
            if isinstance(storable, FutRef):
                return "wait-by-necessity"
            if isinstance(storable, Obj):
                method = _invoke_method(frame, inv)
                if is_native(storable.cls, method):
                    args = _invoke_args(act, frame, inv)
                    if args is not None and not native_ready(act, method, args):
                        return "wait-by-necessity"
                    return "retrieve-miss"
                return "method-missing"
        return "method-missing"
    return "undefined-expression"
