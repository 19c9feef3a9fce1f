"""Initial configurations and deterministic runs of the multi-active engine."""

from __future__ import annotations

import random

from ..canon import digest_of, masp_digest
from ..lang.ast_expr import Var
from ..lang.ast_masp import MaspProgram, MReturn
from ..lang.pretty import pretty_masp
from ..policy import DEFAULT_POLICY, cog_policy
from ..trace import StepRecord, Trace
from ..values import ActRef, Loc, MethodVal
from .runtime import (
    Activity,
    FutBinder,
    Frame,
    MHole,
    MaspConfig,
    Obj,
    Request,
    Thread,
    flatten_body,
)
from ..steplabel import Label
from .steps import apply_step, enabled_steps, stuck_threads

MAIN_FUTURE = "f0"
MAIN_ACTIVITY = "a0"
MAIN_OBJECT_ID = 0


def initial_config(program: MaspProgram) -> MaspConfig:
    """One activity serving one request whose body is the main block.

    Programs carrying a COG class (translator output) get the serving
    shape of a cog: the main block runs as an execute request on a main
    object registered under id 0, so the stack mirrors an execute call.
    """
    locals_ = {x: None for x in program.main_locals}
    body = flatten_body(program.main_body)
    if program.cls("COG") is not None:
        cog_loc, main_loc = Loc(1), Loc(2)
        main_obj = Obj(None, {"cog": ActRef(MAIN_ACTIVITY), "myId": MAIN_OBJECT_ID})
        store = {cog_loc: Obj("COG", {}), main_loc: main_obj}
        top = Frame({**locals_, "this": main_loc}, body)
        below = Frame(
            {
                "this": cog_loc,
                "id": MAIN_OBJECT_ID,
                "m": MethodVal("main"),
                "args": (),
                "w": main_loc,
                "x": None,
            },
            (MHole("x"), MReturn(Var("x"))),
        )
        request = Request(MAIN_FUTURE, "execute", (MAIN_OBJECT_ID, MethodVal("main")))
        act = Activity(
            name=MAIN_ACTIVITY,
            cls="COG",
            active_loc=cog_loc,
            store=store,
            current={MAIN_FUTURE: Thread(request, "A", (top, below))},
            queue=(),
            policy=cog_policy(),
            loc_counter=2,
            registry={MAIN_OBJECT_ID: main_loc},
        )
        method = "execute"
    else:
        main_loc = Loc(1)
        store = {main_loc: Obj(None, {})}
        top = Frame({**locals_, "this": main_loc}, body)
        request = Request(MAIN_FUTURE, "main", ())
        act = Activity(
            name=MAIN_ACTIVITY,
            cls=None,
            active_loc=main_loc,
            store=store,
            current={MAIN_FUTURE: Thread(request, "A", (top,))},
            queue=(),
            policy=DEFAULT_POLICY,
            loc_counter=1,
        )
        method = "main"
    futures = {MAIN_FUTURE: FutBinder(method=method)}
    return MaspConfig(
        program=program,
        activities={MAIN_ACTIVITY: act},
        futures=futures,
        act_counter=1,
        fut_counter=1,
    )


def _label_record(config, label, index) -> StepRecord:
    method = None
    act = config.activities.get(label.activity)
    if act is not None and label.future is not None:
        if label.future in act.current:
            method = act.current[label.future].request.method
        else:
            for q in act.queue:
                if q.future == label.future:
                    method = q.method
                    break
        if method is None:
            binder = config.futures.get(label.future)
            method = binder.method if binder else None
    detail = {
        "rule": label.rule,
        "activity": label.activity,
        "future": label.future,
        "extra": list(label.extra),
    }
    return StepRecord(index, label.rule, label.activity, label.future, method, detail, "")


def label_from_detail(detail: dict) -> Label:
    return Label(
        detail["rule"],
        detail["activity"],
        detail.get("future"),
        tuple(detail.get("extra", ())),
    )


def unresolved_futures(config: MaspConfig) -> list:
    return [f for f, b in config.futures.items() if not b.resolved]


def run(
    config: MaspConfig,
    strategy: str = "fifo-eager",
    budget: int = 10000,
    seed: int = 0,
    digests: bool = True,
):
    """Drive one deterministic execution; returns (config, trace).

    Future updates are applied eagerly before every scheduler pick; the
    fifo-eager strategy serves the oldest admissible request first, then
    activations, then thread steps in a rotating order (so busy-waiting
    condition threads get requeued behind everything else runnable).
    """
    trace = Trace(
        program_digest=digest_of(pretty_masp(config.program)),
        strategy=strategy,
        seed=seed,
    )
    rng = random.Random(seed)
    rotation = 0
    steps = 0
    while steps < budget:
        labels = enabled_steps(config, mode="run")
        if not labels:
            break
        updates = [l for l in labels if l.rule == "Update"]
        if updates:
            chosen = updates[0]
        else:
            serves = [l for l in labels if l.rule == "Serve"]
            activates = [l for l in labels if l.rule == "Activate-Thread"]
            others = [
                l for l in labels if l.rule not in ("Serve", "Activate-Thread")
            ]
            if strategy == "random":
                pool = serves + activates + others
                chosen = pool[rng.randrange(len(pool))]
            elif serves:
                chosen = serves[0]
            elif activates:
                chosen = activates[0]
            else:
                chosen = others[rotation % len(others)]
                rotation += 1
        record = _label_record(config, chosen, steps)
        config = apply_step(config, chosen)
        if digests:
            record.config_digest = masp_digest(config)
        trace.records.append(record)
        steps += 1
    unresolved = unresolved_futures(config)
    terminal = not enabled_steps(config, mode="run")
    stuck = stuck_threads(config)
    trace.terminal = {
        "steps": steps,
        "terminal": terminal,
        "budget_exhausted": steps >= budget and not terminal,
        "unresolved_futures": sorted(unresolved),
        "stuck_threads": [list(s) for s in stuck],
        "request_never_ends": terminal and bool(unresolved),
        "final_digest": masp_digest(config),
    }
    return config, trace


def replay(program: MaspProgram, trace: Trace):
    """Re-apply a trace's recorded labels; returns the final configuration."""
    config = initial_config(program)
    for record in trace.records:
        config = apply_step(config, label_from_detail(record.detail))
    return config
