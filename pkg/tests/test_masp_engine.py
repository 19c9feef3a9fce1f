"""The multi-active engine: evaluation, auxiliaries, reduction rules, runs."""

import random

import pytest

from multiactive.lang import parse_masp
from multiactive.lang.ast_expr import Binop, Lit, Var
from multiactive.masp.engine import initial_config, replay, run
from multiactive.masp.evalfn import evaluate, rename_disjoint, serialise
from multiactive.masp.runtime import Obj, bind
from multiactive.masp.steps import apply_step, enabled_steps, stuck_threads
from multiactive.values import (
    UNDEFINED,
    ActRef,
    EngineFault,
    FutRef,
    Loc,
)

from conftest import load_masp


def test_evaluate_arithmetic():
    assert evaluate(Binop("+", Lit(1), Lit(2)), {}, {}) == 3


def test_evaluate_chases_locations():
    store = {Loc(1): Loc(2), Loc(2): 5}
    assert evaluate(Var("x"), store, {"x": Loc(1)}) == 5


def test_evaluate_stops_at_future_location():
    store = {Loc(1): FutRef("f1")}
    assert evaluate(Var("x"), store, {"x": Loc(1)}) == Loc(1)


def test_evaluate_stops_at_object_location():
    store = {Loc(1): Obj("C", {"a": 1})}
    assert evaluate(Var("x"), store, {"x": Loc(1)}) == Loc(1)


def test_future_arithmetic_is_undefined():
    store = {Loc(1): FutRef("f1")}
    assert evaluate(Binop("+", Var("x"), Lit(1)), store, {"x": Loc(1)}) is UNDEFINED


def test_unbound_variable_is_engine_fault():
    with pytest.raises(EngineFault):
        evaluate(Var("nope"), {}, {"this": Loc(1)})


def test_field_read_through_this():
    store = {Loc(1): Obj("C", {"n": 41})}
    assert evaluate(Binop("+", Var("n"), Lit(1)), store, {"this": Loc(1)}) == 42


def test_bind_shapes():
    p = parse_masp(
        "class C(){ method z() { return null } method m(a, b) { vars c; return a } } { }"
    )
    frame = bind(p, Loc(1), "C", "z", ())
    assert frame.locals == {"this": Loc(1)}
    frame2 = bind(p, Loc(1), "C", "m", (1, 2))
    assert frame2.locals == {"this": Loc(1), "a": 1, "b": 2, "c": None}
    assert bind(p, Loc(1), "C", "missing", ()) is None
    assert bind(p, Loc(1), "C", "m", (1,)) is None  # arity mismatch


def test_serialise_primitive_is_empty():
    assert serialise(5, {}) == {}
    assert serialise(None, {}) == {}
    assert serialise(ActRef("a1"), {}) == {}
    assert serialise(FutRef("f1"), {}) == {}


def test_serialise_transitive():
    store = {Loc(1): Obj("C", {"x": Loc(2)}), Loc(2): 3}
    piece = serialise(Loc(1), store)
    assert piece == {Loc(1): store[Loc(1)], Loc(2): 3}


def test_serialise_cyclic_terminates():
    store = {Loc(1): Obj("C", {"x": Loc(1)})}
    piece = serialise(Loc(1), store)
    assert piece == store
    # independent fixpoint oracle: iterate mark-and-copy until stable
    marked = set()
    work = [Loc(1)]
    while work:
        l = work.pop()
        if l in marked or not isinstance(l, Loc):
            continue
        marked.add(l)
        s = store[l]
        if isinstance(s, Obj):
            work.extend(s.fields.values())
        else:
            work.append(s)
    assert marked == set(piece)


def test_rename_disjoint_empty_piece():
    values, piece, _ = rename_disjoint({Loc(1): 1}, (5, None), {})
    assert values == (5, None)
    assert piece == {}


def test_rename_disjoint_consistent():
    base = {Loc(1): 0}
    piece = {Loc(1): Obj("C", {"x": Loc(2)}), Loc(2): 3}
    (v,), piece2, counter = rename_disjoint(base, (Loc(1),), piece)
    assert v != Loc(1) and v in piece2
    assert set(piece2).isdisjoint(base)
    assert piece2[v].fields["x"] in piece2
    # futures and activity names untouched
    (w,), piece3, _ = rename_disjoint(base, (FutRef("f0"),), {})
    assert w == FutRef("f0")


def test_empty_main_runs_to_completion():
    cfg = initial_config(parse_masp("{ }"))
    labels = enabled_steps(cfg)
    assert [l.rule for l in labels] == ["Skip"]
    final, trace = run(cfg)
    assert trace.terminal["terminal"]
    assert trace.terminal["unresolved_futures"] == []


def test_initial_config_digest_deterministic():
    from multiactive.canon import masp_digest

    p = parse_masp("class C(a){ } { vars x; x = newActive C(3) }")
    assert masp_digest(initial_config(p)) == masp_digest(initial_config(p))


def test_invk_future_only_under_soft_limit():
    src = """
class Srv() {
  policy { group g selfcompatible; }
  method slow() group g { vars r; r = 1; return r }
}
{
  vars s, f, w;
  s = newActive Srv();
  f = s.slow();
  %s;
  w = f.get()
}
"""
    soft = parse_masp(src % "setLimitSoft")
    cfg = initial_config(soft)
    # drive up to the blocked get
    for rule in ("New-Active", "Assign-Local", "Invk-Active", "Assign-Local", "Set-Soft-Limit"):
        lab = [l for l in enabled_steps(cfg) if l.rule == rule and l.activity == "a0"][0]
        cfg = apply_step(cfg, lab)
    labels = [l for l in enabled_steps(cfg) if l.activity == "a0"]
    assert any(l.rule == "Invk-Future" for l in labels)

    hard = parse_masp(src % "setLimitHard")
    cfg = initial_config(hard)
    for rule in ("New-Active", "Assign-Local", "Invk-Active", "Assign-Local", "Set-Hard-Limit"):
        lab = [l for l in enabled_steps(cfg) if l.rule == rule and l.activity == "a0"][0]
        cfg = apply_step(cfg, lab)
    labels = [l for l in enabled_steps(cfg) if l.activity == "a0"]
    assert not labels  # the main thread is blocked, nothing enabled locally


def test_serve_moves_request_and_binds():
    p = parse_masp(
        """
class Srv() {
  policy { group g selfcompatible; }
  method m(k) group g { return k }
}
{ vars s, f; s = newActive Srv(); f = s.m(9) }
"""
    )
    cfg = initial_config(p)
    while True:
        serve = [l for l in enabled_steps(cfg) if l.rule == "Serve"]
        if serve:
            break
        cfg = apply_step(cfg, enabled_steps(cfg)[0])
    before = cfg.activities["a1"]
    assert len(before.queue) == 1
    cfg = apply_step(cfg, serve[0])
    after = cfg.activities["a1"]
    assert after.queue == ()
    thread = after.current[serve[0].future]
    assert thread.state == "A"
    assert thread.stack[0].locals["k"] == 9


def test_invk_active_creates_future_and_copies_args():
    p = parse_masp(
        """
class Srv() {
  policy { group g selfcompatible; }
  method m(o) group g { return o }
}
class Box(v) { }
{ vars s, b, f; s = newActive Srv(); b = new Box(7); f = s.m(b) }
"""
    )
    cfg = initial_config(p)
    while True:
        invks = [l for l in enabled_steps(cfg) if l.rule == "Invk-Active"]
        if invks:
            break
        cfg = apply_step(cfg, enabled_steps(cfg)[0])
    cfg2 = apply_step(cfg, invks[0])
    callee = cfg2.activities["a1"]
    (req,) = callee.queue
    assert cfg2.futures[req.future].resolved is False
    assert cfg2.futures[req.future].method == "m"
    # argument serialised into the callee store under a fresh location
    (arg,) = req.args
    assert isinstance(arg, Loc) and isinstance(callee.store[arg], Obj)
    assert callee.store[arg].fields["v"] == 7
    # caller now holds a location mapped to the new future
    caller = cfg2.activities["a0"]
    head = caller.current["f0"].stack[0].stmts[0]
    loc = head.rhs.value
    assert caller.store[loc] == FutRef(req.future)


def test_return_resolves_with_serialised_piece():
    p = parse_masp(
        """
class Srv() {
  policy { group g selfcompatible; }
  method m() group g { vars b; b = new Box(5); return b }
}
class Box(v) { }
{ vars s, f; s = newActive Srv(); f = s.m() }
"""
    )
    cfg, trace = run(initial_config(p), budget=100)
    assert trace.terminal["unresolved_futures"] == []
    binder = cfg.futures["f1"]
    assert isinstance(binder.value, Loc)
    assert binder.piece[binder.value].fields["v"] == 5


def test_update_is_not_repeatable():
    p = parse_masp(
        """
class Srv() {
  policy { group g selfcompatible; }
  method m() group g { return 3 }
}
{ vars s, f; s = newActive Srv(); f = s.m() }
"""
    )
    cfg = initial_config(p)
    while True:
        ups = [l for l in enabled_steps(cfg) if l.rule == "Update"]
        if ups:
            break
        labels = enabled_steps(cfg)
        if not labels:
            pytest.fail("no update ever enabled")
        cfg = apply_step(cfg, labels[0])
    cfg2 = apply_step(cfg, ups[0])
    # the location no longer holds the future: same label must be rejected
    with pytest.raises(EngineFault):
        apply_step(cfg2, ups[0])
    assert not [l for l in enabled_steps(cfg2) if l.rule == "Update"]


def test_unknown_method_is_stuck_not_crash():
    p = parse_masp("class C(){ } { vars c, x; c = new C(); x = c.nope() }")
    cfg, trace = run(initial_config(p), budget=50)
    assert trace.terminal["terminal"]
    stuck = stuck_threads(cfg)
    assert [s[2] for s in stuck] == ["method-missing"]


def test_run_determinism_byte_identical():
    p = load_masp("circular_soft.masp")
    _, t1 = run(initial_config(p), strategy="random", seed=7)
    _, t2 = run(initial_config(p), strategy="random", seed=7)
    assert t1.to_jsonl() == t2.to_jsonl()
    _, t3 = run(initial_config(p), strategy="random", seed=8)
    assert t3.to_jsonl() != t1.to_jsonl()


def test_replay_reproduces_terminal_digest():
    p = load_masp("circular_soft.masp")
    final, trace = run(initial_config(p), budget=200)
    from multiactive.canon import masp_digest

    replayed = replay(p, trace)
    assert masp_digest(replayed) == trace.terminal["final_digest"]


def test_deadlock_scenario_dichotomy():
    hard = load_masp("circular_hard.masp")
    cfg, t = run(initial_config(hard), budget=10000)
    assert t.terminal["terminal"] and t.terminal["request_never_ends"]
    soft = load_masp("circular_soft.masp")
    cfg2, t2 = run(initial_config(soft), budget=10000)
    assert t2.terminal["terminal"]
    assert t2.terminal["unresolved_futures"] == []
