"""Deadlock diagnosis: the two §-scenario causes and clean runs."""

from multiactive.deadlock import diagnose_deadlock
from multiactive.lang import parse_masp
from multiactive.masp.engine import initial_config, run

from conftest import load_masp


def test_thread_starved_classification():
    program = load_masp("circular_hard.masp")
    final, trace = run(initial_config(program), budget=10000)
    assert trace.terminal["request_never_ends"]
    diag = diagnose_deadlock(final)
    assert "thread-starved" in diag.kinds()
    assert "blocked-on-future" in diag.kinds()
    assert diag.cycles  # circular request dependency is visible
    # starved entry names the queued callback
    starved = [c for c in diag.classifications if c["kind"] == "thread-starved"]
    assert any("limits" in c["detail"] for c in starved)


def test_no_unresolved_no_diagnosis():
    program = load_masp("circular_soft.masp")
    final, trace = run(initial_config(program), budget=10000)
    assert not trace.terminal["request_never_ends"]
    diag = diagnose_deadlock(final)
    assert diag.empty


def test_incompatible_forever_classification():
    # go() waits for a callback that conflicts with it forever
    src = """
class First(peer) {
  policy {
    group g1;
    group g2;
  }
  method setPeer(p) group g1 {
    peer = p;
    return null
  }
  method go() group g1 {
    vars x, w;
    x = peer.ping();
    w = x.get();
    return w
  }
  method back() group g2 {
    return 7
  }
}
class Second(first) {
  policy { group h selfcompatible; }
  method ping() group h {
    vars y, v;
    y = first.back();
    v = y.get();
    return 42
  }
}
{
  vars a, b, z, w, g;
  a = newActive First(null);
  b = newActive Second(a);
  z = a.setPeer(b);
  w = z.get();
  g = a.go()
}
"""
    program = parse_masp(src)
    final, trace = run(initial_config(program), budget=10000)
    assert trace.terminal["request_never_ends"]
    diag = diagnose_deadlock(final)
    assert "incompatible-forever" in diag.kinds()
    bad = [c for c in diag.classifications if c["kind"] == "incompatible-forever"]
    assert any("go" in c["detail"] for c in bad)


def test_non_terminal_config_yields_empty_diagnosis():
    program = load_masp("circular_soft.masp")
    diag = diagnose_deadlock(initial_config(program))
    assert diag.empty
