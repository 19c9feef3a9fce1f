"""Terminal-state diagnosis: why does a request never end?

A stuck computation is classified per thread/request: blocked on an
unresolved future (wait-by-necessity), queued behind an incompatibility
that will never clear, or starved of threads by the pool/group limits.
The wait-for graph ties blocked parties to the requests that should
produce their futures; cycles witness circular dependencies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lang.ast_masp import MAssign, MInvoke
from .masp.evalfn import evaluate, ground
from .masp.runtime import MaspConfig
from .masp.steps import enabled_steps
from .policy import (
    ThreadAccount,
    _group_limit_ok,
    _pool_ok,
    _reservation_ok,
    compatible,
    ready,
)
from .values import FutRef, Loc


@dataclass
class Diagnosis:
    classifications: list = field(default_factory=list)
    wait_for: list = field(default_factory=list)  # (blocked, waits-on) edges
    cycles: list = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.classifications

    def kinds(self) -> set:
        return {c["kind"] for c in self.classifications}

    def to_json(self) -> dict:
        return {
            "classifications": self.classifications,
            "wait_for": [list(e) for e in self.wait_for],
            "cycles": [list(c) for c in self.cycles],
        }


def _blocking_future(act, thread):
    """The future an active-but-stuck thread's head call waits on."""
    frame = thread.stack[0]
    head = frame.stmts[0]
    if not (isinstance(head, MAssign) and isinstance(head.rhs, MInvoke)):
        return None
    try:
        target = evaluate(head.rhs.target, act.store, frame.locals)
    except Exception:
        return None
    if isinstance(target, Loc):
        storable = act.store.get(target)
        if isinstance(storable, FutRef):
            return storable.name
    return None


def _producer(config, fut):
    """Where the value of an unresolved future would come from."""
    for name, act in config.activities.items():
        if fut in act.current:
            return ("thread", name, fut)
        for q in act.queue:
            if q.future == fut:
                return ("queued", name, fut)
    return ("lost", "", fut)


def diagnose_deadlock(config: MaspConfig) -> Diagnosis:
    """Classify a terminal configuration with unresolved futures."""
    diag = Diagnosis()
    unresolved = {f for f, b in config.futures.items() if not b.resolved}
    # run-mode enabledness: activate/passivate loops make no progress
    if not unresolved or enabled_steps(config, mode="run"):
        return diag
    edges = {}

    def edge(src, fut):
        kind, act, f = _producer(config, fut)
        dst = f"{kind}:{act}:{f}"
        edges.setdefault(src, set()).add(dst)
        diag.wait_for.append((src, dst))

    for name, act in config.activities.items():
        g = lambda v: ground(v, act.store)
        acc = ThreadAccount.of_activity(act)
        for fut, thread in act.current.items():
            node = f"thread:{name}:{fut}"
            blocking = _blocking_future(act, thread)
            if thread.state == "P":
                # passivated and never admissible again, or waiting forever
                from .policy import activate_admissible

                if not activate_admissible(act, fut):
                    diag.classifications.append(
                        {
                            "kind": "thread-starved",
                            "activity": name,
                            "request": fut,
                            "detail": "activation blocked by thread limits",
                        }
                    )
                if blocking is not None:
                    diag.classifications.append(
                        {
                            "kind": "blocked-on-future",
                            "activity": name,
                            "request": fut,
                            "detail": f"wait-by-necessity on {blocking}",
                        }
                    )
                    edge(node, blocking)
                continue
            if blocking is not None:
                diag.classifications.append(
                    {
                        "kind": "blocked-on-future",
                        "activity": name,
                        "request": fut,
                        "detail": f"wait-by-necessity on {blocking}"
                        + (" under a hard limit" if act.limit == "H" else ""),
                    }
                )
                edge(node, blocking)
        for idx, q in enumerate(act.queue):
            node = f"queued:{name}:{q.future}"
            if not ready(q, act.current, act.queue[:idx], act.policy, g):
                conflicts = [
                    t.request.method
                    for t in act.current.values()
                    if not compatible(q, t.request, act.policy, g)
                ] + [
                    q2.method
                    for q2 in act.queue[:idx]
                    if not compatible(q, q2, act.policy, g)
                ]
                diag.classifications.append(
                    {
                        "kind": "incompatible-forever",
                        "activity": name,
                        "request": q.future,
                        "detail": f"conflicts with {sorted(set(conflicts))}",
                    }
                )
                for t_fut, t in act.current.items():
                    if not compatible(q, t.request, act.policy, g):
                        edge(node, t_fut)
                continue
            group = act.policy.group_of(q.method)
            if not (
                _group_limit_ok(act.policy, acc, group)
                and _pool_ok(act.policy, acc)
                and _reservation_ok(act.policy, acc, group)
            ):
                diag.classifications.append(
                    {
                        "kind": "thread-starved",
                        "activity": name,
                        "request": q.future,
                        "detail": "service blocked by thread limits",
                    }
                )
                for t_fut, t in act.current.items():
                    if t.state == "A":
                        edge(node, t_fut)
    diag.cycles = _find_cycles(edges)
    return diag


def _find_cycles(edges) -> list:
    cycles = []
    seen_cycles = set()
    for start in edges:
        path, on_path = [], {}
        node = start

        def dfs(n):
            if n in on_path:
                cyc = tuple(path[on_path[n] :])
                key = frozenset(cyc)
                if key not in seen_cycles:
                    seen_cycles.add(key)
                    cycles.append(cyc)
                return
            if n not in edges:
                return
            on_path[n] = len(path)
            path.append(n)
            for m in sorted(edges[n]):
                dfs(m)
            path.pop()
            del on_path[n]

        dfs(node)
    return cycles
