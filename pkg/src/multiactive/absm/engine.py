"""Initial configuration and deterministic runs of the cooperative engine."""

from __future__ import annotations

import random

from ..canon import abs_digest, digest_of
from ..lang.ast_abs import AbsProgram
from ..lang.pretty import pretty_abs
from ..trace import StepRecord, Trace
from ..values import UNRESOLVED, ActRef, FutRef, ObjRef
from ..steplabel import Label
from .runtime import AbsConfig, Ob, Process, flatten_abs_body
from .steps import abs_apply_step, abs_enabled_steps

MAIN_COG = "a0"
MAIN_FUTURE = "f0"


def abs_initial_config(program: AbsProgram) -> AbsConfig:
    """A single start object, alone in its cog, activating the main block."""
    start = ObjRef(0, MAIN_COG)
    locals_ = {x: None for x in program.main_locals}
    locals_["this"] = start
    locals_["destiny"] = FutRef(MAIN_FUTURE)
    proc = Process(locals_, flatten_abs_body(program.main_body))
    ob = Ob(start, None, {"cog": ActRef(MAIN_COG)}, proc, ())
    return AbsConfig(
        program=program,
        objects={start: ob},
        cogs={MAIN_COG: start},
        futures={MAIN_FUTURE: UNRESOLVED},
        cog_counter=1,
        fut_counter=1,
        id_counters={MAIN_COG: 1},
    )


def label_from_detail(detail: dict) -> Label:
    return Label(
        detail["rule"],
        detail["activity"],
        detail.get("future"),
        tuple(detail.get("extra", ())),
    )


def abs_unresolved_futures(config: AbsConfig) -> list:
    return [f for f, v in config.futures.items() if v is UNRESOLVED]


def abs_run(
    config: AbsConfig,
    strategy: str = "fifo-eager",
    budget: int = 10000,
    seed: int = 0,
    digests: bool = True,
):
    """One deterministic execution; awaits re-queue at the tail in run mode."""
    trace = Trace(
        program_digest=digest_of(pretty_abs(config.program)),
        strategy=strategy,
        seed=seed,
    )
    rng = random.Random(seed)
    rotation = 0
    steps = 0
    while steps < budget:
        labels = abs_enabled_steps(config, mode="run")
        if not labels:
            break
        if strategy == "random":
            chosen = labels[rng.randrange(len(labels))]
        else:
            # round-robin over cogs; within one cog prefer real progress
            # over yielding so awaiting processes do not spin needlessly
            cog_order = list(config.cogs.keys())
            chosen = None
            for offset in range(len(cog_order)):
                cog = cog_order[(rotation + offset) % len(cog_order)]
                mine = [l for l in labels if l.activity == cog]
                if mine:
                    progress = [
                        l
                        for l in mine
                        if l.rule not in ("Await-False", "Suspend", "Release-Cog")
                    ]
                    chosen = progress[0] if progress else mine[0]
                    rotation = rotation + offset + 1
                    break
            if chosen is None:
                chosen = labels[0]
        detail = {
            "rule": chosen.rule,
            "activity": chosen.activity,
            "future": chosen.future,
            "extra": list(chosen.extra),
        }
        record = StepRecord(
            steps, f"abs:{chosen.rule}", chosen.activity, chosen.future, None, detail, ""
        )
        config = abs_apply_step(config, chosen)
        if digests:
            record.config_digest = abs_digest(config)
        trace.records.append(record)
        steps += 1
    unresolved = abs_unresolved_futures(config)
    terminal = not abs_enabled_steps(config, mode="run")
    trace.terminal = {
        "steps": steps,
        "terminal": terminal,
        "budget_exhausted": steps >= budget and not terminal,
        "unresolved_futures": sorted(unresolved),
        "request_never_ends": terminal and bool(unresolved),
        "final_digest": abs_digest(config),
    }
    return config, trace


def abs_replay(program: AbsProgram, trace: Trace):
    """Re-apply a trace's recorded labels; returns the final configuration."""
    config = abs_initial_config(program)
    for record in trace.records:
        config = abs_apply_step(config, label_from_detail(record.detail))
    return config
