"""Execution traces: JSON-lines records, replay support."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional


@dataclass
class StepRecord:
    index: int
    rule: str
    activity: str
    request_future: Optional[str]
    method: Optional[str]
    detail: dict
    config_digest: str

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "rule": self.rule,
            "activity": self.activity,
            "request_future": self.request_future,
            "method": self.method,
            "detail": self.detail,
            "config_digest": self.config_digest,
        }


@dataclass
class Trace:
    program_digest: str
    strategy: str
    seed: int
    records: list = field(default_factory=list)
    terminal: dict = field(default_factory=dict)

    def to_jsonl(self) -> str:
        lines = [
            json.dumps(
                {
                    "type": "header",
                    "program_digest": self.program_digest,
                    "strategy": self.strategy,
                    "seed": self.seed,
                },
                sort_keys=True,
            )
        ]
        for r in self.records:
            lines.append(json.dumps(r.to_json(), sort_keys=True))
        lines.append(json.dumps({"type": "terminal", **self.terminal}, sort_keys=True))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        header, records, terminal = None, [], {}
        for line in text.splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("type") == "header":
                header = obj
            elif obj.get("type") == "terminal":
                terminal = {k: v for k, v in obj.items() if k != "type"}
            else:
                records.append(
                    StepRecord(
                        obj["index"],
                        obj["rule"],
                        obj["activity"],
                        obj.get("request_future"),
                        obj.get("method"),
                        obj.get("detail", {}),
                        obj["config_digest"],
                    )
                )
        if header is None:
            raise ValueError("trace has no header line")
        return cls(
            header["program_digest"],
            header["strategy"],
            header["seed"],
            records,
            terminal,
        )
