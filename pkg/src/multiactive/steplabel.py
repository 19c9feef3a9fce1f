"""Step labels shared by both engines and the exploration harness."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Label:
    rule: str
    activity: str
    future: Optional[str] = None
    extra: tuple = ()

    def key(self) -> str:
        bits = [self.rule, self.activity]
        if self.future is not None:
            bits.append(self.future)
        bits.extend(str(x) for x in self.extra)
        return "/".join(bits)
