"""Runtime value representations shared by both interpreters.

Simple values are represented directly: ``None`` (null), ``int``, ``bool``.
Structured references get small frozen wrappers so they hash and compare
structurally and never collide with primitives.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Loc:
    """A location in one activity's local store (meaningless outside it)."""

    index: int

    def __repr__(self):
        return f"o{self.index}"


@dataclass(frozen=True)
class ActRef:
    """Name of an activity (identified with a cog name)."""

    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class FutRef:
    """Name of a future."""

    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class ObjRef:
    """Global object name ``i_alpha``: local identifier plus owning cog."""

    ident: int
    cog: str

    def __repr__(self):
        return f"{self.ident}_{self.cog}"


@dataclass(frozen=True)
class MethodVal:
    """A method name used as a runtime value (execute's second argument)."""

    name: str

    def __repr__(self):
        return f"@{self.name}"


class Unresolved:
    """The ⊥ state of a future binder."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "⊥"


UNRESOLVED = Unresolved()


class Undefined:
    """Result of evaluating arithmetic over an unresolved future."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "<undefined>"


UNDEFINED = Undefined()


class EngineFault(Exception):
    """An internal interpreter invariant broke (not a program state)."""


def is_primitive(v) -> bool:
    return v is None or isinstance(v, (bool, int))


def show_value(v) -> str:
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    return repr(v)
