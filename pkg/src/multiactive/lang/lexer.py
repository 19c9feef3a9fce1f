"""Hand-rolled lexer shared by both concrete grammars."""

from __future__ import annotations

from dataclasses import dataclass

from ..diagnostics import ParseError, Pos

KEYWORDS = {
    "class", "method", "policy", "group", "compatible", "threads", "pool",
    "priority", "soft", "hard", "selfcompatible", "min", "max", "inf",
    "vars", "skip", "return", "if", "else", "new", "newActive", "local",
    "setLimitSoft", "setLimitHard", "this", "null", "true", "false",
    "await", "suspend",
}

# longest first so e.g. "==" wins over "="
SYMBOLS = [
    "...", "==", "!=", "<=", ">=", "&&", "||",
    "{", "}", "(", ")", ",", ";", "=", ".", "!", "?", "@",
    "<", ">", "+", "-", "*", "/",
]


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT | INT | STRING | keyword | symbol | EOF
    text: str
    pos: Pos


def _ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_" or ch == "§"  # § prefixes temporaries


def _ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_" or ch == "§"


def tokenize(text: str, filename: str = "<input>") -> list:
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        pos = Pos(line, col)
        if ch == "∧":  # ∧ accepted as &&
            toks.append(Token("&&", "&&", pos))
            i += 1
            col += 1
            continue
        if _ident_start(ch):
            j = i
            while j < n and _ident_char(text[j]):
                j += 1
            word = text[i:j]
            kind = word if word in KEYWORDS else "IDENT"
            toks.append(Token(kind, word, pos))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("INT", text[i:j], pos))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise ParseError("unterminated string", pos, filename)
                j += 1
            if j >= n:
                raise ParseError("unterminated string", pos, filename)
            toks.append(Token("STRING", text[i + 1 : j], pos))
            col += j + 1 - i
            i = j + 1
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token(sym, sym, pos))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", pos, filename)
    toks.append(Token("EOF", "", Pos(line, col)))
    return toks
