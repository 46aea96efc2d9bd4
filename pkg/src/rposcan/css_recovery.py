"""Error-recovery CSS scan deciding whether an injected style rule survives.

Browsers parse stylesheets very forgivingly: junk before a rule is skipped,
stray closing braces at the top level are discarded, unterminated strings eat
everything up to the next newline, and rules with nonsense selectors are
dropped without derailing what follows.  This module models just enough of
that recovery to answer one question: does a ``background: url(...)``
declaration inside a selected rule survive, for an exact caller-given URL?

Not a CSS parser; tokens outside the rule/declaration/block/string/url subset
are treated as opaque delimiters.
"""

from __future__ import annotations

from dataclasses import dataclass

WS = "ws"
IDENT = "ident"
STRING = "string"
BAD_STRING = "bad-string"
URL = "url"
BAD_URL = "bad-url"
FUNCTION = "function"
HASH = "hash"
AT_KEYWORD = "at-keyword"
CDO = "cdo"
CDC = "cdc"
LBRACE, RBRACE = "{", "}"
LBRACKET, RBRACKET = "[", "]"
LPAREN, RPAREN = "(", ")"
COLON, SEMICOLON, COMMA = ":", ";", ","
DELIM = "delim"

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_-")
_IDENT_CHARS = _IDENT_START | set("0123456789")
_SPACE = set(" \t\r\n\f")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    offset: int


def _consume_string(text: str, i: int) -> tuple[Token, int]:
    quote = text[i]
    start = i
    j = i + 1
    buf: list[str] = []
    while j < len(text):
        c = text[j]
        if c == quote:
            return Token(STRING, "".join(buf), start), j + 1
        if c == "\\" and j + 1 < len(text):
            buf.append(text[j + 1])
            j += 2
            continue
        if c in "\n\r\f":
            # the newline itself is not part of the bad string
            return Token(BAD_STRING, "".join(buf), start), j
        buf.append(c)
        j += 1
    return Token(STRING, "".join(buf), start), j


def _consume_url(text: str, i: int, start: int) -> tuple[Token, int]:
    """After ``url(``: unquoted form only; ``i`` points past the paren."""
    j = i
    while j < len(text) and text[j] in _SPACE:
        j += 1
    buf: list[str] = []
    while j < len(text):
        c = text[j]
        if c == ")":
            return Token(URL, "".join(buf).strip(), start), j + 1
        if c in _SPACE:
            # whitespace inside an unquoted url: only valid if ")" follows
            k = j
            while k < len(text) and text[k] in _SPACE:
                k += 1
            if k < len(text) and text[k] == ")":
                return Token(URL, "".join(buf).strip(), start), k + 1
            # bad url: discard up to the closing paren
            while k < len(text) and text[k] != ")":
                k += 1
            return Token(BAD_URL, "", start), min(k + 1, len(text))
        if c in "\"'(":
            k = j
            while k < len(text) and text[k] != ")":
                k += 1
            return Token(BAD_URL, "", start), min(k + 1, len(text))
        buf.append(c)
        j += 1
    return Token(BAD_URL, "", start), j


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            i = n if end == -1 else end + 2
            continue
        if c in _SPACE:
            j = i
            while j < n and text[j] in _SPACE:
                j += 1
            tokens.append(Token(WS, text[i:j], i))
            i = j
            continue
        if c in "\"'":
            token, i = _consume_string(text, i)
            tokens.append(token)
            continue
        if text.startswith("<!--", i):
            tokens.append(Token(CDO, "<!--", i))
            i += 4
            continue
        if text.startswith("-->", i):
            tokens.append(Token(CDC, "-->", i))
            i += 3
            continue
        if c in _IDENT_START:
            j = i
            while j < n and text[j] in _IDENT_CHARS:
                j += 1
            name = text[i:j]
            if j < n and text[j] == "(":
                if name.lower() == "url" and (j + 1 >= n or text[j + 1] not in "\"'"):
                    token, i = _consume_url(text, j + 1, i)
                    tokens.append(token)
                else:
                    tokens.append(Token(FUNCTION, name.lower(), i))
                    i = j + 1
                continue
            tokens.append(Token(IDENT, name, i))
            i = j
            continue
        if c == "#":
            j = i + 1
            while j < n and text[j] in _IDENT_CHARS:
                j += 1
            tokens.append(Token(HASH, text[i + 1 : j], i))
            i = j
            continue
        if c == "@":
            j = i + 1
            while j < n and text[j] in _IDENT_CHARS:
                j += 1
            tokens.append(Token(AT_KEYWORD, text[i + 1 : j], i))
            i = j
            continue
        if c in "{}[]():;,":
            tokens.append(Token(c, c, i))
            i += 1
            continue
        tokens.append(Token(DELIM, c, i))
        i += 1
    return tokens


def token_trace(body: bytes) -> list[str]:
    """Human-checkable token stream, used for the committed oracle traces."""
    lines = []
    for token in tokenize(body.decode("latin-1", errors="replace")):
        shown = token.value if token.kind != WS else repr(token.value)
        if len(shown) > 60:
            shown = shown[:57] + "..."
        lines.append(f"{token.offset:6d} {token.kind:<10} {shown}")
    return lines


_OPENERS = {LBRACE: RBRACE, LBRACKET: RBRACKET, LPAREN: RPAREN, FUNCTION: RPAREN}

# Token kinds a plausible selector prelude may contain.
_SELECTOR_KINDS = {IDENT, HASH, COLON, COMMA, WS, STRING, LBRACKET, RBRACKET, FUNCTION, LPAREN, RPAREN}
_SELECTOR_DELIMS = set(".*>+~|^$=")


def _selector_plausible(prelude: list[Token]) -> bool:
    meaningful = [t for t in prelude if t.kind != WS]
    if not meaningful:
        return False
    for token in meaningful:
        if token.kind == DELIM:
            if token.value not in _SELECTOR_DELIMS:
                return False
        elif token.kind not in _SELECTOR_KINDS:
            return False
    return True


def _consume_group_aware(tokens: list[Token], i: int, until: set[str]) -> tuple[list[Token], int, str]:
    """Collect component values until one of ``until`` appears at nesting
    level zero; returns (collected, next_index, terminator_kind_or_empty)."""
    out: list[Token] = []
    stack: list[str] = []
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if not stack and t.kind in until:
            return out, i, t.kind
        if t.kind in _OPENERS:
            stack.append(_OPENERS[t.kind])
            out.append(t)
        elif stack and t.kind == stack[-1]:
            stack.pop()
            out.append(t)
        else:
            out.append(t)
        i += 1
    return out, i, ""


def _split_declarations(block: list[Token]) -> list[list[Token]]:
    decls: list[list[Token]] = []
    current: list[Token] = []
    stack: list[str] = []
    for t in block:
        if not stack and t.kind == SEMICOLON:
            decls.append(current)
            current = []
            continue
        if t.kind in _OPENERS:
            stack.append(_OPENERS[t.kind])
        elif stack and t.kind == stack[-1]:
            stack.pop()
        current.append(t)
    decls.append(current)
    return decls


def _declaration_urls(decl: list[Token], wanted_property: str) -> list[str]:
    meaningful = [t for t in decl if t.kind != WS]
    if len(meaningful) < 3:
        return []
    if meaningful[0].kind != IDENT or meaningful[0].value.lower() != wanted_property:
        return []
    if meaningful[1].kind != COLON:
        return []
    value = meaningful[2:]
    if any(t.kind in (BAD_STRING, BAD_URL) for t in value):
        return []  # invalid declaration: dropped whole
    urls: list[str] = []
    for idx, token in enumerate(value):
        if token.kind == URL:
            urls.append(token.value)
        elif token.kind == FUNCTION and token.value == "url":
            rest = value[idx + 1 :]
            if rest and rest[0].kind == STRING:
                urls.append(rest[0].value)
    return urls


def surviving_background_urls(body: bytes) -> list[str]:
    """URLs of ``background`` declarations that survive error recovery inside
    rules whose selector looks plausible."""
    tokens = tokenize(body.decode("latin-1", errors="replace"))
    urls: list[str] = []
    i = 0
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if t.kind in (WS, CDO, CDC, RBRACE, RBRACKET, RPAREN, SEMICOLON):
            # stray closers and separators at the top level: recovery skips
            i += 1
            continue
        if t.kind == AT_KEYWORD:
            _, i, terminator = _consume_group_aware(tokens, i + 1, {SEMICOLON, LBRACE})
            if terminator == SEMICOLON:
                i += 1
            elif terminator == LBRACE:
                _, i, terminator = _consume_group_aware(tokens, i + 1, {RBRACE})
                if terminator == RBRACE:
                    i += 1
            continue
        prelude, i, terminator = _consume_group_aware(tokens, i, {LBRACE, RBRACE, SEMICOLON})
        if terminator != LBRACE:
            # prelude ran into EOF, a stray "}", or a ";": rule discarded
            if terminator:
                i += 1
            continue
        if any(token.kind == BAD_STRING for token in prelude):
            continue  # string swallowed part of the stream: rule discarded
        block, i, terminator = _consume_group_aware(tokens, i + 1, {RBRACE})
        if terminator == RBRACE:
            i += 1
        if not _selector_plausible(prelude):
            continue
        for decl in _split_declarations(block):
            urls.extend(_declaration_urls(decl, "background"))
    return urls


def css_would_fire(body: bytes, nonce_url: str) -> bool:
    """True iff a surviving ``background`` declaration loads exactly
    ``nonce_url``."""
    return nonce_url in surviving_background_urls(body)
