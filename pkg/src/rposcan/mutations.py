"""Path-confusion request mutations.

Each technique crafts a URL (or cookie set) that makes the server return the
original page while the browser believes the document lives one directory
deeper, so the page's relative stylesheet references resolve back into
attacker-influenced territory.  Trailing slash padding keeps the injected
payload inside the resolved stylesheet URL even when references climb with
``../``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .payloads import ReflectionPayload
from .urls import WebUrl, resolve_relative, serialize_url

DEFAULT_SLASH_PADDING = 20

# Last path segment that looks like a server-side script; the set of
# extensions is a scanner tuning knob, not a protocol fact.
_SCRIPT_SEGMENT_RE = re.compile(r"\.(php|asp|aspx|jsp|html?)$", re.IGNORECASE)


class MutationTechnique(Enum):
    PATH_PARAM_SIMPLE = "path_param_simple"
    PATH_PARAM_SLASH = "path_param_slash"
    PATH_PARAM_SEMICOLON = "path_param_semicolon"
    ENCODED_PATH = "encoded_path"
    ENCODED_QUERY = "encoded_query"
    COOKIE = "cookie"


class TechniqueNotApplicable(ValueError):
    pass


@dataclass(frozen=True)
class MutatedRequest:
    url: WebUrl
    extra_cookies: dict[str, str] = field(default_factory=dict)
    technique: MutationTechnique = MutationTechnique.PATH_PARAM_SIMPLE
    payload: ReflectionPayload | str = ""
    slash_padding: int = DEFAULT_SLASH_PADDING

    @property
    def payload_text(self) -> str:
        if isinstance(self.payload, str):
            return self.payload
        return self.payload.encoded_text


def _payload_text(payload: ReflectionPayload | str) -> str:
    return payload if isinstance(payload, str) else payload.encoded_text


def _script_segment_index(segments: tuple[str, ...]) -> int | None:
    for i in range(len(segments) - 1, -1, -1):
        if _SCRIPT_SEGMENT_RE.search(segments[i].split(";", 1)[0]):
            return i
    return None


def applicable_techniques(
    url: WebUrl, original_cookies: dict[str, str] | None = None
) -> list[MutationTechnique]:
    """Techniques worth trying against this URL shape, in a fixed order."""
    cookies = original_cookies or {}
    segments = url.path_segments
    out = [MutationTechnique.PATH_PARAM_SIMPLE]

    script_idx = _script_segment_index(segments)
    if script_idx is not None and any(s for s in segments[script_idx + 1 :]):
        out.append(MutationTechnique.PATH_PARAM_SLASH)
    if any(";" in seg for seg in segments):
        out.append(MutationTechnique.PATH_PARAM_SEMICOLON)
    out.append(MutationTechnique.ENCODED_PATH)
    if url.query:
        out.append(MutationTechnique.ENCODED_QUERY)
    if cookies:
        out.append(MutationTechnique.COOKIE)
    return out


def _with_segments(url: WebUrl, segments: tuple[str, ...], query: str | None) -> WebUrl:
    return WebUrl(
        scheme=url.scheme,
        host=url.host,
        port=url.port,
        path_segments=segments,
        query=query,
    )


def mutate(
    url: WebUrl,
    technique: MutationTechnique,
    payload: ReflectionPayload | str,
    slash_padding: int = DEFAULT_SLASH_PADDING,
    cookies: dict[str, str] | None = None,
) -> MutatedRequest:
    """Apply one technique, embedding the (already URL-encoded) payload text."""
    cookies = cookies or {}
    if technique not in applicable_techniques(url, cookies):
        raise TechniqueNotApplicable(f"{technique.value} does not fit {serialize_url(url)}")

    text = _payload_text(payload)
    segments = url.path_segments
    padding = ("",) * slash_padding
    new_query = url.query  # EncodedQuery is the only technique that moves it
    extra_cookies: dict[str, str] = {}

    if technique is MutationTechnique.PATH_PARAM_SIMPLE:
        base = segments[:-1] if segments[-1] == "" else segments
        new_segments = base + (text,) + padding

    elif technique is MutationTechnique.PATH_PARAM_SLASH:
        idx = _script_segment_index(segments)
        assert idx is not None
        new_segments = (
            segments[: idx + 1]
            + tuple(text + s if s else s for s in segments[idx + 1 :])
            + padding
        )

    elif technique is MutationTechnique.PATH_PARAM_SEMICOLON:
        rewritten = []
        for seg in segments:
            if ";" in seg:
                head, *params = seg.split(";")
                seg = ";".join([head] + [text + p if p else p for p in params])
            rewritten.append(seg)
        new_segments = tuple(rewritten) + padding

    elif technique is MutationTechnique.ENCODED_PATH:
        # No padding here: trailing slashes would survive the server's
        # canonicalization and break the equal-canonical-path requirement.
        new_segments = segments[:-1] + (text + "%2F..", segments[-1])

    elif technique is MutationTechnique.ENCODED_QUERY:
        assert url.query is not None
        pairs = []
        for pair in url.query.split("&"):
            if "=" in pair:
                key, _, value = pair.partition("=")
                pairs.append(key + "=" + text + value)
            else:
                pairs.append(pair)
        merged = segments[-1] + "%3F" + "&".join(pairs)
        new_segments = segments[:-1] + (merged,) + padding
        new_query = None

    elif technique is MutationTechnique.COOKIE:
        new_segments = segments + padding
        extra_cookies = {name: text + value for name, value in cookies.items()}

    else:  # pragma: no cover
        raise TechniqueNotApplicable(str(technique))

    return MutatedRequest(
        url=_with_segments(url, new_segments, new_query),
        extra_cookies=extra_cookies,
        technique=technique,
        payload=payload,
        slash_padding=slash_padding,
    )


def expand_stylesheet_targets(
    mutated: MutatedRequest, relative_refs: list[str]
) -> list[WebUrl]:
    """Resolve each reference against the mutated page URL, dropping duplicates
    but keeping first-seen order."""
    seen: set[str] = set()
    out: list[WebUrl] = []
    for ref in relative_refs:
        target = resolve_relative(mutated.url, ref)
        key = serialize_url(target)
        if key not in seen:
            seen.add(key)
            out.append(target)
    return out
