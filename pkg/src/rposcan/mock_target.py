"""Configurable mock target reproducing the server-side behaviors the scanner
exploits: rewriting-style routing, reflection sinks, doctype and defense
header emission, and URL-echoing error pages.

Every response is a pure function of (config, request), and each config can
compute its own ground-truth label (is it vulnerable, and for which engines
would the injected style fire) from its flags plus the rendering model, so
end-to-end runs have an answer key that does not come from the scanner.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from enum import Enum
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import quote, unquote

from .httpclient import HttpRequest, HttpResponse, NetworkError, host_key
from .mutations import MutationTechnique, applicable_techniques, expand_stylesheet_targets, mutate
from .pages import is_relative_href
from .rendering import (
    BrowserProfile,
    ResponseSecurity,
    effective_mode,
    framing_allowed,
    stylesheet_accepted,
    RenderingMode,
)
from .scanning import NotVulnerableReason, ScanStatus
from .urls import WebUrl, _remove_dot_segments, parse_url, resolve_relative, serialize_url


class Routing(Enum):
    EXACT_FILE = "exact_file"
    PATH_INFO_REWRITE = "path_info_rewrite"
    SEMICOLON_PARAMS = "semicolon_params"
    ENCODED_SLASH_DECODE = "encoded_slash_decode"


class Sink(Enum):
    ECHO_URL = "echo_url"
    ECHO_QUERY_VALUES = "echo_query_values"
    ECHO_COOKIE_VALUES = "echo_cookie_values"
    ECHO_REFERRER = "echo_referrer"


class SinkFilter(Enum):
    RAW = "raw"
    SANITIZE = "sanitize"  # strips style metacharacters, keeps the text
    DROP = "drop"  # sink emits nothing at all


DOCTYPE_QUIRKS = 'html PUBLIC "-//W3C//DTD HTML 4.01 Transitional//EN"'
DOCTYPE_STANDARDS = "html"

_SANITIZE_RE = re.compile(r"[{}()\[\]:;]")


@dataclass
class TargetConfig:
    name: str
    routing: Routing
    sinks: frozenset[Sink] = frozenset({Sink.ECHO_URL})
    page_path: str = "/app/page.php"
    seed_path: str | None = None  # URL path the scan starts from; default page_path
    seed_query: str | None = None
    seed_cookies: dict[str, str] = field(default_factory=dict)
    doctype: str | None = None
    emit_base_tag: bool = False
    stylesheet_refs: list[str] = field(default_factory=lambda: ["../style.css"])
    nosniff: bool = False
    x_frame_options: str | None = None
    x_ua_compatible: str | None = None
    error_page_echoes_url: bool = True
    error_page_has_refs: bool = True
    serve_real_stylesheets: bool = False
    sink_filter: SinkFilter = SinkFilter.RAW

    def seed_url(self, origin: str) -> WebUrl:
        path = self.seed_path or self.page_path
        text = origin.rstrip("/") + path
        if self.seed_query is not None:
            text += "?" + self.seed_query
        return parse_url(text)


# --- routing ---


def _split_target(raw_target: str) -> tuple[str, str | None]:
    if "?" in raw_target:
        path, _, query = raw_target.partition("?")
        return path, query
    return raw_target, None


def _strip_semicolon_params(path: str) -> str:
    return "/" + "/".join(seg.split(";", 1)[0] for seg in path.split("/")[1:])


def _real_stylesheet_paths(config: TargetConfig) -> set[str]:
    base = parse_url("http://mock.invalid" + config.page_path)
    paths = set()
    for ref in config.stylesheet_refs:
        if is_relative_href(ref):
            paths.add(resolve_relative(base, ref).path)
        elif ref.startswith("/") and not ref.startswith("//"):
            paths.add(ref)
    return paths


def route_request(config: TargetConfig, raw_target: str) -> tuple[str, list[tuple[str, str]]]:
    """Resolve a raw request target to ("page" | "css" | "404", query_pairs).

    Query pairs come back fully decoded, including a query string resurrected
    from an encoded ``?`` by the decode-then-route flavor.
    """
    raw_path, raw_query = _split_target(raw_target)
    recovered_query: str | None = None

    if config.routing is Routing.ENCODED_SLASH_DECODE:
        decoded = unquote(raw_path)
        if "?" in decoded:
            decoded, _, recovered_query = decoded.partition("?")
        normalized = _remove_dot_segments(decoded)
    elif config.routing is Routing.SEMICOLON_PARAMS:
        normalized = _strip_semicolon_params(unquote(raw_path))
    else:
        normalized = unquote(raw_path)

    pairs: list[tuple[str, str]] = []
    if raw_query is not None:
        for chunk in raw_query.split("&"):
            if "=" in chunk:
                key, _, value = chunk.partition("=")
                pairs.append((key, unquote(value)))
    elif recovered_query is not None:
        for chunk in recovered_query.split("&"):
            if "=" in chunk:
                key, _, value = chunk.partition("=")
                pairs.append((key, value))  # already decoded with the path

    if config.serve_real_stylesheets and normalized in _real_stylesheet_paths(config):
        return "css", pairs

    if config.routing in (Routing.EXACT_FILE, Routing.ENCODED_SLASH_DECODE):
        # the decode-then-route flavor canonicalizes and then matches exactly
        is_page = normalized == config.page_path
    else:
        is_page = normalized == config.page_path or normalized.startswith(config.page_path + "/")
    return ("page" if is_page else "404"), pairs


# --- response bodies ---


def _apply_filter(config: TargetConfig, value: str) -> str | None:
    if config.sink_filter is SinkFilter.DROP:
        return None
    if config.sink_filter is SinkFilter.SANITIZE:
        return _SANITIZE_RE.sub("", value)
    return value


def _sink_echoes(
    config: TargetConfig, request: HttpRequest, query_pairs: list[tuple[str, str]]
) -> list[tuple[str, str]]:
    raw_target = _raw_target_of(request.url)
    echoes: list[tuple[str, str]] = []
    if Sink.ECHO_URL in config.sinks:
        echoes.append(("echo-url", unquote(raw_target)))
    if Sink.ECHO_QUERY_VALUES in config.sinks:
        for _, value in query_pairs:
            echoes.append(("echo-query", value))
    if Sink.ECHO_COOKIE_VALUES in config.sinks:
        for _, value in sorted(request.cookies.items()):
            echoes.append(("echo-cookie", unquote(value)))
    if Sink.ECHO_REFERRER in config.sinks:
        referer = request.headers.get("Referer") or request.headers.get("referer")
        if referer:
            echoes.append(("echo-referrer", unquote(referer)))
    filtered = []
    for css_class, value in echoes:
        kept = _apply_filter(config, value)
        if kept is not None:
            filtered.append((css_class, kept))
    return filtered


def _raw_target_of(url: str) -> str:
    rest = url.split("://", 1)[1] if "://" in url else url
    slash = rest.find("/")
    return rest[slash:] if slash != -1 else "/"


def _head_lines(config: TargetConfig, origin: str) -> list[str]:
    lines = []
    if config.doctype:
        lines.append(f"<!DOCTYPE {config.doctype}>")
    lines.append("<html><head>")
    if config.emit_base_tag:
        directory = config.page_path.rsplit("/", 1)[0] + "/"
        lines.append(f'<base href="{origin}{directory}">')
    lines.append("<title>mock target</title>")
    return lines


def _ref_lines(config: TargetConfig) -> list[str]:
    return [f'<link rel="stylesheet" href="{ref}">' for ref in config.stylesheet_refs]


def _page_body(config: TargetConfig, request: HttpRequest, query_pairs) -> bytes:
    origin = "http://" + host_key(request.url)
    lines = _head_lines(config, origin)
    lines.extend(_ref_lines(config))
    lines.append("</head>")
    lines.append("<body>")
    lines.append("<h1>mock page</h1>")
    for css_class, value in _sink_echoes(config, request, query_pairs):
        lines.append(f'<p class="{css_class}">{value}</p>')
    lines.append("</body></html>")
    return "\n".join(lines).encode("latin-1", errors="replace")


def _error_body(config: TargetConfig, request: HttpRequest) -> bytes:
    origin = "http://" + host_key(request.url)
    lines = _head_lines(config, origin)
    if config.error_page_has_refs:
        lines.extend(_ref_lines(config))
    lines.append("</head>")
    lines.append("<body>")
    lines.append("<h1>404 Not Found</h1>")
    if config.error_page_echoes_url:
        echoed = _apply_filter(config, unquote(_raw_target_of(request.url)))
        if echoed is not None:
            lines.append(f'<p class="echo-url">{echoed}</p>')
    lines.append("</body></html>")
    return "\n".join(lines).encode("latin-1", errors="replace")


def _security_headers(config: TargetConfig) -> dict[str, str]:
    headers: dict[str, str] = {}
    if config.nosniff:
        headers["X-Content-Type-Options"] = "nosniff"
    if config.x_frame_options is not None:
        headers["X-Frame-Options"] = config.x_frame_options
    if config.x_ua_compatible is not None:
        headers["X-UA-Compatible"] = config.x_ua_compatible
    return headers


def handle_request(config: TargetConfig, request: HttpRequest) -> HttpResponse:
    """Byte-deterministic response for a GET request against this config."""
    kind, query_pairs = route_request(config, _raw_target_of(request.url))
    headers = _security_headers(config)
    if kind == "css":
        headers["Content-Type"] = "text/css"
        return HttpResponse(200, headers, b"body { margin: 0; }\n", request.url)
    headers["Content-Type"] = "text/html; charset=utf-8"
    if kind == "page":
        return HttpResponse(200, headers, _page_body(config, request, query_pairs), request.url)
    return HttpResponse(404, headers, _error_body(config, request), request.url)


# --- serving over loopback ---


class PortInUse(OSError):
    pass


@dataclass
class MockServerHandle:
    server: ThreadingHTTPServer
    thread: threading.Thread
    port: int

    def shutdown(self) -> None:
        self.server.shutdown()
        self.server.server_close()
        self.thread.join(timeout=5)


def serve(config: TargetConfig, port: int = 0) -> MockServerHandle:
    """Expose the config over loopback HTTP/1.1; port 0 picks a free port."""

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def do_GET(self) -> None:  # noqa: N802 (http.server naming)
            cookies: dict[str, str] = {}
            cookie_header = self.headers.get("Cookie", "")
            for part in cookie_header.split(";"):
                if "=" in part:
                    name, _, value = part.strip().partition("=")
                    cookies[name] = value
            request = HttpRequest(
                url=f"http://{self.headers.get('Host', 'localhost')}{self.path}",
                headers={k: v for k, v in self.headers.items()},
                cookies=cookies,
            )
            response = handle_request(config, request)
            self.send_response(response.status)
            for name, value in response.headers.items():
                self.send_header(name, value)
            self.send_header("Content-Length", str(len(response.body)))
            self.end_headers()
            self.wfile.write(response.body)

        def log_message(self, *args) -> None:
            pass

    try:
        server = ThreadingHTTPServer(("127.0.0.1", port), Handler)
    except OSError as exc:
        raise PortInUse(f"port {port}: {exc}") from exc
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return MockServerHandle(server=server, thread=thread, port=server.server_address[1])


class InProcessClient:
    """Client that answers from configs directly, keyed by host[:port]."""

    def __init__(self, hosts: dict[str, TargetConfig]) -> None:
        self._hosts = hosts

    def fetch(self, request: HttpRequest) -> HttpResponse:
        if request.method != "GET":
            raise NetworkError(f"only GET is supported, not {request.method}")
        config = self._hosts.get(host_key(request.url))
        if config is None:
            raise NetworkError(f"unknown mock host in {request.url}")
        return handle_request(config, request)


# --- ground truth ---


@dataclass
class ProfileTruth:
    exploitable: bool
    framed: bool


@dataclass
class GroundTruth:
    vulnerable: bool
    reason: str | None  # NotVulnerableReason value for non-vulnerable configs
    technique: str | None
    profiles: dict[str, ProfileTruth]


_MARKER = "zz9qmarkerq9zz"  # stands in for the payload; survives one decode

# Exploit-shaped stand-in: closers plus a url() whose decoded form carries
# raw slashes, which is what breaks path equivalence on decode-then-route
# servers during verification.
_EXPLOIT_MARKER_TEXT = "}}]]body{background:url(http://css-canary.invalid/" + _MARKER + ")}"


def _marker_reflects(
    config: TargetConfig, technique: MutationTechnique, mutated, sheet: WebUrl
) -> bool:
    """Would the response to this stylesheet fetch echo the injected marker?"""
    if config.sink_filter is SinkFilter.DROP:
        return False
    kind, query_pairs = route_request(config, _raw_target_of(serialize_url(sheet)))
    if kind == "css":
        return False
    if kind == "404":
        return config.error_page_echoes_url and _MARKER in unquote(sheet.path)
    if Sink.ECHO_URL in config.sinks and _MARKER in unquote(sheet.path):
        return True
    if Sink.ECHO_REFERRER in config.sinks and _MARKER in unquote(serialize_url(mutated.url)):
        return True
    if Sink.ECHO_QUERY_VALUES in config.sinks and any(_MARKER in v for _, v in query_pairs):
        return True
    if Sink.ECHO_COOKIE_VALUES in config.sinks and technique is MutationTechnique.COOKIE:
        return True
    return False


def _winning_technique(config: TargetConfig) -> tuple[MutationTechnique | None, str | None]:
    """First technique whose stylesheet fetch reflects, plus the failure reason
    when none does.  Mirrors the config's own routing and sink flags."""
    seed = config.seed_url("http://gt.invalid")
    saw_base = False
    saw_relative_refs = False
    for technique in applicable_techniques(seed, config.seed_cookies):
        mutated = mutate(seed, technique, _MARKER, 20, config.seed_cookies)
        page_kind, _ = route_request(config, _raw_target_of(serialize_url(mutated.url)))
        if page_kind == "css":
            continue
        refs_visible = page_kind == "page" or config.error_page_has_refs
        if not refs_visible:
            continue
        if config.emit_base_tag:
            saw_base = True
            continue
        relative_refs = [r for r in config.stylesheet_refs if is_relative_href(r)]
        if not relative_refs:
            continue
        saw_relative_refs = True
        for sheet in expand_stylesheet_targets(mutated, relative_refs):
            if _marker_reflects(config, technique, mutated, sheet):
                return technique, None
    if saw_base:
        return None, NotVulnerableReason.BASE_TAG.value
    if saw_relative_refs:
        return None, NotVulnerableReason.NO_REFLECTION.value
    return None, NotVulnerableReason.NO_RELATIVE_STYLESHEETS.value


def _exploit_round_trip_reflects(config: TargetConfig, technique: MutationTechnique) -> bool:
    """Does the exploit-shaped payload still reach a reflecting stylesheet
    response?  Its decoded form introduces slashes and braces the probe did
    not have."""
    seed = config.seed_url("http://gt.invalid")
    encoded = "%0A" + quote(_EXPLOIT_MARKER_TEXT, safe="")
    mutated = mutate(seed, technique, encoded, 20, config.seed_cookies)
    page_kind, _ = route_request(config, _raw_target_of(serialize_url(mutated.url)))
    if page_kind == "page" or (page_kind == "404" and config.error_page_has_refs):
        relative_refs = [r for r in config.stylesheet_refs if is_relative_href(r)]
        for sheet in expand_stylesheet_targets(mutated, relative_refs):
            if _marker_reflects(config, technique, mutated, sheet):
                return True
    return False


def compute_ground_truth(
    config: TargetConfig,
    profiles: list[BrowserProfile],
    attacker_origin: str = "http://attacker.invalid",
) -> GroundTruth:
    technique, reason = _winning_technique(config)
    if technique is None:
        return GroundTruth(vulnerable=False, reason=reason, technique=None, profiles={})

    page_security = ResponseSecurity(
        content_type="text/html; charset=utf-8",
        nosniff=config.nosniff,
        x_frame_options=config.x_frame_options,
        x_ua_compatible=config.x_ua_compatible,
    )
    # the reflected "stylesheet" is the page or error document, never real css
    sheet_security = ResponseSecurity(
        content_type="text/html; charset=utf-8", nosniff=config.nosniff
    )
    victim_origin = "http://gt.invalid"
    style_fires = (
        config.sink_filter is SinkFilter.RAW
        and _exploit_round_trip_reflects(config, technique)
    )
    outcomes: dict[str, ProfileTruth] = {}
    for profile in profiles:
        unframed_mode = effective_mode(config.doctype, profile, False, page_security)
        unframed = (
            stylesheet_accepted(profile, unframed_mode, sheet_security) and style_fires
        )
        framed_works = False
        if not unframed and profile.supports_frame_override:
            if framing_allowed(config.x_frame_options, attacker_origin, victim_origin, profile):
                framed_mode = effective_mode(config.doctype, profile, True, page_security)
                framed_works = (
                    stylesheet_accepted(profile, framed_mode, sheet_security) and style_fires
                )
        outcomes[profile.engine.value] = ProfileTruth(
            exploitable=unframed or framed_works,
            framed=framed_works and not unframed,
        )
    return GroundTruth(
        vulnerable=True,
        reason=None,
        technique=technique.value,
        profiles=outcomes,
    )


def verdict_matches_truth(verdict, truth: GroundTruth) -> list[str]:
    """Mismatch descriptions between a scanner verdict and a ground truth."""
    problems: list[str] = []
    scanner_vulnerable = verdict.status in (ScanStatus.VULNERABLE, ScanStatus.EXPLOITABLE)
    if scanner_vulnerable != truth.vulnerable:
        problems.append(f"vulnerable: scanner={scanner_vulnerable} truth={truth.vulnerable}")
        return problems
    if not truth.vulnerable:
        if truth.reason and verdict.reason and verdict.reason.value != truth.reason:
            problems.append(f"reason: scanner={verdict.reason.value} truth={truth.reason}")
        return problems
    if truth.technique and verdict.technique and verdict.technique.value != truth.technique:
        problems.append(f"technique: scanner={verdict.technique.value} truth={truth.technique}")
    expected_exploitable = any(p.exploitable for p in truth.profiles.values())
    scanner_exploitable = verdict.status is ScanStatus.EXPLOITABLE
    if expected_exploitable != scanner_exploitable:
        problems.append(
            f"exploitable: scanner={scanner_exploitable} truth={expected_exploitable}"
        )
    for engine, expected in truth.profiles.items():
        got = next(
            (r for e, r in verdict.profile_results.items() if e.value == engine), None
        )
        if got is None:
            problems.append(f"{engine}: missing profile result")
            continue
        if got.exploitable != expected.exploitable:
            problems.append(
                f"{engine}: exploitable scanner={got.exploitable} truth={expected.exploitable}"
            )
        if got.exploitable and got.framed != expected.framed:
            problems.append(f"{engine}: framed scanner={got.framed} truth={expected.framed}")
    return problems


# --- serialization ---


def config_to_dict(config: TargetConfig) -> dict:
    return {
        "name": config.name,
        "routing": config.routing.value,
        "sinks": sorted(s.value for s in config.sinks),
        "page_path": config.page_path,
        "seed_path": config.seed_path,
        "seed_query": config.seed_query,
        "seed_cookies": dict(config.seed_cookies),
        "doctype": config.doctype,
        "emit_base_tag": config.emit_base_tag,
        "stylesheet_refs": list(config.stylesheet_refs),
        "nosniff": config.nosniff,
        "x_frame_options": config.x_frame_options,
        "x_ua_compatible": config.x_ua_compatible,
        "error_page_echoes_url": config.error_page_echoes_url,
        "error_page_has_refs": config.error_page_has_refs,
        "serve_real_stylesheets": config.serve_real_stylesheets,
        "sink_filter": config.sink_filter.value,
    }


def config_from_dict(data: dict) -> TargetConfig:
    return TargetConfig(
        name=data["name"],
        routing=Routing(data["routing"]),
        sinks=frozenset(Sink(s) for s in data["sinks"]),
        page_path=data.get("page_path", "/app/page.php"),
        seed_path=data.get("seed_path"),
        seed_query=data.get("seed_query"),
        seed_cookies=dict(data.get("seed_cookies", {})),
        doctype=data.get("doctype"),
        emit_base_tag=data.get("emit_base_tag", False),
        stylesheet_refs=list(data.get("stylesheet_refs", ["../style.css"])),
        nosniff=data.get("nosniff", False),
        x_frame_options=data.get("x_frame_options"),
        x_ua_compatible=data.get("x_ua_compatible"),
        error_page_echoes_url=data.get("error_page_echoes_url", True),
        error_page_has_refs=data.get("error_page_has_refs", True),
        serve_real_stylesheets=data.get("serve_real_stylesheets", False),
        sink_filter=SinkFilter(data.get("sink_filter", "raw")),
    )


def load_config(path: str) -> TargetConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def load_matrix(path: str) -> list[tuple[TargetConfig, GroundTruth]]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    out = []
    for entry in doc["configs"]:
        config = config_from_dict(entry)
        truth = GroundTruth(
            vulnerable=entry["ground_truth"]["vulnerable"],
            reason=entry["ground_truth"]["reason"],
            technique=entry["ground_truth"]["technique"],
            profiles={
                engine: ProfileTruth(**flags)
                for engine, flags in entry["ground_truth"]["profiles"].items()
            },
        )
        out.append((config, truth))
    return out


def dump_matrix(entries: list[tuple[TargetConfig, GroundTruth]], path: str) -> None:
    configs = []
    for config, truth in entries:
        data = config_to_dict(config)
        data["ground_truth"] = {
            "vulnerable": truth.vulnerable,
            "reason": truth.reason,
            "technique": truth.technique,
            "profiles": {
                engine: {"exploitable": p.exploitable, "framed": p.framed}
                for engine, p in truth.profiles.items()
            },
        }
        configs.append(data)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"configs": configs}, fh, indent=2)
        fh.write("\n")


# --- the shipped fixture matrix ---


def fixture_matrix(profiles: list[BrowserProfile]) -> list[tuple[TargetConfig, GroundTruth]]:
    """The labeled config matrix used by the end-to-end suite: routing x sink
    x doctype x defense, pruned to the combinations that exercise distinct
    verdict paths."""
    doctypes = {
        "nodoc": None,
        "quirks": DOCTYPE_QUIRKS,
        "standards": DOCTYPE_STANDARDS,
    }
    defenses = {
        "plain": {},
        "basetag": {"emit_base_tag": True},
        "nosniff": {"nosniff": True},
        "xfo-deny": {"x_frame_options": "DENY"},
        "xfo-typo": {"x_frame_options": "SOMEORIGIN"},
    }

    configs: list[TargetConfig] = []

    def add(name: str, **kwargs) -> None:
        configs.append(TargetConfig(name=name, **kwargs))

    # Canonical vulnerable shape (path-info rewriting, URL echo): every
    # defense crossed with every doctype.
    for doc_key, doctype in doctypes.items():
        for defense_key, overrides in defenses.items():
            add(
                f"pathinfo-url-{doc_key}-{defense_key}",
                routing=Routing.PATH_INFO_REWRITE,
                sinks=frozenset({Sink.ECHO_URL}),
                doctype=doctype,
                **overrides,
            )

    # Remaining routings, URL-echo sink, selected defenses.
    for routing, tag in [
        (Routing.EXACT_FILE, "exactfile"),
        (Routing.SEMICOLON_PARAMS, "semicolon"),
        (Routing.ENCODED_SLASH_DECODE, "encslash"),
    ]:
        seed_extra: dict = {}
        if routing is Routing.SEMICOLON_PARAMS:
            seed_extra = {"page_path": "/app/page.jsp", "seed_path": "/app/page.jsp;p1;p2"}
        if routing is Routing.ENCODED_SLASH_DECODE:
            # flat reference keeps the encoded-path payload inside the sheet
            # URL; refless error pages keep the simpler techniques out
            seed_extra = {"stylesheet_refs": ["style.css"], "error_page_has_refs": False}
        for doc_key, doctype in doctypes.items():
            for defense_key in ("plain", "nosniff"):
                add(
                    f"{tag}-url-{doc_key}-{defense_key}",
                    routing=routing,
                    sinks=frozenset({Sink.ECHO_URL}),
                    doctype=doctype,
                    **defenses[defense_key],
                    **seed_extra,
                )

    # Query-value reflection through an encoded "?" (decode-then-route); the
    # silent error pages keep the earlier techniques from reflecting first.
    for doc_key, doctype in doctypes.items():
        add(
            f"encslash-query-{doc_key}-plain",
            routing=Routing.ENCODED_SLASH_DECODE,
            sinks=frozenset({Sink.ECHO_QUERY_VALUES}),
            seed_query="k1=v1&k2=v2",
            stylesheet_refs=["style.css"],
            doctype=doctype,
            error_page_echoes_url=False,
        )

    # Cookie reflection.
    for doc_key, doctype in doctypes.items():
        add(
            f"pathinfo-cookie-{doc_key}-plain",
            routing=Routing.PATH_INFO_REWRITE,
            sinks=frozenset({Sink.ECHO_COOKIE_VALUES}),
            seed_cookies={"sid": "abc123", "lang": "en"},
            doctype=doctype,
        )

    # Referrer reflection.
    add(
        "pathinfo-referrer-quirks-plain",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_REFERRER}),
        doctype=DOCTYPE_QUIRKS,
    )

    # Path parameters after the script segment (slash-separated).
    add(
        "pathinfo-url-params-quirks-plain",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_URL}),
        seed_path="/app/page.php/p1/p2",
        doctype=DOCTYPE_QUIRKS,
    )

    # True negatives: no sinks at all, and sinks that drop or sanitize.
    add(
        "pathinfo-nosinks-quirks-plain",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset(),
        doctype=DOCTYPE_QUIRKS,
    )
    add(
        "pathinfo-url-quirks-dropfilter",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_QUIRKS,
        sink_filter=SinkFilter.DROP,
        error_page_echoes_url=False,
    )
    add(
        "pathinfo-url-quirks-sanitized",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_QUIRKS,
        sink_filter=SinkFilter.SANITIZE,
    )

    # No relative stylesheets: absolute and root-relative references only.
    add(
        "pathinfo-url-quirks-absrefs",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_QUIRKS,
        stylesheet_refs=["/static/style.css", "http://cdn.invalid/s.css"],
    )

    # Error pages carry the attack when routing rejects the mutated URL.
    add(
        "exactfile-url-quirks-noerrorecho",
        routing=Routing.EXACT_FILE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_QUIRKS,
        error_page_echoes_url=False,
    )
    add(
        "exactfile-url-quirks-norefs404",
        routing=Routing.EXACT_FILE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_QUIRKS,
        error_page_has_refs=False,
    )

    # Real stylesheet served at the canonical location (no reflection there).
    add(
        "encslash-url-quirks-realcss",
        routing=Routing.ENCODED_SLASH_DECODE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_QUIRKS,
        stylesheet_refs=["style.css"],
        serve_real_stylesheets=True,
        error_page_echoes_url=False,
        error_page_has_refs=False,
    )

    # X-UA-Compatible pins the document mode against the framing override.
    add(
        "pathinfo-url-standards-xuacompat",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_STANDARDS,
        x_ua_compatible="IE=edge",
    )
    # ... but it is irrelevant when the doctype is quirky to begin with.
    add(
        "pathinfo-url-quirks-xuacompat",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_QUIRKS,
        x_ua_compatible="IE=edge",
    )
    # Defenses stacked: standards doctype plus frame denial.
    add(
        "pathinfo-url-standards-deny-combo",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_STANDARDS,
        x_frame_options="DENY",
        nosniff=True,
    )
    # ALLOW-FROM admits or blocks by origin membership.
    add(
        "pathinfo-url-standards-allowfrom-attacker",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_STANDARDS,
        x_frame_options="ALLOW-FROM http://attacker.invalid",
    )
    add(
        "pathinfo-url-standards-allowfrom-other",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_STANDARDS,
        x_frame_options="ALLOW-FROM http://partner.invalid",
    )
    # Mixed references: the absolute one cannot reflect, the relative can.
    add(
        "pathinfo-url-quirks-mixedrefs",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_URL}),
        doctype=DOCTYPE_QUIRKS,
        stylesheet_refs=["/static/reset.css", "../style.css"],
    )
    # Cookie flavor of the nosniff asymmetry.
    add(
        "pathinfo-cookie-quirks-nosniff",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_COOKIE_VALUES}),
        seed_cookies={"sid": "abc123"},
        doctype=DOCTYPE_QUIRKS,
        nosniff=True,
    )
    # Sanitizing sink on the query channel.
    add(
        "encslash-query-quirks-sanitized",
        routing=Routing.ENCODED_SLASH_DECODE,
        sinks=frozenset({Sink.ECHO_QUERY_VALUES}),
        seed_query="k1=v1",
        stylesheet_refs=["style.css"],
        doctype=DOCTYPE_QUIRKS,
        error_page_echoes_url=False,
        sink_filter=SinkFilter.SANITIZE,
    )
    # Different script extension on the decode-then-route flavor.
    add(
        "encslash-aspx-quirks-plain",
        routing=Routing.ENCODED_SLASH_DECODE,
        sinks=frozenset({Sink.ECHO_URL}),
        page_path="/dir/page.aspx",
        stylesheet_refs=["style.css"],
        doctype=DOCTYPE_QUIRKS,
        error_page_has_refs=False,
    )
    # Deep directory with a reference climbing two levels.
    add(
        "pathinfo-url-quirks-deep",
        routing=Routing.PATH_INFO_REWRITE,
        sinks=frozenset({Sink.ECHO_URL}),
        page_path="/a/b/c/page.php",
        stylesheet_refs=["../../deep.css"],
        doctype=DOCTYPE_QUIRKS,
    )

    return [(config, compute_ground_truth(config, profiles)) for config in configs]
