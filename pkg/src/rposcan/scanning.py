"""Per-page scan pipeline: mutate, fetch, detect reflection, judge exploitability.

A page is scanned technique by technique (newline variant inside technique)
until one mutated fetch produces a stylesheet response that reflects the
probe nonce.  Verification then swaps in the exploit payload and asks the
rendering model, per browser profile, whether the reflected style would
actually be parsed and fire.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .httpclient import HttpRequest, HttpResponse, NetworkError
from .mutations import applicable_techniques, expand_stylesheet_targets, mutate, MutationTechnique
from .pages import analyze_html, has_blocking_base
from .payloads import (
    NewlineVariant,
    Nonce,
    build_exploit_payload,
    build_reflection_payload,
    encode_exploit,
    find_reflection,
    generate_nonce,
)
from .rendering import (
    BrowserProfile,
    Engine,
    RenderingMode,
    ResponseSecurity,
    css_would_fire,
    default_profiles,
    effective_mode,
    framing_allowed,
    stylesheet_accepted,
)
from .urls import WebUrl, serialize_url

DEFAULT_BLOCKED_SUFFIXES = (".gov", ".mil", ".army", ".navy", ".airforce")


class ScanStatus(Enum):
    NOT_VULNERABLE = "not_vulnerable"
    VULNERABLE = "vulnerable"
    EXPLOITABLE = "exploitable"


class NotVulnerableReason(Enum):
    BASE_TAG = "base_tag"
    NO_RELATIVE_STYLESHEETS = "no_relative_stylesheets"
    NO_REFLECTION = "no_reflection"
    FETCH_FAILED = "fetch_failed"


class Blocker(Enum):
    BASE_TAG = "base_tag"
    NOSNIFF = "nosniff"
    X_FRAME_OPTIONS = "x_frame_options"
    STANDARDS_MODE = "standards_mode"
    X_UA_COMPATIBLE = "x_ua_compatible"


@dataclass
class ScanConfig:
    slash_padding: int = 20
    newline_variants: tuple[NewlineVariant, ...] = (
        NewlineVariant.LF,
        NewlineVariant.FF,
        NewlineVariant.CR,
    )
    per_host_delay: float = 1.0
    max_concurrent_hosts: int = 4
    request_timeout: float = 10.0
    blocked_suffixes: tuple[str, ...] = DEFAULT_BLOCKED_SUFFIXES
    profiles: tuple[BrowserProfile, ...] = ()
    seed: int = 0
    closer_count: int = 20
    attacker_origin: str = "http://attacker.invalid"
    user_agent: str = "rposcan/0.1"

    def __post_init__(self) -> None:
        if self.slash_padding < 1:
            raise ValueError("slash_padding must be >= 1")
        if not self.profiles:
            self.profiles = tuple(default_profiles())


@dataclass
class ProfileResult:
    exploitable: bool
    framed: bool
    blockers: list[Blocker] = field(default_factory=list)


@dataclass
class ScanVerdict:
    status: ScanStatus
    page_url: WebUrl
    reason: NotVulnerableReason | None = None
    technique: MutationTechnique | None = None
    newline: NewlineVariant | None = None
    reflected_stylesheet_url: str | None = None
    profile_results: dict[Engine, ProfileResult] = field(default_factory=dict)
    cookies: dict[str, str] = field(default_factory=dict)
    nonce: Nonce | None = None
    errors: list[str] = field(default_factory=list)


def ethics_gate(url: WebUrl, config: ScanConfig) -> bool:
    """False iff the host sits under one of the blocked suffixes."""
    host = url.host.lower().rstrip(".")
    for suffix in config.blocked_suffixes:
        suffix = suffix.lower()
        if not suffix.startswith("."):
            suffix = "." + suffix
        if host.endswith(suffix) or host == suffix[1:]:
            return False
    return True


def _fetch(client, url_text: str, errors: list[str], *, referer: str | None = None,
           cookies: dict[str, str] | None = None) -> HttpResponse | None:
    headers = {"Referer": referer} if referer else {}
    try:
        return client.fetch(HttpRequest(url=url_text, headers=headers, cookies=cookies or {}))
    except NetworkError as exc:
        errors.append(f"{url_text}: {exc}")
        return None


def scan_page(
    url: WebUrl,
    cookies: dict[str, str],
    client,
    config: ScanConfig,
) -> ScanVerdict:
    """Try every applicable technique until a stylesheet response reflects the
    probe; base-tag responses disqualify the technique outright."""
    nonce = generate_nonce(config.seed)
    errors: list[str] = []
    saw_base = False
    saw_relative_refs = False
    fetched_anything = False

    for technique in applicable_techniques(url, cookies):
        for newline in config.newline_variants:
            payload = build_reflection_payload(nonce, newline)
            mutated = mutate(url, technique, payload, config.slash_padding, cookies)
            request_cookies = {**cookies, **mutated.extra_cookies}
            page_resp = _fetch(client, serialize_url(mutated.url), errors, cookies=request_cookies)
            if page_resp is None:
                continue
            fetched_anything = True
            doc = analyze_html(page_resp.body)
            if has_blocking_base(doc):
                saw_base = True
                break  # the base tag is payload-independent; next technique
            relative_refs = doc.relative_refs
            if not relative_refs:
                continue
            saw_relative_refs = True
            for sheet in expand_stylesheet_targets(mutated, relative_refs):
                sheet_resp = _fetch(
                    client,
                    serialize_url(sheet),
                    errors,
                    referer=serialize_url(mutated.url),
                    cookies=request_cookies,
                )
                if sheet_resp is None:
                    continue
                if find_reflection(sheet_resp.body, nonce):
                    return ScanVerdict(
                        status=ScanStatus.VULNERABLE,
                        page_url=url,
                        technique=technique,
                        newline=newline,
                        reflected_stylesheet_url=serialize_url(sheet),
                        cookies=dict(cookies),
                        nonce=nonce,
                        errors=errors,
                    )

    if saw_base:
        reason = NotVulnerableReason.BASE_TAG
    elif saw_relative_refs:
        reason = NotVulnerableReason.NO_REFLECTION
    elif fetched_anything:
        reason = NotVulnerableReason.NO_RELATIVE_STYLESHEETS
    else:
        reason = NotVulnerableReason.FETCH_FAILED
    return ScanVerdict(
        status=ScanStatus.NOT_VULNERABLE,
        page_url=url,
        reason=reason,
        cookies=dict(cookies),
        nonce=nonce,
        errors=errors,
    )


def _evaluate_profile(
    profile: BrowserProfile,
    framed: bool,
    doctype: str | None,
    page_security: ResponseSecurity,
    sheet_security: ResponseSecurity,
    sheet_body: bytes,
    nonce_url: str,
    base_present: bool,
    attacker_origin: str,
    victim_origin: str,
) -> ProfileResult:
    blockers: list[Blocker] = []
    if framed and not framing_allowed(
        page_security.x_frame_options, attacker_origin, victim_origin, profile
    ):
        return ProfileResult(exploitable=False, framed=True, blockers=[Blocker.X_FRAME_OPTIONS])
    if base_present and profile.base_tag_effective:
        blockers.append(Blocker.BASE_TAG)
    mode = effective_mode(doctype, profile, framed, page_security)
    accepted = stylesheet_accepted(profile, mode, sheet_security)
    if not accepted:
        if mode is RenderingMode.STANDARDS:
            blockers.append(Blocker.STANDARDS_MODE)
            if framed and profile.supports_frame_override and page_security.x_ua_compatible is not None:
                blockers.append(Blocker.X_UA_COMPATIBLE)
        elif sheet_security.nosniff and profile.respects_nosniff:
            blockers.append(Blocker.NOSNIFF)
    exploitable = accepted and not blockers and css_would_fire(sheet_body, nonce_url)
    return ProfileResult(exploitable=exploitable, framed=framed, blockers=blockers)


def verify_exploitable(verdict: ScanVerdict, client, config: ScanConfig) -> ScanVerdict:
    """Re-run the winning technique with the exploit payload and judge it
    against every profile (the frame-override profile also framed)."""
    if verdict.status is not ScanStatus.VULNERABLE:
        return verdict
    assert verdict.technique is not None and verdict.newline is not None
    assert verdict.nonce is not None

    nonce_url = f"http://css-canary.invalid/{verdict.nonce.value}"
    exploit = build_exploit_payload(nonce_url, config.closer_count)
    encoded = encode_exploit(exploit, verdict.newline)
    mutated = mutate(
        verdict.page_url, verdict.technique, encoded, config.slash_padding, verdict.cookies
    )
    errors = verdict.errors
    request_cookies = {**verdict.cookies, **mutated.extra_cookies}
    page_resp = _fetch(client, serialize_url(mutated.url), errors, cookies=request_cookies)
    if page_resp is None:
        errors.append("exploit page fetch failed; verdict left unverified")
        return verdict
    doc = analyze_html(page_resp.body)
    page_security = ResponseSecurity.from_headers(page_resp.headers)
    base_present = has_blocking_base(doc)

    sheet_resp = None
    for sheet in expand_stylesheet_targets(mutated, doc.relative_refs):
        candidate = _fetch(
            client,
            serialize_url(sheet),
            errors,
            referer=serialize_url(mutated.url),
            cookies=request_cookies,
        )
        if candidate is not None and find_reflection(candidate.body, verdict.nonce):
            sheet_resp = candidate
            break
    if sheet_resp is None:
        # the bulkier exploit payload did not survive the round trip (extra
        # path depth after decoding, stricter filtering, ...): vulnerable,
        # but not exploitable for any profile
        errors.append("exploit payload did not reflect")
        results = {
            profile.engine: ProfileResult(exploitable=False, framed=False)
            for profile in config.profiles
        }
        return replace(verdict, profile_results=results)

    sheet_security = ResponseSecurity.from_headers(sheet_resp.headers)
    victim_origin = verdict.page_url.origin
    results: dict[Engine, ProfileResult] = {}
    for profile in config.profiles:
        result = _evaluate_profile(
            profile,
            False,
            doc.doctype,
            page_security,
            sheet_security,
            sheet_resp.body,
            nonce_url,
            base_present,
            config.attacker_origin,
            victim_origin,
        )
        if not result.exploitable and profile.supports_frame_override:
            framed = _evaluate_profile(
                profile,
                True,
                doc.doctype,
                page_security,
                sheet_security,
                sheet_resp.body,
                nonce_url,
                base_present,
                config.attacker_origin,
                victim_origin,
            )
            if framed.exploitable:
                result = framed
            else:
                merged = result.blockers + [b for b in framed.blockers if b not in result.blockers]
                result = ProfileResult(exploitable=False, framed=False, blockers=merged)
        results[profile.engine] = result

    status = (
        ScanStatus.EXPLOITABLE
        if any(r.exploitable for r in results.values())
        else ScanStatus.VULNERABLE
    )
    return replace(verdict, status=status, profile_results=results)
