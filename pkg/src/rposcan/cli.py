"""Command-line entry points: scan, summarize, mock serve, doctype classify."""

from __future__ import annotations

import argparse
import sys
import time

from .mock_target import load_config, serve
from .rendering import RenderingMode, classify_doctype, default_profiles, load_profiles
from .reports import read_records, render_csv, render_table, run_scan, summarize, write_records
from .scanning import ScanConfig


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rposcan")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="scan pages from a seed file")
    scan.add_argument("--seed", required=True, help="file with one URL per line")
    scan.add_argument("--cookies", help="per-site cookie file (host<TAB>k=v;k2=v2)")
    scan.add_argument("--out", help="records file (json lines); default stdout")
    scan.add_argument("--profiles", help="browser profile JSON file")
    scan.add_argument("--slash-padding", type=int, default=20)
    scan.add_argument("--delay", type=int, default=1000, help="per-host delay in ms")
    scan.add_argument("--max-hosts", type=int, default=4)
    scan.add_argument("--timeout", type=int, default=10000, help="request timeout in ms")
    scan.add_argument("--seed-rng", type=int, default=0, help="nonce RNG seed")
    scan.add_argument(
        "--allow-suffix",
        action="append",
        default=[],
        metavar="SUFFIX",
        help="remove a suffix from the blocklist (lab use against loopback hosts only)",
    )

    summ = sub.add_parser("summarize", help="summarize a records file")
    summ.add_argument("--in", dest="infile", required=True)
    summ.add_argument("--format", choices=("table", "csv"), default="table")

    mock = sub.add_parser("mock", help="mock target server")
    mock_sub = mock.add_subparsers(dest="mock_command", required=True)
    mock_serve = mock_sub.add_parser("serve", help="serve one target config")
    mock_serve.add_argument("--config", required=True, help="target config JSON file")
    mock_serve.add_argument("--port", type=int, default=8080)

    doctype = sub.add_parser("doctype", help="doctype utilities")
    doctype_sub = doctype.add_subparsers(dest="doctype_command", required=True)
    classify = doctype_sub.add_parser("classify", help="classify a doctype per engine")
    group = classify.add_mutually_exclusive_group(required=True)
    group.add_argument("--doctype", help="doctype text; use '(none)' for no doctype")
    group.add_argument("--stdin", action="store_true", help="read doctypes from stdin")
    classify.add_argument("--profile", help="restrict to one engine name")

    return parser


def _cmd_scan(args) -> int:
    try:
        profiles = load_profiles(args.profiles) if args.profiles else default_profiles()
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot load profiles: {exc}", file=sys.stderr)
        return 2
    blocked = list(ScanConfig().blocked_suffixes)
    for suffix in args.allow_suffix:
        suffix = suffix if suffix.startswith(".") else "." + suffix
        if suffix in blocked:
            blocked.remove(suffix)
    config = ScanConfig(
        slash_padding=args.slash_padding,
        per_host_delay=args.delay / 1000.0,
        max_concurrent_hosts=args.max_hosts,
        request_timeout=args.timeout / 1000.0,
        blocked_suffixes=tuple(blocked),
        profiles=tuple(profiles),
        seed=args.seed_rng,
    )
    try:
        records = run_scan(args.seed, config, cookie_file=args.cookies)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                count = write_records(records, fh)
        else:
            count = write_records(records, sys.stdout)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {count} records", file=sys.stderr)
    return 0


def _cmd_summarize(args) -> int:
    try:
        records = read_records(args.infile)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    table = summarize(records)
    if args.format == "csv":
        print(render_csv(table))
    else:
        print(render_table(table))
    return 0


def _cmd_mock_serve(args) -> int:
    try:
        config = load_config(args.config)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    handle = serve(config, args.port)
    print(
        f"serving {config.name!r} on http://127.0.0.1:{handle.port}{config.page_path}",
        flush=True,
    )
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        handle.shutdown()
    return 0


def _cmd_doctype_classify(args) -> int:
    profiles = default_profiles()
    if args.profile:
        profiles = [p for p in profiles if p.engine.value == args.profile]
        if not profiles:
            print(f"error: unknown profile {args.profile!r}", file=sys.stderr)
            return 2
    if args.stdin:
        doctypes = [line.rstrip("\n") for line in sys.stdin if line.strip()]
    else:
        doctypes = [args.doctype]
    for text in doctypes:
        doctype = None if text.strip() in ("", "(none)") else text
        shown = "(none)" if doctype is None else doctype
        verdicts = []
        for profile in profiles:
            mode = classify_doctype(doctype, profile)
            label = "quirks" if mode is RenderingMode.QUIRKS else "standards"
            verdicts.append(f"{profile.engine.value}={label}")
        print(f"{shown}\t" + " ".join(verdicts))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "scan":
        return _cmd_scan(args)
    if args.command == "summarize":
        return _cmd_summarize(args)
    if args.command == "mock":
        return _cmd_mock_serve(args)
    if args.command == "doctype":
        return _cmd_doctype_classify(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
