#!/usr/bin/env python3
"""Run the scanner against the committed mock matrix over loopback HTTP and
print a verdict-vs-ground-truth table.

Usage: python scripts/run_fixture_matrix.py [--delay-ms N]
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from rposcan.httpclient import RateLimitedClient, RecordingClient, RequestsClient  # noqa: E402
from rposcan.mock_target import load_matrix, serve, verdict_matches_truth  # noqa: E402
from rposcan.rendering import default_profiles  # noqa: E402
from rposcan.scanning import ScanConfig, scan_page, verify_exploitable  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--delay-ms", type=int, default=10)
    args = parser.parse_args()

    matrix_path = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "mock_matrix.json"
    entries = load_matrix(str(matrix_path))
    profiles = default_profiles()
    delay = args.delay_ms / 1000.0
    recorder = RecordingClient(RequestsClient(timeout=5))
    client = RateLimitedClient(recorder, delay)
    config = ScanConfig(per_host_delay=delay, profiles=tuple(profiles))

    mismatched = 0
    started = time.monotonic()
    print(f"{'config':<42} {'verdict':<16} {'technique':<20} match")
    for target, truth in entries:
        handle = serve(target, port=0)
        try:
            seed = target.seed_url(f"http://127.0.0.1:{handle.port}")
            verdict = scan_page(seed, target.seed_cookies, client, config)
            verdict = verify_exploitable(verdict, client, config)
        finally:
            handle.shutdown()
        problems = verdict_matches_truth(verdict, truth)
        status = verdict.status.value
        if verdict.reason:
            status += f"({verdict.reason.value})"
        technique = verdict.technique.value if verdict.technique else "-"
        flag = "ok" if not problems else "MISMATCH " + "; ".join(problems)
        if problems:
            mismatched += 1
        print(f"{target.name:<42} {status:<16} {technique:<20} {flag}")
    elapsed = time.monotonic() - started
    print(
        f"\n{len(entries)} configs, {mismatched} mismatches, "
        f"{len(recorder.exchanges)} requests, {elapsed:.1f}s"
    )
    return 1 if mismatched else 0


if __name__ == "__main__":
    sys.exit(main())
