#!/usr/bin/env python3
"""Regenerate tests/fixtures/mock_matrix.json (configs + ground-truth labels)."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from rposcan.mock_target import dump_matrix, fixture_matrix  # noqa: E402
from rposcan.rendering import default_profiles  # noqa: E402


def main() -> None:
    target = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "mock_matrix.json"
    entries = fixture_matrix(default_profiles())
    dump_matrix(entries, str(target))
    vulnerable = sum(1 for _, t in entries if t.vulnerable)
    print(f"wrote {target}: {len(entries)} configs ({vulnerable} vulnerable)")


if __name__ == "__main__":
    main()
