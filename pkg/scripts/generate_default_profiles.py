#!/usr/bin/env python3
"""Regenerate src/rposcan/data/default_profiles.json from the code constants.

The shipped profile file spells the quirks lists out in full so it is
self-describing; this script keeps it in sync with rendering.py.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from rposcan.rendering import (  # noqa: E402
    QUIRKS_PREFIXES_WHEN_NO_SYSTEM_ID,
    QUIRKS_PUBLIC_ID_PREFIXES,
    QUIRKS_PUBLIC_IDS_EXACT,
)

BEHAVIORS = {
    # engine: (respects_nosniff, supports_frame_override,
    #          honors_frame_ancestors, base_tag_effective)
    "chrome": (False, False, True, True),
    "opera": (False, False, True, True),
    "safari": (False, False, True, True),
    "firefox": (True, False, True, True),
    "edge": (True, False, True, True),
    "internet_explorer": (True, True, False, False),
}


def main() -> None:
    profiles = []
    for engine, flags in BEHAVIORS.items():
        nosniff, override, ancestors, base_tag = flags
        profiles.append(
            {
                "engine": engine,
                "respects_nosniff": nosniff,
                "supports_frame_override": override,
                "honors_frame_ancestors": ancestors,
                "base_tag_effective": base_tag,
                "quirks_public_id_prefixes": list(QUIRKS_PUBLIC_ID_PREFIXES),
                "quirks_public_ids_exact": list(QUIRKS_PUBLIC_IDS_EXACT),
                "quirks_prefixes_when_no_system_id": list(QUIRKS_PREFIXES_WHEN_NO_SYSTEM_ID),
                "extra_quirks_public_ids": [],
                "quirks_public_id_exceptions": [],
            }
        )
    out = pathlib.Path(__file__).resolve().parents[1] / "src" / "rposcan" / "data"
    out.mkdir(parents=True, exist_ok=True)
    target = out / "default_profiles.json"
    target.write_text(json.dumps({"profiles": profiles}, indent=2) + "\n")
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
