#!/usr/bin/env python3
"""Regenerate the bundled demo mock-LLM fixture file.

Run after changing prompt templates or the demo wiring:
    python tools/gen_demo_fixtures.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from factforge.demo import fixture_table  # noqa: E402


def main() -> None:
    out = os.path.join(os.path.dirname(__file__), "..",
                       "src", "factforge", "data", "demo", "llm_fixtures.json")
    table = fixture_table()
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(table, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(table)} fixture entries to {os.path.normpath(out)}")


if __name__ == "__main__":
    main()
