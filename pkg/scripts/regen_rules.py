#!/usr/bin/env python3
"""Regenerate the shipped transvection-reduction rule files.

The rules are discovered by exact symbolic computation and written to
src/sympelem/data/s_rules_n<k>.json; tests/test_rewrite.py re-discovers
them and fails if the shipped files drift.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from sympelem.rewrite import _DATA_DIR, discover_s_rules  # noqa: E402


def main():
    _DATA_DIR.mkdir(exist_ok=True)
    for n in (2, 3, 4):
        rules = discover_s_rules(n)
        path = _DATA_DIR / f"s_rules_n{n}.json"
        path.write_text(json.dumps(
            {f"{i},{j}": [list(g), list(h), c]
             for (i, j), (g, h, c) in sorted(rules.items())},
            indent=0, sort_keys=True))
        print(f"n={n}: {len(rules)} rules -> {path}")


if __name__ == "__main__":
    main()
