"""Regenerate the golden prompt files under tests/goldens/.

The goldens freeze the rendered bytes of every stage template at 4, 8 and
12 shots for one fixed binding set (defined once in tests/helpers.py). Run
from the repository root:

    python scripts/make_goldens.py

Inspect the diff before committing; the byte-exactness tests compare
against these files.
"""

from __future__ import annotations

import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

from kg_reason.prompts import render_prompt  # noqa: E402

from helpers import GOLDEN_BINDINGS, GOLDENS  # noqa: E402


def main() -> None:
    GOLDENS.mkdir(parents=True, exist_ok=True)
    for name, (template, bindings) in GOLDEN_BINDINGS.items():
        for shots in (4, 8, 12):
            path = GOLDENS / f"{name}_{shots}shot.txt"
            path.write_bytes(render_prompt(template, bindings, shots).encode("utf-8"))
            print(f"wrote {path}")


if __name__ == "__main__":
    main()
