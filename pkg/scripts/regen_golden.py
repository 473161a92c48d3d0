"""Regenerate the CLI golden files under tests/golden.

Run from the repository root after an intended change in report output,
then review the diff before committing.
"""

import io
import os
import sys

from telescoped.cli import run

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(ROOT, "tests"))

from golden_cases import CASES  # noqa: E402


def main():
    out_dir = os.path.join(ROOT, "tests", "golden")
    os.makedirs(out_dir, exist_ok=True)
    for name, argv, code in CASES:
        buf, err = io.StringIO(), io.StringIO()
        got = run(argv(os.path.join(ROOT, "data")), buf, err)
        if got != code:
            raise SystemExit(f"{name}: exit {got}, expected {code}: {err.getvalue()}")
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write(buf.getvalue())
        print(f"wrote {name}")


if __name__ == "__main__":
    main()
