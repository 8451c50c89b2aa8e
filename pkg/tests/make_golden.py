"""Regenerate the golden files: python3 tests/make_golden.py"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from golden_runs import GOLDEN  # noqa: E402

from ratmoore.cli import main  # noqa: E402

HERE = Path(__file__).parent / "golden"

if __name__ == "__main__":
    for name, argv in GOLDEN.items():
        out = HERE / name
        code = main(argv + ["--out", str(out)])
        print(name, code)
