"""Rewrite tests/golden/*.json from the current engine.

Run after an intentional change to report contents; review the diff before
committing. Uses the installed ``supercontact`` CLI in a subprocess so the
files are exactly what a user would see on stdout.
"""
import subprocess
import sys
from pathlib import Path

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"
RUNS = [("invariants", 2), ("invariants", 3), ("h1", 2), ("h1", 3), ("h1", 4), ("h1", 5)]


def main() -> int:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    status = 0
    for kind, n in RUNS:
        p = subprocess.run([sys.executable, "-m", "supercontact.cli", "report", "--kind", kind,
                            "--n", str(n), "--json"], capture_output=True, text=True)
        target = GOLDEN / f"{kind}_n{n}.json"
        if p.returncode != 0:
            print(f"{target.name}: exit {p.returncode}, not written\n{p.stderr}", file=sys.stderr)
            status = 1
            continue
        changed = not target.exists() or target.read_text() != p.stdout
        target.write_text(p.stdout)
        print(f"{target.name}: {'updated' if changed else 'unchanged'}")
    return status


if __name__ == "__main__":
    sys.exit(main())
