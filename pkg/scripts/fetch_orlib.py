#!/usr/bin/env python3
"""Fetch the Ruspini-75 point set and write it as a two-column coordinate file.

The OR-Library copy is not reachable from every machine, so the points are
taken from the R ``cluster`` dataset bundled in the ``pydataset`` source
distribution (same 75 points, coordinates 4..117 by 4..156). ``pip download``
is used so nothing gets installed.

Bongartz-287 has no mirrored copy; if you have the file, pass it with
``--bongartz`` (any whitespace/comma separated file whose last two columns
are x y) and it will be normalised to the same two-column layout.

    python scripts/fetch_orlib.py --out tests/data
"""

from __future__ import annotations

import argparse
import csv
import io
import subprocess
import sys
import tarfile
import tempfile
from pathlib import Path

PYDATASET = "pydataset==0.2.0"
RUSPINI_MEMBER = "resources/rdata/csv/cluster/ruspini.csv"


def ruspini_points(workdir: Path) -> list[tuple[float, float]]:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", PYDATASET, "--no-deps", "--no-binary", ":all:",
         "-d", str(workdir), "-q"],
        check=True,
    )
    sdist = next(workdir.glob("pydataset-*.tar.gz"))
    with tarfile.open(sdist) as outer:
        inner = next(m for m in outer.getmembers() if m.name.endswith("resources.tar.gz"))
        with tarfile.open(fileobj=outer.extractfile(inner)) as res:
            member = next(m for m in res.getmembers() if m.name.endswith(RUSPINI_MEMBER))
            text = res.extractfile(member).read().decode()
    rows = list(csv.DictReader(io.StringIO(text)))
    return [(float(r["x"]), float(r["y"])) for r in rows]


def normalise(path: Path) -> list[tuple[float, float]]:
    pts = []
    for line in path.read_text().splitlines():
        parts = line.replace(",", " ").split()
        if len(parts) < 2:
            continue
        try:
            pts.append((float(parts[-2]), float(parts[-1])))
        except ValueError:
            continue  # header or comment
    return pts


def write_points(path: Path, pts, title: str) -> None:
    with path.open("w") as fh:
        fh.write(f"# {title}: {len(pts)} points\n")
        for x, y in pts:
            fh.write(f"{x:g} {y:g}\n")
    print(f"wrote {path} ({len(pts)} points)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("tests/data"))
    parser.add_argument("--bongartz", type=Path, help="local copy of the Bongartz-287 file")
    args = parser.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        pts = ruspini_points(Path(tmp))
    if len(pts) != 75:
        print(f"unexpected Ruspini size {len(pts)}", file=sys.stderr)
        return 1
    write_points(args.out / "ruspini75.txt", pts, "Ruspini")

    if args.bongartz is not None:
        pts = normalise(args.bongartz)
        if len(pts) != 287:
            print(f"warning: Bongartz file has {len(pts)} points, expected 287", file=sys.stderr)
        write_points(args.out / "bongartz287.txt", pts, "Bongartz")
    else:
        print("Bongartz-287 not fetched (no mirrored source); use --bongartz FILE")
    return 0


if __name__ == "__main__":
    sys.exit(main())
