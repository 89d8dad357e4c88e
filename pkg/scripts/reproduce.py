#!/usr/bin/env python3
"""Regenerate every acceptance artifact with fixed seeds.

Usage::

    python3 scripts/reproduce.py OUTDIR

Runs the gen, ip, specgram, fit, select and diag subcommands on the
N=500, L=120, period-30 datasets (seed 7) and writes a ``MANIFEST`` of
SHA-256 digests. Two runs must produce identical manifests.
"""
import argparse
import hashlib
import sys
import time
from pathlib import Path

from gapdmd.cli import main as gapdmd

DATA = ["--n", "500", "--len", "120", "--period", "30", "--seed", "7"]


def steps(out: Path):
    clean, noisy = out / "clean.gdmd", out / "noisy.gdmd"
    yield ["gen", *DATA, "--noise", "0", "-o", clean]
    yield ["gen", *DATA, "--noise", "1e-3", "-o", noisy]
    for tag, path in (("clean", clean), ("noisy", noisy)):
        yield ["ip", "-i", path, "--k-max", "60", "-o", out / f"ip_{tag}.csv", "--svg", out / f"ip_{tag}.svg"]
        yield ["ip", "-i", path, "--k-max", "60", "--method", "recursive", "-o", out / f"ip_{tag}_recursive.csv"]
        yield ["specgram", "-i", path, "--l-max", "50", "--k-max", "40", "--workers", "4",
               "-o", out / f"specgram_{tag}.csv", "--svg", out / f"specgram_{tag}.svg"]
        yield ["select", "--specgram", out / f"specgram_{tag}.csv", "-o", out / f"select_{tag}.json"]
    for n in (20, 31, 40):
        yield ["fit", "-i", clean, "--n", str(n), "-o", out / f"eig_n{n}.csv", "--coeffs", out / f"coeffs_n{n}.csv",
               "--svg", out / f"eig_n{n}.svg", "--quiet"]
    yield ["fit", "-i", clean, "--n", "31", "--modes", out / "modes_n31.gdmd", "-o", out / "eig_modes.csv"]
    yield ["diag", "-i", clean, "--k-max", "40", "-o", out / "conditioning.csv",
           "--prop-table", out / "sensitivity.csv", "--seed", "0"]


def manifest(out: Path) -> str:
    lines = []
    for path in sorted(p for p in out.iterdir() if p.is_file() and p.name != "MANIFEST"):
        lines.append(f"{hashlib.sha256(path.read_bytes()).hexdigest()}  {path.name}")
    return "\n".join(lines) + "\n"


def run(out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    for argv in steps(out):
        argv = [str(a) for a in argv]
        t0 = time.perf_counter()
        code = gapdmd(argv)
        print(f"[{time.perf_counter() - t0:6.2f}s] gapdmd {' '.join(argv)} -> {code}", file=sys.stderr)
        if code != 0:
            return code
    (out / "MANIFEST").write_text(manifest(out), encoding="utf-8")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("outdir", type=Path)
    sys.exit(run(parser.parse_args().outdir))
