"""Run every bundled figure config and write the tables to a directory.

    python scripts/reproduce_figures.py --out-dir figures [--threads 4] [--only fig2a fig5a]
"""
import argparse
import time
from pathlib import Path

from dressedfwm.cli import run, write_result
from dressedfwm.config import bundled_config_names, load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--only", nargs="*", help="subset of config names")
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.only or bundled_config_names():
        t0 = time.perf_counter()
        result = run(load_config(name), threads=args.threads)
        path = write_result(result, out / f"{name}.{args.format}", args.format)
        print(f"{name}: {len(result.rows)} rows -> {path} ({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
