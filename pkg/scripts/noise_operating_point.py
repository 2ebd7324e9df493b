"""Squeezing and Duan bandwidths versus two-photon detuning.

Scans the probe detuning and reports, for each value, the peak gain, the upper
edge of the sub-shot-noise intensity-difference band, the upper edge of the
Duan < 2 band and the low-frequency squeezing, with and without dressing.

    python scripts/noise_operating_point.py --start -100 --stop -64 --step 3 [--no-doppler]
"""
import argparse
import dataclasses

import numpy as np

from dressedfwm.cli import run
from dressedfwm.config import SweepAxis, load_config

MHz = 2 * np.pi * 1e6


def band_edge(f, y, bound):
    below = y < bound
    if not below[0]:
        return 0.0
    if below.all():
        return np.inf
    k = int(np.argmin(below))
    return f[k - 1] + (bound - y[k - 1]) * (f[k] - f[k - 1]) / (y[k] - y[k - 1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--start", type=float, default=-100.0)
    ap.add_argument("--stop", type=float, default=-64.0)
    ap.add_argument("--step", type=float, default=3.0)
    ap.add_argument("--diffusion", choices=("einstein", "identity"), default="einstein")
    ap.add_argument("--no-doppler", action="store_true")
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    deltas = np.arange(args.start, args.stop + 0.5 * args.step, args.step)
    axis = SweepAxis("two_photon_detuning", deltas[0] * MHz, deltas[-1] * MHz, len(deltas))
    print(f"{'config':>6} {'delta/MHz':>9} {'gain':>6} {'sq edge':>8} {'Duan edge':>9} {'dI-^2(1MHz)/dB':>15}")
    for name in ("fig5a", "fig5b"):
        cfg = load_config(name)
        cfg = dataclasses.replace(
            cfg,
            observables=("gain", "intensity_noise", "duan"),
            diffusion=args.diffusion,
            doppler=dataclasses.replace(cfg.doppler, enabled=not args.no_doppler),
            axes=(axis,) + cfg.axes,
        )
        res = run(cfg, threads=args.threads)
        f = np.unique(res.column("frequency_MHz"))
        n = len(f)
        for i, d in enumerate(deltas):
            rows = slice(i * n, (i + 1) * n)
            minus = res.column("noise_diff")[rows]
            duan = res.column("duan")[rows]
            k1 = int(np.argmin(np.abs(f - 1.0)))
            print(f"{name:>6} {d:9.1f} {res.column('gain_probe')[rows][0]:6.3f} "
                  f"{band_edge(f, minus, 1.0):8.1f} {band_edge(f, duan, 2.0):9.1f} "
                  f"{10 * np.log10(minus[k1]):15.2f}", flush=True)


if __name__ == "__main__":
    main()
