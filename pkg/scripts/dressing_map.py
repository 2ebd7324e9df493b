"""Probe gain versus dressing Rabi frequency over a range of dressing detunings.

For each Delta_D the gain at a fixed two-photon detuning is evaluated on
Omega_D/Omega_0 in [0, 0.2]; the table lists the location of the maximum and
whether the curve rises monotonically.

    python scripts/dressing_map.py --start -1100 --stop -940 --step 5 --delta -87
"""
import argparse
import dataclasses

import numpy as np

from dressedfwm.config import load_config
from dressedfwm.propagation import build_medium, matrix_exponential, medium_generator, propagate_carrier

MHz = 2 * np.pi * 1e6


def gain(cfg, **point):
    drives = cfg.drive_parameters(**point)
    medium = build_medium(cfg.scheme(), drives, cfg.doppler.grid())
    return propagate_carrier(matrix_exponential(medium_generator(medium), drives.length)).gain_a


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--start", type=float, default=-1100.0, help="first Delta_D in MHz")
    ap.add_argument("--stop", type=float, default=-940.0)
    ap.add_argument("--step", type=float, default=5.0)
    ap.add_argument("--delta", type=float, default=-87.0, help="two-photon detuning in MHz")
    ap.add_argument("--points", type=int, default=121, help="velocity classes")
    args = ap.parse_args()

    cfg = load_config("fig3b")
    cfg = dataclasses.replace(cfg, doppler=dataclasses.replace(cfg.doppler, points=args.points))
    ratios = np.round(np.linspace(0.0, 0.2, 21), 3)
    print(f"{'Delta_D/MHz':>12} {'argmax':>7} {'G_max':>7} {'G(0.2)':>7}  monotone")
    for dd in np.arange(args.start, args.stop + 0.5 * args.step, args.step):
        g = np.array([gain(cfg, dressing_ratio=r, dressing_detuning=dd * MHz,
                           two_photon_detuning=args.delta * MHz) for r in ratios])
        i = int(np.argmax(g))
        print(f"{dd:12.1f} {ratios[i]:7.2f} {g[i]:7.3f} {g[-1]:7.3f}  {bool(np.all(np.diff(g) > 0))}", flush=True)


if __name__ == "__main__":
    main()
