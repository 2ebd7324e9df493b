"""Intensity-difference squeezing with Einstein versus identity diffusion.

Runs the undressed noise spectrum in both diffusion modes, Doppler-averaged
and for a single velocity class, and prints the spectra side by side together
with the smallest symplectic eigenvalue check of the identity mode.

    python scripts/diffusion_comparison.py [--config fig5a]
"""
import argparse
import dataclasses

import numpy as np

from dressedfwm.cli import run
from dressedfwm.config import load_config
from dressedfwm.noise import min_physicality_eigenvalue, output_covariance
from dressedfwm.propagation import build_medium, matrix_exponential, medium_generator, propagate_carrier


def spectrum(cfg, diffusion, doppler):
    cfg = dataclasses.replace(cfg, diffusion=diffusion,
                              doppler=dataclasses.replace(cfg.doppler, enabled=doppler))
    return run(cfg, threads=1)


def worst_eigenvalue(cfg, diffusion, doppler, freqs):
    drives = cfg.drive_parameters()
    grid = cfg.doppler.grid() if doppler else None
    medium = build_medium(cfg.scheme(), drives, grid, diffusion=diffusion)
    carrier = propagate_carrier(matrix_exponential(medium_generator(medium), drives.length))
    return min(min_physicality_eigenvalue(output_covariance(medium, w, carrier).V_out) for w in freqs)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="fig5a")
    args = ap.parse_args()
    cfg = load_config(args.config)
    freqs = cfg.axes[0].values
    for doppler in (True, False):
        e = spectrum(cfg, "einstein", doppler)
        i = spectrum(cfg, "identity", doppler)
        f = e.column("frequency_MHz")
        print(f"\n{'Doppler-averaged' if doppler else 'single velocity class'}")
        print(f"{'f/MHz':>7} {'einstein dI-^2/dB':>18} {'identity dI-^2/dB':>18}")
        for k in range(0, len(f), max(1, len(f) // 16)):
            print(f"{f[k]:7.2f} {e.column('noise_diff_dB')[k]:18.2f} {i.column('noise_diff_dB')[k]:18.2f}")
        for mode in ("einstein", "identity"):
            print(f"  min eigenvalue of V + i Omega ({mode}): {worst_eigenvalue(cfg, mode, doppler, freqs):.3e}")


if __name__ == "__main__":
    main()
