#!/usr/bin/env python3
"""Generate every figure-data CSV by driving the batch CLI.

Writes one CSV per figure panel into the output directory. ``--quick``
shrinks the sweep grids so a full pass finishes in well under a minute;
the default grids reproduce publication-scale resolution.

Usage:
    python scripts/reproduce_figures.py --out-dir figures [--quick]
"""

import argparse
import math
import sys
import time

from optherm.cli import main as optherm_main


def runs(quick: bool):
    gp, tp = ("15", "15") if quick else ("60", "60")
    nb = "5" if quick else "15"
    chi_nb, chi_pts = ("4", "5") if quick else ("8", "9")
    wp = "81" if quick else "201"
    phi = "16" if quick else "64"
    seeds = "10" if quick else "50"
    return {
        # QFI landscape over (g, tau) and its tau-slices, alpha=2, nbar=1
        "fig2a_qfi_map.csv": [
            "qfi-map", "--alpha", "2.0", "--nbar", "1.0",
            "--g-points", gp, "--tau-points", tp,
        ],
        "fig2b_qfi_slices.csv": [
            "qfi-map", "--alpha", "2.0", "--nbar", "1.0",
            "--g-points", gp, "--tau-points", "4",
            "--tau-min", str(math.pi / 10.0), "--tau-max", str(math.pi),
        ],
        # Wigner functions of the maximal-QFI states at tau=pi and tau=pi/10
        "fig2c_wigner_pi.csv": [
            "wigner", "--alpha", "2.0", "--nbar", "1.0", "--tau", str(math.pi),
            "--g", "auto", "--chi", "0", "--points", wp,
        ],
        "fig2d_wigner_pi10.csv": [
            "wigner", "--alpha", "2.0", "--nbar", "1.0",
            "--tau", str(math.pi / 10.0), "--g", "auto", "--chi", "0",
            "--points", wp,
        ],
        # optimized QFI and g_max against nbar, with the large-alpha limit
        "fig3_qfi_vs_nbar.csv": [
            "qfi-vs-nbar", "--alpha", "4.0", "--nbar-points", nb,
        ],
        # Wigner function before/after Kerr cancellation, alpha=3, nbar=0.25
        "fig4_wigner_kerr.csv": [
            "wigner", "--alpha", "3.0", "--nbar", "0.25", "--g", "auto",
            "--chi", "cancel", "--points", wp,
        ],
        # Fisher ratio and optimal phase over (chi, nbar)
        "fig5ab_ratio_map.csv": [
            "fisher-ratio-map", "--alpha", "3.0",
            "--nbar-points", chi_nb, "--chi-points", chi_pts,
        ],
        # ratio against the local-oscillator phase at full / quarter Kerr
        "fig5c_phi_sweep_cancel.csv": [
            "phi-sweep", "--alpha", "3.0", "--chi-factor", "1.0",
            "--nbars", "0.1,0.5,1.0", "--phi-points", phi,
        ],
        "fig5d_phi_sweep_quarter.csv": [
            "phi-sweep", "--alpha", "3.0", "--chi-factor", "0.25",
            "--nbars", "0.1,0.5,1.0", "--phi-points", phi,
        ],
        # linearized-benchmark comparison table and estimator saturation
        "appendix_gaussian.csv": [
            "gaussian", "--alpha", "2.0", "--nbar", "1.0", "--g", "0.1",
        ],
        "estimator_saturation.csv": [
            "estimate", "--alpha", "3.0", "--nbar", "0.5", "--seeds", seeds,
        ],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="figures")
    parser.add_argument("--quick", action="store_true",
                        help="small grids for a fast smoke pass")
    args = parser.parse_args()

    import pathlib
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    for name, argv in runs(args.quick).items():
        path = out / name
        start = time.time()
        code = optherm_main(argv + ["--out", str(path)])
        if code != 0:
            print(f"FAILED ({code}): {name}", file=sys.stderr)
            return code
        print(f"wrote {path} ({time.time() - start:.1f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
