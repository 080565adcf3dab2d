"""Run the four default sweeps and write one CSV per panel.

    python3 scripts/reproduce_figures.py [--out results] [--threads 1] [--skip-xxz]

Prints a short qualitative summary of each sweep (crossovers, constancy,
monogamy sign change). Plotting is left to whatever tool reads the CSVs.
"""
import argparse
import time
from pathlib import Path

import numpy as np

from qcoherence.sweep import build_config, parse_config_text, read_csv, run_sweep

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
PANELS = ("ising2", "werner_ghz", "w_state", "xxz")


def summarize(name, cols):
    p = cols["param"]
    if name == "ising2":
        cross = p[np.argmax(cols["c_local"] > cols["c_intrinsic"])]
        return f"C_L overtakes C_I near J = {cross:.2f}"
    if name == "werner_ghz":
        gap = np.max(np.abs(cols["c_total"] - cols["c_full_split"]))
        return f"max |C - C_1:2:3| = {gap:.2e}, max pair coherence = {np.max(cols['c_pair_1_2']):.2e}"
    if name == "w_state":
        c = cols["c_bipart_3_rest"]
        return f"C_12:3 in [{c.min():.6f}, {c.max():.6f}], min M = {cols['monogamy'].min():.2e}"
    m = cols["monogamy"]
    flips = [(p[i], p[i + 1]) for i in range(len(m) - 1) if np.sign(m[i]) * np.sign(m[i + 1]) < 0]
    return f"monogamy changes sign between {flips}"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--skip-xxz", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in PANELS:
        if name == "xxz" and args.skip_xxz:
            continue
        raw = parse_config_text((CONFIGS / f"{name}.cfg").read_text())
        raw.update(out=str(out / f"{name}.csv"), threads=str(args.threads))
        t0 = time.perf_counter()
        cols = read_csv(run_sweep(build_config(raw)))
        print(f"{name:11s} {time.perf_counter() - t0:6.1f}s  {summarize(name, cols)}")


if __name__ == "__main__":
    main()
