#!/usr/bin/env python3
"""Plot the CSV outputs of the misim CLI. Needs pandas and matplotlib."""
import argparse
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def spectrum(d, out):
    df = pd.read_csv(d / "spectrum.csv")
    fig, ax = plt.subplots(figsize=(6, 4))
    f = df.f_hz / 1e6
    ax.plot(f, df.gain_db_perfect_match, "--", label="perfect matching, both ends")
    ax.plot(f, df.gain_db_practical_sensor, ":", label="practical at sensor")
    ax.plot(f, df.gain_db_practical_both, "-", label="practical at both ends")
    ax.set_xlabel("f [MHz]")
    ax.set_ylabel("channel gain [dB]")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out / "spectrum.png", dpi=150)


def sweep(d, out):
    df = pd.read_csv(d / "coil_sweep.csv")
    fig, (a, b) = plt.subplots(1, 2, figsize=(9, 4))
    a.fill_between(df.coil_size_um, df.pte_db_min, df.pte_db_max, alpha=0.3)
    a.plot(df.coil_size_um, df.pte_db_max)
    a.set_xlabel("coil size [um]")
    a.set_ylabel("PTE [dB]")
    b.fill_between(df.coil_size_um, df.rate_bps_min / 1e6, df.rate_bps_max / 1e6, alpha=0.3)
    b.plot(df.coil_size_um, df.rate_bps_max / 1e6)
    b.set_yscale("log")
    b.set_xlabel("coil size [um]")
    b.set_ylabel("rate [Mbit/s]")
    fig.tight_layout()
    fig.savefig(out / "coil_sweep.png", dpi=150)


def cdf(d, out, stem):
    df = pd.read_csv(d / f"{stem}.csv")
    runs = pd.read_csv(d / f"{stem}_runs.csv")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(df.rate_bps / 1e6, df.ecdf_simple, where="post", label="simple")
    ax.step(df.rate_bps / 1e6, df.ecdf_elaborate, where="post", label="elaborate")
    ref = runs.rate_bps_no_relay.sort_values().to_numpy()
    ax.step(ref / 1e6, (pd.RangeIndex(len(ref)) + 1) / len(ref), where="post", label="no relays", color="gray")
    ax.set_xlabel("uplink rate [Mbit/s]")
    ax.set_ylabel("CDF")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out / f"{stem}.png", dpi=150)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("results", type=pathlib.Path)
    p.add_argument("--out", type=pathlib.Path)
    a = p.parse_args()
    out = a.out or a.results
    out.mkdir(parents=True, exist_ok=True)
    if (a.results / "spectrum.csv").exists():
        spectrum(a.results, out)
    if (a.results / "coil_sweep.csv").exists():
        sweep(a.results, out)
    for stem in ("relay_cdf", "coop_cdf"):
        if (a.results / f"{stem}.csv").exists():
            cdf(a.results, out, stem)


if __name__ == "__main__":
    main()
