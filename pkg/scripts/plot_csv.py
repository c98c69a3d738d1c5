"""Plot CSV output of the ``ppt-volume`` commands.

Usage::

    ppt-volume -o scan.csv scan --seed 42 --fit
    python3 scripts/plot_csv.py scan scan.csv scan.png

Supported kinds: ``scan``, ``conditional-r``, ``dist-r``, ``conditional-h``.
Needs matplotlib (``pip install .[plot]``).
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _floats(rows, key):
    return [float(r[key]) for r in rows]


def plot_scan(rows, ax):
    est = [r for r in rows if r["record"] == "estimate"]
    ax.errorbar(_floats(est, "N"), _floats(est, "p_hat"), yerr=_floats(est, "stderr"), fmt="o")
    fit = [r for r in rows if r["record"] == "fit"]
    if fit:
        import numpy as np

        a, g = float(fit[0]["prefactor"]), float(fit[0]["rate"])
        n = np.linspace(4, max(_floats(est, "N")), 100)
        ax.plot(n, a * np.exp(-g * n), label=f"{a:.2f} exp(-{g:.3f} N)")
        ax.legend()
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("PPT fraction")


def _binned(rows, ax, xlabel):
    mid = [(a + b) / 2 for a, b in zip(_floats(rows, "bin_lo"), _floats(rows, "bin_hi"))]
    ax.plot(mid, _floats(rows, "ppt_fraction"), "+", label="PPT fraction")
    ax.plot(mid, _floats(rows, "mean_t"), "x", label="mean t")
    ax.plot(mid, _floats(rows, "cumulative"), "-", label="cumulative")
    ax.set_xlabel(xlabel)
    ax.legend()


def plot_conditional_r(rows, ax):
    _binned(rows, ax, "participation ratio R")


def plot_dist_r(rows, ax):
    mid = [(a + b) / 2 for a, b in zip(_floats(rows, "bin_lo"), _floats(rows, "bin_hi"))]
    ax.step(mid, _floats(rows, "density"), where="mid")
    ax.set_xlabel("participation ratio R")
    ax.set_ylabel("density")


def plot_conditional_h(rows, ax):
    bins = [r for r in rows if r["record"] == "bin"]
    for q in dict.fromkeys(r["q"] for r in bins):
        sub = [r for r in bins if r["q"] == q]
        mid = [(a + b) / 2 for a, b in zip(_floats(sub, "bin_lo"), _floats(sub, "bin_hi"))]
        ax.plot(mid, _floats(sub, "ppt_fraction"), "+", label=f"q={q}")
    ax.set_xlabel("Renyi entropy")
    ax.set_ylabel("PPT fraction")
    ax.legend()


PLOTTERS = {
    "scan": plot_scan,
    "conditional-r": plot_conditional_r,
    "dist-r": plot_dist_r,
    "conditional-h": plot_conditional_h,
}


def main(argv):
    if len(argv) != 3 or argv[0] not in PLOTTERS:
        print(__doc__, file=sys.stderr)
        return 2
    kind, src, dst = argv
    fig, ax = plt.subplots(figsize=(6, 4))
    PLOTTERS[kind](_read(src), ax)
    fig.tight_layout()
    fig.savefig(dst, dpi=120)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
