#!/usr/bin/env python3
"""Render sharpness-experiment figures from the hyplab CSV output.

Reads the long-form experiment CSV (one quantity per line), filters one
test family, and draws its ratio series against the degree n, optionally
overlaying a fitted model curve.  The tool recomputes nothing: overlay
parameters come from the fit rows already present in the CSV.

    render.py --in FILE --family i|ii|iii|iv --model powerlaw|log|sqrtlog|none --out FILE.svg

Exit codes: 0 success, 2 bad arguments, 3 schema mismatch, 4 empty
selection (no data rows or no stored fit for the requested model).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "hyplab-render"  # deterministic element ids
matplotlib.rcParams["svg.fonttype"] = "none"
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

EXPECTED_HEADER = ["group", "family", "n", "method", "quantity", "value", "seed", "meta"]

RATIO_LABELS = {
    "i": r"$\|\lambda(\sigma_n)\|\,/\,(n+1)\|\sigma_n\|_2$",
    "ii": r"$\|\lambda(\beta_n)\|\,/\,(n+1)\|\beta_n\|_2$",
    "iii": r"$\|\lambda(a)\|\,/\,\|a\|_2$",
    "iv": r"$\|\lambda(a)\|\,/\,\|a\|_{2,3/2}$",
}
LOG_Y_FAMILIES = {"iii"}


class SchemaMismatch(Exception):
    pass


class EmptySelection(Exception):
    pass


def read_family(path: str, family: str):
    """Return (data points [(n, ratio)], fits {model: (slope, intercept)})."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != EXPECTED_HEADER:
            raise SchemaMismatch(f"expected header {EXPECTED_HEADER}, got {header}")
        points: list[tuple[int, float]] = []
        fits: dict[str, tuple[float, float]] = {}
        for lineno, record in enumerate(reader, start=2):
            if len(record) != len(EXPECTED_HEADER):
                raise SchemaMismatch(f"line {lineno}: wrong column count")
            _, fam, n_txt, method, quantity, value_txt, _, meta_txt = record
            if fam != family:
                continue
            try:
                value = float(value_txt)
            except ValueError:
                raise SchemaMismatch(f"line {lineno}: bad value {value_txt!r}")
            if method == "fit" and quantity.startswith("fit_"):
                meta = json.loads(meta_txt)
                fits[meta["model"]] = (value, float(meta["intercept"]))
            elif quantity == "ratio":
                points.append((int(n_txt), value))
    points.sort()
    return points, fits


def model_curve(model: str, slope: float, intercept: float, ns: np.ndarray) -> np.ndarray:
    x = ns + 1.0
    if model == "powerlaw":
        return np.exp(intercept) * x ** slope
    if model == "log":
        return slope * np.log(x) + intercept
    if model == "sqrtlog":
        return slope * np.sqrt(np.log(x)) + intercept
    raise ValueError(model)


def render(in_path: str, family: str, model: str, out_path: str) -> None:
    points, fits = read_family(in_path, family)
    if not points:
        raise EmptySelection(f"no ratio rows for family {family} in {in_path}")
    ns = np.array([n for n, _ in points], dtype=float)
    ratios = np.array([r for _, r in points])

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ns + 1.0, ratios, "o-", color="#1f6fb4", ms=4, lw=1.0, label="measured ratio")
    ax.set_xscale("log")
    if family in LOG_Y_FAMILIES:
        ax.set_yscale("log")
    if model != "none":
        if model not in fits:
            plt.close(fig)
            raise EmptySelection(f"no stored {model} fit for family {family}")
        slope, intercept = fits[model]
        dense = np.linspace(ns.min(), ns.max(), 256)
        ax.plot(
            dense + 1.0,
            model_curve(model, slope, intercept, dense),
            "--",
            color="#c44e52",
            lw=1.2,
            label=f"{model} fit (slope {slope:.3g})",
        )
    ax.set_xlabel(r"$n+1$")
    ax.set_ylabel(RATIO_LABELS.get(family, "ratio"))
    ax.set_title(f"family {family}: {len(points)} degrees")
    ax.legend(frameon=False, fontsize=9)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    # strip the embedded creation date so identical inputs give identical bytes
    fig.savefig(out_path, metadata={"Date": None})
    plt.close(fig)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--in", dest="in_path", required=True)
    parser.add_argument("--family", choices=["i", "ii", "iii", "iv"], required=True)
    parser.add_argument(
        "--model", choices=["powerlaw", "log", "sqrtlog", "none"], default="none"
    )
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    if not args.out.endswith((".svg", ".png")):
        parser.error("--out must end in .svg or .png")
    try:
        render(args.in_path, args.family, args.model, args.out)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 3
    except EmptySelection as exc:
        print(f"empty selection: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
