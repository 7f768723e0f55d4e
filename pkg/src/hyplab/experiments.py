"""Sharpness experiments for the four test families, exponent fits and
deterministic CSV/JSON emission.

The long-form CSV schema is one quantity per line:

    group,family,n,method,quantity,value,seed,meta

Floats are serialized with 17 significant digits, so read-back is
lossless; ratio fields are nevertheless recomputed from the stored
quantities on read-back, never trusted.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .boundary import build_boundary, radial_pairing
from .enumeration import DEFAULT_CAP, estimate_growth, sphere_sizes, sphere_sizes_exact
from .errors import BadSpec, InsufficientData, NotFreeBackend
from .groups import GroupBackend, compile_cyclicprod, free_group, load_rws
from .opnorm import norm_lower_bound, oracle_for_backend
from .radial import l2_norm, make_element, theorem_rhs, weighted_norm

__all__ = [
    "ExperimentRow",
    "FitResult",
    "parse_group_spec",
    "default_schedule",
    "run_sharpness",
    "fit_exponent",
    "write_rows",
    "read_rows",
]

CSV_HEADER = ["group", "family", "n", "method", "quantity", "value", "seed", "meta"]
QUANTITY_ORDER = [
    "norm_lb",
    "norm_oracle",
    "theorem_rhs",
    "l2",
    "w_s",
    "pairing",
    "ratio",
]
WEIGHT_S = 1.5
FAMILY_KINDS = {"i": "sphere", "ii": "ball", "iii": "family_iii", "iv": "family_iv"}


@dataclass(frozen=True)
class ExperimentRow:
    group: str
    family: str
    n: int
    quantities: dict[str, float]
    method: str
    seed: int
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FitResult:
    """Linear fit of the family ratio against one growth model."""

    model: str                  # powerlaw | log | sqrtlog
    exponent_or_slope: float
    intercept: float
    r_squared: float
    window: tuple[int, int]


def parse_group_spec(text: str) -> GroupBackend:
    """Grammar: free:K | cyclicprod:M1,M2,... | rws:PATH."""
    head, sep, tail = text.partition(":")
    if not sep:
        raise BadSpec(f"bad group spec {text!r}")
    if head == "free":
        try:
            rank = int(tail)
        except ValueError:
            raise BadSpec(f"bad free rank in {text!r}")
        if rank < 1:
            raise BadSpec(f"free rank must be >= 1 in {text!r}")
        return free_group(rank)
    if head == "cyclicprod":
        try:
            orders = tuple(int(part) for part in tail.split(","))
        except ValueError:
            raise BadSpec(f"bad order list in {text!r}")
        return compile_cyclicprod(orders)
    if head == "rws":
        return load_rws(tail)
    raise BadSpec(f"unknown group kind {head!r} in {text!r}")


def default_schedule(n_max: int) -> list[int]:
    """Geometric-ish degrees keeping oracle runs fast."""
    return [n for n in (1, 2, 3, 4, 6, 8, 11, 16, 22, 32, 45, 60) if n <= n_max]


def experiment_sizes(backend: GroupBackend, n_max: int, cap: int = DEFAULT_CAP) -> list[int]:
    """Sphere sizes for element construction: exact counting when the
    backend has a normal-form automaton, BFS otherwise."""
    if backend.kind in ("free", "cyclicprod"):
        return sphere_sizes_exact(backend, n_max)
    return sphere_sizes(backend, n_max, cap=cap)


def family_ratio(family: str, n: int, quantities: dict[str, float]) -> float | None:
    norm = quantities.get("norm_oracle", quantities.get("norm_lb"))
    if norm is None:
        return None
    if family in ("i", "ii"):
        denom = (n + 1) * quantities.get("l2", 0.0)
    elif family == "iii":
        denom = quantities.get("l2", 0.0)
    elif family == "iv":
        denom = quantities.get("w_s", 0.0)
    else:
        denom = quantities.get("theorem_rhs", 0.0)
    return norm / denom if denom else None


def run_sharpness(
    backend: GroupBackend,
    family: str,
    n_max: int,
    method: str = "oracle",
    group_text: str | None = None,
    schedule: Sequence[int] | None = None,
    radius_offset: int = 8,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    seed: int = 0,
    samples: int = 10_000,
    cap: int = DEFAULT_CAP,
) -> list[ExperimentRow]:
    """One ExperimentRow per scheduled degree for the requested family.

    method=oracle needs a free backend; method=compression runs the ball
    lower bound at radius n + radius_offset; method=boundary uses the
    pairing <pi(a) 1, 1> (exact on trees, Monte-Carlo elsewhere).
    """
    if family not in FAMILY_KINDS:
        raise BadSpec(f"unknown family {family!r}")
    if method == "oracle" and backend.kind != "free":
        raise NotFreeBackend("method=oracle needs a free backend")
    group = group_text or _describe(backend)
    ns = list(schedule) if schedule is not None else default_schedule(n_max)
    sizes = experiment_sizes(backend, max(ns, default=0), cap=cap)
    growth = estimate_growth(sizes) if len(sizes) >= 6 else None
    model = None
    if method == "boundary" or (backend.kind == "free" and backend.rank >= 2):
        model = build_boundary(backend)
    rows: list[ExperimentRow] = []
    for n in ns:
        element = make_element(FAMILY_KINDS[family], n=n, sizes=sizes)
        quantities: dict[str, float] = {
            "l2": l2_norm(element, sizes),
            "w_s": weighted_norm(element, WEIGHT_S, sizes),
            "theorem_rhs": theorem_rhs(element, sizes),
        }
        meta: dict = {"cap": cap, "s": WEIGHT_S}
        if growth is not None:
            meta["q_hat"] = growth.q_hat
        if backend.elementary is not None:
            meta["elementary"] = backend.elementary
        if method == "oracle":
            value = oracle_for_backend(backend, element)
            quantities["norm_oracle"] = value
            quantities["norm_lb"] = value
            method_label = "oracle"
        elif method == "compression":
            radius = n + radius_offset
            estimate = norm_lower_bound(
                backend, element, radius, tol=tol, max_iter=max_iter, seed=seed, cap=cap
            )
            quantities["norm_lb"] = estimate.value
            meta.update(
                radius=radius,
                converged=estimate.converged,
                iterations=estimate.iterations,
                tol=tol,
            )
            method_label = f"compression(R={radius})"
        elif method == "boundary":
            assert model is not None
            mode = "exact" if model.is_tree else "mc"
            value = radial_pairing(
                model, element, sizes, mode=mode, samples=samples, seed=seed
            )
            quantities["norm_lb"] = value
            quantities["pairing"] = value
            meta.update(pairing_mode=mode)
            if mode == "mc":
                meta.update(samples=samples)
            method_label = "boundary"
        else:
            raise BadSpec(f"unknown method {method!r}")
        if model is not None and model.is_tree and "pairing" not in quantities:
            quantities["pairing"] = radial_pairing(model, element, sizes, mode="exact")
        ratio = family_ratio(family, n, quantities)
        if ratio is not None:
            quantities["ratio"] = ratio
        rows.append(
            ExperimentRow(
                group=group,
                family=family,
                n=n,
                quantities=quantities,
                method=method_label,
                seed=seed,
                meta=meta,
            )
        )
    return rows


def _describe(backend: GroupBackend) -> str:
    if backend.kind == "free":
        return f"free:{backend.rank}"
    if backend.kind == "cyclicprod":
        return "cyclicprod:" + ",".join(str(m) for m in backend.orders)
    return "rws"


def _linfit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    xm, ym = x.mean(), y.mean()
    denom = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum()) / denom
    intercept = ym - slope * xm
    residual = y - (slope * x + intercept)
    ss_res = float((residual ** 2).sum())
    ss_tot = float(((y - ym) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return slope, intercept, r2


def fit_exponent(rows: Sequence[ExperimentRow], family: str) -> list[FitResult]:
    """Fit the family ratio over the upper half of the degree range.

    Families i-iii: log(ratio) against log(n+1), one power-law fit (the
    expected exponents are 0, 0 and 3/2).  Family iv: the ratio against
    both log(n+1) and sqrt(log(n+1)), both fits reported.
    """
    data = sorted(
        (row.n, row.quantities["ratio"])
        for row in rows
        if row.family == family and "ratio" in row.quantities
    )
    if len(data) < 8:
        raise InsufficientData(f"need >= 8 rows for a fit, got {len(data)}")
    n_lo, n_hi = data[0][0], data[-1][0]
    cutoff = (n_lo + n_hi) / 2.0
    window = [(n, r) for n, r in data if n >= cutoff]
    if len(window) < 2:
        raise InsufficientData("upper-half window has fewer than 2 points")
    ns = np.array([n for n, _ in window], dtype=float)
    ratios = np.array([r for _, r in window], dtype=float)
    span = (window[0][0], window[-1][0])
    results: list[FitResult] = []
    if family in ("i", "ii", "iii"):
        slope, intercept, r2 = _linfit(np.log(ns + 1.0), np.log(ratios))
        results.append(FitResult("powerlaw", slope, intercept, r2, span))
    else:
        for model, transform in (
            ("log", np.log(ns + 1.0)),
            ("sqrtlog", np.sqrt(np.log(ns + 1.0))),
        ):
            slope, intercept, r2 = _linfit(transform, ratios)
            results.append(FitResult(model, slope, intercept, r2, span))
    return results


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _fmt_float(value: float) -> str:
    return format(float(value), ".17g")


def _meta_str(meta: dict) -> str:
    return json.dumps(meta, sort_keys=True, separators=(",", ":"))


def _csv_lines(rows: Sequence[ExperimentRow], fits: Sequence[tuple[str, str, int, FitResult]]):
    yield CSV_HEADER
    for row in rows:
        meta = _meta_str(row.meta)
        for quantity in QUANTITY_ORDER:
            if quantity in row.quantities:
                yield [
                    row.group,
                    row.family,
                    str(row.n),
                    row.method,
                    quantity,
                    _fmt_float(row.quantities[quantity]),
                    str(row.seed),
                    meta,
                ]
    for group, family, seed, fit in fits:
        meta = _meta_str(
            {
                "intercept": fit.intercept,
                "r_squared": fit.r_squared,
                "window": list(fit.window),
                "model": fit.model,
            }
        )
        yield [
            group,
            family,
            str(fit.window[1]),
            "fit",
            f"fit_{fit.model}",
            _fmt_float(fit.exponent_or_slope),
            str(seed),
            meta,
        ]


def write_rows(
    rows: Sequence[ExperimentRow],
    path: str,
    fmt: str = "csv",
    fits: Sequence[FitResult] = (),
) -> None:
    """Deterministic byte output; identical inputs give identical files."""
    fit_entries = []
    for fit in fits:
        group = rows[0].group if rows else ""
        family = rows[0].family if rows else ""
        seed = rows[0].seed if rows else 0
        fit_entries.append((group, family, seed, fit))
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        for line in _csv_lines(rows, fit_entries):
            writer.writerow(line)
        payload = buffer.getvalue()
    elif fmt == "json":
        payload = json.dumps(
            {
                "rows": [
                    {
                        "group": row.group,
                        "family": row.family,
                        "n": row.n,
                        "method": row.method,
                        "seed": row.seed,
                        "meta": row.meta,
                        "quantities": row.quantities,
                    }
                    for row in rows
                ],
                "fits": [
                    {
                        "group": g,
                        "family": fam,
                        "seed": seed,
                        "model": fit.model,
                        "value": fit.exponent_or_slope,
                        "intercept": fit.intercept,
                        "r_squared": fit.r_squared,
                        "window": list(fit.window),
                    }
                    for g, fam, seed, fit in fit_entries
                ],
            },
            sort_keys=True,
            indent=1,
        ) + "\n"
    else:
        raise BadSpec(f"unknown output format {fmt!r}")
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def read_rows(path: str) -> tuple[list[ExperimentRow], list[FitResult]]:
    """Read a long-form CSV back; ratio quantities are recomputed from the
    stored inputs rather than trusted."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise BadSpec(f"unexpected CSV header {header!r}")
        grouped: dict[tuple, dict] = {}
        fits: list[FitResult] = []
        for record in reader:
            group, family, n_txt, method, quantity, value_txt, seed_txt, meta_txt = record
            if method == "fit":
                meta = json.loads(meta_txt)
                fits.append(
                    FitResult(
                        model=meta["model"],
                        exponent_or_slope=float(value_txt),
                        intercept=float(meta["intercept"]),
                        r_squared=float(meta["r_squared"]),
                        window=tuple(meta["window"]),
                    )
                )
                continue
            key = (group, family, int(n_txt), method, int(seed_txt))
            entry = grouped.setdefault(key, {"meta": json.loads(meta_txt), "q": {}})
            entry["q"][quantity] = float(value_txt)
        rows = []
        for (group, family, n, method, seed), entry in grouped.items():
            quantities = entry["q"]
            ratio = family_ratio(family, n, quantities)
            if ratio is not None:
                quantities["ratio"] = ratio
            rows.append(
                ExperimentRow(
                    group=group,
                    family=family,
                    n=n,
                    quantities=quantities,
                    method=method,
                    seed=seed,
                    meta=entry["meta"],
                )
            )
        rows.sort(key=lambda row: (row.group, row.family, row.n))
        return rows, fits
