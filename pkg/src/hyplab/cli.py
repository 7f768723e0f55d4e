"""Command line interface.

Exit codes: 0 success, 2 argument errors (bad specs, bad flags),
3 computational errors (caps, unsupported backends, degenerate groups).
Convergence failures are flagged in the output, never in the exit code.
All output is deterministic for identical arguments and seeds.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .boundary import MCEstimate, build_boundary, spherical_pairing
from .enumeration import DEFAULT_CAP, estimate_growth, sphere_sizes
from .errors import BadSpec, HyplabError, InsufficientData
from .experiments import (
    experiment_sizes,
    fit_exponent,
    parse_group_spec,
    run_sharpness,
    write_rows,
)
from .groups import estimate_delta
from .opnorm import norm_lower_bound, oracle_for_backend
from .radial import parse_element_spec


def _element_degree(text: str) -> int:
    head, _, tail = text.partition(":")
    if head == "coeffs":
        return max(len(tail.split(",")) - 1, 0)
    try:
        return int(tail)
    except ValueError:
        raise BadSpec(f"bad element spec {text!r}")


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _cmd_spheres(args) -> int:
    backend = parse_group_spec(args.group)
    sizes = sphere_sizes(backend, args.max_n, cap=args.cap)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "N_k"])
        for k, count in enumerate(sizes):
            writer.writerow([k, count])
    return 0


def _cmd_growth(args) -> int:
    backend = parse_group_spec(args.group)
    sizes = sphere_sizes(backend, args.max_n, cap=args.cap)
    growth = estimate_growth(sizes)
    # empirical constants c1 <= N_k q_hat^-k <= c2 over the fit window
    k_lo, k_hi = growth.window
    scaled = [
        sizes[k] * growth.q_hat ** -k for k in range(k_lo, k_hi + 1) if sizes[k] > 0
    ]
    _print_json(
        {
            "group": args.group,
            "max_n": args.max_n,
            "q_hat": growth.q_hat,
            "e_hat": growth.e_hat,
            "window": list(growth.window),
            "max_residual": growth.max_residual,
            "c1": min(scaled) if scaled else None,
            "c2": max(scaled) if scaled else None,
            "degenerate": growth.degenerate,
            "elementary": backend.elementary,
        }
    )
    return 0


def _cmd_delta(args) -> int:
    backend = parse_group_spec(args.group)
    estimate = estimate_delta(backend, args.radius)
    _print_json(
        {
            "group": args.group,
            "radius": estimate.radius,
            "delta_hat": float(estimate.delta_hat),
            "delta_hat_doubled": estimate.delta_hat.numerator
            * (2 // estimate.delta_hat.denominator),
        }
    )
    return 0


def _cmd_norm(args) -> int:
    backend = parse_group_spec(args.group)
    degree = _element_degree(args.element)
    sizes = experiment_sizes(backend, degree, cap=args.cap)
    element = parse_element_spec(args.element, sizes=sizes)
    payload = {
        "group": args.group,
        "element": args.element,
        "method": args.method,
        "seed": args.seed,
    }
    if args.method == "oracle":
        payload["value"] = oracle_for_backend(backend, element)
    else:
        estimate = norm_lower_bound(
            backend,
            element,
            args.radius,
            tol=args.tol,
            max_iter=args.max_iter,
            seed=args.seed,
            cap=args.cap,
        )
        payload.update(
            value=estimate.value,
            radius=estimate.radius,
            iterations=estimate.iterations,
            residual=estimate.residual,
            converged=estimate.converged,
        )
    _print_json(payload)
    return 0


def _cmd_boundary(args) -> int:
    backend = parse_group_spec(args.group)
    model = build_boundary(backend)
    q = model.q
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "phi_exact", "phi_mc", "stderr", "ratio"])
        for n in range(args.max_n + 1):
            exact = spherical_pairing(model, n, mode="exact") if model.is_tree else None
            mc = spherical_pairing(
                model, n, mode="mc", samples=args.samples, seed=args.seed + n
            )
            assert isinstance(mc, MCEstimate)
            phi = exact if exact is not None else mc.value
            ratio = phi * q ** (n / 2.0) / (n + 1)
            writer.writerow(
                [
                    n,
                    "" if exact is None else format(exact, ".17g"),
                    format(mc.value, ".17g"),
                    format(mc.stderr, ".17g"),
                    format(ratio, ".17g"),
                ]
            )
    return 0


def _cmd_sharpness(args) -> int:
    backend = parse_group_spec(args.group)
    rows = run_sharpness(
        backend,
        args.family,
        args.max_n,
        method=args.method,
        group_text=args.group,
        seed=args.seed,
        samples=args.samples,
        cap=args.cap,
    )
    try:
        fits = fit_exponent(rows, args.family)
    except InsufficientData:
        fits = []
    write_rows(rows, args.out, fmt=args.format, fits=fits)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyplab",
        description="Growth, boundary-measure and convolution-norm computations "
        "for word-hyperbolic groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, cap=True, seed=False):
        p.add_argument("--group", required=True, help="free:K | cyclicprod:M1,M2,... | rws:PATH")
        if cap:
            p.add_argument("--cap", type=int, default=DEFAULT_CAP)
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("spheres", help="sphere sizes by BFS enumeration")
    common(p)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_spheres)

    p = sub.add_parser("growth", help="growth-rate fit from sphere sizes")
    common(p)
    p.add_argument("--max-n", type=int, required=True)
    p.set_defaults(func=_cmd_growth)

    p = sub.add_parser("delta", help="hyperbolicity constant over a ball")
    common(p, cap=False)
    p.add_argument("--radius", type=int, required=True)
    p.set_defaults(func=_cmd_delta)

    p = sub.add_parser("norm", help="operator-norm oracle or compression bound")
    common(p, seed=True)
    p.add_argument("--element", required=True, help="sphere:N | ball:N | fam3:N | fam4:N | coeffs:a0,a1,...")
    p.add_argument("--method", choices=["oracle", "compression"], required=True)
    p.add_argument("--radius", type=int, default=12)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.set_defaults(func=_cmd_norm)

    p = sub.add_parser("boundary", help="spherical pairing rows per degree")
    common(p, cap=False, seed=True)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_boundary)

    p = sub.add_parser("sharpness", help="one test-family experiment with fits")
    common(p, seed=True)
    p.add_argument("--family", choices=["i", "ii", "iii", "iv"], required=True)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--method", choices=["oracle", "compression", "boundary"], default="oracle")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sharpness)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for flag in ("max_n", "radius", "cap", "samples", "max_iter"):
        value = getattr(args, flag, None)
        if value is not None and value < (1 if flag in ("cap", "samples", "max_iter") else 0):
            parser.error(f"--{flag.replace('_', '-')} must be nonnegative")
    try:
        return args.func(args)
    except BadSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HyplabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
