"""Command-line surface for the spectral shift and index pipeline.

Four subcommands: ssf-1d and ssf-2d emit sampled curves, witten runs
the full index pipeline, and verify executes the invariant suite with
one PASS/FAIL line per identity.  Exit codes are scriptable: 0 for
success, 1 for usage or configuration problems, 2 when a computation
refused to proceed without more resolution, 3 when a verification
identity failed.

All emitted floating-point text is rounded to 12 significant digits,
CSV uses LF endings, and JSON keys are sorted, so identical configs
produce byte-identical outputs regardless of thread count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from .determinants import NearSingularError, RefinementNeededError, det2, hs_norm
from .discretize import bs_matrix, bs_matrix_mollified, build_grid
from .kernels import SpectralPoint, scattering_matrix
from .profiles import PotentialProfile, builtin_profile, c0, profile_from_descriptor
from .ssf import (
    CoverageError,
    krein_check_trn,
    ssf_2d_curve,
    ssf_mollified,
    trace_identity_eq1,
)
from .witten import witten_index

__all__ = ["main"]


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _round12(obj):
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, complex):
        return {"re": float(_fmt(obj.real)), "im": float(_fmt(obj.imag))}
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _write_json(path: str, payload) -> None:
    _write_text(path, json.dumps(_round12(payload), indent=2, sort_keys=True) + "\n")


def _load_profile(args) -> PotentialProfile:
    if getattr(args, "profile", None) is None:
        return builtin_profile("gaussian", 1.0, 1.0)
    path = args.profile
    try:
        with open(path, "r", encoding="utf-8") as handle:
            descriptor = json.load(handle)
    except FileNotFoundError:
        raise FileNotFoundError(f"profile file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"profile file {path} is not valid JSON: {exc}") from None
    return profile_from_descriptor(descriptor)


def _resolve_threads(args) -> Optional[int]:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("WITTENLAB_THREADS")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise ValueError(f"WITTENLAB_THREADS must be an integer, got {env!r}") from None


def _nu_grid(args) -> np.ndarray:
    if args.nu_max <= 0.0:
        raise ValueError("--nu-max must be positive")
    if args.nu_points < 3:
        raise ValueError("--nu-points must be at least 3")
    return np.linspace(-args.nu_max, args.nu_max, args.nu_points)


def cmd_ssf1d(args) -> int:
    profile = _load_profile(args)
    curve = ssf_mollified(
        profile, args.n, _nu_grid(args), args.nodes, threads=_resolve_threads(args)
    )
    sidecar = {
        "c0": c0(profile),
        "endpoint_magnitude": curve.endpoint_magnitude,
        "kind": curve.kind.value,
        "provenance": dict(curve.provenance),
    }
    if args.format == "csv":
        _write_text(args.out + ".csv", curve.to_csv())
        _write_json(args.out + ".json", sidecar)
        print(f"wrote {args.out}.csv and {args.out}.json ({len(curve.grid)} points)")
    else:
        _write_json(args.out + ".json", {"curve": curve.to_json_dict(), **sidecar})
        print(f"wrote {args.out}.json ({len(curve.grid)} points)")
    print(f"c0 = {_fmt(c0(profile))}, endpoint magnitude = {_fmt(curve.endpoint_magnitude)}")
    return 0


def cmd_ssf2d(args) -> int:
    profile = _load_profile(args)
    if args.lambda_min <= 0.0 or args.lambda_max <= args.lambda_min:
        raise ValueError("need 0 < --lambda-min < --lambda-max")
    if args.lambda_points < 2:
        raise ValueError("--lambda-points must be at least 2")
    lam_grid = np.geomspace(args.lambda_min, args.lambda_max, args.lambda_points)
    if args.constant_input:
        curve = ssf_2d_curve(c0(profile), lam_grid)
    else:
        base = ssf_mollified(
            profile, args.n, _nu_grid(args), args.nodes, threads=_resolve_threads(args)
        )
        curve = ssf_2d_curve(base, lam_grid, eta_correction=not args.keep_eta_term)
    spread = float(np.max(curve.values) - np.min(curve.values))
    if args.format == "csv":
        _write_text(args.out + ".csv", curve.to_csv())
        _write_json(
            args.out + ".json",
            {"c0": c0(profile), "spread": spread, "provenance": dict(curve.provenance)},
        )
        print(f"wrote {args.out}.csv and {args.out}.json ({len(curve.grid)} points)")
    else:
        _write_json(args.out + ".json", {"curve": curve.to_json_dict(), "c0": c0(profile)})
        print(f"wrote {args.out}.json ({len(curve.grid)} points)")
    print(f"c0 = {_fmt(c0(profile))}, curve spread = {_fmt(spread)}")
    return 0


def cmd_witten(args) -> int:
    profile = _load_profile(args)
    schedule = tuple(int(s) for s in args.n_schedule.split(","))
    report = witten_index(
        profile,
        schedule,
        N=args.nodes,
        nu_max=args.nu_max,
        nu_points=args.nu_points if args.nu_points else None,
        threads=_resolve_threads(args),
    )
    _write_json(args.out + ".json", report.to_json_dict())
    print(f"{'lambda':>14}  {'Delta_r':>16}")
    for lam, val in zip(report.lambda_samples, report.delta_r_values):
        print(f"{_fmt(lam):>14}  {_fmt(val):>16}")
    print(f"extrapolated index: {_fmt(report.extrapolated_index)}")
    print(f"reference c0:       {_fmt(report.reference_c0)}")
    print(f"abs error:          {_fmt(report.abs_error)}")
    if report.observed_order_n:
        orders = ", ".join(_fmt(o) for o in report.observed_order_n)
        print(f"observed n-orders:  {orders}")
    print(f"low confidence:     {'yes' if report.low_confidence else 'no'}")
    print(f"wrote {args.out}.json")
    return 0


def _verify_checks(
    profile: PotentialProfile, N: int, nu_max: float, threads: Optional[int]
):
    """Yield (name, callable) pairs; each callable returns (ok, detail)."""
    l1 = profile.l1_norm

    def hs_bound():
        worst = 0.0
        if l1 > 0.0:
            grid = build_grid(profile, N)
            for nu in (-5.0, -1.0, 0.0, 1.0, 5.0):
                T = bs_matrix(profile, SpectralPoint.boundary(nu), grid).entries
                worst = max(worst, hs_norm(T))
        bound = l1 * 1.01
        return worst <= bound, f"max HS norm {worst:.6g} vs bound {bound:.6g}"

    def det2_triviality():
        worst = 0.0
        if l1 > 0.0:
            grid = build_grid(profile, N)
            for nu in (-5.0, -1.0, 0.0, 1.0, 5.0):
                T = bs_matrix(profile, SpectralPoint.boundary(nu), grid).entries
                worst = max(worst, abs(det2(T) - 1.0))
        return worst < 1e-3, f"max |det2 - 1| = {worst:.3e} vs tol 1e-3"

    def mollified_decay():
        worst = 0.0
        if l1 > 0.0:
            grid = build_grid(profile, N)
            for n in (2, 8):
                for nu in (0.0, 2.0, 5.0):
                    T = bs_matrix_mollified(
                        profile, n, SpectralPoint.boundary(nu), grid
                    ).entries
                    bound = 2.5 * n * n / (nu * nu + n * n) * l1 * l1 * 1.01
                    ratio = hs_norm(T) ** 2 / bound if bound > 0.0 else 0.0
                    worst = max(worst, ratio)
        return worst <= 1.0, f"max squared-norm/bound ratio {worst:.6g} vs 1"

    def mollifier_limit():
        target = c0(profile)
        grid = np.linspace(-nu_max, nu_max, max(N + 1, 9))
        errors = []
        for n in (2, 4, 8, 16, 32):
            curve = ssf_mollified(profile, n, grid, N, threads=threads)
            errors.append(abs(float(curve.value_at(0.0)) - target))
        monotone = all(b <= a * 1.000001 + 1e-12 for a, b in zip(errors, errors[1:]))
        ok = monotone and errors[-1] < 0.02
        detail = "errors " + ", ".join(f"{e:.2e}" for e in errors) + " vs final tol 2e-2"
        return ok, detail

    def birman_krein():
        gap = abs(scattering_matrix(profile) - np.exp(-2j * math.pi * c0(profile)))
        return gap < 1e-14, f"|S - exp(-2*pi*i*c0)| = {gap:.3e} vs tol 1e-14"

    def krein_trn():
        report = krein_check_trn(profile, 4, -1.0, N=N, nu_max=nu_max, threads=threads)
        return report.residual < 5e-3, f"residual {report.residual:.3e} vs tol 5e-3"

    def stieltjes_pair():
        report = trace_identity_eq1(
            profile, 8, -1.0, N=N, nu_max=nu_max, threads=threads
        )
        rel = report.relative_residual
        return rel < 1e-2, f"relative residual {rel:.3e} vs tol 1e-2"

    def stieltjes_synthetic():
        report = trace_identity_eq1(
            profile, 8, -1.0, N=N, nu_max=nu_max, synthetic_constant=0.375
        )
        exact = 0.375 / 1.0
        err = max(abs(report.lhs - exact), abs(report.rhs - exact))
        return err < 1e-10, f"max side error {err:.3e} vs tol 1e-10"

    return [
        ("hs-bound", hs_bound),
        ("det2-triviality", det2_triviality),
        ("mollified-decay", mollified_decay),
        ("mollifier-limit", mollifier_limit),
        ("birman-krein", birman_krein),
        ("krein-trn", krein_trn),
        ("stieltjes-pair", stieltjes_pair),
        ("stieltjes-synthetic", stieltjes_synthetic),
    ]


def cmd_verify(args) -> int:
    profile = _load_profile(args)
    threads = _resolve_threads(args)
    all_ok = True
    for name, check in _verify_checks(profile, args.nodes, args.nu_max, threads):
        try:
            ok, detail = check()
        except (RefinementNeededError, NearSingularError, CoverageError, ValueError) as exc:
            ok, detail = False, f"aborted: {exc}"
        all_ok &= ok
        print(f"{'PASS' if ok else 'FAIL'}  {name:<20} {detail}")
    print("verification " + ("passed" if all_ok else "FAILED"))
    return 0 if all_ok else 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wittenlab",
        description="Spectral shift functions and the resolvent-regularized "
        "Witten index of a one-dimensional model operator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_out):
        p.add_argument("--profile", help="path to a JSON profile descriptor")
        p.add_argument("--nodes", type=int, default=400, help="quadrature nodes (default 400)")
        p.add_argument("--nu-max", type=float, default=12.0, help="sweep half-width (default 12)")
        p.add_argument(
            "--nu-points", type=int, default=401, help="sweep node count (default 401)"
        )
        p.add_argument(
            "--threads",
            type=int,
            default=None,
            help="worker threads (default: WITTENLAB_THREADS or 1)",
        )
        p.add_argument("--out", default=default_out, help="output basename")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p1 = sub.add_parser("ssf-1d", help="mollified 1-D spectral shift curve")
    common(p1, "ssf1d")
    p1.add_argument("--n", type=int, default=8, help="mollifier index (default 8)")
    p1.set_defaults(func=cmd_ssf1d)

    p2 = sub.add_parser("ssf-2d", help="2-D spectral shift curve via the arcsine transform")
    common(p2, "ssf2d")
    p2.add_argument("--n", type=int, default=16, help="mollifier index (default 16)")
    p2.add_argument("--lambda-min", type=float, default=0.1)
    p2.add_argument("--lambda-max", type=float, default=100.0)
    p2.add_argument("--lambda-points", type=int, default=61)
    p2.add_argument(
        "--constant-input",
        action="store_true",
        help="bypass the determinant pipeline and transform the constant c0",
    )
    p2.add_argument(
        "--keep-eta-term",
        action="store_true",
        help="transform the raw mollified curve without replacing the trace "
        "term by its limit",
    )
    p2.set_defaults(func=cmd_ssf2d)

    p3 = sub.add_parser("witten", help="resolvent-regularized index pipeline")
    common(p3, "witten")
    p3.add_argument(
        "--n-schedule",
        default="2,4,8,16,32",
        help="comma-separated mollifier schedule (default 2,4,8,16,32)",
    )
    p3.set_defaults(func=cmd_witten, nu_points=0)

    p4 = sub.add_parser("verify", help="run the invariant suite, PASS/FAIL per identity")
    common(p4, "verify")
    p4.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 1 is this tool's usage code
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValueError, TypeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except RefinementNeededError as exc:
        interval = f" (interval {exc.interval[0]:g} .. {exc.interval[1]:g})" if exc.interval else ""
        print(f"refinement needed: {exc}{interval}", file=sys.stderr)
        return 2
    except (NearSingularError, CoverageError) as exc:
        print(f"refinement needed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
