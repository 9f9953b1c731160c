"""Command-line surface.

Commands: eval, verify-paper, jacobian, certify, search, symbolic.
Structured results go to stdout, diagnostics and progress to stderr.
Exit codes: 0 success/certified, 1 hypothesis or verification failure,
2 usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import __version__
from .certify import (
    CertificationError,
    certificate_to_text,
    certify_point,
    jacobian,
    parse_certificate,
    rank_mod_p,
    reverify,
)
from .engine import (
    COEFFICIENT_NAMES,
    TermLimitExceeded,
    focal_values,
    symbolic_focal_values,
)
from .rings import PrimeField
from .search import SearchConfig, search_run
from .systemio import (
    REFERENCE_COEFFS,
    REFERENCE_P,
    SystemFileError,
    build_system,
    format_system,
    load_system,
)

USAGE_ERROR = 2
HYPOTHESIS_FAILED = 1


def _err(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return USAGE_ERROR


def _load_input(args) -> tuple:
    """Resolve (p, coeffs) from a system file or inline coefficients."""
    if getattr(args, "coeffs", None):
        raw = args.coeffs.replace(",", " ").split()
        if len(raw) != 14:
            raise SystemFileError(f"--coeffs needs 14 values, got {len(raw)}")
        p = getattr(args, "p", None)
        if p is not None:
            PrimeField(p)
            coeffs = [int(v) % p for v in raw]
        else:
            coeffs = [Fraction(v) for v in raw]
        return p, coeffs
    if not args.system:
        raise SystemFileError("give a system file or --coeffs")
    return load_system(args.system)


# ---------------------------------------------------------------------------

def cmd_eval(args) -> int:
    try:
        p, coeffs = _load_input(args)
        sys_obj = build_system(p, coeffs)
        seq, _ = focal_values(sys_obj, args.N, args.convention)
    except (SystemFileError, ValueError) as exc:
        return _err(str(exc))
    for j, v in enumerate(seq.values, start=1):
        print(f"s_{j} = {v}")
    if seq.first_nonzero is None:
        print(f"first_nonzero: none (s_1..s_{args.N} all vanish)")
    else:
        print(f"first_nonzero: {seq.first_nonzero}")
    return 0


def cmd_verify_paper(args) -> int:
    try:
        cert = certify_point(REFERENCE_COEFFS, REFERENCE_P, args.depth, args.convention)
    except CertificationError as exc:
        print(f"FAILED: {exc}")
        return HYPOTHESIS_FAILED
    except ValueError as exc:
        return _err(str(exc))
    text = certificate_to_text(cert)
    print(text, end="")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"certificate written to {args.out}", file=sys.stderr)
    return 0


def cmd_jacobian(args) -> int:
    try:
        p, coeffs = _load_input(args)
        if p is None:
            return _err("jacobian is computed over F_p; the system file must set p")
        rows = jacobian(coeffs, p, args.k, args.convention)
    except (SystemFileError, ValueError) as exc:
        return _err(str(exc))
    width = len(str(p - 1))
    print("      " + " ".join(f"{n:>{width}}" for n in COEFFICIENT_NAMES))
    for j, row in enumerate(rows, start=1):
        print(f"s_{j:<4}" + " " + " ".join(f"{v:>{width}}" for v in row))
    print(f"rank = {rank_mod_p(rows, p)}")
    return 0


def cmd_certify(args) -> int:
    if args.recheck:
        try:
            with open(args.recheck) as fh:
                cert = parse_certificate(fh.read())
        except (OSError, ValueError) as exc:
            return _err(str(exc))
        try:
            reverify(cert)
        except (CertificationError, ValueError) as exc:
            print(f"FAILED: {exc}")
            return HYPOTHESIS_FAILED
        print(f"certificate re-verified: depth {cert.depth}, prime {cert.p}")
        return 0
    try:
        p, coeffs = _load_input(args)
        if p is None:
            return _err("certification runs over F_p; the system file must set p")
    except (SystemFileError, ValueError) as exc:
        return _err(str(exc))
    try:
        cert = certify_point(coeffs, p, args.k, args.convention)
    except CertificationError as exc:
        print(f"FAILED: {exc}")
        return HYPOTHESIS_FAILED
    except ValueError as exc:
        return _err(str(exc))
    text = certificate_to_text(cert)
    print(text, end="")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"certificate written to {args.out}", file=sys.stderr)
    return 0


def _progress_printer(interval: float = 1.0):
    last = [time.monotonic()]

    def cb(stats):
        now = time.monotonic()
        if now - last[0] < interval:
            return
        last[0] = now
        surv = " ".join(str(n) for n in stats.survivors()[:8])
        print(
            f"progress: trials={stats.trials} accepted={stats.accepted} "
            f"hits={stats.hits} survivors=[{surv}] "
            f"rate={stats.trials_per_s:,.0f}/s",
            file=sys.stderr,
        )

    return cb


def cmd_search(args) -> int:
    try:
        coords = tuple(int(v) for v in args.coords.split(",")) if args.coords else (3, 13)
        config = SearchConfig(
            p=args.p, target_depth=args.target, strategy=args.strategy,
            coords=coords, seed=args.seed, stream=args.stream, budget=args.budget,
            convention=args.convention, eval_cap=args.cap, workers=args.workers,
            chunk_size=args.chunk_size, hit_log_path=args.hit_log,
            checkpoint_path=args.checkpoint, force_reference=args.reference_kernel,
        )
        config.validate()
    except ValueError as exc:
        return _err(str(exc))
    progress = None if args.quiet else _progress_printer()
    try:
        stats, hits = search_run(
            config, resume=args.resume, progress=progress,
            collect_hits=args.hit_log is None,
        )
    except KeyboardInterrupt:
        print("interrupted; rerun with --resume to continue from the last checkpoint"
              if args.checkpoint else "interrupted (no checkpoint configured)",
              file=sys.stderr)
        return 130
    except Exception as exc:  # checkpoint errors, unwritable paths
        return _err(str(exc))
    if args.hit_log is None:
        for rec in hits:
            print(rec.to_line())
    print(f"trials: {stats.trials}")
    print(f"accepted: {stats.accepted}")
    print(f"rejected: {stats.rejected}")
    print(f"hits (depth >= {config.target_depth}): {stats.hits}")
    print("survivors by depth: " + " ".join(str(n) for n in stats.survivors()))
    print(f"elapsed: {stats.elapsed_s:.2f} s")
    print(f"throughput: {stats.trials_per_s:,.0f} trials/s")
    if args.hit_log is not None:
        print(f"hit log: {args.hit_log}", file=sys.stderr)
    return 0


def cmd_symbolic(args) -> int:
    try:
        seq, ring = symbolic_focal_values(
            args.d, args.N, args.convention, term_limit=args.max_terms
        )
    except TermLimitExceeded as exc:
        return _err(str(exc))
    except ValueError as exc:
        return _err(str(exc))
    from .engine import coefficient_weights

    weights = coefficient_weights(args.d)
    for j, poly in enumerate(seq.values, start=1):
        degs = ring.weighted_degrees(poly, weights)
        homog = "yes" if degs == {2 * j} or not poly else f"NO ({sorted(degs)})"
        print(f"s_{j}: {ring.term_count(poly)} terms, "
              f"weighted degree {2 * j} homogeneous: {homog}")
        if not args.counts_only:
            print(f"s_{j} = {ring.format(poly)}")
    return 0


def cmd_example(args) -> int:
    print(format_system(REFERENCE_P, REFERENCE_COEFFS,
                        meta={"comment": "bundled reference system"}), end="")
    return 0


# ---------------------------------------------------------------------------

def _add_system_args(sp, with_p=True):
    sp.add_argument("system", nargs="?", help="system file (JSON)")
    sp.add_argument("--coeffs", help="14 inline coefficients, comma separated")
    if with_p:
        sp.add_argument("--p", type=int, help="prime modulus for inline coefficients")


def _add_convention(sp):
    sp.add_argument("--convention", choices=("N1", "N2"), default="N1",
                    help="normalization convention (default N1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="focalvalues",
        description="Focal values of plane polynomial systems: exact evaluation, "
                    "modular search, and rank certification.",
    )
    ap.add_argument("--version", action="version", version=f"focalvalues {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eval", help="compute s_1..s_N for a system")
    _add_system_args(sp)
    sp.add_argument("-N", type=int, default=12, help="number of focal values (default 12)")
    _add_convention(sp)
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("verify-paper",
                        help="certify the bundled reference system (depth 11, p = 29)")
    sp.add_argument("--depth", type=int, default=11)
    sp.add_argument("--out", help="write the certificate to this file")
    _add_convention(sp)
    sp.set_defaults(fn=cmd_verify_paper)

    sp = sub.add_parser("jacobian", help="print the k x 14 Jacobian of s_1..s_k and its rank")
    _add_system_args(sp)
    sp.add_argument("-k", type=int, default=11)
    _add_convention(sp)
    sp.set_defaults(fn=cmd_jacobian)

    sp = sub.add_parser("certify", help="issue or re-verify a rank certificate")
    _add_system_args(sp)
    sp.add_argument("-k", type=int, default=11, help="vanishing depth to certify")
    sp.add_argument("--out", help="write the certificate to this file")
    sp.add_argument("--recheck", help="re-verify an existing certificate file")
    _add_convention(sp)
    sp.set_defaults(fn=cmd_certify)

    sp = sub.add_parser("search", help="randomized search for deep vanishing prefixes")
    sp.add_argument("--p", type=int, default=29)
    sp.add_argument("--strategy", choices=("rejection", "parametrized"), default="rejection")
    sp.add_argument("--target", type=int, default=1, help="required vanishing depth")
    sp.add_argument("--budget", type=int, required=True, help="number of trials")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--chunk-size", type=int, default=16384)
    sp.add_argument("--coords", help="designated solve coordinates, e.g. 3,13")
    sp.add_argument("--cap", type=int, help="evaluation depth cap")
    sp.add_argument("--hit-log", help="append hit records to this file")
    sp.add_argument("--checkpoint", help="checkpoint file for resumable runs")
    sp.add_argument("--resume", action="store_true", help="continue from the checkpoint")
    sp.add_argument("--quiet", action="store_true", help="suppress progress output")
    sp.add_argument("--reference-kernel", action="store_true",
                    help="force the pure-Python kernel")
    _add_convention(sp)
    sp.set_defaults(fn=cmd_search)

    sp = sub.add_parser("symbolic", help="focal values with symbolic coefficients")
    sp.add_argument("--N", type=int, default=3, help="number of focal values")
    sp.add_argument("--d", type=int, default=3, help="system degree")
    sp.add_argument("--max-terms", type=int, default=5_000_000,
                    help="abort if intermediate polynomials exceed this many terms")
    sp.add_argument("--counts-only", action="store_true",
                    help="print term counts and homogeneity only")
    _add_convention(sp)
    sp.set_defaults(fn=cmd_symbolic)

    sp = sub.add_parser("example", help="print the bundled reference system file")
    sp.set_defaults(fn=cmd_example)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
