"""Command line: classes, eigen, lift, verify, weights.

Exit codes: 0 pass, 1 other error, 2 hypothesis violation, 3 verification
failure, 4 precision failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .cache import Cache
from .config import RunConfig, default_cache_dir
from .errors import HypothesisViolation, PrecisionFailure, QuatliftError, VerificationFailure
from .pipeline import (
    CURVE_LEVELS,
    build_context,
    build_space,
    check_against_system,
    class_summary,
    eigen_listing,
    lift_table,
    ramification,
    run_verify,
    target_form,
    target_system,
)
from .lvalues import curve_system
from .weightfn import check_axioms

log = logging.getLogger("quatlift")

EXIT_OK, EXIT_ERROR, EXIT_HYPOTHESIS, EXIT_VERIFY, EXIT_PRECISION = 0, 1, 2, 3, 4


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        log.info("wrote %s", path)


def _cache(cfg: RunConfig, args) -> Cache:
    if getattr(args, "no_cache", False):
        return Cache(None)
    return Cache(cfg.cache_dir or default_cache_dir())


def cmd_classes(cfg: RunConfig, args) -> int:
    summary, _ = class_summary(cfg.N, ramification(cfg))
    _emit(summary.to_text(), cfg.output)
    return EXIT_OK


def cmd_eigen(cfg: RunConfig, args) -> int:
    cls, _, space = build_space(cfg.N, ramification(cfg), cfg.k)
    entries, skipped = eigen_listing(cls, space, cfg.N, cfg.prime_bound)
    lines = [f"# N={cfg.N} k={cfg.k} cusp_dim={len(entries) + skipped} rational_systems={len(entries)} unsplit_dim={skipped}"]
    label = CURVE_LEVELS.get(cfg.N) if cfg.k == 0 else None
    ref = curve_system(label) if label else None
    for e in entries:
        tag = ""
        if ref is not None and not check_against_system(e, ref):
            tag = f"  # {label}"
        lines.append(e.to_text() + tag)
    _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK


def cmd_lift(cfg: RunConfig, args) -> int:
    ctx = build_context(cfg)
    entries, _ = eigen_listing(ctx.classes, ctx.space, cfg.N, cfg.prime_bound)
    entry = target_form(ctx, target_system(ctx), entries)
    cache = _cache(cfg, args)
    table = lift_table(ctx, entry, cfg.D_bound, cache)
    if not table.plus_space_ok():
        raise VerificationFailure("coefficients outside the plus space")
    _emit(table.to_text(), cfg.output)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    ctx = build_context(cfg)
    res = run_verify(ctx, _cache(cfg, args))
    _emit(res.report.to_text(), cfg.output)
    if cfg.output is not None:
        payload = res.report.to_json()
        payload["checks"] = {k: {"ok": ok, "detail": d} for k, (ok, d) in res.checks.items()}
        payload["status"] = res.status
        cfg.output.with_suffix(".json").write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    sys.stderr.write(res.summary())
    if res.status == "WARN":
        log.warning("skew mode: ratio test did not pass (informational)")
    return EXIT_OK if res.status in ("PASS", "WARN") else EXIT_VERIFY


def cmd_weights(cfg: RunConfig, args) -> int:
    ctx = build_context(cfg)
    w = ctx.weight
    lines = [f"# l={cfg.l} level={w.L.level} primes={','.join(map(str, sorted(w.tables)))}"]
    for p, tab in sorted(w.tables.items()):
        viol = check_axioms(w.L, tab)
        lines.append(f"# p={p} seed={tab.vector(tab.seed)} violations={sum(viol.values())}")
        for idx in range(p**3):
            v = int(tab.values[idx])
            if v:
                x = tab.vector(idx)
                lines.append(f"{p}\t{x[0]}\t{x[1]}\t{x[2]}\t{v:+d}")
    _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK


COMMANDS = {
    "classes": cmd_classes,
    "eigen": cmd_eigen,
    "lift": cmd_lift,
    "verify": cmd_verify,
    "weights": cmd_weights,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quatlift", description="Theta lifts of quaternionic forms and twisted central values.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path, help="key = value configuration file")
    ap.add_argument("--N", dest="N")
    ap.add_argument("--eps-g", dest="eps_g", help="Atkin-Lehner signs, e.g. 11:-1")
    ap.add_argument("--l", dest="l", help="rational twist parameter, e.g. 5 or -7/4")
    ap.add_argument("--k", dest="k")
    ap.add_argument("--D-bound", dest="D_bound")
    ap.add_argument("--prime-bound", dest="prime_bound")
    ap.add_argument("--precision", dest="precision")
    ap.add_argument("--skew", dest="skew", nargs="?", const="true")
    ap.add_argument("--ramified", dest="ramified", help="finite ramified primes, e.g. 2 or 2,3,5")
    ap.add_argument("--ap", dest="ap", help="expected eigenvalues, e.g. 2:-2,3:-1")
    ap.add_argument("--ap-file", dest="ap_file")
    ap.add_argument("--tolerance", dest="tolerance")
    ap.add_argument("--cache-dir", dest="cache_dir")
    ap.add_argument("--no-cache", action="store_true")
    ap.add_argument("--output", "-o", dest="output")
    ap.add_argument("--workers", dest="workers", help="worker processes (default: all cores)")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    return ap


KEYS = ["N", "eps_g", "l", "k", "D_bound", "prime_bound", "precision", "skew", "ramified", "ap", "ap_file", "tolerance", "cache_dir", "output", "workers"]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        cfg.update({k: getattr(args, k) for k in KEYS})
    except (ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"error: bad configuration: {exc}\n")
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](cfg, args)
    except HypothesisViolation as exc:
        sys.stderr.write(f"hypothesis violated ({type(exc).__name__}): {exc}\n")
        return EXIT_HYPOTHESIS
    except VerificationFailure as exc:
        sys.stderr.write(f"verification failed ({type(exc).__name__}): {exc}\n")
        return EXIT_VERIFY
    except PrecisionFailure as exc:
        sys.stderr.write(f"precision failure ({type(exc).__name__}): {exc}\n")
        return EXIT_PRECISION
    except QuatliftError as exc:
        sys.stderr.write(f"error ({type(exc).__name__}): {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
