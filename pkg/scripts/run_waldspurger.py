"""Ratio test between squared theta coefficients and twisted central values.

    python scripts/run_waldspurger.py --N 37 --l 5 --D-bound 200
"""
from __future__ import annotations

import argparse
import json
import logging
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from quatlift.cache import Cache
from quatlift.config import RunConfig
from quatlift.pipeline import build_context, run_verify


@dataclass
class Experiment:
    N: int = 11
    l: str = "1"
    D_bound: int = 200
    precision: float = 1e-8
    skew: bool = False
    tolerance: float | None = None
    out_dir: Path = Path("results")
    cache_dir: Path | None = None


def parse(argv=None) -> Experiment:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=Experiment.N)
    ap.add_argument("--l", default=Experiment.l)
    ap.add_argument("--D-bound", type=int, default=Experiment.D_bound)
    ap.add_argument("--precision", type=float, default=Experiment.precision)
    ap.add_argument("--skew", action="store_true")
    ap.add_argument("--tolerance", type=float)
    ap.add_argument("--out-dir", type=Path, default=Experiment.out_dir)
    ap.add_argument("--cache-dir", type=Path)
    return Experiment(**vars(ap.parse_args(argv)))


def run(exp: Experiment) -> dict:
    cfg = RunConfig(N=exp.N, l=Fraction(exp.l), D_bound=exp.D_bound, precision=exp.precision, skew=exp.skew, tolerance=exp.tolerance)
    t0 = time.perf_counter()
    res = run_verify(build_context(cfg), Cache(exp.cache_dir))
    elapsed = time.perf_counter() - t0
    exp.out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"ratio_N{cfg.N}_l{str(cfg.l).replace('/', '_')}_D{cfg.D_bound}"
    (exp.out_dir / f"{stem}.tsv").write_text(res.report.to_text())
    summary = {
        "experiment": {k: str(v) for k, v in asdict(exp).items()},
        "status": res.status,
        "L_l": res.L_l,
        "constancy": res.report.constancy,
        "rows": len(res.report.rows),
        "nonzero_lambda": len(res.table.nonzero()),
        "checks": {k: ok for k, (ok, _) in res.checks.items()},
        "seconds": round(elapsed, 2),
    }
    (exp.out_dir / f"{stem}.json").write_text(json.dumps(summary, indent=1) + "\n")
    print(res.summary(), end="")
    print(f"wrote {exp.out_dir / stem}.{{tsv,json}} in {elapsed:.1f}s")
    return summary


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    run(parse())
