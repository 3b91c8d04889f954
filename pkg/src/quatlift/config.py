"""Run configuration: flat ``key = value`` files, rationals written as p/q."""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path


def _parse_map(text: str) -> dict[int, int]:
    """'11:-1,37:+1' -> {11: -1, 37: 1}."""
    out = {}
    for item in text.replace(" ", "").split(","):
        if item:
            p, _, v = item.partition(":")
            out[int(p)] = int(v)
    return out


def _parse_frac_map(text: str) -> dict[int, Fraction]:
    out = {}
    for item in text.replace(" ", "").split(","):
        if item:
            p, _, v = item.partition(":")
            out[int(p)] = Fraction(v)
    return out


def _parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _fmt_map(m: dict) -> str:
    return ",".join(f"{p}:{v}" for p, v in sorted(m.items()))


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "quatlift"


@dataclass
class RunConfig:
    N: int = 11
    eps_g: dict = field(default_factory=dict)
    l: Fraction = Fraction(1)
    k: int = 0
    D_bound: int = 200
    prime_bound: int = 50
    precision: float = 1e-8
    skew: bool = False
    cache_dir: Path | None = None
    output: Path | None = None
    workers: int = 0  # 0 = all available cores
    ramified: tuple = ()  # explicit finite ramification set (classes command)
    ap: dict = field(default_factory=dict)  # expected eigenvalues for matching
    ap_file: Path | None = None
    tolerance: float | None = None

    _PARSERS = {
        "N": int,
        "eps_g": _parse_map,
        "l": Fraction,
        "k": int,
        "D_bound": int,
        "prime_bound": int,
        "precision": float,
        "skew": _parse_bool,
        "cache_dir": Path,
        "output": Path,
        "workers": int,
        "ramified": lambda s: tuple(sorted(int(x) for x in str(s).replace(" ", "").split(",") if x)),
        "ap": _parse_frac_map,
        "ap_file": Path,
        "tolerance": float,
    }

    def __post_init__(self):
        self.l = Fraction(self.l)
        if self.N <= 0 or self.k < 0 or self.D_bound <= 0 or self.prime_bound <= 0:
            raise ValueError("N, D_bound, prime_bound must be positive and k nonnegative")

    @property
    def n_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    @property
    def threshold(self) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return 1e-4 if self.skew else 1e-6

    def update(self, values: dict) -> "RunConfig":
        for key, raw in values.items():
            if raw is None:
                continue
            if key not in self._PARSERS:
                raise KeyError(f"unknown config key {key!r}")
            setattr(self, key, self._PARSERS[key](raw) if isinstance(raw, str) else raw)
        self.__post_init__()
        return self

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key = value")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
        return cls().update(values)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None or v == () or v == {}:
                continue
            if isinstance(v, dict):
                v = _fmt_map(v)
            elif isinstance(v, tuple):
                v = ",".join(map(str, v))
            elif isinstance(v, bool):
                v = str(v).lower()
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"
