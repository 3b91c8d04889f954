"""Content-addressed result cache.

Entries are JSON files named by the sha256 of a canonical serialization of the
request. Each file also records the sha256 of its payload, so a corrupted or
hand-edited entry is detected and treated as a miss.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path

log = logging.getLogger(__name__)


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)


def digest(obj) -> str:
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


class Cache:
    def __init__(self, root):
        self.root = Path(root) if root is not None else None
        self.hits = 0
        self.misses = 0

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, request):
        if self.root is None:
            return None
        key = digest(request)
        p = self.path(key)
        if not p.exists():
            self.misses += 1
            return None
        try:
            entry = json.loads(p.read_text())
            ok = entry.get("key") == key and entry.get("sha256") == digest(entry["payload"])
        except (ValueError, KeyError, TypeError):
            ok = False
        if not ok:
            log.warning("cache entry %s is corrupted; recomputing", key[:12])
            self.misses += 1
            return None
        self.hits += 1
        log.info("cache hit %s", key[:12])
        return entry["payload"]

    def put(self, request, payload) -> None:
        if self.root is None:
            return
        key = digest(request)
        p = self.path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        entry = {"key": key, "request": request, "sha256": digest(payload), "payload": payload}
        tmp = p.with_suffix(f".{os.getpid()}.tmp")
        tmp.write_text(canonical(entry))
        os.replace(tmp, p)
