"""On-disk cache of computed structures (gzip-compressed JSON, atomic writes)."""

from __future__ import annotations

import gzip
import hashlib
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .semigroup import GreenStructure

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ENV_VAR = "TWISTKIT_CACHE"


def default_cache_dir() -> Path:
    if sys.platform == "darwin":
        root = Path.home() / "Library" / "Application Support"
    elif os.name == "nt":
        root = Path(os.environ.get("LOCALAPPDATA", Path.home()))
    else:
        root = Path(os.environ.get("XDG_DATA_HOME", Path.home() / ".local" / "share"))
    return root / "twistkit"


def _checksum(payload) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


class Cache:
    """Key → JSON payload store.  Failures never raise; they warn and degrade."""

    def __init__(self, directory: str | os.PathLike | None = None, version: str = __version__):
        env = os.environ.get(ENV_VAR)
        self.dir = Path(env) if env else Path(directory) if directory else default_cache_dir()
        self.version = version
        self.enabled = True
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
            probe = tempfile.NamedTemporaryFile(dir=self.dir, delete=True)
            probe.close()
        except OSError as exc:
            log.warning("cache disabled: %s is not writable (%s)", self.dir, exc)
            self.enabled = False

    def _path(self, key: str) -> Path:
        return self.dir / (hashlib.sha256(key.encode()).hexdigest()[:32] + ".json.gz")

    def store(self, key: str, payload) -> bool:
        if not self.enabled:
            return False
        entry = {"schema_version": SCHEMA_VERSION, "version": self.version, "key": key,
                 "checksum": _checksum(payload), "payload": payload}
        path = self._path(key)
        try:
            fd, tmp = tempfile.mkstemp(dir=self.dir, suffix=".tmp")
            with os.fdopen(fd, "wb") as fh, gzip.GzipFile(fileobj=fh, mode="wb", mtime=0) as gz:
                gz.write(json.dumps(entry, sort_keys=True).encode())
            os.replace(tmp, path)
        except OSError as exc:
            log.warning("cache write failed for %r: %s", key, exc)
            return False
        return True

    def load(self, key: str):
        """The stored payload, or None on a miss (including stale or corrupt entries)."""
        if not self.enabled:
            return None
        path = self._path(key)
        if not path.exists():
            return None
        try:
            with gzip.open(path, "rb") as gz:
                entry = json.loads(gz.read().decode())
        except (OSError, ValueError, EOFError) as exc:
            log.warning("corrupt cache entry %s ignored: %s", path.name, exc)
            return None
        if entry.get("schema_version") != SCHEMA_VERSION or entry.get("version") != self.version \
                or entry.get("key") != key:
            return None
        if entry.get("checksum") != _checksum(entry.get("payload")):
            log.warning("cache entry %s failed its checksum; ignored", path.name)
            return None
        return entry["payload"]

    def clear(self) -> int:
        if not self.enabled:
            return 0
        n = 0
        for p in self.dir.glob("*.json.gz"):
            p.unlink(missing_ok=True)
            n += 1
        return n

    def stats(self) -> dict:
        files = list(self.dir.glob("*.json.gz")) if self.enabled else []
        return {"dir": str(self.dir), "enabled": self.enabled, "entries": len(files),
                "bytes": sum(p.stat().st_size for p in files)}


def green_to_json(G) -> dict:
    return {
        "classes": {k: getattr(G, f"{k}_class").tolist() for k in ("r", "l", "j", "h", "d")},
        "leq": {k: getattr(G, f"{k}_leq").astype(int).tolist() for k in ("r", "l", "j")},
        "j_cover": [list(e) for e in G.j_cover],
        "group_h": sorted(G.group_h),
        "idempotents": sorted(G.idempotents),
        "regular": sorted(G.regular),
    }


def green_from_json(data: dict):
    cls = {k: np.array(v, dtype=np.int64) for k, v in data["classes"].items()}
    h_members: dict[int, list[int]] = {}
    for x, h in enumerate(data["classes"]["h"]):
        h_members.setdefault(h, []).append(x)
    return GreenStructure(
        r_class=cls["r"], l_class=cls["l"], j_class=cls["j"], h_class=cls["h"], d_class=cls["d"],
        r_leq=np.array(data["leq"]["r"], dtype=bool), l_leq=np.array(data["leq"]["l"], dtype=bool),
        j_leq=np.array(data["leq"]["j"], dtype=bool), j_cover=[tuple(e) for e in data["j_cover"]],
        group_h=frozenset(data["group_h"]), idempotents=frozenset(data["idempotents"]),
        regular=frozenset(data["regular"]), h_members=h_members)
