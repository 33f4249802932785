"""Append-only JSON-lines result cache keyed by a hash of the inputs."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path

from filelock import FileLock

from .constants import CACHE_VERSION

log = logging.getLogger(__name__)


def cache_key(spec: dict) -> str:
    blob = json.dumps({"v": CACHE_VERSION, **spec}, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


class ResultCache:
    """Reads tolerate concurrent writers; writes are serialized by a lock file."""

    def __init__(self, path):
        self.path = str(path)
        Path(self.path).parent.mkdir(parents=True, exist_ok=True)
        self._lock = FileLock(self.path + ".lock")
        self._mem: dict = {}
        self._loaded_size = -1

    def _load(self):
        try:
            size = os.path.getsize(self.path)
        except OSError:
            return
        if size == self._loaded_size:
            return
        with open(self.path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    self._mem[rec["key"]] = rec["value"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    log.warning("skipping corrupt cache line %d in %s", lineno, self.path)
        self._loaded_size = size

    def get(self, spec: dict):
        self._load()
        return self._mem.get(cache_key(spec))

    def put(self, spec: dict, value) -> None:
        key = cache_key(spec)
        line = json.dumps({"key": key, "spec": spec, "value": value}, default=str)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        self._mem[key] = value
