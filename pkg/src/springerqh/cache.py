"""Content-addressed on-disk cache for expensive operator matrices.

Entries are keyed by a hash of (operation, family, rank, weight, variant,
package version); values are JSON.  Writes go through a temporary file and
an atomic rename so concurrent workers never observe partial entries.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from typing import Optional

from . import __version__

ENV_VAR = "SPRINGERQH_CACHE_DIR"
DEFAULT_DIR = ".springerqh-cache"


def resolve_dir(flag_value: Optional[str] = None) -> str:
    if flag_value:
        return flag_value
    return os.environ.get(ENV_VAR, DEFAULT_DIR)


class OperatorCache:
    def __init__(self, directory: str):
        self.directory = directory

    def _path(self, key_parts: tuple) -> str:
        digest = hashlib.sha256("|".join(str(p) for p in key_parts + (__version__,))
                                .encode()).hexdigest()
        return os.path.join(self.directory, digest + ".json")

    def get(self, key_parts: tuple) -> Optional[object]:
        path = self._path(key_parts)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return json.load(fh)
        except (OSError, ValueError):
            return None

    def put(self, key_parts: tuple, obj: object) -> None:
        os.makedirs(self.directory, exist_ok=True)
        path = self._path(key_parts)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(obj, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def stat(self) -> dict:
        try:
            names = [n for n in os.listdir(self.directory) if n.endswith(".json")]
        except OSError:
            names = []
        size = 0
        for n in names:
            try:
                size += os.path.getsize(os.path.join(self.directory, n))
            except OSError:
                pass
        return {"directory": self.directory, "entries": len(names), "bytes": size}

    def gc(self) -> int:
        removed = 0
        try:
            names = os.listdir(self.directory)
        except OSError:
            return 0
        for n in names:
            if n.endswith(".json") or n.endswith(".tmp"):
                try:
                    os.unlink(os.path.join(self.directory, n))
                    removed += 1
                except OSError:
                    pass
        return removed
