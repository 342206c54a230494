"""SuiteSparse Matrix Collection downloads with an on-disk cache.

Cache layout is ``<cache_dir>/<group>/<name>/<name>.mtx``. An entry is only
ever created by an atomic rename, so an interrupted download leaves nothing
behind; concurrent fetches of the same entry serialize on a lock file.
"""

from __future__ import annotations

import os
import shutil
import tarfile
import tempfile
import urllib.error
import urllib.request
from pathlib import Path

from filelock import FileLock

DEFAULT_BASE_URL = "https://sparse.tamu.edu/MM"
CACHE_ENV = "SPGEMM_ORACLE_CACHE"
BASE_URL_ENV = "SPGEMM_ORACLE_MIRROR"


class FetchError(RuntimeError):
    pass


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "spgemm_oracle"


def cache_path(group: str, name: str, cache_dir=None) -> Path:
    root = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    return root / group / name / f"{name}.mtx"


def fetch_suitesparse(group: str, name: str, cache_dir=None, base_url: str | None = None,
                      timeout: float = 60.0) -> Path:
    """Return the path of ``<name>.mtx``, downloading the archive on a cache miss."""
    target = cache_path(group, name, cache_dir)
    if target.is_file():
        return target
    base_url = base_url or os.environ.get(BASE_URL_ENV, DEFAULT_BASE_URL)
    url = f"{base_url.rstrip('/')}/{group}/{name}.tar.gz"
    target.parent.mkdir(parents=True, exist_ok=True)

    with FileLock(str(target.parent / ".lock")):
        if target.is_file():
            return target
        with tempfile.TemporaryDirectory(dir=target.parent) as tmp:
            archive = Path(tmp) / f"{name}.tar.gz"
            try:
                with urllib.request.urlopen(url, timeout=timeout) as resp, open(archive, "wb") as out:
                    shutil.copyfileobj(resp, out)
            except urllib.error.HTTPError as exc:
                raise FetchError(f"{group}/{name}: HTTP {exc.code} from {url}") from exc
            except (urllib.error.URLError, OSError) as exc:
                raise FetchError(f"{group}/{name}: download failed from {url}: {exc}") from exc

            staged = Path(tmp) / f"{name}.mtx"
            try:
                with tarfile.open(archive, "r:gz") as tar:
                    member = next(
                        (m for m in tar.getmembers() if m.isfile() and Path(m.name).name == f"{name}.mtx"),
                        None,
                    )
                    if member is None:
                        raise FetchError(f"{group}/{name}: archive has no {name}.mtx")
                    src = tar.extractfile(member)
                    with src, open(staged, "wb") as out:
                        shutil.copyfileobj(src, out)
            except (tarfile.TarError, EOFError, OSError) as exc:
                raise FetchError(f"{group}/{name}: cannot decompress archive: {exc}") from exc
            os.replace(staged, target)
    return target
