"""Atomic file output and a content-addressed spectrum cache."""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path
from typing import Callable, Optional

from .geometry import DomainSpec
from .spectrum import Spectrum, spectrum_from_csv, spectrum_to_csv

CACHE_ENV = "STEKLOV_CACHE"


def atomic_write(path, text: str) -> Path:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def resolve_cache_dir(flag: Optional[str]) -> Optional[Path]:
    """STEKLOV_CACHE wins over the --cache flag."""
    env = os.environ.get(CACHE_ENV)
    chosen = env if env else flag
    return Path(chosen).resolve() if chosen else None


def cache_key(spec: DomainSpec, **params) -> str:
    blob = spec.to_json() + "|" + "|".join(f"{k}={params[k]!r}" for k in sorted(params))
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def cached_spectrum(cache_dir: Optional[Path], spec: DomainSpec, compute: Callable[[], Spectrum], **params) -> Spectrum:
    """Return the cached spectrum for (spec, params) or compute and store it."""
    if cache_dir is None:
        return compute()
    path = Path(cache_dir) / f"spectrum-{cache_key(spec, **params)}.csv"
    if path.exists():
        return spectrum_from_csv(path.read_text(encoding="utf-8"), label=spec.label or "")
    result = compute()
    atomic_write(path, spectrum_to_csv(result))
    return result
