"""Run configuration, the q-expansion cache and atomic file output."""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .modforms import (
    DEFAULT_BOUND,
    CorpusError,
    NewformRecord,
    corpus,
    dumps_record,
    load_directory,
    loads_record,
)

log = logging.getLogger(__name__)

CACHE_ENV = "TWISTLAB_CACHE"

OUTPUT_FORMATS = ("text", "json", "csv")
WEIGHT_CONVENTIONS = ("motivic", "statement")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    coefficient_bound: int = DEFAULT_BOUND
    density_X: int = 100_000
    modulus_bound: int = 16
    weight_convention: str = "motivic"
    tail_window: int = 3
    checkpoints: int = 8
    output_format: str = "text"
    user_dir: str | None = None

    def validate(self) -> "RunConfig":
        for name in ("coefficient_bound", "density_X", "modulus_bound", "tail_window", "checkpoints"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.weight_convention not in WEIGHT_CONVENTIONS:
            raise ConfigError(f"weight_convention must be one of {WEIGHT_CONVENTIONS}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"output_format must be one of {OUTPUT_FORMATS}")
        return self

    def updated(self, **overrides) -> "RunConfig":
        clean = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **clean).validate()


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    fields = {f.name: f for f in dataclasses.fields(RunConfig)}
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in fields:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if fields[key].type in ("int", int):
            try:
                out[key] = int(value.replace("_", ""))
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs an integer") from None
        else:
            out[key] = value
    return out


def load_config(path: str | Path | None, **overrides) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        cfg = cfg.updated(**parse_config_text(Path(path).read_text()))
    return cfg.updated(**overrides)


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def cache_dir() -> Path | None:
    value = os.environ.get(CACHE_ENV)
    return Path(value) if value else None


def cache_path(root: Path, fid: str, bound: int) -> Path:
    return root / f"{fid}__{bound}.qexp"


def write_cached(root: Path, rec: NewformRecord) -> Path:
    text = dumps_record(rec)
    path = cache_path(root, rec.id, rec.bound)
    atomic_write(path, text)
    atomic_write(path.with_suffix(".sha256"), _digest(text) + "\n")
    return path


def read_cached(root: Path, fid: str, bound: int) -> NewformRecord | None:
    path = cache_path(root, fid, bound)
    check = path.with_suffix(".sha256")
    if not path.exists() or not check.exists():
        return None
    text = path.read_text()
    if _digest(text) != check.read_text().strip():
        log.warning("checksum mismatch for %s, regenerating", path)
        return None
    try:
        return loads_record(text)
    except CorpusError:
        log.warning("unreadable cache entry %s, regenerating", path)
        return None


def builtin_records(bound: int, root: Path | None = None) -> list[NewformRecord]:
    """Built-in corpus at ``bound``, served from the cache directory when possible."""
    root = cache_dir() if root is None else root
    if root is None:
        return list(corpus(bound))
    from .modforms import _ETA_FORMS, LEVEL_ONE_WEIGHTS, _level_one_id

    ids = [_level_one_id(k) for k in LEVEL_ONE_WEIGHTS] + [e[0] for e in _ETA_FORMS]
    cached = [read_cached(root, fid, bound) for fid in ids]
    if all(rec is not None for rec in cached):
        return cached
    records = list(corpus(bound))
    for rec in records:
        write_cached(root, rec)
    return records


def user_records(user_dir: str | Path | None) -> list[NewformRecord]:
    return load_directory(user_dir) if user_dir else []
