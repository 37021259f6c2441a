"""Bundled benchmark problems with known optima."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

__all__ = ["corpus_dir", "corpus_files", "load_corpus"]


def corpus_dir() -> Path:
    return Path(str(resources.files(__name__)))


def corpus_files() -> list[Path]:
    return sorted(corpus_dir().glob("*.prob"))


def load_corpus():
    """All bundled problems, sorted by name; ``metadata['optimum']`` holds f*."""
    from ..problem import load_problem

    return [load_problem(path) for path in corpus_files()]
