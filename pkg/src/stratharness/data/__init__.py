"""Packaged assets: default scoring config and the default fixed placement."""

from __future__ import annotations

from importlib import resources


def read_text(name: str) -> str:
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")


def default_layout_text() -> str:
    return read_text("fixed_layout.txt")


def default_scoring_text() -> str:
    return read_text("scoring_default.yaml")
