"""Shipped assets: the reference robot, shelf scenarios, and parameter files."""

from pathlib import Path

_ROOT = Path(__file__).resolve().parent


def data_path(*parts: str) -> Path:
    """Absolute path of a shipped data file, e.g. data_path("robots", "arm8.yaml")."""
    return _ROOT.joinpath(*parts)
