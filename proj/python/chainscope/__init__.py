"""Chain transitivity, periods and mixing of iterated function systems on box grids."""

import json
from pathlib import Path

from ._chainscope import (
    ConfigError,
    DiscretizationBreakdown,
    DomainError,
    HypothesisError,
    ResourceError,
    graph_summary,
    odometer_add,
    odometer_step,
    version,
)
from . import _chainscope

__all__ = [
    "ConfigError",
    "DiscretizationBreakdown",
    "DomainError",
    "HypothesisError",
    "ResourceError",
    "analyze",
    "scan",
    "shadow",
    "odometer",
    "export",
    "graph_summary",
    "odometer_add",
    "odometer_step",
    "version",
]


def _run(command, config):
    # a path or the config text itself
    if isinstance(config, Path) or ("\n" not in config and Path(config).is_file()):
        path = Path(config)
        return json.loads(_chainscope.run(command, path.read_text(), str(path)))
    return json.loads(_chainscope.run(command, config))


def analyze(config):
    return _run("analyze", config)


def scan(config):
    return _run("scan", config)


def shadow(config):
    return _run("shadow", config)


def odometer(config):
    return _run("odometer", config)


def export(config):
    return _run("export", config)
