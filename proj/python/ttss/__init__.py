"""Python front end for the ttss C++ core."""

import json

from ._ttss import (
    TT,
    ConfigError,
    Error,
    InvalidArgument,
    RefusalError,
    ShapeError,
    StagnationError,
    diff_matrix,
    eval_matrix,
    gauss_nodes,
    gll_nodes,
    oscillation_count,
    relative_error,
    superconsistent_nodes,
)
from ._ttss import _solve_config

__all__ = [
    "TT",
    "ConfigError",
    "Error",
    "InvalidArgument",
    "RefusalError",
    "ShapeError",
    "StagnationError",
    "diff_matrix",
    "eval_matrix",
    "gauss_nodes",
    "gll_nodes",
    "oscillation_count",
    "relative_error",
    "solve",
    "superconsistent_nodes",
]


def solve(config):
    """Solve a problem given as a dict (same schema as the CLI JSON files)
    or a path to such a file.  Returns (solution TT, report dict)."""
    if isinstance(config, (str, bytes)) and not str(config).lstrip().startswith("{"):
        with open(config) as fh:
            config = json.load(fh)
    text = config if isinstance(config, str) else json.dumps(config)
    x, report = _solve_config(text)
    return x, json.loads(report)
