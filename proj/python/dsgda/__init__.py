"""Python bindings for the dsgda solver library."""

import json as _json

from ._core import (
    DivergenceError,
    DsgdaError,
    QuadraticGame,
    SpectralConstants,
    ToyGanGame,
    TwoPlayerGame,
    analyze,
    classify,
    explicit_iterate,
    federated_run,
    game_from_json,
    rate_bound,
    round_matrix,
    run,
    sweep_csv,
)


def sweep(config):
    """Run a sweep. `config` is a dict or a JSON string with an "experiment" key."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return sweep_csv(config)


__all__ = [
    "DivergenceError",
    "DsgdaError",
    "QuadraticGame",
    "SpectralConstants",
    "ToyGanGame",
    "TwoPlayerGame",
    "analyze",
    "classify",
    "explicit_iterate",
    "federated_run",
    "game_from_json",
    "rate_bound",
    "round_matrix",
    "run",
    "sweep",
    "sweep_csv",
]
