"""POT interference mitigation simulator."""

import json as _json

from ._potsim import (
    ConfigurationError,
    Error,
    InterferenceProfile,
    MissingArtifactError,
    NumericalDegeneracyError,
    ParameterDomainError,
    PrototypeFilter,
    UnavailablePolicyError,
    ambiguity,
    ambiguity_surface,
    make_filter,
    q_update,
    reward,
    update_aggressor_count,
)
from . import _potsim


def generate_scenario(num_links, area_side=1000.0, max_link_range=100.0, seed=0):
    return _json.loads(_potsim.generate_scenario(num_links, area_side, max_link_range, seed))


def _as_json(config):
    return config if isinstance(config, str) else _json.dumps(config)


def config_hash(config):
    return _potsim.config_hash(_as_json(config))


def run_experiment(config, train_if_missing=False):
    """Runs an experiment given a config dict or JSON text."""
    return _potsim.run_experiment(_as_json(config), train_if_missing)


__all__ = [
    "ConfigurationError",
    "Error",
    "InterferenceProfile",
    "MissingArtifactError",
    "NumericalDegeneracyError",
    "ParameterDomainError",
    "PrototypeFilter",
    "UnavailablePolicyError",
    "ambiguity",
    "ambiguity_surface",
    "config_hash",
    "generate_scenario",
    "make_filter",
    "q_update",
    "reward",
    "run_experiment",
    "update_aggressor_count",
]
