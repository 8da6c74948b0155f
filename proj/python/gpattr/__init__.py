"""Multi-touch attribution with multivariate Hawkes processes.

Paths are lists of dicts (one JSON object per path), models, catalogs,
scenarios and ground truths are dicts, reports are lists of dicts.
"""

import json

from . import _core
from ._core import Error, InvalidArgument, ParseError, hellinger, kl_divergence

__all__ = [
    "Error",
    "InvalidArgument",
    "ParseError",
    "attribute",
    "baselines",
    "evaluate",
    "fit",
    "ground_truth",
    "hawkes_scenario",
    "hellinger",
    "kl_divergence",
    "reproduce",
    "simulate",
]


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def _lines(rows):
    return "".join(json.dumps(r) + "\n" for r in rows)


def _parse_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def hawkes_scenario(n_paths=10000, horizon=365.0, seed=1):
    """The built-in two-channel (display, search) scenario."""
    return json.loads(_core.hawkes_scenario(n_paths, horizon, seed))


def simulate(scenario, n_paths=None, seed=None, disable=(), threads=1):
    return _parse_lines(_core.simulate(_dump(scenario), n_paths, seed, list(disable), threads))


def ground_truth(scenario, n_paths=None, seed=None, threads=1):
    return json.loads(_core.ground_truth(_dump(scenario), n_paths, seed, threads))


def fit(catalog, paths, gamma=None, rule="one-se", folds=5, refit=True, kernel="exp", t0=10.0, threads=1):
    """Fit the model; gamma=None selects it by cross-validation."""
    return json.loads(_core.fit(_dump(catalog), _lines(paths), gamma, rule, folds, refit, kernel, t0, threads))


def attribute(catalog, model, paths, method="tre", granularity="channel", threads=1):
    return _parse_lines(_core.attribute(_dump(catalog), _dump(model), _lines(paths), method, granularity, threads))


def baselines(catalog, paths, method, half_life=7.0, threads=1):
    return _parse_lines(_core.baselines(_dump(catalog), _lines(paths), method, half_life, threads))


def evaluate(truth, reports):
    return json.loads(_core.evaluate(_dump(truth), _lines(reports)))


def reproduce(runs=10, seed=1, n_paths=10000, horizon=365.0, rule="one-se", refit=True, threads=0):
    return json.loads(_core.reproduce(runs, seed, n_paths, horizon, rule, refit, threads))
