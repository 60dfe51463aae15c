"""k-step policy gradients for finite MDPs with restricted policy classes."""

import json as _json

from ._core import (
    AdvantageTable,
    DescentTrace,
    Experiment,
    KStepModel,
    Mdp,
    PolicyClass,
    UnknownExperiment,
    experiment_names,
    make_experiment,
    project_to_simplex,
    state_aggregation_class,
    unrestricted_class,
)
from . import _core


def class_from_config(mdp, spec):
    return _core.class_from_config(mdp, _json.dumps(spec))


def experiment_from_config(config, base_dir="."):
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _core.experiment_from_config(config, base_dir)


def golden_report(experiment):
    return _json.loads(experiment.check_golden())


def run_experiment(experiment, ks=(), out="out", seed=0, max_iters=1000, threads=0):
    summary = _core.run_experiment(experiment, list(ks), out, seed, max_iters, threads)
    return _json.loads(summary)


def verify(out="out", seed=0):
    return _core.verify(out, seed)


__all__ = [
    "AdvantageTable",
    "DescentTrace",
    "Experiment",
    "KStepModel",
    "Mdp",
    "PolicyClass",
    "UnknownExperiment",
    "class_from_config",
    "experiment_from_config",
    "experiment_names",
    "golden_report",
    "make_experiment",
    "project_to_simplex",
    "run_experiment",
    "state_aggregation_class",
    "unrestricted_class",
    "verify",
]
