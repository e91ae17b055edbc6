"""Rank-2 multiplicative random graphs and their thinned Levy limits."""

import json

from . import _rank2
from ._rank2 import Rank2Error, ks_two_sample, size_biased_order

__all__ = [
    "Rank2Error",
    "bip_er_spec",
    "component_masses",
    "ks_two_sample",
    "run_experiment",
    "size_biased_order",
    "validate_spec",
    "zeta",
]


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def validate_spec(spec):
    """Round-trips a spec dict through the validator."""
    return json.loads(_rank2.validate_spec(_dump(spec)))


def component_masses(spec, seed, top_k=0):
    """(masses, counts), both (k, 2) arrays in ORD1 order."""
    return _rank2.component_masses(_dump(spec), seed, top_k)


def zeta(beta, theta=(), lam=0.0, seed=0, h=None, T=None, max_doublings=3):
    """Excursion lengths of W^{beta, theta, lam}, longest first."""
    return _rank2.zeta(beta, list(theta), lam, seed, h, T, max_doublings)


def bip_er_spec(n, m, lambda12, regime="light", theta=0.0):
    """{'spec': ..., 'limits': [...]} for B(n, m, p)."""
    return json.loads(_rank2.bip_er_spec(n, m, lambda12, regime, theta))


def run_experiment(config):
    """Runs a regime experiment; returns the report as a dict."""
    return json.loads(_rank2.run_experiment(_dump(config)))
