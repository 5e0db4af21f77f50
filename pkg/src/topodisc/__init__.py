"""Multichannel topology discovery in cognitive radio networks.

Scenario sampling, channel-hopping rules, a slot-synchronous discovery
engine, analytical oracles and an experiment harness.
"""
from .core import (ChannelSet, KnowledgeIntegrityError, KnowledgeState, Scenario, Topology,
                   intersect_all, is_complete, jaccard, merge_knowledge)
from .engine import (EngineConfig, RunResult, connected_components, pair_ttr, run_discovery,
                     run_pair_indicators, step)
from .hopping import AlgorithmSpec, Kind, Permutation, perm_from_seed
from .scenario import ScenarioParams, generate_scenario, validate_scenario

__version__ = "0.1.0"
