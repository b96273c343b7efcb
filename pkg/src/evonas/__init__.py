"""Evolutionary multi-objective architecture search over weight-sharing supernets.

Selection runs NSGA-II over validation accuracy, model size and *potential*,
the least-squares trend of a candidate's accuracy over the epochs at which it
was sampled.
"""
from .engine import EngineConfig, SearchResult, generate_offspring, run_generation, run_search, warmup
from .ledger import History, Ledger, ObjectiveVector, objective_vector, potential, potential_with_intercept
from .pareto import Candidate, crowding_distance, dominates, non_dominated_sort, select
from .space import (CandidateOp, Genome, SearchSpace, crossover, decode_onehot, encode_onehot,
                    genome_id, model_size_mb, mutate, param_count, random_genome)

__version__ = "0.1.0"

__all__ = [
    "Candidate", "CandidateOp", "EngineConfig", "Genome", "History", "Ledger", "ObjectiveVector",
    "SearchResult", "SearchSpace", "crossover", "crowding_distance", "decode_onehot", "dominates",
    "encode_onehot", "generate_offspring", "genome_id", "model_size_mb", "mutate",
    "non_dominated_sort", "objective_vector", "param_count", "potential",
    "potential_with_intercept", "random_genome", "run_generation", "run_search", "select", "warmup",
]
