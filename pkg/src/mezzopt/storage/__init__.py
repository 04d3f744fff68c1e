from .compartments import assign_compartments, compartment_penalty
from .floors import split_across_floors
from .nsga2 import FloorFront, NsgaParams, run_nsga2, select_tradeoff
from .operators import MUTATORS, mutate, repair, single_point_crossover, tournament_select
from .problem import (OBJECTIVES, AssignmentTask, Chromosome, FloorProblem, ScoreConfig,
                      correlation_score, distance_score, quantity_score, spread_score)
from .solve import STORAGE_ALGORITHMS, StorageResult, solve_storage

__all__ = [
    "AssignmentTask", "Chromosome", "FloorFront", "FloorProblem", "MUTATORS", "NsgaParams",
    "OBJECTIVES", "STORAGE_ALGORITHMS", "ScoreConfig", "StorageResult", "assign_compartments",
    "compartment_penalty", "correlation_score", "distance_score", "mutate", "quantity_score",
    "repair", "run_nsga2", "select_tradeoff", "single_point_crossover", "solve_storage",
    "split_across_floors", "spread_score", "tournament_select",
]
