from .aco import (AcoParams, AcoResult, Pheromones, aco4_delta, aco_optimize, construct_pick_route,
                  heuristic_value, pareto_routes, transition_probability, update_aco3, update_aco4)
from .graph import Market, MarketGraph, OrderContext, build_market_graph
from .routes import (PickRoute, RackVisit, replay_route, reverse_route, travel_distance, validate_route,
                     weight_violations)
from .solve import PICKING_ALGORITHMS, PickingResult, solve_picking
from .sshape import s_shape_routes, s_shape_sequence, serpentine

__all__ = [
    "AcoParams", "AcoResult", "Market", "MarketGraph", "OrderContext", "PICKING_ALGORITHMS",
    "Pheromones", "PickRoute", "PickingResult", "RackVisit", "aco4_delta", "aco_optimize",
    "build_market_graph", "construct_pick_route", "heuristic_value", "pareto_routes", "replay_route",
    "reverse_route", "s_shape_routes", "s_shape_sequence", "serpentine", "solve_picking",
    "transition_probability", "travel_distance", "update_aco3", "update_aco4", "validate_route",
    "weight_violations",
]
