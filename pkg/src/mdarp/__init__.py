"""Modular dial-a-ride routing: platooning vehicles with en-route passenger transfers."""

from .network import (Network, ShortestPathTables, LayeredNetwork, NetworkError, load_network,
                      all_pairs_shortest, expand_layers, synthetic_road_network)
from .instance import (Vehicle, Request, Parameters, Instance, InstanceError, save_instance,
                       load_instance, generate_instance)
from .schedule import (Stop, PlatoonSegment, TransferRecord, Plan, Timeline, CostBreakdown,
                       PlanError, InfeasiblePlanError, build_timeline, check_feasibility,
                       evaluate_cost, evaluate, cost_difference)

__version__ = "0.1.0"
