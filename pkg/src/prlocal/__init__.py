"""Local single-node PageRank estimation under arc-centric oracle access."""
from .baselines import BaselineReport, bippr, chernoff_walks, plain_mc
from .exact import (ScoreVector, contributions_to, exact_pagerank, hop_pagerank, ppr_from,
                    tail_pagerank)
from .graph import (DirectedGraph, DirectAccessError, GraphError, OracleQueryError,
                    OracleSession, QueryCounts, load_edge_list, oracle_only, parse_edge_list,
                    query_count, write_edge_list)
from .hard_instances import (HardFamily, InfeasibleParameters, build_hard_family,
                             reversed_tree, verify_family)
from .montecarlo import McEstimates, monte_carlo
from .push import (FlatPushState, PushState, approx_contributions, pushback_flat,
                   pushback_level, push_without_threshold, y_value)
from .rounding_push import (AlgoParams, EstimateReport, Partition, adaptive_estimate,
                            compute_params, event_E_check, gamma, partition, query_budget,
                            rounding_op, rounding_push_run)

__version__ = "0.1.0"
