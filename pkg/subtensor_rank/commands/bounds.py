"""
Command printing the closed-form bounds for given order and rank.
"""

from typing import Any, Dict

from ..equations import bound_formula, fd_gd
from ..errors import SubtensorRankError
from ..nullcone import d3_degree_bound
from ..poly_bridge import d_const
from .utils import ExperimentConfig, error_response, report_envelope, success_response


def bounds(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Subtensor size F, rank bound G and D for (d, r); the order-3 degree
    k^3 when d = 3; the h-chain length bound when --m (and --k) are given.
    """
    try:
        config.require("d", "r")
        d, r = config.d, config.r
        F, G = fd_gd(d, r)
        body: Dict[str, Any] = {"d": d, "r": r, "F": F, "G": G, "D": d_const(d)}
        if d == 3 and r >= 1:
            k, m = d3_degree_bound(r)
            body["d3_degree"] = {"k": k, "m": m}
        if config.m is not None:
            k = config.k or 0
            body["chain_bound"] = {"m": config.m, "k": k, "value": bound_formula(d, config.m, k)}
        return success_response(f"F = {F}, G = {G}", report_envelope("bounds", config, body), config)
    except (SubtensorRankError, ValueError) as e:
        return error_response(e, command="bounds")
