"""
Command multilinearizing a polynomial and splitting it into an h-chain.
"""

from typing import Any, Dict

import structlog

from ..equations import extract_hchain, find_k, multilinearize, weight_of
from ..errors import SubtensorRankError
from .utils import ExperimentConfig, error_response, load_poly, load_tensor, report_envelope, success_response

logger = structlog.get_logger(__name__)


def hchain(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Multilinearize the polynomial in ``config.inputs[0]`` and extract its h-chain.

    Args:
        config (ExperimentConfig): polynomial path; an optional second input is a
            tensor for which the chain level k is located

    Returns:
        dict: weight, the multilinear polynomial, the chain and its verification
    """
    try:
        f = load_poly(config.input_path(0, "polynomial"), config.field)
        g = multilinearize(f)
        chain = extract_hchain(g)
        body = {
            "weight": weight_of(f).to_json(),
            "multilinear": g.to_json(),
            "chain": chain.to_json(),
            "verified": chain.verify(),
        }
        if len(config.inputs) > 1:
            T = load_tensor(config.inputs[1], chain.field)
            found = find_k(T, chain)
            body["k"] = found.k
            body["placement"] = [[i + 1 for i in inj] for inj in found.witness]
        logger.info("hchain_extracted", m=chain.m, order=chain.order, verified=body["verified"])
        return success_response(
            f"Extracted an h-chain of length {chain.m}",
            report_envelope("hchain", config, body),
            config,
        )
    except (SubtensorRankError, ValueError) as e:
        return error_response(e, command="hchain")
