"""
Command producing an explicit partition decomposition of a tensor on which a
vanishing polynomial's orbit vanishes.
"""

from typing import Any, Dict

import structlog

from ..equations import decompose_via_chain, extract_hchain, multilinearize
from ..errors import SubtensorRankError
from .utils import ExperimentConfig, error_response, load_poly, load_tensor, report_envelope, success_response

logger = structlog.get_logger(__name__)


def decompose(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Decompose the tensor ``config.inputs[1]`` using the polynomial ``config.inputs[0]``.

    Args:
        config (ExperimentConfig): polynomial path then tensor path

    Returns:
        dict: the decomposition, its length against the bound, and the tensor
    """
    try:
        T = load_tensor(config.input_path(1, "tensor"), config.field)
        f = load_poly(config.input_path(0, "polynomial"), T.field)
        chain = extract_hchain(multilinearize(f))
        result = decompose_via_chain(T, chain)
        body = {"tensor": T.to_json(), "chain_length": chain.m, **result.to_json()}
        logger.info("chain_decomposition", length=len(result.decomposition), bound=result.bound, k=result.k)
        return success_response(
            f"Decomposed T into {len(result.decomposition)} terms (bound {result.bound})",
            report_envelope("decompose", config, body),
            config,
        )
    except (SubtensorRankError, ValueError) as e:
        return error_response(e, command="decompose")
