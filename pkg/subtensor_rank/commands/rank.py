"""
Command computing certified partition rank and slice rank of a tensor file.
"""

from typing import Any, Dict

import structlog

from ..errors import SubtensorRankError
from ..rank_engine import prank, slice_rank
from .utils import ExperimentConfig, error_response, load_tensor, report_envelope, success_response

logger = structlog.get_logger(__name__)


def rank(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Certify prank and slice rank of the tensor in ``config.inputs[0]``.

    Args:
        config (ExperimentConfig): needs one input path; --field converts the tensor

    Returns:
        dict: status, message and the report (tensor, both certificates)
    """
    try:
        T = load_tensor(config.input_path(0, "tensor"), config.field)
        logger.info("rank_started", dims=list(T.dims), field=str(T.field), strategy=config.strategy)
        partition = prank(T, config.node_budget, config.strategy)
        sliced = slice_rank(T, config.node_budget, config.strategy)
        body = {
            "tensor": T.to_json(),
            "prank": partition.to_json(),
            "slice_rank": sliced.to_json(),
        }
        report = report_envelope("rank", config, body)
        return success_response(
            f"prank = {partition.value} ({partition.lower_bound.value}), slice rank = {sliced.value}",
            report,
            config,
        )
    except (SubtensorRankError, ValueError) as e:
        return error_response(e, command="rank")
