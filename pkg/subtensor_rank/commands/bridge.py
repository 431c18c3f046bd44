"""
Command relating a homogeneous polynomial to its symmetric tensor: strength,
partition rank, and the restriction checks between them.
"""

from typing import Any, Dict

import structlog

from ..errors import SubtensorRankError
from ..poly_bridge import d_const, psi, verify_restriction_pipeline
from .utils import ExperimentConfig, error_response, load_poly, report_envelope, success_response

logger = structlog.get_logger(__name__)

DEFAULT_SUBSET_CAP = 3


def bridge(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Run the restriction pipeline on the polynomial in ``config.inputs[0]``.

    Args:
        config (ExperimentConfig): polynomial path ("vars": "point"), --r and
            optionally --size (largest restriction set, default 3)

    Returns:
        dict: link statuses, the symmetric tensor and D
    """
    try:
        config.require("r")
        P = load_poly(config.input_path(0, "polynomial"), config.field)
        cap = config.size or DEFAULT_SUBSET_CAP
        report = verify_restriction_pipeline(P, config.r, cap, config.node_budget)
        body = {"tensor": psi(P).to_json(), "D": d_const(P.degree), "pipeline": report.to_json()}
        failed = [name for name, status in report.links.items() if status == "fail"]
        return success_response(
            f"Pipeline links: {len(report.links) - len(failed)} not failing, {len(failed)} failing",
            report_envelope("bridge", config, body),
            config,
        )
    except (SubtensorRankError, ValueError) as e:
        return error_response(e, command="bridge")
