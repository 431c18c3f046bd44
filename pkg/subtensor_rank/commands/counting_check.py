"""
Command checking that polynomials in the parameters have smaller dimension than polynomials in the tensor entries.
"""

from typing import Any, Dict

from ..equations import check_counting_inequality, dim_formulas
from ..errors import SubtensorRankError
from .utils import ExperimentConfig, error_response, report_envelope, success_response


def counting_check(config: ExperimentConfig) -> Dict[str, Any]:
    try:
        config.require("d", "r")
        result = check_counting_inequality(config.d, config.r, config.m, config.n)
        body = result.to_json()
        if result.method == "exact":
            dims = dim_formulas(config.d, result.n, config.r, result.m)
            body["dimP2m"] = str(dims.dimP2m)
            body["dimPm"] = str(dims.dimPm)
        verdict = "inequality holds" if result.holds else "inequality fails"
        return success_response(verdict, report_envelope("counting-check", config, body), config)
    except (SubtensorRankError, ValueError) as e:
        return error_response(e, command="counting-check")
