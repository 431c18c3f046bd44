"""
Command turning a slice-rank witness of an order-3 tensor into a nullcone certificate.
"""

from typing import Any, Dict

import structlog

from ..errors import SubtensorRankError
from ..nullcone import nullcone_certificate, triple_from_slice_decomposition
from ..rank_engine import slice_rank
from .utils import ExperimentConfig, error_response, load_tensor, report_envelope, success_response

logger = structlog.get_logger(__name__)


def nullcone(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Certify that the n x n x n tensor in ``config.inputs[0]`` lies in the nullcone.

    Returns:
        dict: the slice-rank certificate, the subspace triple and the weights;
            status "info" when the slice rank reaches n and no certificate applies
    """
    try:
        T = load_tensor(config.input_path(0, "tensor"), config.field)
        if T.order != 3 or len(set(T.dims)) != 1:
            raise ValueError(f"nullcone certificates need an n x n x n tensor, got dims {T.dims}")
        n = T.dims[0]
        cert = slice_rank(T, config.node_budget, config.strategy)
        body: Dict[str, Any] = {"tensor": T.to_json(), "slice_rank": cert.to_json()}
        if T.is_zero() or cert.value >= n:
            body["certificate"] = None
            reason = "the zero tensor" if T.is_zero() else f"slice rank {cert.value} = n"
            return success_response(
                f"No certificate: {reason}", report_envelope("nullcone", config, body), config, status="info"
            )
        triple = triple_from_slice_decomposition(cert.witness)
        certificate = nullcone_certificate(T, triple)
        body["triple"] = triple.to_json()
        body["certificate"] = certificate.to_json()
        logger.info("nullcone_checked", n=n, slice_rank=cert.value, holds=certificate.holds)
        return success_response(
            f"Nullcone certificate {'holds' if certificate.holds else 'fails'} (min weight {certificate.weight})",
            report_envelope("nullcone", config, body),
            config,
        )
    except (SubtensorRankError, ValueError) as e:
        return error_response(e, command="nullcone")
