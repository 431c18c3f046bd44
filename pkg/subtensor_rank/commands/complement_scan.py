"""
Command looking for index sets X_1, ..., X_d of size r that pin the
partition rank at r under every one-point extension, and recording the
partition rank of the complementary block as an empirical data point.
"""

import itertools
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import structlog

from ..errors import NoWitnessFound, ParseError, SubtensorRankError
from ..rank_engine import RankCertificate, prank, prank_at_most
from ..tensor_core import GENERATORS, IndexSubsets, Tensor, generate, subtensor
from .subtensor_scan import exhaustive_choices
from .utils import ExperimentConfig, error_response, load_tensor, report_envelope, success_response

logger = structlog.get_logger(__name__)


@dataclass
class ComplementResult:
    X: IndexSubsets
    block: Tensor
    complement: RankCertificate
    checked: int

    def to_json(self) -> dict:
        return {
            "X": self.X.to_json(),
            "complement": self.block.to_json(),
            "complement_prank": self.complement.value,
            "complement_sha256": self.complement.tensor_digest,
            "lower_bound": self.complement.lower_bound.value,
            "witness": self.complement.witness.to_json(),
            "candidates_checked": self.checked,
        }


def _extensions_stay_at(T: Tensor, X: IndexSubsets, r: int, node_budget: int) -> bool:
    """Every block X_1 + {x_1}, ..., X_d + {x_d} with x_i outside X_i still has prank <= r."""
    outside = X.complement(T.dims).subsets
    for point in itertools.product(*outside):
        grown = tuple(tuple(sorted(s + (x,))) for s, x in zip(X.subsets, point))
        if not prank_at_most(subtensor(T, IndexSubsets(grown)), r, node_budget).holds:
            return False
    return True


def find_pinned_block(T: Tensor, r: int, node_budget: int) -> Optional[ComplementResult]:
    """First X (canonical order) with prank(T[X]) = r that every one-point extension keeps at r."""
    if T.field.is_rational:
        raise ParseError("Complement scans need a finite field")
    if r == 0:
        return ComplementResult(IndexSubsets(tuple(() for _ in T.dims)), T, prank(T, node_budget), 0)
    if r >= min(T.dims):
        raise ParseError(f"r={r} leaves no complement inside dims {T.dims}", {"r": r, "dims": list(T.dims)})
    checked = 0
    for choice in exhaustive_choices(T.dims, r):
        checked += 1
        X = IndexSubsets(choice)
        if prank_at_most(subtensor(T, X), r - 1, node_budget).holds:
            continue
        if not _extensions_stay_at(T, X, r, node_budget):
            continue
        block = subtensor(T, X.complement(T.dims))
        complement = prank(block, node_budget)
        logger.debug("pinned_block_found", X=X.to_json(), complement=complement.value, checked=checked)
        return ComplementResult(X, block, complement, checked)
    return None


def complement_scan(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Run the pinned-block search over input tensors or a seeded generator batch.

    Args:
        config (ExperimentConfig): --r, and either input paths or --dims with
            --generator and --seeds

    Returns:
        dict: per-tensor results and the largest complement prank seen;
            status "info" when no tensor admits a pinned block
    """
    try:
        config.require("r")
        field = config.field
        tensors = []
        if config.inputs:
            tensors = [(None, load_tensor(path, field)) for path in config.inputs]
        else:
            config.require("dims", "field")
            if config.generator not in GENERATORS:
                raise ParseError(f"Unknown generator '{config.generator}'", {"known": list(GENERATORS)})
            tensors = [
                (config.seed + i, generate(config.generator, config.dims, field, config.seed + i))
                for i in range(config.seeds)
            ]
        records: List[dict] = []
        found: List[ComplementResult] = []
        for seed, T in tensors:
            result = find_pinned_block(T, config.r, config.node_budget)
            record = {"seed": seed, "dims": list(T.dims), "tensor_sha256": T.digest(), "found": result is not None}
            if result is not None:
                record.update(result.to_json())
                found.append(result)
            records.append(record)
        if not found:
            raise NoWitnessFound(
                f"No pinned block of size {config.r} in {len(tensors)} tensor(s)", {"tensors": len(tensors)}
            )
        worst = max(res.complement.value for res in found)
        body = {
            "r": config.r,
            "generator": None if config.inputs else config.generator,
            "tensors": records,
            "found": len(found),
            "max_complement_prank": worst,
        }
        if all(T.order == 2 for _, T in tensors):
            body["matrix_bound_holds"] = worst <= config.r
        return success_response(
            f"Pinned blocks in {len(found)}/{len(tensors)} tensors; max complement prank {worst}",
            report_envelope("complement-scan", config, body),
            config,
        )
    except (SubtensorRankError, ValueError) as e:
        return error_response(e, command="complement-scan")
