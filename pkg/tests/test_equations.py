import math

import pytest

from subtensor_rank.equations import (
    BudgetVector,
    bound_formula,
    budgets_for,
    build_pullback_matrix,
    check_counting_inequality,
    compose_with_parametrization,
    dim_formulas,
    fd_gd,
    find_vanishing_poly,
    full_budget,
    multilinearize,
    multilinearize_components,
    parameter_count,
    polarize,
    tight_budgets,
    vanishes_on_parametrization,
    vanishing_space,
    weight_components,
    weight_of,
)
from subtensor_rank.errors import BadCharacteristic, NotWeightHomogeneous, SizeCapExceeded, WeightTooLow
from subtensor_rank.exact_algebra import RATIONALS, gf, matrix_rank
from subtensor_rank.polynomials import Poly, count_monomials, determinant, permanent
from subtensor_rank.rank_engine import random_decomposition
from subtensor_rank.tensor_core import slice_splits


def square(field=RATIONALS):
    return Poly.build(field, "tensor", (1, 1), {((0, 0), (0, 0)): 1})


def test_weight_of_determinant():
    assert weight_of(determinant(3)).alphas == ((1, 1, 1), (1, 1, 1))
    assert weight_of(determinant(3)).is_multilinear()
    assert weight_of(square()).first_excess() == (0, 0)


def test_weight_rejects_mixed_weights():
    P = Poly.build(RATIONALS, "tensor", (2, 2), {((0, 0),): 1, ((1, 1),): 1})
    with pytest.raises(NotWeightHomogeneous):
        weight_of(P)


def test_polarize_needs_repeated_index():
    with pytest.raises(WeightTooLow):
        polarize(determinant(2), 0, 0)


def test_multilinearize_square_gives_permanent():
    assert multilinearize(square()) == permanent(2)


def test_multilinearize_fails_in_small_characteristic():
    with pytest.raises(BadCharacteristic):
        multilinearize(square(gf(2)))


def test_multilinearize_keeps_multilinear_input():
    assert multilinearize(determinant(2)) == determinant(2)


def test_multilinearize_components():
    P = Poly.build(RATIONALS, "tensor", (2, 2), {((0, 0), (0, 0)): 1, ((0, 0), (1, 1)): 1, ((0, 1), (1, 0)): -1})
    weights = [w.alphas for w, _ in weight_components(P)]
    assert weights == [((2, 0), (2, 0)), ((1, 1), (1, 1))]
    parts = multilinearize_components(P)
    assert len(parts) == 2
    assert determinant(2) in parts
    assert permanent(2) in parts


def test_budgets():
    assert full_budget(3, 2).counts == (((0,), 2), ((1,), 2), ((2,), 2), ((0, 1), 2), ((0, 2), 2), ((1, 2), 2))
    tight = tight_budgets(3, 2)
    assert len(tight) == 6
    assert all(b.total == 2 for b in tight)
    assert budgets_for(2, 1, "full") == [full_budget(2, 1)]
    with pytest.raises(ValueError):
        budgets_for(2, 1, "loose")


def test_determinant_vanishes_on_rank_one_parametrization():
    (budget,) = tight_budgets(2, 1)
    assert vanishes_on_parametrization(determinant(2), budget)
    assert not vanishes_on_parametrization(permanent(2), budget)
    assert not compose_with_parametrization(permanent(2), budget).is_zero()


def test_recovers_the_determinant():
    assert find_vanishing_poly(2, 2, 1, 2) == determinant(2)
    assert find_vanishing_poly(2, 2, 1, 2, field=gf(5)) == determinant(2, gf(5))


def test_full_mode_covers_every_matrix():
    assert find_vanishing_poly(2, 2, 1, 2, mode="full") is None


def test_vanishing_space_dimension():
    # the nine 2x2 minors of a 3x3 matrix
    assert len(vanishing_space(2, 3, 1, 2)) == 9


def test_vanishing_polynomials_kill_random_low_rank_tensors():
    space = vanishing_space(2, 3, 1, 2, field=gf(5))
    for seed in range(5):
        T, _ = random_decomposition((3, 3), gf(5), 1, seed)
        assert all(P.at_tensor(T) == 0 for P in space)


def test_pullback_matrix_shape_and_cap():
    (budget,) = tight_budgets(2, 1)
    M = build_pullback_matrix(2, 2, 1, 2, RATIONALS, budget)
    assert M.cols == 10
    assert matrix_rank(M) == 9
    with pytest.raises(SizeCapExceeded):
        build_pullback_matrix(2, 2, 1, 2, RATIONALS, budget, size_cap=5)
    with pytest.raises(ValueError):
        build_pullback_matrix(2, 2, 1, 2, RATIONALS, BudgetVector(2, (((0,), 2),), "full"))


def test_dim_formulas():
    dims = dim_formulas(2, 2, 1, 2)
    assert (dims.S, dims.dimP2m, dims.dimPm) == (8, 330, 10)
    assert parameter_count(3, 2, 1) == 2 * 3 * (2 + 4)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("r", [1, 2])
def test_counting_inequality_holds_at_default_sizes(d, r):
    report = check_counting_inequality(d, r)
    assert report.holds
    assert report.n == 2 ** (d + 3) * r
    assert report.to_json()["m"] == str(report.n ** (2 * d))


def test_counting_inequality_small_cases_are_exact():
    report = check_counting_inequality(2, 1, m=2, n=2)
    assert report.method == "exact"
    assert not report.holds


def test_bound_formula():
    assert bound_formula(2, 2, 0) == 4
    assert bound_formula(3, 3, 0) == 3 * 2 + 3 * 4
    assert bound_formula(2, 2, 1) == 0
    with pytest.raises(ValueError):
        bound_formula(2, 2, 2)


def test_fd_gd():
    assert fd_gd(3, 1) == (2**36, 2**108)
    assert fd_gd(2, 1) == (32**4, 32**8)


@pytest.mark.parametrize("m", range(1, 7))
def test_order_three_chain_bound_stays_below_cube(m):
    L = m - 1
    assert bound_formula(3, m, 0) == 3 * L + 3 * L**2
    assert bound_formula(3, m, 0) <= m**3


@pytest.mark.parametrize("d, n, r, m", [(2, 2, 1, 2), (2, 3, 1, 3), (3, 2, 1, 2), (3, 2, 2, 4), (4, 2, 1, 1)])
def test_dim_formulas_count_monomials(d, n, r, m):
    dims = dim_formulas(d, n, r, m)
    assert dims.S == parameter_count(d, n, r)
    assert dims.dimP2m == count_monomials(dims.S, 2 * m) == math.comb(2 * m + dims.S - 1, 2 * m)
    assert dims.dimPm == count_monomials(n**d, m) == math.comb(n**d + m - 1, m)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("r", [1, 2])
def test_partition_rank_bound_is_a_power_of_subtensor_size(d, r):
    F, G = fd_gd(d, r)
    assert F == (2 ** (d + 3) * r) ** (2 * d)
    assert G // F == F ** (d - 1)
    assert G % F == 0


def test_counting_inequality_uses_log_factorials_past_the_bit_budget():
    report = check_counting_inequality(2, 1, bit_budget=1)
    assert report.method == "log-factorial"
    assert report.holds
    large = check_counting_inequality(3, 1)
    assert large.method == "log-factorial"
    assert large.holds


def test_counting_inequality_fails_at_degree_one():
    report = check_counting_inequality(2, 1, m=1)
    assert report.method == "exact"
    assert not report.holds


@pytest.mark.parametrize("seed", range(10))
def test_multilinearized_equations_keep_vanishing(seed):
    parts = multilinearize_components(find_vanishing_poly(2, 2, 1, 3))
    assert parts
    for g in parts:
        T, _ = random_decomposition(g.shape, RATIONALS, 1, seed)
        assert g.at_tensor(T) == 0
        shifted = g.rename(lambda v: tuple(i + 1 for i in v), shape=tuple(k + 1 for k in g.shape))
        big, _ = random_decomposition(shifted.shape, RATIONALS, 1, seed + 100)
        assert shifted.at_tensor(big) == 0


@pytest.mark.slow
def test_cubic_equation_for_slice_rank_one():
    f = find_vanishing_poly(3, 2, 1, 4)
    assert f is not None and not f.is_zero()
    budgets = tight_budgets(3, 1)
    assert len(budgets) == 3
    assert all(vanishes_on_parametrization(f, b) for b in budgets)
    splits = slice_splits(3)
    for seed in range(1000):
        T, _ = random_decomposition((2, 2, 2), RATIONALS, 1, seed, splits)
        assert f.at_tensor(T) == 0
