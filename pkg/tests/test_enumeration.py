"""Exact enumeration of fully parked trees and the parking dynamics."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parkcrit.enumeration import (
    DecoratedTree,
    FptTable,
    _shapes,
    brute_force_table,
    check_against_oracle,
    flux_via_table,
    tutte_series,
)
from parkcrit.errors import BudgetExceeded, EnumerationError, NonExactLaw
from parkcrit.laws import binary0k, geometric, make_finite_law, poisson

B02 = binary0k(Fraction(1, 14))


def test_shape_counts_are_catalan():
    for n, catalan in enumerate((1, 1, 2, 5, 14, 42)):
        assert len(_shapes(n)) == catalan


def test_single_vertex_parking():
    leaf = (None, None)
    assert DecoratedTree(leaf, (0,)).park().fully_parked is False
    out = DecoratedTree(leaf, (1,)).park()
    assert out.fully_parked and out.flux == 0
    out = DecoratedTree(leaf, (3,)).park()
    assert out.flux == 2 and out.parked_count == 1


def test_two_vertex_chain():
    # left child holds two cars, one overflows onto the empty root
    tree = DecoratedTree(((None, None), None), (2, 0))
    out = tree.park()
    assert out.loads == (2, 1)
    assert out.fully_parked and out.flux == 0
    occupied, flux = tree.park_car_by_car()
    assert occupied == (True, True) and flux == 0


def test_car_by_car_matches_batch():
    shape = ((None, None), ((None, None), (None, None)))
    arrivals = (2, 1, 0, 3, 0)
    tree = DecoratedTree(shape, arrivals)
    out = tree.park()
    occupied, flux = tree.park_car_by_car()
    assert flux == out.flux
    assert occupied == tuple(v > 0 for v in out.loads)


def test_bad_inputs_rejected():
    with pytest.raises(EnumerationError):
        DecoratedTree((None, None), (1, 2))
    with pytest.raises(EnumerationError):
        DecoratedTree((None, None), (-1,))
    with pytest.raises(EnumerationError):
        DecoratedTree((None, None), (2,)).park_car_by_car(order=[0, 0])


@settings(derandomize=True, max_examples=120, deadline=None)
@given(data=st.data())
def test_parking_is_order_independent(data):
    n = data.draw(st.integers(min_value=1, max_value=5))
    shape = data.draw(st.sampled_from(_shapes(n)))
    arrivals = tuple(data.draw(st.lists(
        st.integers(min_value=0, max_value=3), min_size=n, max_size=n)))
    tree = DecoratedTree(shape, arrivals)
    total = sum(arrivals)
    order = data.draw(st.permutations(range(total)))
    base = tree.park()
    occupied, flux = tree.park_car_by_car(order)
    assert flux == base.flux
    assert occupied == tuple(v > 0 for v in base.loads)


def test_tutte_series_known_entries():
    table = tutte_series(B02, vertex_order=3, flux_order=3)
    # one vertex: weight of arrival count p + 1
    assert table.coefficient(1, 0) == 0
    assert table.coefficient(1, 1) == Fraction(1, 28)
    # two vertices, no flux: 2 (mu1^2 + mu0 mu2)
    assert table.coefficient(2, 0) == Fraction(27, 392)
    assert table.coefficient(2, 2) == Fraction(1, 392)
    assert table.coefficient(3, 0) == 0
    assert table.coefficient(3, 1) == Fraction(243, 21952)


def test_brute_force_agrees_with_series():
    table = tutte_series(B02, 4, 2)
    brute = brute_force_table(B02, 4, 2)
    assert table.rows == brute.rows
    check_against_oracle(B02, 4, 2)


def test_brute_force_with_dense_support():
    law = make_finite_law([Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 8)])
    check_against_oracle(law, 4, 2)


def test_brute_force_caps():
    with pytest.raises(BudgetExceeded):
        brute_force_table(B02, 9, 1)
    with pytest.raises(NonExactLaw):
        brute_force_table(poisson(0.3), 3, 1)
    with pytest.raises(NonExactLaw):
        tutte_series(binary0k(0.05), 3, 1)


def test_table_weights_sum_to_flux_probability():
    # sum over n of c(n, p) q^(n+1) with q the empty prob reproduces the
    # analytic flux law; a one-vertex cluster has two boundary edges
    law = binary0k(Fraction(1, 20), k=2)
    table = tutte_series(law, 64, 4)
    cmp = flux_via_table(law, table)
    assert cmp.max_residual < 1e-6
    assert len(cmp.probs) == len(cmp.analytic_probs)


def test_brute_force_total_weight_check():
    # every decorated tree with all loads positive is counted exactly once:
    # cross-check one cell against a direct sum over shapes and arrivals
    law = make_finite_law([Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])
    n, p = 3, 1
    total = Fraction(0)
    for shape in _shapes(n):
        for arrivals in itertools.product(range(n + p + 1), repeat=n):
            tree = DecoratedTree(shape, arrivals)
            out = tree.park()
            if out.fully_parked and out.flux == p:
                w = Fraction(1)
                for a in arrivals:
                    w *= law.coefficient(a)
                total += w
    assert brute_force_table(law, n, p).coefficient(n, p) == total


def test_csv_round_trip(tmp_path):
    table = tutte_series(B02, 3, 2)
    path = tmp_path / "table.csv"
    table.write_csv(path)
    back = FptTable.read_csv(path)
    assert back.rows == table.rows
    assert back.vertex_order == table.vertex_order
    assert back.flux_order == table.flux_order
    assert back.law_desc == table.law_desc


def test_csv_rejects_garbage(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("n,p,numerator,denominator\n1,0,not,numbers\n")
    with pytest.raises(EnumerationError):
        FptTable.read_csv(path)
    path.write_text("# fully parked tree weight table\n")
    with pytest.raises(EnumerationError):
        FptTable.read_csv(path)


def test_exact_geometric_coefficients_feed_the_recursion():
    law = geometric(Fraction(1, 8))
    table = tutte_series(law, 6, 2)
    brute = brute_force_table(law, 5, 2)
    for n in range(1, 6):
        for p in range(3):
            assert table.coefficient(n, p) == brute.coefficient(n, p)
