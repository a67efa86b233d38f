"""Arrival law constructors, validation, and generating function values."""

import math
from fractions import Fraction

import pytest

from parkcrit.errors import (
    BadFamilyParameter,
    EvaluationBeyondRadius,
    Mu01IsOne,
    MuZeroIsZero,
    NegativeProbability,
    NonExactLaw,
    OutOfDomain,
    ProbabilitySumNotOne,
)
from parkcrit.laws import (
    CustomAnalyticLaw,
    binary0k,
    geometric,
    make_finite_law,
    nongeneric_example,
    poisson,
)


def test_finite_law_basics():
    law = make_finite_law([Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 8)])
    assert law.mu0 == Fraction(1, 2)
    assert law.mean() == Fraction(1, 4) + Fraction(2, 8) + Fraction(3, 8)
    assert law.radius == math.inf
    assert law.is_exact
    g, g1, g2 = law.derivatives(Fraction(2))
    # direct polynomial evaluation at t = 2
    assert g == Fraction(5, 2)
    assert g1 == Fraction(1, 4) + Fraction(1, 2) + Fraction(3, 2)
    assert g2 == Fraction(1, 4) + Fraction(3, 2)


def test_finite_law_trims_trailing_zeros():
    law = make_finite_law([Fraction(1, 2), 0, Fraction(1, 2), 0, 0])
    assert law.finite_support() == 2
    assert law.coefficient(2) == Fraction(1, 2) and law.coefficient(4) == 0


def test_finite_law_validation():
    with pytest.raises(NegativeProbability):
        make_finite_law([Fraction(3, 2), Fraction(-1, 2)])
    with pytest.raises(ProbabilitySumNotOne):
        make_finite_law([Fraction(1, 2), Fraction(1, 4)])
    with pytest.raises(MuZeroIsZero):
        make_finite_law([0, Fraction(1, 2), Fraction(1, 2)])
    with pytest.raises(Mu01IsOne):
        make_finite_law([Fraction(1, 2), Fraction(1, 2)])


def test_negative_time_rejected():
    law = binary0k(Fraction(1, 14))
    with pytest.raises(OutOfDomain):
        law.derivatives(-1)


def test_binary0k_mass_placement():
    # the parameter is the mean, so the mass at k is alpha/k
    law = binary0k(Fraction(1, 14), k=2)
    assert law.coefficient(0) == Fraction(27, 28)
    assert law.coefficient(1) == 0
    assert law.coefficient(2) == Fraction(1, 28)
    assert law.mean() == Fraction(1, 14)
    assert law.is_exact
    g, g1, g2 = law.derivatives(Fraction(3))
    assert g == Fraction(9, 7)


def test_binary0k_parameter_checks():
    with pytest.raises(BadFamilyParameter):
        binary0k(Fraction(1, 2), k=1)
    with pytest.raises(BadFamilyParameter):
        binary0k(2, k=2)  # mean alpha must stay below k
    with pytest.raises(BadFamilyParameter):
        binary0k(0)
    assert not binary0k(0.05).is_exact


def test_binary0k_series_matches_coefficients():
    law = binary0k(Fraction(1, 20), k=3)
    g = law.g_series(5, "rational")
    for j in range(6):
        assert g.coeff(j) == law.coefficient(j)


def test_poisson_values():
    alpha = 0.7
    law = poisson(alpha)
    g, g1, g2 = law.derivatives(1.3)
    base = math.exp(alpha * 0.3)
    assert g == pytest.approx(base, rel=1e-15)
    assert g1 == pytest.approx(alpha * base, rel=1e-15)
    assert g2 == pytest.approx(alpha**2 * base, rel=1e-15)
    assert law.mean() == alpha
    assert law.radius == math.inf
    assert law.coefficient(3) == pytest.approx(math.exp(-alpha) * alpha**3 / 6, rel=1e-12)
    with pytest.raises(NonExactLaw):
        law.exact_coefficients(4)


def test_geometric_values():
    alpha = 0.25
    law = geometric(alpha)
    assert law.radius == pytest.approx((1 + alpha) / alpha)
    g, g1, g2 = law.derivatives(2.0)
    d = 1 + alpha - alpha * 2.0
    assert g == pytest.approx(1 / d)
    assert g1 == pytest.approx(alpha / d**2)
    assert g2 == pytest.approx(2 * alpha**2 / d**3)
    assert law.mean() == pytest.approx(alpha)
    with pytest.raises(EvaluationBeyondRadius):
        law.derivatives(5.0)


def test_geometric_exact_coefficients():
    law = geometric(Fraction(1, 8))
    coeffs = law.exact_coefficients(6)
    assert coeffs[0] == Fraction(8, 9)
    ratio = Fraction(1, 9)
    for k in range(1, 7):
        assert coeffs[k] == coeffs[k - 1] * ratio


def test_nongeneric_example_normalization():
    law = nongeneric_example(1)
    # probabilities sum to 1 and the pgf is 1 at t = 1
    total = sum(law.coefficient(k) for k in range(200))
    assert total == pytest.approx(1.0, abs=1e-12)
    g, _, _ = law.derivatives(1.0)
    assert g == pytest.approx(1.0, abs=1e-14)
    assert law.mean() == pytest.approx(1 / 6)
    assert law.radius == 3.0


def test_nongeneric_example_mixture():
    m = 0.1
    law = nongeneric_example(m)
    base = nongeneric_example(1)
    assert law.coefficient(0) == pytest.approx(1 - m + m * base.coefficient(0))
    assert law.coefficient(2) == pytest.approx(m * base.coefficient(2))
    assert law.mean() == pytest.approx(m / 6)
    with pytest.raises(BadFamilyParameter):
        nongeneric_example(0)
    with pytest.raises(BadFamilyParameter):
        nongeneric_example(1.5)


def test_nongeneric_example_third_derivative_blows_up_at_radius():
    law = nongeneric_example(1)
    # order 3 exists inside the disk but not at the boundary point
    assert len(law.derivatives(2.9, order=3)) == 4
    with pytest.raises(EvaluationBeyondRadius):
        law.derivatives(3.0, order=3)
    with pytest.raises(OutOfDomain):
        law.derivatives(1.0, order=4)
    # second derivatives stay finite at the radius itself
    g, g1, g2 = law.derivatives(3.0)
    assert math.isfinite(g) and math.isfinite(g1) and math.isfinite(g2)


def test_custom_analytic_law():
    law = CustomAnalyticLaw(
        derivs=lambda t, order: tuple(math.exp(t - 1) for _ in range(order + 1)),
        radius=math.inf,
        mu_zero=math.exp(-1),
        mean=1.0,
        name="unit poisson",
    )
    g, g1, g2 = law.derivatives(1.0)
    assert g == g1 == g2 == 1.0
    assert not law.is_exact
    with pytest.raises(NonExactLaw):
        law.exact_coefficients(3)


def test_equality_and_hashing():
    a = binary0k(Fraction(1, 14))
    b = binary0k(Fraction(1, 14), k=2)
    assert a == b and hash(a) == hash(b)
    assert binary0k(Fraction(1, 14), k=3) != a
    d = {a: "x"}
    assert d[b] == "x"
    assert make_finite_law([Fraction(1, 2), 0, Fraction(1, 2)]) != a


def test_describe_mentions_parameters():
    assert "1/14" in binary0k(Fraction(1, 14)).describe()
    assert "poisson" in poisson(0.3).describe()
