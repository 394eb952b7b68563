from collections import Counter
from fractions import Fraction

import pytest

from dynsigma.algebra.exactpoly import ExactPolynomial
from dynsigma.algebra.linalg import invert_rational_matrix
from dynsigma.core.errors import (
    InvalidMapError,
    IrrationalSpectrumError,
    NotAMorphismError,
    NotPeriodicError,
    PolynomialError,
    UsageError,
)
from dynsigma.dynamics.projdyn import (
    CharPoly,
    DynamicalSystem,
    ProjectivePoint,
    chart_multiplier_polynomial,
    compose,
    conjugate,
    evaluate_map,
    is_periodic,
    iterate,
    multiplier_charpoly,
    period_count,
    rational_periodic_spectrum,
)


def M(*coords, check=True):
    return DynamicalSystem.from_strings(list(coords), check_morphism=check)


def T(text):
    return ExactPolynomial.parse(text, ("t",))


@pytest.mark.parametrize(
    "N, d, n, expected",
    [(1, 2, 1, 3), (2, 2, 1, 7), (1, 2, 2, 5), (2, 2, 2, 21), (3, 4, 1, 85), (3, 2, 2, 85)],
)
def test_period_count(N, d, n, expected):
    assert period_count(N, d, n) == expected


def test_period_count_guard():
    with pytest.raises(UsageError):
        period_count(1, 1, 1)
    with pytest.raises(UsageError):
        period_count(2, 2, 0)


def test_projective_point_normalization():
    p = ProjectivePoint.of(2, 4)
    assert p.coords == (Fraction(1, 2), Fraction(1))
    assert p == ProjectivePoint.of("1/2", 1)
    assert ProjectivePoint.of(3, 0).coords == (1, 0)
    assert ProjectivePoint.of(3, 0).chart_index == 0
    assert str(p) == "(1/2 : 1)"
    with pytest.raises(PolynomialError):
        ProjectivePoint.of(0, 0)


@pytest.mark.parametrize(
    "coords, error",
    [
        (["x0^2", "x0*x1"], NotAMorphismError),
        (["x0^2 + x1", "x1^2"], InvalidMapError),
        (["x0^2", "x1^3"], InvalidMapError),
        (["x0", "x1"], InvalidMapError),
        (["0", "x1^2"], InvalidMapError),
        (["x0^2"], InvalidMapError),
    ],
)
def test_map_validation(coords, error):
    with pytest.raises(error):
        M(*coords)


def test_skipping_the_morphism_check():
    f = M("x0^2", "x0*x1", check=False)
    assert f.N == 1 and f.d == 2


def test_content_normalization():
    assert M("2*x0^2", "4*x1^2").to_strings() == ["x0^2", "2*x1^2"]
    assert M("-x0^2", "x1^2").to_strings() == ["x0^2", "-x1^2"]
    assert M("1/2*x0^2", "x1^2") == M("x0^2", "2*x1^2")


def test_iterate():
    f = M("x0^2 + x1^2", "x1^2")
    assert iterate(f, 1) == f
    assert iterate(f, 2) == M("x0^4 + 2*x0^2*x1^2 + 2*x1^4", "x1^4")
    assert iterate(f, 3).d == 8
    with pytest.raises(UsageError):
        iterate(f, 0)


@pytest.mark.parametrize("a, b", [(1, 1), (1, 2), (2, 1)])
def test_iteration_composes(make_morphism, a, b):
    f = make_morphism(1, 2)
    assert iterate(f, a + b) == compose(iterate(f, a), iterate(f, b))
    assert iterate(f, a * b) == iterate(iterate(f, a), b)


def test_iteration_composes_on_the_plane(make_morphism):
    f = make_morphism(2, 2)
    assert iterate(f, 2) == compose(f, f)
    assert iterate(f, 3) == compose(iterate(f, 2), f) == compose(f, iterate(f, 2))


def test_conjugate():
    """Test m^-1 o f o m for a translation of the affine line"""
    f = M("x0^2", "x1^2")
    m = [[1, 1], [0, 1]]
    g = conjugate(f, m)
    assert g == M("x0^2 + 2*x0*x1", "x1^2")
    assert conjugate(g, [[1, -1], [0, 1]]) == f
    with pytest.raises(UsageError):
        conjugate(f, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_periodic_points():
    # x -> x^2 - 1 swaps 0 and -1
    f = M("x0^2 - x1^2", "x1^2")
    zero = ProjectivePoint.of(0, 1)
    assert evaluate_map(f, zero) == ProjectivePoint.of(-1, 1)
    assert is_periodic(f, zero, 2)
    assert not is_periodic(f, zero, 1)
    assert multiplier_charpoly(f, zero, 2).poly == T("t")
    with pytest.raises(NotPeriodicError):
        multiplier_charpoly(f, zero, 1)


def test_multiplier_at_fixed_points():
    f = M("x0^2 - 2*x1^2", "x1^2")
    assert multiplier_charpoly(f, ProjectivePoint.of(2, 1)).poly == T("t - 4")
    assert multiplier_charpoly(f, ProjectivePoint.of(-1, 1)).poly == T("t + 2")
    assert multiplier_charpoly(f, ProjectivePoint.of(1, 0)).poly == T("t")


SPLIT_PLANE = ("x0^2 - 2*x2^2", "x1^2 - x1*x2", "x2^2")
SPLIT_PLANE_FIXED = [(2, 0, 1), (2, 2, 1), (-1, 0, 1), (-1, 2, 1), (0, 1, 0), (1, 1, 0), (1, 0, 0)]


def test_charpoly_agrees_across_charts():
    f = M(*SPLIT_PLANE)
    for j in range(3):
        assert multiplier_charpoly(f, ProjectivePoint.of(2, 2, 1), chart=j).poly == T("(t - 4)*(t - 3)")
        assert multiplier_charpoly(f, ProjectivePoint.of(-1, 2, 1), chart=j).poly == T("(t + 2)*(t - 3)")
    for j in (0, 1):
        assert multiplier_charpoly(f, ProjectivePoint.of(1, 1, 0), chart=j).poly == T("t*(t - 2)")
    with pytest.raises(UsageError):
        multiplier_charpoly(f, ProjectivePoint.of(1, 1, 0), chart=2)


@pytest.mark.parametrize(
    "m",
    [
        [[1, 0, 1], [0, 1, 0], [0, 0, 1]],
        [[2, 1, 0], [1, 1, 0], [0, 3, 1]],
        [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
    ],
)
def test_charpoly_is_conjugation_invariant(m):
    """Test that Q = m^-1 P is fixed by m^-1 o f o m with the same multiplier polynomial"""
    f = M(*SPLIT_PLANE)
    g = conjugate(f, m)
    inverse = invert_rational_matrix(m)
    for coords in SPLIT_PLANE_FIXED:
        P = ProjectivePoint.of(*coords)
        Q = ProjectivePoint(tuple(sum(inverse[i][k] * P.coords[k] for k in range(3)) for i in range(3)))
        assert multiplier_charpoly(g, Q).poly == multiplier_charpoly(f, P).poly


def test_charpoly_from_eigenvalues():
    c = CharPoly.from_eigenvalues([2, Fraction(1, 2)])
    assert c.poly == T("t^2 - 5/2*t + 1")
    assert c.at_one() == Fraction(-1, 2)
    with pytest.raises(PolynomialError):
        CharPoly(poly=T("2*t"), dim=1)


def test_symbolic_chart_multiplier():
    f = M("x0^2 - 2*x1^2", "x1^2")
    num, den = chart_multiplier_polynomial(f, 1)
    assert num == ExactPolynomial.parse("t - 2*x0", ("x0", "t"))
    assert den == 1


def test_spectrum_of_a_quadratic_polynomial():
    f = M("x0^2 - 2*x1^2", "x1^2")
    spectrum = rational_periodic_spectrum(f)
    assert spectrum.is_complete
    found = {(entry.point, str(entry.charpoly)): entry.multiplicity for entry in spectrum.entries}
    assert found == {
        (ProjectivePoint.of(2, 1), "t - 4"): 1,
        (ProjectivePoint.of(-1, 1), "t + 2"): 1,
        (ProjectivePoint.of(1, 0), "t"): 1,
    }


def test_powering_spectrum_on_the_plane():
    """Test the seven fixed points of [x^2 : y^2 : z^2] and their multipliers"""
    f = M("x0^2", "x1^2", "x2^2")
    spectrum = rational_periodic_spectrum(f)
    assert spectrum.total_multiplicity == 7
    assert all(entry.multiplicity == 1 for entry in spectrum.entries)
    counts = Counter(spectrum.charpolys())
    assert counts == {T("t^2"): 3, T("t^2 - 2*t"): 3, T("t^2 - 4*t + 4"): 1}


def test_period_two_spectrum_with_a_triple_point():
    """Test x^2 - 3/4, whose 2-cycle collapses onto the fixed point -1/2"""
    f = M("x0^2 - 3/4*x1^2", "x1^2")
    spectrum = rational_periodic_spectrum(f, 2)
    assert spectrum.total_multiplicity == period_count(1, 2, 2)
    found = {(entry.point, str(entry.charpoly)): entry.multiplicity for entry in spectrum.entries}
    assert found == {
        (ProjectivePoint.of(Fraction(3, 2), 1), "t - 9"): 1,
        (ProjectivePoint.of(Fraction(-1, 2), 1), "t - 1"): 3,
        (ProjectivePoint.of(1, 0), "t"): 1,
    }


def test_irrational_fixed_points_are_reported():
    with pytest.raises(IrrationalSpectrumError):
        rational_periodic_spectrum(M("x0^2 - x1^2", "x1^2"))
