from fractions import Fraction

import pytest
import sympy as sp

from dynsigma.algebra.exactpoly import (
    MINUS_INFINITY,
    ExactPolynomial,
    MonomialOrder,
    bareiss_determinant,
    homogenize,
    parse_rational,
    rational_roots,
    squarefree_part,
    univariate_gcd,
    univariate_resultant,
)
from dynsigma.core.errors import PolynomialError, PolynomialParseError, VariableMismatchError

XYZ = ("x", "y", "z")


def P(text, names=XYZ):
    return ExactPolynomial.parse(text, names)


def to_sympy(p: ExactPolynomial):
    symbols = sp.symbols(p.variables)
    expr = sp.Integer(0)
    for mono, coeff in p.items():
        term = sp.Rational(coeff.numerator, coeff.denominator)
        for s, e in zip(symbols, mono):
            term *= s ** e
        expr += term
    return sp.expand(expr)


def random_poly(rng, names=XYZ, terms=5, degree=4):
    out = {}
    for _ in range(terms):
        mono = tuple(rng.randint(0, degree) for _ in names)
        out[mono] = Fraction(rng.randint(-20, 20), rng.randint(1, 5))
    return ExactPolynomial(names, out)


def test_parse_and_print():
    """Test parsing of integer and p/q coefficients and canonical printing"""
    p = P("3/4*x^2*y - y + 2")
    assert p.coefficient((2, 1, 0)) == Fraction(3, 4)
    assert p.coefficient((0, 1, 0)) == -1
    assert p.coefficient((0, 0, 0)) == 2
    assert P(str(p)) == p


@pytest.mark.parametrize("text", ["x**2", "x.5", "x__y", "sin(x)", "", "x + w"])
def test_parse_rejects_text_outside_grammar(text):
    with pytest.raises(PolynomialParseError):
        P(text)


def test_zero_polynomial_degree():
    zero = ExactPolynomial.zero(XYZ)
    assert zero.is_zero
    assert zero.degree() is MINUS_INFINITY
    assert MINUS_INFINITY < 0
    assert str(zero) == "0"


def test_arithmetic_matches_sympy(rng):
    """Test sum, difference, product and power against sympy expansion"""
    for _ in range(20):
        p, q = random_poly(rng), random_poly(rng)
        assert to_sympy(p + q) == sp.expand(to_sympy(p) + to_sympy(q))
        assert to_sympy(p - q) == sp.expand(to_sympy(p) - to_sympy(q))
        assert to_sympy(p * q) == sp.expand(to_sympy(p) * to_sympy(q))
    p = random_poly(rng, terms=3, degree=2)
    assert to_sympy(p ** 3) == sp.expand(to_sympy(p) ** 3)


def test_mixing_variable_lists_fails():
    with pytest.raises(VariableMismatchError):
        P("x") + ExactPolynomial.parse("x", ("x", "y"))


def test_diff_and_subs():
    p = P("x^3*y + 2*x*z^2")
    assert p.diff("x") == P("3*x^2*y + 2*z^2")
    image = p.subs({"x": P("y + z"), "y": 2})
    assert to_sympy(image) == sp.expand(
        to_sympy(p).subs({sp.Symbol("x"): sp.Symbol("y") + sp.Symbol("z"), sp.Symbol("y"): 2}, simultaneous=True)
    )


def test_evaluate():
    assert P("x^2 - 3/2*y*z").evaluate({"x": 2, "y": 1, "z": Fraction(2, 3)}) == 3


def test_homogenize():
    p = ExactPolynomial.parse("x^2 + 3*x - 1", ("x", "z"))
    assert homogenize(p, "z") == ExactPolynomial.parse("x^2 + 3*x*z - z^2", ("x", "z"))
    assert homogenize(p, "z", 3).degree() == 3
    with pytest.raises(PolynomialError):
        homogenize(p, "z", 1)


def test_lex_leading_term():
    order = MonomialOrder.lex("y", "x", "z")
    p = P("x^5 + y*z + 2*y^2")
    assert p.leading_monomial(order) == (0, 2, 0)
    assert p.leading_coefficient(order) == 2


def test_bareiss_matches_sympy(rng):
    """Test the fraction-free determinant on symbolic 4x4 matrices"""
    names = ("x", "y")
    matrix = [[random_poly(rng, names, terms=2, degree=2) for _ in range(4)] for _ in range(4)]
    expected = sp.Matrix([[to_sympy(e) for e in row] for row in matrix]).det(method="berkowitz")
    assert to_sympy(bareiss_determinant(matrix)) == sp.expand(expected)


def test_bareiss_needs_pivot_swap():
    names = ("x",)
    one = ExactPolynomial.one(names)
    zero = ExactPolynomial.zero(names)
    x = ExactPolynomial.variable("x", names)
    assert bareiss_determinant([[zero, one], [x, zero]]) == -x


def test_resultant_matches_sympy(rng):
    """Test the Sylvester resultant against sympy.resultant"""
    names = ("z", "t")
    for _ in range(5):
        F = random_poly(rng, names, terms=4, degree=3)
        G = random_poly(rng, names, terms=4, degree=3)
        if F.degree_in("z") < 1 or G.degree_in("z") < 1:
            continue
        z = sp.Symbol("z")
        expected = sp.expand(sp.resultant(to_sympy(F), to_sympy(G), z))
        assert to_sympy(univariate_resultant(F, G, "z")) == expected


def test_resultant_of_linear_factors():
    names = ("z",)
    F = ExactPolynomial.parse("(z - 1)*(z - 2)", names)
    G = ExactPolynomial.parse("z + 1", names)
    # Res(F, G) = G(1) * G(2)
    assert univariate_resultant(F, G, "z") == 6


def test_rational_roots_with_multiplicity():
    p = ExactPolynomial.parse("(t - 3/2)^2*(t + 1)*t^3*(t^2 + 1)", ("t",))
    assert rational_roots(p) == [(Fraction(-1), 1), (Fraction(0), 3), (Fraction(3, 2), 2)]
    assert rational_roots(ExactPolynomial.parse("t^2 - 2", ("t",))) == []


def test_gcd_and_squarefree():
    names = ("t",)
    p = ExactPolynomial.parse("(t - 1)^3*(t + 2)", names)
    q = ExactPolynomial.parse("(t - 1)*(t + 5)", names)
    assert univariate_gcd(p, q) == ExactPolynomial.parse("t - 1", names)
    assert squarefree_part(p) == ExactPolynomial.parse("(t - 1)*(t + 2)", names)


def test_parse_rational():
    assert parse_rational("-7/21") == Fraction(-1, 3)
    assert parse_rational(4) == 4
    with pytest.raises(PolynomialParseError):
        parse_rational("1.5")


@pytest.mark.parametrize("text", ["1/0", "-3 / 0", "0/0"])
def test_parse_rational_rejects_zero_denominator(text):
    with pytest.raises(PolynomialParseError):
        parse_rational(text)


def test_resultant_swap_sign(rng):
    """Test Res(G, F) = (-1)^(deg F * deg G) * Res(F, G)"""
    names = ("z", "t")
    checked = 0
    while checked < 5:
        F = random_poly(rng, names, terms=4, degree=3)
        G = random_poly(rng, names, terms=4, degree=3)
        m, n = F.degree_in("z"), G.degree_in("z")
        if m < 1 or n < 1:
            continue
        sign = -1 if (m * n) % 2 else 1
        assert univariate_resultant(G, F, "z") == univariate_resultant(F, G, "z") * sign
        checked += 1


def test_resultant_swap_sign_odd_degrees():
    names = ("z", "t")
    F = ExactPolynomial.parse("z - t", names)
    G = ExactPolynomial.parse("z^3 + 2", names)
    # Res(F, G) = G(t)
    assert univariate_resultant(F, G, "z") == ExactPolynomial.parse("t^3 + 2", names)
    assert univariate_resultant(G, F, "z") == ExactPolynomial.parse("-t^3 - 2", names)


def test_gcd_with_unused_variables():
    names = ("t", "w")
    p = ExactPolynomial.parse("t^2 - 1", names)
    q = ExactPolynomial.parse("2*t + 2", names)
    assert univariate_gcd(p, q) == ExactPolynomial.parse("t + 1", names)
    assert rational_roots(p) == [(Fraction(-1), 1), (Fraction(1), 1)]
