import json
from fractions import Fraction
from pathlib import Path

import pytest

from dynsigma.algebra.exactpoly import ExactPolynomial
from dynsigma.core.errors import DocumentError, StructuralInvariantError, UsageError
from dynsigma.dynamics.families import FAMILIES, powering_map
from dynsigma.dynamics.projdyn import DynamicalSystem, conjugate, rational_periodic_spectrum
from dynsigma.dynamics.sigma import (
    CHOW,
    MATRIX,
    PLAIN,
    SIGMA_VARIABLES,
    SigmaPolynomial,
    SigmaTable,
    extract_sigmas,
    sigma_dim1_resultant,
    sigma_from_spectrum,
    sigma_poly,
)

GOLDENS = json.loads((Path(__file__).parent / "data" / "sigma_goldens.json").read_text())


def S(text):
    return ExactPolynomial.parse(text, SIGMA_VARIABLES)


def M(*coords):
    return DynamicalSystem.from_strings(list(coords))


POWERING_P1 = S("(w - t)^2*(w - t + 2)")
POWERING_P2 = S("(w - t^2)^3*(w - t^2 + 2*t)^3*(w - (t - 2)^2)")
# [x^2 - 2z^2 : y^2 - yz : z^2]: affine fixed points {2, -1} x {0, 2}, two on z = 0, and (1 : 0 : 0)
SPLIT_PLANE = S(
    "(w - t^2)^2*(w - t^2 + 2*t)"
    "*(w - (t - 4)*(t + 1))*(w - (t - 4)*(t - 3))*(w - (t + 2)*(t + 1))*(w - (t + 2)*(t - 3))"
)


def test_powering_line():
    """Test every route to Sigma_1 of [x^2 : y^2]"""
    f = powering_map(1, 2)
    assert sigma_poly(f, mode=CHOW).poly == POWERING_P1
    assert sigma_poly(f, mode=MATRIX).poly == POWERING_P1
    assert sigma_dim1_resultant(f).poly == POWERING_P1
    assert sigma_from_spectrum(rational_periodic_spectrum(f)).poly == POWERING_P1


def test_powering_line_table():
    table = extract_sigmas(sigma_poly(powering_map(1, 2)))
    assert table.top_index == 3
    assert [table[(1, j)] for j in range(2)] == [3, 2]
    assert [table[(2, j)] for j in range(3)] == [3, 4, 0]
    assert [table[(3, j)] for j in range(4)] == [1, 2, 0, 0]
    assert not table.degree_deficient


def test_powering_plane_matrix_mode():
    f = powering_map(2, 2)
    sigma = sigma_poly(f, mode=MATRIX)
    assert sigma.poly == POWERING_P2
    assert sigma.degree_w == 7
    table = extract_sigmas(sigma)
    assert table[(1, 2)] == 4
    assert table[(2, 2)] == 60
    assert table[(2, 3)] == 24
    assert table[(2, 4)] == 0
    assert table[(3, 3)] == 176


def test_powering_plane_chow_mode():
    sigma = sigma_poly(powering_map(2, 2), mode=CHOW)
    assert sigma.poly == POWERING_P2
    assert not extract_sigmas(sigma).degree_deficient


def test_chow_and_matrix_on_a_split_plane_map():
    f = M("x0^2 - 2*x2^2", "x1^2 - x1*x2", "x2^2")
    assert sigma_poly(f, mode=CHOW).poly == SPLIT_PLANE
    assert sigma_poly(f, mode=MATRIX).poly == SPLIT_PLANE


def test_powering_plane_plain_mode_drops_repeats():
    """Test that plain mode keeps one copy of each multiplier polynomial per chart"""
    f = powering_map(2, 2)
    sigma = sigma_poly(f, mode=PLAIN)
    assert sigma.degree_w == 6
    assert sigma.poly == sigma_from_spectrum(rational_periodic_spectrum(f), PLAIN).poly
    assert extract_sigmas(sigma).degree_deficient


def test_resultant_path_matches_chow(make_morphism):
    for _ in range(3):
        f = make_morphism(1, 2)
        assert sigma_dim1_resultant(f).poly == sigma_poly(f, mode=CHOW).poly


def test_matrix_mode_matches_resultant(make_morphism):
    for _ in range(3):
        f = make_morphism(1, 3)
        assert sigma_poly(f, mode=MATRIX).poly == sigma_dim1_resultant(f).poly


@pytest.mark.slow
@pytest.mark.parametrize("d", [2, 3])
def test_resultant_path_battery(make_morphism, d):
    for _ in range(10):
        f = make_morphism(1, d)
        assert sigma_dim1_resultant(f).poly == sigma_poly(f, mode=CHOW).poly


def test_double_fixed_point():
    # x -> x^2 + x has a double fixed point at 0 with multiplier 1
    f = M("x0^2 + x0*x1", "x1^2")
    expected = S("(w - t + 1)^2*(w - t)")
    assert sigma_dim1_resultant(f).poly == expected
    assert sigma_poly(f, mode=MATRIX).poly == expected


def test_period_two():
    f = M("x0^2 - 3/4*x1^2", "x1^2")
    expected = S("(w - t + 9)*(w - t + 1)^3*(w - t)")
    assert sigma_dim1_resultant(f, 2).poly == expected
    assert sigma_poly(f, 2, mode=MATRIX).poly == expected
    assert sigma_poly(f, 2, mode=MATRIX).Dn == 5


@pytest.mark.parametrize("m", [[[1, 3], [0, 1]], [[2, 1], [1, 1]], [[0, 1], [-1, 0]]])
def test_conjugation_invariance(make_morphism, m):
    for _ in range(5):
        f = make_morphism(1, 2)
        assert sigma_dim1_resultant(conjugate(f, m)).poly == sigma_dim1_resultant(f).poly


def test_conjugation_invariance_on_the_plane():
    f = powering_map(2, 2)
    g = conjugate(f, [[1, 0, 1], [0, 1, 0], [0, 0, 1]])
    assert sigma_poly(g, mode=MATRIX).poly == POWERING_P2


def test_structural_invariants():
    with pytest.raises(StructuralInvariantError):
        SigmaPolynomial(poly=S("w^2 - t"), n=1, N=1, d=2, Dn=3, mode=CHOW)
    with pytest.raises(StructuralInvariantError):
        SigmaPolynomial(poly=S("2*w - t"), n=1, N=1, d=2, Dn=3, mode=PLAIN)
    with pytest.raises(StructuralInvariantError):
        SigmaPolynomial(poly=S("w - t^2"), n=1, N=1, d=2, Dn=3, mode=PLAIN)
    with pytest.raises(UsageError):
        SigmaPolynomial(poly=S("w - t"), n=1, N=1, d=2, Dn=3, mode="bogus")
    with pytest.raises(UsageError):
        sigma_poly(powering_map(1, 2), mode="bogus")
    with pytest.raises(UsageError):
        sigma_dim1_resultant(powering_map(2, 2))


def test_table_invariants():
    with pytest.raises(StructuralInvariantError):
        SigmaTable(entries={(0, 0): Fraction(1), (1, 0): Fraction(2)}, n=1, N=1, d=2, Dn=1, mode=CHOW)
    with pytest.raises(StructuralInvariantError):
        SigmaTable(entries={(0, 0): Fraction(2)}, n=1, N=1, d=2, Dn=1, mode=CHOW)


def test_table_document():
    table = extract_sigmas(sigma_poly(powering_map(1, 2)))
    doc = table.to_document()
    assert doc["entries"]["1,1"] == "2"
    assert SigmaTable.from_document(doc) == table
    with pytest.raises(DocumentError):
        SigmaTable.from_document({"entries": {"1,x": "1"}})


def _golden_sigma(name, parameter):
    golden = GOLDENS[name]
    f = FAMILIES[name](Fraction(parameter))
    return golden, sigma_poly(f, mode=golden["mode"], stratum_jacobian=True)


@pytest.mark.slow
@pytest.mark.parametrize("parameter", GOLDENS["lattes-extended"]["parameters"])
def test_lattes_extended_golden(parameter):
    golden, sigma = _golden_sigma("lattes-extended", parameter)
    assert sigma.poly == S(golden["sigma"])


@pytest.mark.slow
@pytest.mark.parametrize("parameter", GOLDENS["lattes-segre"]["parameters"])
def test_lattes_segre_golden(parameter):
    golden, sigma = _golden_sigma("lattes-segre", parameter)
    assert sigma.poly == S(golden["sigma"])


@pytest.mark.slow
@pytest.mark.parametrize("parameter", GOLDENS["legendre-product"]["parameters"])
def test_legendre_product_leading_terms(parameter):
    golden, sigma = _golden_sigma("legendre-product", parameter)
    coeffs = sigma.poly.coefficients_in("w")
    assert sigma.degree_w == 11
    for degree, text in golden["leading"].items():
        assert coeffs[int(degree)] == S(text)


@pytest.mark.slow
@pytest.mark.parametrize("parameter", GOLDENS["symfixture"]["parameters"])
def test_symmetric_fixture_golden(parameter):
    golden, sigma = _golden_sigma("symfixture", parameter)
    assert sigma.poly == S(golden["sigma"])


@pytest.mark.slow
def test_chow_and_matrix_agree_on_split_plane_maps(make_split_plane):
    for _ in range(5):
        f = make_split_plane()
        assert sigma_poly(f, mode=CHOW).poly == sigma_poly(f, mode=MATRIX).poly
