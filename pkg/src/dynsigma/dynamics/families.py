"""Constructors for product, Segre, split, triangular and Lattes families."""

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple, Union

from dynsigma.algebra.exactpoly import ExactPolynomial, homogenize, parse_rational
from dynsigma.core.errors import DocumentError, InvalidMapError, UsageError
from dynsigma.dynamics.projdyn import DynamicalSystem, new_dynamical_system, projective_variables

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

ROW_MAJOR = "row_major"
COLUMN_MAJOR = "column_major"


def powering_map(N: int, d: int) -> DynamicalSystem:
    names = projective_variables(N)
    coords = [ExactPolynomial.variable(v, names) ** d for v in names]
    return new_dynamical_system(coords, check_morphism=False)


def _shifted(p: ExactPolynomial, names: Tuple[str, ...], offset: int) -> ExactPolynomial:
    width = len(names)
    terms = {}
    for mono, c in p.items():
        full = [0] * width
        full[offset:offset + len(mono)] = mono
        terms[tuple(full)] = c
    return ExactPolynomial(names, terms)


def cartesian_product(f: DynamicalSystem, g: DynamicalSystem) -> DynamicalSystem:
    """f on x0..xN followed by g on x(N+1)..x(N+M+1)."""
    if f.d != g.d:
        raise InvalidMapError(f"Cartesian product needs equal degrees, got {f.d} and {g.d}")
    names = projective_variables(f.N + g.N + 1)
    coords = [_shifted(c, names, 0) for c in f.coords] + [_shifted(c, names, f.N + 1) for c in g.coords]
    return new_dynamical_system(coords)


def cartesian_power(maps: Sequence[DynamicalSystem]) -> DynamicalSystem:
    if not maps:
        raise UsageError("Cartesian product of no maps")
    result = maps[0]
    for g in maps[1:]:
        result = cartesian_product(result, g)
    return result


def extend_by_power(f: DynamicalSystem) -> DynamicalSystem:
    """[f_0 : ... : f_N : x_{N+1}^d] on P^{N+1}."""
    names = projective_variables(f.N + 1)
    coords = [_shifted(c, names, 0) for c in f.coords]
    coords.append(ExactPolynomial.variable(names[-1], names) ** f.d)
    return new_dynamical_system(coords)


def segre_index(i: int, j: int, N: int, M: int, flattening: str = ROW_MAJOR) -> int:
    if flattening == ROW_MAJOR:
        return i * (M + 1) + j
    if flattening == COLUMN_MAJOR:
        return j * (N + 1) + i
    raise UsageError(f"Unknown flattening {flattening!r}")


def segre_power_product(f: DynamicalSystem, M: int, flattening: str = ROW_MAJOR) -> DynamicalSystem:
    """f x (powering map of P^M) through the Segre embedding: h_(i,j)(u) = f_i(u_(0,j), ..., u_(N,j))."""
    if M < 1:
        raise UsageError(f"Segre product needs M >= 1, got {M}")
    N = f.N
    names = projective_variables((N + 1) * (M + 1) - 1)
    coords: List[ExactPolynomial] = [ExactPolynomial.zero(names)] * len(names)
    for j in range(M + 1):
        assignment = {
            f"x{k}": ExactPolynomial.variable(names[segre_index(k, j, N, M, flattening)], names)
            for k in range(N + 1)
        }
        for i in range(N + 1):
            coords[segre_index(i, j, N, M, flattening)] = f.coords[i].subs(assignment, names)
    # conjugate to the (M+1)-fold cartesian power of f by a coordinate permutation
    return new_dynamical_system(coords, check_morphism=False)


@dataclass(frozen=True)
class SplitSpec:
    components: Tuple[ExactPolynomial, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise UsageError("Split endomorphism needs at least one component")
        degrees = set()
        for F in self.components:
            if len(F.variables) != 1:
                raise UsageError(f"Split component {F} must be univariate")
            degrees.add(F.degree())
        if len(degrees) != 1:
            raise InvalidMapError(f"Split components have different degrees {sorted(degrees)}")
        if degrees.pop() < 2:
            raise InvalidMapError("Split components need degree at least 2")

    @property
    def degree(self) -> int:
        return self.components[0].degree()

    def as_triangular(self) -> "TriangularSpec":
        names = tuple(f"x{k}" for k in range(len(self.components)))
        out = []
        for k, F in enumerate(self.components):
            out.append(ExactPolynomial(names, {
                tuple(e if i == k else 0 for i in range(len(names))): c for (e,), c in F.items()
            }))
        return TriangularSpec(tuple(out))


@dataclass(frozen=True)
class TriangularSpec:
    """F_k in the affine variables x0..x(N-1), F_k using only x0..xk."""

    components: Tuple[ExactPolynomial, ...]

    def __post_init__(self) -> None:
        N = len(self.components)
        names = tuple(f"x{k}" for k in range(N))
        degrees = set()
        for k, F in enumerate(self.components):
            if F.variables != names:
                raise UsageError(f"Triangular component {k} must use the variables {names}")
            allowed = set(names[:k + 1])
            if not set(F.used_variables()) <= allowed:
                raise InvalidMapError(f"Component {k} uses variables outside {sorted(allowed)}")
            degrees.add(F.degree())
        if len(degrees) != 1:
            raise InvalidMapError(f"Triangular components have different degrees {sorted(degrees)}")

    @classmethod
    def from_strings(cls, texts: Sequence[str]) -> "TriangularSpec":
        names = tuple(f"x{k}" for k in range(len(texts)))
        return cls(tuple(ExactPolynomial.parse(t, names) for t in texts))


def triangular_endomorphism(spec: TriangularSpec) -> DynamicalSystem:
    """Homogenize with x_N as the last variable and append x_N^d."""
    N = len(spec.components)
    d = spec.components[0].degree()
    names = projective_variables(N)
    coords = []
    for F in spec.components:
        coords.append(homogenize(F.with_variables(names), names[-1], d))
    coords.append(ExactPolynomial.variable(names[-1], names) ** d)
    return new_dynamical_system(coords)


def split_endomorphism(spec: SplitSpec) -> DynamicalSystem:
    return triangular_endomorphism(spec.as_triangular())


def _p1(terms: Sequence[Tuple[Tuple[int, int], Fraction]]) -> ExactPolynomial:
    return ExactPolynomial(projective_variables(1), dict(terms))


def lattes_mordell(a: Union[int, Fraction, str]) -> DynamicalSystem:
    """Multiplication by 2 on y^2 = x^3 + a: [u^4 - 8a u v^3 : 4u^3 v + 4a v^4]."""
    a = parse_rational(a)
    if a == 0:
        raise InvalidMapError("The curve y^2 = x^3 + a is singular at a = 0")
    return new_dynamical_system([
        _p1([((4, 0), 1), ((1, 3), -8 * a)]),
        _p1([((3, 1), 4), ((0, 4), 4 * a)]),
    ])


def lattes_legendre(a: Union[int, Fraction, str]) -> DynamicalSystem:
    """[(u^2 - a v^2)^2 : 4uv(u - v)(u - av)]."""
    a = parse_rational(a)
    if a in (0, 1):
        raise InvalidMapError(f"Lattes parameter {a} is degenerate")
    names = projective_variables(1)
    u = ExactPolynomial.variable("x0", names)
    v = ExactPolynomial.variable("x1", names)
    return new_dynamical_system([
        (u * u - v * v * a) ** 2,
        u * v * (u - v) * (u - v * a) * 4,
    ])


def _load_fixture(name: str) -> dict:
    path = DATA_DIR / f"{name}.json"
    try:
        with path.open("r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DocumentError(f"Cannot read fixture {path}: {exc}") from exc


def symmetric_lattes_fixture(a: Union[int, Fraction, str]) -> DynamicalSystem:
    """The stored 2-symmetric product of the Legendre Lattes family, on P^2."""
    a = parse_rational(a)
    fixture = _load_fixture("symmetric_lattes")
    excluded = {parse_rational(x) for x in fixture["excluded"]}
    if a in excluded:
        raise InvalidMapError(f"Parameter {a} is degenerate for the symmetric Lattes family")
    names = projective_variables(int(fixture["dim"]))
    param = fixture["parameter"]
    coords = [
        ExactPolynomial.parse(text, names + (param,)).subs({param: a}, names)
        for text in fixture["coords"]
    ]
    return new_dynamical_system(coords)


# Picklable parametric builders for isospectral scans.


def mordell_extended_family(a: Fraction) -> DynamicalSystem:
    return extend_by_power(lattes_mordell(a))


def legendre_product_family(a: Fraction) -> DynamicalSystem:
    return cartesian_product(lattes_legendre(a), powering_map(1, 4))


def mordell_segre_family(a: Fraction) -> DynamicalSystem:
    return segre_power_product(lattes_mordell(a), 1)


def quadratic_polynomial_family(c: Fraction) -> DynamicalSystem:
    """[x^2 + c y^2 : y^2]; sigma_2 = 4c, so not isospectral."""
    return new_dynamical_system([_p1([((2, 0), 1), ((0, 2), Fraction(c))]), _p1([((0, 2), 1)])])


FAMILIES: Dict[str, Callable[[Fraction], DynamicalSystem]] = {
    "lattes": lattes_mordell,
    "legendre": lattes_legendre,
    "lattes-extended": mordell_extended_family,
    "legendre-product": legendre_product_family,
    "lattes-segre": mordell_segre_family,
    "symfixture": symmetric_lattes_fixture,
    "quadratic": quadratic_polynomial_family,
}


def family_builder(name: str) -> Callable[[Fraction], DynamicalSystem]:
    try:
        return FAMILIES[name]
    except KeyError:
        raise UsageError(f"Unknown family {name!r}; expected one of {sorted(FAMILIES)}") from None
