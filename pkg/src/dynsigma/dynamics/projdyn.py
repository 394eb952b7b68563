"""Endomorphisms of projective space: validation, iteration, charts, multipliers."""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from loguru import logger

from dynsigma.algebra.exactpoly import ExactPolynomial, MonomialOrder, format_rational, parse_rational
from dynsigma.algebra.groebner import (
    GroebnerBasis,
    Ideal,
    buchberger,
    ideal_dimension,
    local_multiplicity,
    rational_zeros,
)
from dynsigma.algebra.linalg import (
    bareiss_determinant,
    cofactor_determinant,
    invert_rational_matrix,
    rational_charpoly,
)
from dynsigma.core.config import GroebnerLimits
from dynsigma.core.errors import (
    DegenerateChartError,
    IncompleteSpectrumError,
    InvalidMapError,
    IrrationalSpectrumError,
    NotAMorphismError,
    NotPeriodicError,
    PolynomialError,
    UsageError,
)

T = "t"


def projective_variables(N: int) -> Tuple[str, ...]:
    return tuple(f"x{i}" for i in range(N + 1))


def chart_variables(N: int, j: int) -> Tuple[str, ...]:
    return tuple(f"x{i}" for i in range(N + 1) if i != j)


def period_count(N: int, d: int, n: int) -> int:
    """Number of points of period dividing n, with multiplicity: fixed points of f^n."""
    if d < 2 or n < 1 or N < 1:
        raise UsageError(f"period_count needs N >= 1, d >= 2, n >= 1 (got {N}, {d}, {n})")
    dn = d ** n
    return sum(dn ** k for k in range(N + 1))


@dataclass(frozen=True)
class ProjectivePoint:
    coords: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        values = tuple(Fraction(c) for c in self.coords)
        if not any(values):
            raise PolynomialError("The zero vector is not a projective point")
        last = next(c for c in reversed(values) if c)
        object.__setattr__(self, "coords", tuple(c / last for c in values))

    @classmethod
    def of(cls, *coords: Union[int, Fraction, str]) -> "ProjectivePoint":
        return cls(tuple(parse_rational(c) for c in coords))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    @property
    def chart_index(self) -> int:
        return max(i for i, c in enumerate(self.coords) if c)

    def affine(self, j: int) -> Tuple[Fraction, ...]:
        if not self.coords[j]:
            raise PolynomialError(f"{self} does not lie in chart {j}")
        return tuple(c / self.coords[j] for i, c in enumerate(self.coords) if i != j)

    def as_strings(self) -> List[str]:
        return [format_rational(c) for c in self.coords]

    def __str__(self) -> str:
        return "(" + " : ".join(self.as_strings()) + ")"


@dataclass(frozen=True)
class CharPoly:
    poly: ExactPolynomial
    dim: int
    point: Optional[ProjectivePoint] = None
    period: int = 1

    def __post_init__(self) -> None:
        if self.poly.variables != (T,):
            raise PolynomialError(f"Charpoly must be univariate in {T}, got {self.poly.variables}")
        if self.poly.degree() != self.dim or self.poly.leading_coefficient() != 1:
            raise PolynomialError(f"{self.poly} is not monic of degree {self.dim}")

    @classmethod
    def from_eigenvalues(
        cls, eigenvalues: Sequence[Union[int, Fraction]], point: Optional[ProjectivePoint] = None, period: int = 1
    ) -> "CharPoly":
        t = ExactPolynomial.variable(T, (T,))
        poly = ExactPolynomial.one((T,))
        for value in eigenvalues:
            poly = poly * (t - Fraction(value))
        return cls(poly=poly, dim=len(eigenvalues), point=point, period=period)

    def at_one(self) -> Fraction:
        return self.poly.evaluate({T: 1})

    def __str__(self) -> str:
        return str(self.poly)


@dataclass(frozen=True)
class AffineChart:
    index: int
    variables: Tuple[str, ...]
    numerators: Tuple[ExactPolynomial, ...]
    denominator: ExactPolynomial


class DynamicalSystem:
    """N+1 homogeneous degree-d forms in x0..xN, content-normalized."""

    __slots__ = ("N", "d", "coords")

    def __init__(self, coords: Sequence[ExactPolynomial]) -> None:
        coords = _normalize(coords)
        self.coords: Tuple[ExactPolynomial, ...] = coords
        self.N = len(coords) - 1
        self.d = coords[0].degree()

    @property
    def variables(self) -> Tuple[str, ...]:
        return projective_variables(self.N)

    @classmethod
    def from_strings(cls, texts: Sequence[str], check_morphism: bool = True) -> "DynamicalSystem":
        names = projective_variables(len(texts) - 1)
        return new_dynamical_system([ExactPolynomial.parse(t, names) for t in texts], check_morphism)

    def to_strings(self) -> List[str]:
        return [str(c) for c in self.coords]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DynamicalSystem):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __str__(self) -> str:
        return "[" + " : ".join(self.to_strings()) + "]"

    def __repr__(self) -> str:
        return f"DynamicalSystem(N={self.N}, d={self.d}, {self})"


def _normalize(coords: Sequence[ExactPolynomial]) -> Tuple[ExactPolynomial, ...]:
    num = 0
    den = 1
    for p in coords:
        for _, c in p.items():
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
    if num == 0:
        raise InvalidMapError("All coordinates vanish identically")
    first = next(p for p in coords if not p.is_zero)
    factor = Fraction(den, num)
    if first.leading_coefficient() < 0:
        factor = -factor
    return tuple(p.scale(factor) for p in coords)


def is_morphism(coords: Sequence[ExactPolynomial], limits: Optional[GroebnerLimits] = None) -> bool:
    """True iff some power of every variable lies in (f_0, ..., f_N)."""
    names = coords[0].variables
    basis = buchberger(Ideal.of(list(coords), MonomialOrder.lex(*names), names), limits)
    pure = set()
    for lm in basis.leading_monomials():
        support = [i for i, e in enumerate(lm) if e]
        if len(support) == 1:
            pure.add(support[0])
        elif not support:
            return True
    return len(pure) == len(names)


def new_dynamical_system(
    polys: Sequence[ExactPolynomial],
    check_morphism: bool = True,
    limits: Optional[GroebnerLimits] = None,
) -> DynamicalSystem:
    if len(polys) < 2:
        raise InvalidMapError("A map of P^N needs at least two coordinates")
    first_vars = polys[0].variables
    if any(p.variables != first_vars for p in polys):
        raise InvalidMapError("Coordinates use different variable lists")
    if len(first_vars) != len(polys):
        raise InvalidMapError(
            f"{len(polys)} coordinates need {len(polys)} variables, got {len(first_vars)}"
        )
    names = projective_variables(len(polys) - 1)
    coords = [ExactPolynomial(names, p.terms_dict()) for p in polys]
    degrees = set()
    for i, p in enumerate(coords):
        if p.is_zero:
            raise InvalidMapError(f"Coordinate {i} is identically zero")
        if not p.is_homogeneous():
            raise InvalidMapError(f"Coordinate {i} is not homogeneous: {p}")
        degrees.add(p.degree())
    if len(degrees) != 1:
        raise InvalidMapError(f"Coordinates have different degrees {sorted(degrees)}")
    d = degrees.pop()
    if d < 2:
        raise InvalidMapError(f"Degree must be at least 2, got {d}")
    if check_morphism and not is_morphism(coords, limits):
        raise NotAMorphismError("Coordinates have a common projective zero")
    return DynamicalSystem(coords)


def compose(f: DynamicalSystem, g: DynamicalSystem) -> DynamicalSystem:
    """f o g."""
    if f.N != g.N:
        raise InvalidMapError(f"Cannot compose maps of P^{f.N} and P^{g.N}")
    assignment = dict(zip(f.variables, g.coords))
    return DynamicalSystem([c.subs(assignment) for c in f.coords])


def iterate(f: DynamicalSystem, n: int) -> DynamicalSystem:
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"Iteration count must be a positive integer, got {n!r}")
    result = f
    for _ in range(n - 1):
        result = compose(f, result)
    return result


def conjugate(f: DynamicalSystem, m: Sequence[Sequence[Union[int, Fraction]]]) -> DynamicalSystem:
    """m^-1 o f o m with m acting on column vectors."""
    size = f.N + 1
    if len(m) != size or any(len(row) != size for row in m):
        raise UsageError(f"Conjugating matrix must be {size}x{size}")
    inverse = invert_rational_matrix(m)
    names = f.variables
    xs = [ExactPolynomial.variable(v, names) for v in names]
    linear = {}
    for i, name in enumerate(names):
        form = ExactPolynomial.zero(names)
        for k in range(size):
            if m[i][k]:
                form = form + xs[k].scale(Fraction(m[i][k]))
        linear[name] = form
    moved = [c.subs(linear) for c in f.coords]
    out = []
    for i in range(size):
        acc = ExactPolynomial.zero(names)
        for k in range(size):
            if inverse[i][k]:
                acc = acc + moved[k].scale(inverse[i][k])
        out.append(acc)
    return DynamicalSystem(out)


def evaluate_map(f: DynamicalSystem, point: ProjectivePoint) -> ProjectivePoint:
    if point.dim != f.N:
        raise UsageError(f"Point {point} does not lie in P^{f.N}")
    values = dict(zip(f.variables, point.coords))
    image = tuple(c.evaluate(values) for c in f.coords)
    if not any(image):
        raise NotAMorphismError(f"{point} is a common zero of the coordinates")
    return ProjectivePoint(image)


def is_periodic(f: DynamicalSystem, point: ProjectivePoint, n: int) -> bool:
    current = point
    for _ in range(n):
        current = evaluate_map(f, current)
    return current == point


def dehomogenize(f: DynamicalSystem, j: int) -> AffineChart:
    if not 0 <= j <= f.N:
        raise UsageError(f"Chart index {j} outside 0..{f.N}")
    names = chart_variables(f.N, j)
    restricted = [c.subs({f"x{j}": 1}, names) for c in f.coords]
    numerators = tuple(p for i, p in enumerate(restricted) if i != j)
    return AffineChart(index=j, variables=names, numerators=numerators, denominator=restricted[j])


def _chart_order(names: Sequence[str]) -> MonomialOrder:
    return MonomialOrder.lex(*names)


def fixed_point_generators(chart: AffineChart) -> List[ExactPolynomial]:
    xs = [ExactPolynomial.variable(v, chart.variables) for v in chart.variables]
    return [phi - x * chart.denominator for phi, x in zip(chart.numerators, xs)]


def fixed_ideal_chart(f: DynamicalSystem, n: int, j: int) -> Ideal:
    chart = dehomogenize(iterate(f, n), j)
    return Ideal.of(fixed_point_generators(chart), _chart_order(chart.variables), chart.variables)


def _jacobian_at(chart: AffineChart, values: Dict[str, Fraction]) -> List[List[Fraction]]:
    s = chart.denominator.evaluate(values)
    if not s:
        raise DegenerateChartError(f"Chart {chart.index} denominator vanishes at {values}")
    ds = [chart.denominator.diff(v).evaluate(values) for v in chart.variables]
    rows = []
    for phi, v in zip(chart.numerators, chart.variables):
        rows.append(
            [(phi.diff(k).evaluate(values) - values[v] * ds[col]) / s for col, k in enumerate(chart.variables)]
        )
    return rows


def multiplier_charpoly(
    f: DynamicalSystem,
    point: ProjectivePoint,
    n: int = 1,
    chart: Optional[int] = None,
) -> CharPoly:
    """Characteristic polynomial of the multiplier matrix of f^n at a periodic point."""
    if point.dim != f.N:
        raise UsageError(f"Point {point} does not lie in P^{f.N}")
    if not is_periodic(f, point, n):
        raise NotPeriodicError(f"{point} is not periodic with period dividing {n}")
    j = point.chart_index if chart is None else chart
    if not point.coords[j]:
        raise UsageError(f"{point} has a zero coordinate in chart {j}")
    affine_chart = dehomogenize(iterate(f, n), j)
    values = dict(zip(affine_chart.variables, point.affine(j)))
    jac = _jacobian_at(affine_chart, values)
    return CharPoly(poly=rational_charpoly(jac, T), dim=f.N, point=point, period=n)


def chart_multiplier_polynomial(
    f: DynamicalSystem,
    j: int,
    n: int = 1,
    stratum: bool = False,
) -> Tuple[ExactPolynomial, ExactPolynomial]:
    """Symbolic (g_num, g_den) in chart variables + t with g_num/g_den = charpoly at fixed points.

    With ``stratum`` the chart map is restricted to x_{j+1} = ... = x_N = 0 before
    differentiating.
    """
    chart = dehomogenize(iterate(f, n), j)
    names = chart.variables + (T,)
    trailing = {f"x{k}": 0 for k in range(j + 1, f.N + 1)}
    numerators = [p.with_variables(names) for p in chart.numerators]
    s = chart.denominator.with_variables(names)
    if stratum and trailing:
        numerators = [p.subs(trailing) for p in numerators]
        s = s.subs(trailing)
    t = ExactPolynomial.variable(T, names)
    ds = [s.diff(v) for v in chart.variables]
    matrix = []
    for i, (phi, v) in enumerate(zip(numerators, chart.variables)):
        x = ExactPolynomial.variable(v, names)
        row = []
        for col, k in enumerate(chart.variables):
            entry = -(phi.diff(k) - x * ds[col])
            if col == i:
                entry = entry + t * s
            row.append(entry)
        matrix.append(row)
    det = cofactor_determinant(matrix) if len(matrix) <= 3 else bareiss_determinant(matrix, names)
    return det, s ** f.N


@dataclass(frozen=True)
class SpectrumEntry:
    charpoly: CharPoly
    multiplicity: int
    point: Optional[ProjectivePoint] = None


@dataclass(frozen=True)
class SpectrumList:
    entries: Tuple[SpectrumEntry, ...]
    N: int
    d: int
    n: int = 1

    @property
    def total_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    @property
    def expected_count(self) -> int:
        return period_count(self.N, self.d, self.n)

    @property
    def is_complete(self) -> bool:
        return self.total_multiplicity == self.expected_count

    def charpolys(self) -> List[ExactPolynomial]:
        out = []
        for entry in self.entries:
            out.extend([entry.charpoly.poly] * entry.multiplicity)
        return out


def stratum_ideal(f_n: DynamicalSystem, j: int) -> Ideal:
    """Fixed ideal of chart j restricted to x_{j+1} = ... = x_N = 0, in x_0..x_{j-1}."""
    chart = dehomogenize(f_n, j)
    free = tuple(f"x{k}" for k in range(j))
    assignment = {f"x{k}": 0 for k in range(j + 1, f_n.N + 1)}
    gens = [g.subs(assignment, free) for g in fixed_point_generators(chart)]
    return Ideal.of(gens, _chart_order(free), free)


def rational_periodic_spectrum(
    f: DynamicalSystem,
    n: int = 1,
    limits: Optional[GroebnerLimits] = None,
) -> SpectrumList:
    f_n = iterate(f, n)
    limits = (limits or GroebnerLimits()).started()
    expected = period_count(f.N, f.d, n)
    entries: List[SpectrumEntry] = []
    for j in range(f.N, -1, -1):
        basis = buchberger(stratum_ideal(f_n, j), limits)
        if basis.is_unit:
            continue
        if ideal_dimension(basis) != 0:
            raise DegenerateChartError(f"Fixed locus of chart {j} is not zero-dimensional")
        zeros = rational_zeros(basis)
        if zeros.nonrational:
            raise IrrationalSpectrumError(f"Chart {j} has periodic points outside Q")
        if not zeros.solutions:
            continue
        chart_basis: GroebnerBasis = buchberger(fixed_ideal_chart(f, n, j), limits)
        for solution in zeros.solutions:
            coords = list(solution) + [Fraction(1)] + [Fraction(0)] * (f.N - j)
            point = ProjectivePoint(tuple(coords))
            multiplicity = local_multiplicity(chart_basis, point.affine(j), limits)
            entries.append(
                SpectrumEntry(
                    charpoly=multiplier_charpoly(f, point, n, chart=j),
                    multiplicity=multiplicity,
                    point=point,
                )
            )
    spectrum = SpectrumList(entries=tuple(entries), N=f.N, d=f.d, n=n)
    if spectrum.total_multiplicity != expected:
        raise IncompleteSpectrumError(
            f"Found {spectrum.total_multiplicity} periodic points with multiplicity, expected {expected}"
        )
    logger.debug("Rational spectrum of period {}: {} points", n, len(entries))
    return spectrum
