"""The monic quadratic family on P^2: normal form, explicit sigma generators and their quintic relation."""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from loguru import logger

from dynsigma.algebra.exactpoly import ExactPolynomial, MonomialOrder, parse_rational
from dynsigma.algebra.groebner import groebner_basis, ideal_dimension, rational_zeros
from dynsigma.core.config import GroebnerLimits
from dynsigma.core.errors import DocumentError, UsageError
from dynsigma.dynamics.projdyn import DynamicalSystem, new_dynamical_system, projective_variables
from dynsigma.dynamics.sigma import SigmaTable

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

PARAMETERS = ("a1", "a2", "b1", "b2")
SIGMA_NAMES = ("s12", "s22", "s23", "s24", "s33")
SIGMA_INDICES = ((1, 2), (2, 2), (2, 3), (2, 4), (3, 3))

Rational = Union[int, Fraction, str]


@dataclass(frozen=True)
class MonicParams:
    a1: Fraction
    a2: Fraction
    b1: Fraction
    b2: Fraction

    @classmethod
    def of(cls, a1: Rational, a2: Rational, b1: Rational, b2: Rational) -> "MonicParams":
        return cls(*(parse_rational(v) for v in (a1, a2, b1, b2)))

    @classmethod
    def parse(cls, text: str) -> "MonicParams":
        parts = text.split(",")
        if len(parts) != 4:
            raise UsageError(f"Expected a1,a2,b1,b2 but got {text!r}")
        return cls.of(*parts)

    def as_tuple(self) -> Tuple[Fraction, ...]:
        return (self.a1, self.a2, self.b1, self.b2)


@dataclass(frozen=True)
class MonicSigmaVector:
    """(sigma_{1,2}, sigma_{2,2}, sigma_{2,3}, sigma_{2,4}, sigma_{3,3})."""

    values: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(SIGMA_INDICES):
            raise UsageError(f"Monic sigma vector needs {len(SIGMA_INDICES)} entries, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    @classmethod
    def from_table(cls, table: SigmaTable) -> "MonicSigmaVector":
        return cls(tuple(table[idx] for idx in SIGMA_INDICES))

    def matches_up_to_sign(self, other: "MonicSigmaVector") -> bool:
        return all(abs(a) == abs(b) for a, b in zip(self.values, other.values))


@dataclass(frozen=True)
class FiberReport:
    dimension: int
    solutions: Tuple[MonicParams, ...]
    nonrational: bool

    @property
    def is_finite(self) -> bool:
        return self.dimension <= 0


def monic_map(p: MonicParams) -> DynamicalSystem:
    """[x^2 + a1 xz + a2 yz - a1 z^2 : y^2 + b1 xz + b2 yz - b1 z^2 : z^2]."""
    names = projective_variables(2)
    return new_dynamical_system([
        ExactPolynomial(names, {(2, 0, 0): 1, (1, 0, 1): p.a1, (0, 1, 1): p.a2, (0, 0, 2): -p.a1}),
        ExactPolynomial(names, {(0, 2, 0): 1, (1, 0, 1): p.b1, (0, 1, 1): p.b2, (0, 0, 2): -p.b1}),
        ExactPolynomial(names, {(0, 0, 2): 1}),
    ])


def _read_lines(name: str) -> List[str]:
    path = DATA_DIR / name
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"Cannot read {path}: {exc}") from exc
    return [line.strip() for line in text.splitlines() if line.strip()]


@lru_cache(maxsize=None)
def generator_polynomials() -> Tuple[ExactPolynomial, ...]:
    lines = _read_lines("monic_generators.txt")
    if len(lines) != len(SIGMA_INDICES):
        raise DocumentError(f"monic_generators.txt must hold {len(SIGMA_INDICES)} polynomials")
    return tuple(ExactPolynomial.parse(line, PARAMETERS) for line in lines)


@lru_cache(maxsize=None)
def hypersurface_polynomial() -> ExactPolynomial:
    return ExactPolynomial.parse(" ".join(_read_lines("monic_hypersurface.txt")), SIGMA_NAMES)


def monic_sigma_generators(p: MonicParams) -> MonicSigmaVector:
    values = dict(zip(PARAMETERS, p.as_tuple()))
    return MonicSigmaVector(tuple(g.evaluate(values) for g in generator_polynomials()))


def hypersurface_eval(v: MonicSigmaVector) -> Fraction:
    return hypersurface_polynomial().evaluate(dict(zip(SIGMA_NAMES, v.values)))


def verify_hypersurface(samples: Sequence[MonicParams]) -> List[MonicParams]:
    """Parameter points whose generator vector misses the quintic; empty when the transcription checks out."""
    failures = [p for p in samples if hypersurface_eval(monic_sigma_generators(p)) != 0]
    if failures:
        logger.error("Quintic does not vanish on {} of {} generator vectors", len(failures), len(samples))
    else:
        logger.info("Quintic vanishes on all {} generator vectors", len(samples))
    return failures


def monic_conjugation_formula(p: MonicParams, a: Rational, b: Rational) -> DynamicalSystem:
    """monic_map(p) conjugated by (x, y, z) -> (x + a z, y + b z, z), written out coefficientwise."""
    a, b = parse_rational(a), parse_rational(b)
    names = projective_variables(2)
    x_coord = {
        (2, 0, 0): 1,
        (1, 0, 1): 2 * a + p.a1,
        (0, 1, 1): p.a2,
        (0, 0, 2): a * a + a * p.a1 + p.a2 * b - p.a1 - a,
    }
    y_coord = {
        (0, 2, 0): 1,
        (1, 0, 1): p.b1,
        (0, 1, 1): 2 * b + p.b2,
        (0, 0, 2): b * b + b * p.b2 + p.b1 * a - p.b1 - b,
    }
    return new_dynamical_system([
        ExactPolynomial(names, x_coord),
        ExactPolynomial(names, y_coord),
        ExactPolynomial(names, {(0, 0, 2): 1}),
    ])


def monic_fiber_report(v: MonicSigmaVector, limits: Optional[GroebnerLimits] = None) -> FiberReport:
    """Parameters (a1, a2, b1, b2) whose generator vector equals v, via a lex basis."""
    order = MonomialOrder.lex(*PARAMETERS)
    generators = [g - value for g, value in zip(generator_polynomials(), v.values)]
    basis = groebner_basis(generators, order, limits, ambient=PARAMETERS)
    dimension = ideal_dimension(basis)
    logger.debug("Monic fiber basis has {} elements, dimension {}", len(basis.basis), dimension)
    if dimension != 0:
        return FiberReport(dimension=dimension, solutions=(), nonrational=False)
    zeros = rational_zeros(basis)
    solutions = tuple(MonicParams(*s) for s in zeros.solutions)
    logger.info("Monic fiber: {} rational point(s), non-rational points present: {}", len(solutions), zeros.nonrational)
    return FiberReport(dimension=0, solutions=solutions, nonrational=zeros.nonrational)
