"""Recovering maps from multiplier data: quadratic polynomials, split and triangular maps."""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from loguru import logger

from dynsigma.algebra.exactpoly import ExactPolynomial, rational_roots
from dynsigma.algebra.linalg import LinearSolution, solve_rational_system
from dynsigma.core.config import GroebnerLimits
from dynsigma.core.errors import DomainError, IncompleteSpectrumError, IrrationalSpectrumError, UsageError
from dynsigma.dynamics.families import TriangularSpec, triangular_endomorphism
from dynsigma.dynamics.projdyn import DynamicalSystem, SpectrumList, period_count, rational_periodic_spectrum
from dynsigma.dynamics.sigma import CHOW, sigma_from_spectrum

EigenTuple = Tuple[Fraction, ...]


@dataclass(frozen=True)
class EigenPairMultiset:
    """Unordered eigenvalue tuples with multiplicities, kept in canonical sorted form."""

    pairs: Tuple[Tuple[EigenTuple, int], ...]

    def __post_init__(self) -> None:
        counts: Counter = Counter()
        dims = set()
        for eigenvalues, multiplicity in self.pairs:
            if multiplicity < 1:
                raise UsageError(f"Multiplicity must be positive, got {multiplicity}")
            key = tuple(sorted(Fraction(v) for v in eigenvalues))
            dims.add(len(key))
            counts[key] += multiplicity
        if len(dims) > 1:
            raise UsageError(f"Eigenvalue tuples of different lengths {sorted(dims)}")
        object.__setattr__(self, "pairs", tuple(sorted(counts.items())))

    @classmethod
    def of(cls, tuples: Iterable[Sequence[Union[int, Fraction, str]]]) -> "EigenPairMultiset":
        return cls(tuple((tuple(Fraction(v) for v in t), 1) for t in tuples))

    @property
    def total(self) -> int:
        return sum(m for _, m in self.pairs)

    @property
    def dim(self) -> int:
        return len(self.pairs[0][0]) if self.pairs else 0

    def expanded(self) -> List[EigenTuple]:
        out: List[EigenTuple] = []
        for eigenvalues, multiplicity in self.pairs:
            out.extend([eigenvalues] * multiplicity)
        return out


@dataclass(frozen=True)
class MilnorParams:
    sigma1: Fraction
    sigma2: Fraction
    sigma3: Fraction = Fraction(0)


def eigen_pairs_from_spectrum(spectrum: SpectrumList) -> EigenPairMultiset:
    records = []
    for entry in spectrum.entries:
        roots = rational_roots(entry.charpoly.poly)
        eigenvalues = [r for r, m in roots for _ in range(m)]
        if len(eigenvalues) != spectrum.N:
            raise IrrationalSpectrumError(f"Multiplier matrix at {entry.point} has irrational eigenvalues")
        records.append((tuple(eigenvalues), entry.multiplicity))
    return EigenPairMultiset(tuple(records))


def milnor_parameters(l1: Fraction, l2: Fraction) -> MilnorParams:
    """Fixed-point multipliers l1, l2 of a quadratic polynomial plus 0 at infinity."""
    l1, l2 = Fraction(l1), Fraction(l2)
    return MilnorParams(sigma1=l1 + l2, sigma2=l1 * l2)


def quadratic_from_multipliers(l1: Fraction, l2: Fraction) -> Optional[Fraction]:
    """c with x^2 + c having finite fixed-point multipliers l1, l2; None unless l1 + l2 = 2."""
    params = milnor_parameters(l1, l2)
    if params.sigma1 != 2:
        return None
    return params.sigma2 / 4


def split_quadratic_invariants(c: Fraction, d: Fraction) -> Tuple[Fraction, Fraction]:
    """(sigma_{2,2}, sigma_{2,3}) of [x^2 + c z^2 : y^2 + d z^2 : z^2]."""
    s = Fraction(c) + Fraction(d)
    return 8 * s + 60, 16 * s + 24


def binomial_guard(d: int, n: int) -> bool:
    """C(d+n, d) <= sum_{i=0}^{n} d^i."""
    if d < 2 or n < 1:
        raise UsageError(f"binomial_guard needs d >= 2 and n >= 1 (got {d}, {n})")
    return comb(d + n, d) <= sum(d ** i for i in range(n + 1))


def interpolation_solve(
    nodes: Sequence[Sequence[Fraction]],
    values: Sequence[Fraction],
    basis: Sequence[Tuple[int, ...]],
) -> LinearSolution:
    """Coefficients c with sum_k c_k m_k(node) = value at every node."""
    if len(nodes) != len(values):
        raise UsageError(f"{len(nodes)} nodes but {len(values)} values")
    rows = []
    for node in nodes:
        if any(len(m) != len(node) for m in basis):
            raise UsageError(f"Node {tuple(node)} does not match the monomial basis")
        row = []
        for mono in basis:
            value = Fraction(1)
            for x, e in zip(node, mono):
                value *= Fraction(x) ** e
            row.append(value)
        rows.append(row)
    return solve_rational_system(rows, [Fraction(v) for v in values])


def _other(pair: EigenTuple, value: Fraction) -> Fraction:
    return pair[1] if pair[0] == value else pair[0]


def _fiber_choices(
    pairs: List[EigenTuple], value: Fraction, size: int
) -> Iterator[Tuple[List[Fraction], List[EigenTuple]]]:
    """Ways to pick ``size`` pairs containing ``value``; yields the other entries and the rest."""
    seen = set()
    indices = [i for i, p in enumerate(pairs) if value in p]
    for combo in combinations(indices, size):
        key = tuple(sorted(pairs[i] for i in combo))
        if key in seen:
            continue
        seen.add(key)
        others = [_other(pairs[i], value) for i in combo]
        rest = [p for i, p in enumerate(pairs) if i not in combo]
        yield others, rest


def _fiber_constant(others: Sequence[Fraction]) -> Optional[Fraction]:
    return quadratic_from_multipliers(others[0], others[1])


_F2_BASIS = ((2, 0), (1, 1), (0, 2))
_AFFINE = ("x0", "x1")


def _candidate_maps(pairs: List[EigenTuple]) -> Iterator[Tuple[Fraction, Fraction, Fraction, Fraction]]:
    """Yield (c1, a, b, c) for F1 = x^2 + c1, F2 = y^2 + a x^2 + b x + c."""
    occurrences: Counter = Counter()
    for p in pairs:
        for v in set(p):
            occurrences[v] += 1
    candidates = sorted(v for v, k in occurrences.items() if k >= 2)
    emitted = set()
    for l1 in candidates:
        for l2 in candidates:
            if l2 < l1:
                continue
            c1 = quadratic_from_multipliers(l1, l2)
            if c1 is None:
                continue
            if l1 == l2:
                logger.warning("Skipping F1 multipliers ({}, {}): double fixed point leaves the interpolation underdetermined", l1, l2)
                continue
            for others1, rest1 in _fiber_choices(pairs, l1, 2):
                k1 = _fiber_constant(others1)
                if k1 is None:
                    continue
                for others2, rest2 in _fiber_choices(rest1, l2, 2):
                    k2 = _fiber_constant(others2)
                    if k2 is None or len(rest2) != 3 or any(Fraction(0) not in p for p in rest2):
                        continue
                    at_infinity = sorted(_other(p, Fraction(0)) for p in rest2)
                    if Fraction(0) not in at_infinity:
                        continue
                    at_infinity.remove(Fraction(0))
                    a = quadratic_from_multipliers(*at_infinity)
                    if a is None:
                        continue
                    nodes = [(l1 / 2, Fraction(1)), (l2 / 2, Fraction(1)), (Fraction(1), Fraction(0))]
                    solution = interpolation_solve(nodes, [k1, k2, a], _F2_BASIS)
                    if not solution.is_unique:
                        logger.warning("Interpolation for F1 multipliers ({}, {}) is {}", l1, l2, solution.status)
                        continue
                    key = (c1,) + solution.solution
                    if key not in emitted:
                        emitted.add(key)
                        yield key


def recover_triangular_2_2(
    spectrum: EigenPairMultiset,
    limits: Optional[GroebnerLimits] = None,
) -> List[DynamicalSystem]:
    """All triangular quadratic maps of P^2 in normal form reproducing the fixed-point spectrum."""
    if spectrum.dim != 2:
        raise UsageError(f"Triangular recovery expects eigenvalue pairs, got tuples of length {spectrum.dim}")
    expected = period_count(2, 2, 1)
    if spectrum.total != expected:
        raise IncompleteSpectrumError(f"Spectrum has {spectrum.total} fixed points, expected {expected}")
    limits = (limits or GroebnerLimits()).started()

    found = {}
    for c1, a, b, c in _candidate_maps(spectrum.expanded()):
        spec = TriangularSpec((
            ExactPolynomial(_AFFINE, {(2, 0): 1, (0, 0): c1}),
            ExactPolynomial(_AFFINE, {(0, 2): 1, (2, 0): a, (1, 0): b, (0, 0): c}),
        ))
        candidate = triangular_endomorphism(spec)
        try:
            candidate_spectrum = rational_periodic_spectrum(candidate, 1, limits)
            reproduced = eigen_pairs_from_spectrum(candidate_spectrum)
        except DomainError as exc:
            logger.warning("Candidate {} rejected: {}", candidate, exc)
            continue
        if reproduced != spectrum:
            logger.debug("Candidate {} does not reproduce the spectrum", candidate)
            continue
        sigma = sigma_from_spectrum(candidate_spectrum, CHOW).poly
        if sigma not in found:
            found[sigma] = candidate
    recovered = sorted(found.values(), key=str)
    logger.info("Triangular recovery: {} map(s) reproduce the spectrum", len(recovered))
    return recovered
