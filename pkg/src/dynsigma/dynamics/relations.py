"""Identities among multipliers and sigma invariants."""

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import List, Optional, Sequence, Tuple

from dynsigma.algebra.exactpoly import ExactPolynomial
from dynsigma.core.errors import IncompleteSpectrumError, MultiplierOneError, UsageError
from dynsigma.dynamics.projdyn import SpectrumList, period_count
from dynsigma.dynamics.sigma import CHOW, MATRIX, SigmaTable

T = "t"


@dataclass(frozen=True)
class UedaReport:
    lhs: ExactPolynomial
    rhs: ExactPolynomial
    holds: bool

    @property
    def residual(self) -> ExactPolynomial:
        return self.lhs - self.rhs


def ueda_rhs(N: int, d: int) -> ExactPolynomial:
    """sum_{k=0}^{N} d^k t^(N-k) = (t^(N+1) - d^(N+1)) / (t - d)."""
    return ExactPolynomial((T,), {(N - k,): d ** k for k in range(N + 1)})


def check_ueda(spectrum: SpectrumList, N: Optional[int] = None, d: Optional[int] = None) -> UedaReport:
    """sum_P mult(P) gamma_P(t) / gamma_P(1) against sum d^k t^(N-k), for the fixed points of f^n."""
    N = spectrum.N if N is None else N
    d = spectrum.d if d is None else d
    expected = period_count(N, d, spectrum.n)
    if spectrum.total_multiplicity != expected:
        raise IncompleteSpectrumError(
            f"Spectrum has {spectrum.total_multiplicity} points with multiplicity, expected {expected}"
        )
    lhs = ExactPolynomial.zero((T,))
    for entry in spectrum.entries:
        at_one = entry.charpoly.at_one()
        if not at_one:
            raise MultiplierOneError(f"Multiplier 1 at {entry.point or entry.charpoly}")
        lhs = lhs + entry.charpoly.poly.scale(Fraction(entry.multiplicity) / at_one)
    rhs = ueda_rhs(N, d ** spectrum.n)
    return UedaReport(lhs=lhs, rhs=rhs, holds=lhs == rhs)


def _require_fixed_point_table(table: SigmaTable) -> None:
    if table.mode not in (CHOW, MATRIX):
        raise UsageError(f"Relation needs a multiplicity-preserving table, got mode {table.mode}")
    if table.n != 1:
        raise UsageError(f"Relation is stated for fixed points, got period {table.n}")


def corollary_residual(table: SigmaTable) -> Fraction:
    """(D-1) + sum_{k=1}^{N D} (-1)^(k+1) (sigma_{D,k} - sigma_{D-1,k})."""
    _require_fixed_point_table(table)
    D = table.Dn
    total = Fraction(D - 1)
    for k in range(1, table.N * D + 1):
        previous = table[(D - 1, k)] if k <= table.N * (D - 1) else Fraction(0)
        term = table[(D, k)] - previous
        total += term if k % 2 else -term
    return total


def check_corollary_relation(table: SigmaTable) -> bool:
    return corollary_residual(table) == 0


@dataclass(frozen=True)
class PartitionPredictor:
    j: int
    Dn: int
    z: Tuple[Fraction, ...]


def fit_partition_predictor(sigma_row: Sequence[Fraction], j: int, Dn: int) -> PartitionPredictor:
    """Solve sigma_{i,j} = sum_{k<=min(i,j)} C(Dn-k, i-k) z_k, i = 1..j (unit lower triangular)."""
    if j < 1 or Dn < j:
        raise UsageError(f"Predictor needs 1 <= j <= D_n (got j={j}, D_n={Dn})")
    if len(sigma_row) != j:
        raise UsageError(f"Expected {j} values sigma_1..sigma_j, got {len(sigma_row)}")
    z: List[Fraction] = []
    for i in range(1, j + 1):
        known = sum((comb(Dn - k, i - k) * z[k - 1] for k in range(1, i)), Fraction(0))
        z.append(Fraction(sigma_row[i - 1]) - known)
    return PartitionPredictor(j=j, Dn=Dn, z=tuple(z))


def predict_sigma(predictor: PartitionPredictor, i: int) -> Fraction:
    if not predictor.j < i <= predictor.Dn:
        raise UsageError(f"Prediction index {i} outside {predictor.j + 1}..{predictor.Dn}")
    return sum(
        (comb(predictor.Dn - k, i - k) * zk for k, zk in enumerate(predictor.z, start=1)),
        Fraction(0),
    )


@dataclass(frozen=True)
class DependenceMismatch:
    i: int
    j: int
    predicted: Fraction
    actual: Fraction


def check_dependence(table: SigmaTable) -> List[DependenceMismatch]:
    """Fit on sigma_{1..j,j} and compare every sigma_{i,j} with i > j; empty means the theorem holds."""
    D = table.top_index
    mismatches = []
    for j in range(1, D):
        row = [table[(i, j)] for i in range(1, j + 1)]
        predictor = fit_partition_predictor(row, j, D)
        for i in range(j + 1, D + 1):
            predicted = predict_sigma(predictor, i)
            actual = table[(i, j)]
            if predicted != actual:
                mismatches.append(DependenceMismatch(i=i, j=j, predicted=predicted, actual=actual))
    return mismatches


def milnor_sum(multipliers: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for value in multipliers:
        value = Fraction(value)
        if value == 1:
            raise MultiplierOneError("Fixed point with multiplier 1")
        total += 1 / (1 - value)
    return total


def milnor_fixed_point_identity(multipliers: Sequence[Fraction]) -> bool:
    """sum 1/(1 - lambda) = 1 over the d+1 fixed points of a map of P^1."""
    return milnor_sum(multipliers) == 1
