"""Sigma_n(f) = prod over period-n points of (w - gamma_P(t)), and its sigma_{i,j} table."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from loguru import logger

from dynsigma.algebra.exactpoly import (
    ExactPolynomial,
    MonomialOrder,
    format_rational,
    parse_rational,
    univariate_resultant,
)
from dynsigma.algebra.groebner import (
    GroebnerBasis,
    Ideal,
    buchberger,
    elimination_ideal,
    ideal_dimension,
    normal_form,
    standard_monomials,
)
from dynsigma.algebra.linalg import characteristic_polynomial, invert_rational_matrix, matmul
from dynsigma.core.config import GroebnerLimits
from dynsigma.core.errors import (
    DegenerateChartError,
    DocumentError,
    DynSigmaError,
    SingularMatrixError,
    StructuralInvariantError,
    UsageError,
)
from dynsigma.core.logging import configure_worker_logging
from dynsigma.dynamics.projdyn import (
    DynamicalSystem,
    SpectrumList,
    chart_multiplier_polynomial,
    dehomogenize,
    iterate,
    period_count,
    stratum_ideal,
)

W = "w"
T = "t"
SIGMA_VARIABLES = (W, T)

CHOW = "chow"
PLAIN = "plain"
MATRIX = "matrix"
MODES = (CHOW, PLAIN, MATRIX)


@dataclass(frozen=True)
class SigmaPolynomial:
    poly: ExactPolynomial
    n: int
    N: int
    d: int
    Dn: int
    mode: str
    stratum_jacobian: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise UsageError(f"Unknown sigma mode {self.mode!r}")
        if self.poly.variables != SIGMA_VARIABLES:
            raise StructuralInvariantError(f"Sigma must live in {SIGMA_VARIABLES}")
        if self.poly.is_zero:
            raise StructuralInvariantError("Sigma polynomial is zero")
        coeffs = self.poly.coefficients_in(W)
        degree = max(coeffs)
        top = coeffs[degree]
        if not (top.is_constant and top.constant_value() == 1):
            raise StructuralInvariantError(f"Sigma is not monic in {W}: leading coefficient {top}")
        if self.mode in (CHOW, MATRIX) and degree != self.Dn:
            raise StructuralInvariantError(
                f"{self.mode} Sigma has w-degree {degree}, expected D_n = {self.Dn}"
            )
        if degree > self.Dn:
            raise StructuralInvariantError(f"w-degree {degree} exceeds D_n = {self.Dn}")
        for k, c in coeffs.items():
            i = degree - k
            if c.degree_in(T) > self.N * i:
                raise StructuralInvariantError(
                    f"Coefficient of w^{k} has t-degree {c.degree_in(T)} > {self.N * i}"
                )

    @property
    def degree_w(self) -> int:
        return self.poly.degree_in(W)

    def __str__(self) -> str:
        return str(self.poly)


@dataclass(frozen=True)
class SigmaTable:
    entries: Dict[Tuple[int, int], Fraction]
    n: int
    N: int
    d: int
    Dn: int
    mode: str
    degree_deficient: bool = False

    def __post_init__(self) -> None:
        if self.entries.get((0, 0)) != 1:
            raise StructuralInvariantError("sigma_{0,0} must be 1")
        top = max(i for i, _ in self.entries)
        for i in range(top + 1):
            if self.entries.get((i, 0)) != comb(top, i):
                raise StructuralInvariantError(
                    f"sigma_{{{i},0}} = {self.entries.get((i, 0))}, expected binomial({top}, {i})"
                )

    @property
    def top_index(self) -> int:
        return max(i for i, _ in self.entries)

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        return self.entries.get(key, Fraction(0))

    def row(self, j: int) -> List[Fraction]:
        return [self[(i, j)] for i in range(1, self.top_index + 1)]

    def to_document(self) -> dict:
        return {
            "n": self.n,
            "N": self.N,
            "d": self.d,
            "Dn": self.Dn,
            "mode": self.mode,
            "degree_deficient": self.degree_deficient,
            "entries": {f"{i},{j}": format_rational(v) for (i, j), v in sorted(self.entries.items())},
        }

    @classmethod
    def from_document(cls, doc: dict) -> "SigmaTable":
        try:
            entries = {}
            for key, value in doc["entries"].items():
                i, j = (int(x) for x in key.split(","))
                entries[(i, j)] = parse_rational(value)
            return cls(
                entries=entries,
                n=int(doc["n"]),
                N=int(doc["N"]),
                d=int(doc["d"]),
                Dn=int(doc["Dn"]),
                mode=str(doc["mode"]),
                degree_deficient=bool(doc.get("degree_deficient", False)),
            )
        except (KeyError, ValueError, AttributeError, TypeError) as exc:
            raise DocumentError(f"Malformed sigma table document: {exc}") from exc


def extract_sigmas(S: SigmaPolynomial) -> SigmaTable:
    """sigma_{i,j} = (-1)^(i+j) * coefficient of w^(D-i) t^(N*i-j)."""
    degree = S.degree_w
    deficient = degree < S.Dn
    if deficient:
        logger.warning(
            "{} Sigma has w-degree {} < D_n = {}; indexing by the actual degree", S.mode, degree, S.Dn
        )
    coeffs = S.poly.coefficients_in(W)
    zero_w = ExactPolynomial.zero(SIGMA_VARIABLES)
    entries: Dict[Tuple[int, int], Fraction] = {}
    for i in range(degree + 1):
        c = coeffs.get(degree - i, zero_w)
        for j in range(S.N * i + 1):
            value = c.coefficient((0, S.N * i - j))
            entries[(i, j)] = -value if (i + j) % 2 else value
    return SigmaTable(
        entries=entries,
        n=S.n,
        N=S.N,
        d=S.d,
        Dn=S.Dn,
        mode=S.mode,
        degree_deficient=deficient,
    )


# -- per-chart elimination ---------------------------------------------


def _monic_in_w(p: ExactPolynomial, chart: int) -> ExactPolynomial:
    coeffs = p.coefficients_in(W)
    top = coeffs[max(coeffs)]
    if not top.is_constant:
        raise DegenerateChartError(f"Chart {chart}: eliminant leading coefficient {top} depends on t")
    return p.scale(1 / top.constant_value())


def _single_eliminant(
    generators: List[ExactPolynomial],
    names: Tuple[str, ...],
    keep: Tuple[str, ...],
    limits: Optional[GroebnerLimits],
    chart: int,
) -> ExactPolynomial:
    basis = buchberger(Ideal.of(generators, MonomialOrder.lex(*names), names), limits)
    eliminants = elimination_ideal(basis, keep)
    if len(eliminants) != 1:
        raise DegenerateChartError(
            f"Chart {chart}: elimination ideal has {len(eliminants)} generators, expected 1"
        )
    return eliminants[0]


def _plain_factor(stratum, gnum, gden, limits, chart) -> ExactPolynomial:
    free = stratum.ambient
    names = free + SIGMA_VARIABLES
    w = ExactPolynomial.variable(W, names)
    gens = [g.with_variables(names) for g in stratum.generators]
    gens.append(w * gden.with_variables(names) - gnum.with_variables(names))
    eliminant = _single_eliminant(gens, names, SIGMA_VARIABLES, limits, chart)
    return _monic_in_w(eliminant.with_variables(SIGMA_VARIABLES), chart)


def _chow_factor(stratum, gnum, gden, limits, chart) -> ExactPolynomial:
    free = stratum.ambient
    us = ("u0",) + tuple(f"u{k + 1}" for k in range(len(free)))
    names = free + us + SIGMA_VARIABLES
    w = ExactPolynomial.variable(W, names)
    den = gden.with_variables(names)
    linear = ExactPolynomial.zero(names)
    for k, x in enumerate(free):
        linear = linear + ExactPolynomial.variable(us[k + 1], names) * ExactPolynomial.variable(x, names)
    gens = [g.with_variables(names) for g in stratum.generators]
    gens.append(
        ExactPolynomial.variable("u0", names) * (w * den - gnum.with_variables(names)) + den * linear
    )
    eliminant = _single_eliminant(gens, names, us + SIGMA_VARIABLES, limits, chart)
    specialization = {u: (1 if u == "u0" else 0) for u in us}
    return _monic_in_w(eliminant.subs(specialization, names).with_variables(SIGMA_VARIABLES), chart)


def _multiplication_matrix(
    q: ExactPolynomial, basis: GroebnerBasis, monomials: Sequence[Tuple[int, ...]]
) -> List[List[Fraction]]:
    index = {m: k for k, m in enumerate(monomials)}
    size = len(monomials)
    matrix = [[Fraction(0)] * size for _ in range(size)]
    for col, m in enumerate(monomials):
        product = q * ExactPolynomial(basis.ambient, {m: 1})
        for mono, c in normal_form(product, basis.basis, basis.order).items():
            matrix[index[mono]][col] = c
    return matrix


def _matrix_factor(stratum_basis: GroebnerBasis, gnum, gden, chart) -> ExactPolynomial:
    free = stratum_basis.ambient
    monomials = standard_monomials(stratum_basis)
    try:
        inverse = invert_rational_matrix(
            _multiplication_matrix(gden.with_variables(free), stratum_basis, monomials)
        )
    except SingularMatrixError as exc:
        raise DegenerateChartError(f"Chart {chart}: multiplier denominator vanishes on the fixed locus") from exc
    size = len(monomials)
    entries = [[ExactPolynomial.zero(SIGMA_VARIABLES) for _ in range(size)] for _ in range(size)]
    for k, coeff in gnum.coefficients_in(T).items():
        block = matmul(inverse, _multiplication_matrix(coeff.with_variables(free), stratum_basis, monomials))
        t_power = ExactPolynomial(SIGMA_VARIABLES, {(0, k): 1})
        for r in range(size):
            for c in range(size):
                if block[r][c]:
                    entries[r][c] = entries[r][c] + t_power.scale(block[r][c])
    return characteristic_polynomial(entries, W, SIGMA_VARIABLES)


def _chart_factor(
    f_n: DynamicalSystem,
    j: int,
    mode: str,
    limits: Optional[GroebnerLimits],
    stratum_jacobian: bool,
) -> ExactPolynomial:
    one = ExactPolynomial.one(SIGMA_VARIABLES)
    free = tuple(f"x{k}" for k in range(j))
    trailing = {f"x{k}": 0 for k in range(j + 1, f_n.N + 1)}
    chart = dehomogenize(f_n, j)
    if chart.denominator.subs(trailing, free).is_zero:
        logger.debug("Chart {}: denominator vanishes on the stratum, no fixed points", j)
        return one

    stratum = stratum_ideal(f_n, j)
    stratum_basis = buchberger(stratum, limits)
    if stratum_basis.is_unit:
        logger.debug("Chart {}: no fixed points on the stratum", j)
        return one
    if ideal_dimension(stratum_basis) != 0:
        raise DegenerateChartError(f"Chart {j}: fixed locus is not zero-dimensional")

    gnum, gden = chart_multiplier_polynomial(f_n, j, 1, stratum=stratum_jacobian)
    target = free + (T,)
    gnum = gnum.subs(trailing, target) if trailing else gnum.with_variables(target)
    gden = gden.subs(trailing, target) if trailing else gden.with_variables(target)

    if mode == PLAIN:
        factor = _plain_factor(stratum, gnum, gden, limits, j)
    elif mode == CHOW:
        factor = _chow_factor(stratum, gnum, gden, limits, j)
    else:
        factor = _matrix_factor(stratum_basis, gnum, gden.with_variables(free), j)
    logger.debug("Chart {}: factor of w-degree {}", j, factor.degree_in(W))
    return factor


def sigma_poly(
    f: DynamicalSystem,
    n: int = 1,
    mode: str = CHOW,
    limits: Optional[GroebnerLimits] = None,
    stratum_jacobian: bool = False,
) -> SigmaPolynomial:
    if mode not in MODES:
        raise UsageError(f"Unknown sigma mode {mode!r}; expected one of {MODES}")
    f_n = iterate(f, n)
    limits = (limits or GroebnerLimits()).started()
    total = ExactPolynomial.one(SIGMA_VARIABLES)
    for j in range(f.N, -1, -1):
        total = total * _chart_factor(f_n, j, mode, limits, stratum_jacobian)
    result = SigmaPolynomial(
        poly=total,
        n=n,
        N=f.N,
        d=f.d,
        Dn=period_count(f.N, f.d, n),
        mode=mode,
        stratum_jacobian=stratum_jacobian,
    )
    logger.info("Sigma_{} ({} mode) of a degree-{} map of P^{}: w-degree {}", n, mode, f.d, f.N, result.degree_w)
    return result


def sigma_dim1_resultant(f: DynamicalSystem, n: int = 1) -> SigmaPolynomial:
    """Dimension-one Sigma_n from Res_z(F0 - z F1, F1 (w - t) + F0' - z F1'), no points computed."""
    if f.N != 1:
        raise UsageError(f"The resultant path needs a map of P^1, got P^{f.N}")
    f_n = iterate(f, n)
    degree = f_n.d
    names = ("z",) + SIGMA_VARIABLES
    z = ExactPolynomial.variable("z", names)
    w = ExactPolynomial.variable(W, names)
    t = ExactPolynomial.variable(T, names)
    lift = {"x0": z, "x1": ExactPolynomial.one(names)}
    f0 = f_n.coords[0].subs(lift, names)
    f1 = f_n.coords[1].subs(lift, names)
    fixed = f0 - z * f1
    G = f1 * (w - t) + f0.diff("z") - z * f1.diff("z")
    result = univariate_resultant(fixed, G, "z").with_variables(SIGMA_VARIABLES)
    result = _monic_in_w(result, 1)

    excess = degree + 1 - fixed.degree_in("z")
    if excess:
        at_infinity = dehomogenize(f_n, 0)
        y = {"x1": 0}
        multiplier = at_infinity.numerators[0].diff("x1").evaluate(y) / at_infinity.denominator.evaluate(y)
        w2 = ExactPolynomial.variable(W, SIGMA_VARIABLES)
        t2 = ExactPolynomial.variable(T, SIGMA_VARIABLES)
        result = result * (w2 - t2 + multiplier) ** excess
    return SigmaPolynomial(
        poly=result, n=n, N=1, d=f.d, Dn=period_count(1, f.d, n), mode=CHOW
    )


def sigma_from_spectrum(spectrum: SpectrumList, mode: str = CHOW) -> SigmaPolynomial:
    """prod (w - gamma_P(t))^mult; plain mode keeps one copy of each charpoly per chart."""
    if mode not in MODES:
        raise UsageError(f"Unknown sigma mode {mode!r}")
    w = ExactPolynomial.variable(W, SIGMA_VARIABLES)
    total = ExactPolynomial.one(SIGMA_VARIABLES)
    seen = set()
    for entry in spectrum.entries:
        gamma = entry.charpoly.poly.with_variables(SIGMA_VARIABLES)
        if mode == PLAIN:
            chart = entry.point.chart_index if entry.point is not None else -1
            if (chart, gamma) in seen:
                continue
            seen.add((chart, gamma))
            total = total * (w - gamma)
        else:
            total = total * (w - gamma) ** entry.multiplicity
    return SigmaPolynomial(
        poly=total,
        n=spectrum.n,
        N=spectrum.N,
        d=spectrum.d,
        Dn=period_count(spectrum.N, spectrum.d, spectrum.n),
        mode=mode,
    )


# -- isospectral scans ---------------------------------------------------


@dataclass(frozen=True)
class ScanResult:
    sample: Fraction
    sigma: Optional[SigmaPolynomial] = None
    error: Optional[str] = None


@dataclass(frozen=True)
class IsospectralReport:
    results: Tuple[ScanResult, ...]
    agree: bool
    common: Optional[SigmaPolynomial] = None
    failures: Tuple[Fraction, ...] = field(default_factory=tuple)


def _scan_one(
    builder: Callable[[Fraction], DynamicalSystem],
    sample: Fraction,
    n: int,
    mode: str,
    limits: Optional[GroebnerLimits],
    stratum_jacobian: bool,
) -> ScanResult:
    try:
        f = builder(sample)
        return ScanResult(sample=sample, sigma=sigma_poly(f, n, mode, limits, stratum_jacobian))
    except DynSigmaError as exc:
        return ScanResult(sample=sample, error=f"{type(exc).__name__}: {exc}")


def isospectral_scan(
    builder: Callable[[Fraction], DynamicalSystem],
    samples: Sequence[Fraction],
    n: int = 1,
    mode: str = CHOW,
    limits: Optional[GroebnerLimits] = None,
    stratum_jacobian: bool = False,
    workers: int = 1,
    worker_name: str = "dynsigma",
) -> IsospectralReport:
    """Sigma_n at each sample; ``builder`` must be picklable when workers > 1."""
    samples = [Fraction(s) for s in samples]
    limits = (limits or GroebnerLimits()).started()
    if workers > 1 and len(samples) > 1:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=configure_worker_logging, initargs=(worker_name,)
        ) as pool:
            futures = [
                pool.submit(_scan_one, builder, s, n, mode, limits, stratum_jacobian) for s in samples
            ]
            results = [fut.result() for fut in futures]
    else:
        results = [_scan_one(builder, s, n, mode, limits, stratum_jacobian) for s in samples]

    failures = tuple(r.sample for r in results if r.error is not None)
    polys = [r.sigma.poly for r in results if r.sigma is not None]
    agree = not failures and bool(polys) and all(p == polys[0] for p in polys)
    for r in results:
        if r.error is not None:
            logger.warning("Sample {} failed: {}", r.sample, r.error)
    return IsospectralReport(
        results=tuple(results),
        agree=agree,
        common=results[0].sigma if agree else None,
        failures=failures,
    )
