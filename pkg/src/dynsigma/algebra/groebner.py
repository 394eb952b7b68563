"""Lexicographic Groebner bases: Buchberger with Gebauer-Moeller pair elimination.

Internally polynomials are integer term dicts whose exponent tuples are permuted
into the order's priority, so lex comparison is plain tuple comparison and the
leading monomial of ``p`` is ``max(p)``.
"""

import heapq
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from loguru import logger

from dynsigma.algebra.exactpoly import (
    ExactPolynomial,
    Monomial,
    MonomialOrder,
    monomial_div,
    monomial_divides,
    monomial_lcm,
    monomial_mul,
    rational_roots,
    squarefree_part,
    univariate_gcd,
)
from dynsigma.core.config import GroebnerLimits
from dynsigma.core.errors import PolynomialError, ResourceLimitError, VariableMismatchError

_Poly = Dict[Monomial, Union[int, Fraction]]

_TIME_CHECK_EVERY = 64


@dataclass(frozen=True)
class Ideal:
    ambient: Tuple[str, ...]
    generators: Tuple[ExactPolynomial, ...]
    order: MonomialOrder

    def __post_init__(self) -> None:
        ambient = tuple(self.ambient)
        object.__setattr__(self, "ambient", ambient)
        self.order.key_for(ambient)
        gens = []
        for g in self.generators:
            if g.variables != ambient:
                raise VariableMismatchError(
                    f"Generator in {g.variables} does not live in {ambient}"
                )
            if not g.is_zero:
                gens.append(g.primitive(self.order))
        object.__setattr__(self, "generators", tuple(gens))

    @classmethod
    def of(
        cls,
        generators: Sequence[ExactPolynomial],
        order: MonomialOrder,
        ambient: Optional[Sequence[str]] = None,
    ) -> "Ideal":
        if ambient is None:
            ambient = generators[0].variables if generators else order.priority
        return cls(ambient=tuple(ambient), generators=tuple(generators), order=order)


@dataclass(frozen=True)
class GroebnerBasis:
    basis: Tuple[ExactPolynomial, ...]
    order: MonomialOrder
    ambient: Tuple[str, ...]
    reduced: bool = True

    @property
    def is_unit(self) -> bool:
        return any(g.is_constant for g in self.basis)

    def leading_monomials(self) -> List[Monomial]:
        return [g.leading_monomial(self.order) for g in self.basis]

    def __len__(self) -> int:
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)


class _Budget:
    def __init__(self, limits: Optional[GroebnerLimits]) -> None:
        self.limits = limits or GroebnerLimits()
        self.pairs = 0
        self.ticks = 0
        self.deadline = self.limits.started().deadline

    def pair(self) -> None:
        self.pairs += 1
        cap = self.limits.max_pairs
        if cap is not None and self.pairs > cap:
            raise ResourceLimitError(f"S-pair cap of {cap} exceeded")
        self._check_clock()

    def tick(self) -> None:
        self.ticks += 1
        if self.ticks % _TIME_CHECK_EVERY == 0:
            self._check_clock()

    def _check_clock(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise ResourceLimitError(
                f"Time limit of {self.limits.time_limit} s exceeded after {self.pairs} S-pairs"
            )

    def coefficient_bits(self, bits: int) -> None:
        cap = self.limits.max_coeff_bits
        if cap is not None and bits > cap:
            raise ResourceLimitError(f"Coefficient bit-size {bits} exceeds cap {cap}")


# -- coordinate changes ------------------------------------------------


def _permutation(ambient: Sequence[str], order: MonomialOrder) -> List[int]:
    order.key_for(ambient)
    return [list(ambient).index(name) for name in order.priority]


def _to_internal(p: ExactPolynomial, perm: List[int], integral: bool) -> _Poly:
    terms = {tuple(m[k] for k in perm): c for m, c in p.items()}
    if not integral:
        return terms
    scale = 1
    for c in terms.values():
        scale = scale * c.denominator // math.gcd(scale, c.denominator)
    ints = {m: int(c * scale) for m, c in terms.items()}
    return _primitive_int(ints)


def _from_internal(terms: _Poly, perm: List[int], ambient: Tuple[str, ...]) -> ExactPolynomial:
    out = {}
    for m, c in terms.items():
        mono = [0] * len(ambient)
        for k, idx in enumerate(perm):
            mono[idx] = m[k]
        out[tuple(mono)] = c
    return ExactPolynomial(ambient, out)


def _primitive_int(p: Dict[Monomial, int]) -> Dict[Monomial, int]:
    if not p:
        return p
    g = 0
    for c in p.values():
        g = math.gcd(g, c)
        if g == 1:
            break
    if p[max(p)] < 0:
        g = -g
    if g == 1:
        return p
    return {m: c // g for m, c in p.items()}


def _monic(p: _Poly) -> Dict[Monomial, Fraction]:
    lc = Fraction(p[max(p)])
    return {m: Fraction(c) / lc for m, c in p.items()}


# -- core routines -----------------------------------------------------


def _neg(m: Monomial) -> Monomial:
    return tuple(-e for e in m)


def _reduce(
    h: _Poly,
    basis: Sequence[_Poly],
    lms: Sequence[Monomial],
    budget: Optional[_Budget],
    fraction_free: bool,
) -> _Poly:
    """Full reduction of ``h``; fraction-free results are primitive, up to a unit."""
    h = dict(h)
    remainder: _Poly = {}
    heap = [_neg(m) for m in h]
    heapq.heapify(heap)
    while heap:
        m = _neg(heapq.heappop(heap))
        if m not in h:
            continue
        c = h[m]
        divisor = None
        for g, lm in zip(basis, lms):
            if monomial_divides(lm, m):
                divisor = (g, lm)
                break
        if divisor is None:
            remainder[m] = c
            del h[m]
            continue
        g, lm = divisor
        lc = g[lm]
        shift = monomial_div(m, lm)
        if fraction_free:
            common = math.gcd(c, lc)
            scale_h = lc // common
            factor = c // common
            if scale_h < 0:
                scale_h, factor = -scale_h, -factor
            if scale_h != 1:
                h = {k: v * scale_h for k, v in h.items()}
                remainder = {k: v * scale_h for k, v in remainder.items()}
        else:
            factor = c / lc
        for gm, gc in g.items():
            key = monomial_mul(gm, shift)
            value = h.get(key, 0) - factor * gc
            if value:
                if key not in h:
                    heapq.heappush(heap, _neg(key))
                h[key] = value
            else:
                h.pop(key, None)
        if fraction_free:
            h, remainder = _content_reduce(h, remainder, budget)
        if budget is not None:
            budget.tick()
    return _primitive_int(remainder) if fraction_free else remainder


def _content_reduce(
    h: Dict[Monomial, int], remainder: Dict[Monomial, int], budget: Optional[_Budget]
) -> Tuple[Dict[Monomial, int], Dict[Monomial, int]]:
    g = 0
    bits = 0
    for c in h.values():
        g = math.gcd(g, c)
        bits = max(bits, abs(c).bit_length())
    for c in remainder.values():
        g = math.gcd(g, c)
        bits = max(bits, abs(c).bit_length())
    if budget is not None:
        budget.coefficient_bits(bits)
    if g > 1:
        h = {k: v // g for k, v in h.items()}
        remainder = {k: v // g for k, v in remainder.items()}
    return h, remainder


def _spoly(f: _Poly, g: _Poly, lmf: Monomial, lmg: Monomial, fraction_free: bool) -> _Poly:
    lcm = monomial_lcm(lmf, lmg)
    cf, cg = f[lmf], g[lmg]
    if fraction_free:
        common = math.gcd(cf, cg)
        a, b = cg // common, cf // common
    else:
        a, b = 1 / cf, 1 / cg
    uf = monomial_div(lcm, lmf)
    ug = monomial_div(lcm, lmg)
    s: _Poly = {}
    for m, c in f.items():
        key = monomial_mul(m, uf)
        s[key] = s.get(key, 0) + a * c
    for m, c in g.items():
        key = monomial_mul(m, ug)
        s[key] = s.get(key, 0) - b * c
    return {m: c for m, c in s.items() if c}


def _pair_key(lms: Sequence[Monomial], i: int, j: int) -> Tuple:
    lcm = monomial_lcm(lms[i], lms[j])
    return (sum(lcm), lcm, i, j)


def _update(
    basis: List[_Poly],
    lms: List[Monomial],
    pairs: Dict[Tuple[int, int], Tuple],
    f: _Poly,
) -> None:
    """Add f to the basis and the surviving new pairs to ``pairs`` (in place)."""
    lmf = max(f)
    k = len(basis)
    for (i, j) in list(pairs):
        lcm_ij = monomial_lcm(lms[i], lms[j])
        if (
            monomial_divides(lmf, lcm_ij)
            and lcm_ij != monomial_lcm(lms[i], lmf)
            and lcm_ij != monomial_lcm(lms[j], lmf)
        ):
            del pairs[(i, j)]

    by_lcm: Dict[Monomial, List[int]] = {}
    for i in range(k):
        by_lcm.setdefault(monomial_lcm(lms[i], lmf), []).append(i)
    minimal: List[Monomial] = []
    for lcm in sorted(by_lcm, key=lambda m: (sum(m), m)):
        if all(not monomial_divides(other, lcm) for other in minimal):
            minimal.append(lcm)

    basis.append(f)
    lms.append(lmf)
    for lcm in minimal:
        if not any(lcm == monomial_mul(lms[i], lmf) for i in by_lcm[lcm]):
            i = min(by_lcm[lcm])
            pairs[(i, k)] = _pair_key(lms, i, k)


def _minimalize(basis: Sequence[_Poly]) -> List[_Poly]:
    out: List[_Poly] = []
    lms: List[Monomial] = []
    for f in sorted(basis, key=lambda p: (sum(max(p)), max(p))):
        lm = max(f)
        if all(not monomial_divides(other, lm) for other in lms):
            out.append(f)
            lms.append(lm)
    return out


def _interreduce(basis: List[_Poly], budget: _Budget) -> List[_Poly]:
    lms = [max(g) for g in basis]
    reduced = []
    for i, g in enumerate(basis):
        others = basis[:i] + basis[i + 1:]
        other_lms = lms[:i] + lms[i + 1:]
        reduced.append(_reduce(g, others, other_lms, budget, fraction_free=True))
    return reduced


def buchberger(ideal: Ideal, limits: Optional[GroebnerLimits] = None) -> GroebnerBasis:
    """Reduced lex Groebner basis, monic over Q, sorted by descending leading monomial."""
    perm = _permutation(ideal.ambient, ideal.order)
    budget = _Budget(limits)
    basis: List[_Poly] = []
    lms: List[Monomial] = []
    pairs: Dict[Tuple[int, int], Tuple] = {}

    def unit_basis() -> GroebnerBasis:
        return GroebnerBasis(
            basis=(ExactPolynomial.one(ideal.ambient),), order=ideal.order, ambient=ideal.ambient
        )

    for g in ideal.generators:
        f = _to_internal(g, perm, integral=True)
        if basis:
            f = _reduce(f, basis, lms, budget, fraction_free=True)
        if not f:
            continue
        if not any(max(f)):
            return unit_basis()
        _update(basis, lms, pairs, f)

    while pairs:
        i, j = min(pairs, key=pairs.get)
        del pairs[(i, j)]
        budget.pair()
        s = _spoly(basis[i], basis[j], lms[i], lms[j], fraction_free=True)
        r = _reduce(s, basis, lms, budget, fraction_free=True)
        if not r:
            continue
        if not any(max(r)):
            logger.debug("Unit ideal detected after {} S-pairs", budget.pairs)
            return unit_basis()
        _update(basis, lms, pairs, r)
        if budget.pairs % 500 == 0:
            logger.debug(
                "Buchberger progress: {} S-pairs, basis size {}, pending {}",
                budget.pairs,
                len(basis),
                len(pairs),
            )

    final = _interreduce(_minimalize(basis), budget)
    final.sort(key=max, reverse=True)
    polys = tuple(_from_internal(_monic(g), perm, ideal.ambient) for g in final)
    logger.debug(
        "Groebner basis of {} generators: {} elements after {} S-pairs",
        len(ideal.generators),
        len(polys),
        budget.pairs,
    )
    return GroebnerBasis(basis=polys, order=ideal.order, ambient=ideal.ambient)


def groebner_basis(
    generators: Sequence[ExactPolynomial],
    order: MonomialOrder,
    limits: Optional[GroebnerLimits] = None,
    ambient: Optional[Sequence[str]] = None,
) -> GroebnerBasis:
    return buchberger(Ideal.of(generators, order, ambient), limits)


# -- queries on bases --------------------------------------------------


def normal_form(
    p: ExactPolynomial, basis: Sequence[ExactPolynomial], order: MonomialOrder
) -> ExactPolynomial:
    perm = _permutation(p.variables, order)
    if not basis or p.is_zero:
        return p
    internal = []
    for g in basis:
        if g.variables != p.variables:
            raise VariableMismatchError(f"Basis element in {g.variables}, expected {p.variables}")
        if not g.is_zero:
            internal.append(_to_internal(g, perm, integral=False))
    lms = [max(g) for g in internal]
    h = _to_internal(p, perm, integral=False)
    return _from_internal(_reduce(h, internal, lms, None, fraction_free=False), perm, p.variables)


def s_polynomial(f: ExactPolynomial, g: ExactPolynomial, order: MonomialOrder) -> ExactPolynomial:
    if f.variables != g.variables:
        raise VariableMismatchError(f"Variable lists differ: {f.variables} vs {g.variables}")
    perm = _permutation(f.variables, order)
    fi = _to_internal(f, perm, integral=False)
    gi = _to_internal(g, perm, integral=False)
    return _from_internal(_spoly(fi, gi, max(fi), max(gi), fraction_free=False), perm, f.variables)


def is_groebner_basis(basis: Sequence[ExactPolynomial], order: MonomialOrder) -> bool:
    for f, g in combinations(basis, 2):
        if not normal_form(s_polynomial(f, g, order), basis, order).is_zero:
            return False
    return True


def ideal_membership(p: ExactPolynomial, basis: GroebnerBasis) -> bool:
    return normal_form(p, basis.basis, basis.order).is_zero


def elimination_ideal(basis: GroebnerBasis, keep: Sequence[str]) -> List[ExactPolynomial]:
    keep = tuple(keep)
    priority = basis.order.priority
    tail = priority[len(priority) - len(keep):] if keep else ()
    if set(keep) != set(tail) or len(set(keep)) != len(keep):
        raise PolynomialError(f"Kept variables {keep} are not a suffix of the priority {priority}")
    allowed = set(keep)
    return [g for g in basis.basis if set(g.used_variables()) <= allowed]


def _internal_leading_monomials(basis: GroebnerBasis) -> List[Monomial]:
    key = basis.order.key_for(basis.ambient)
    return [key(m) for m in basis.leading_monomials()]


def ideal_dimension(basis: GroebnerBasis) -> int:
    """Krull dimension from the leading-monomial ideal; -1 for the unit ideal."""
    if basis.is_unit:
        return -1
    n = len(basis.ambient)
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in _internal_leading_monomials(basis)]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            chosen = set(subset)
            if all(not support <= chosen for support in supports):
                return size
    return 0


def standard_monomials(basis: GroebnerBasis) -> List[Monomial]:
    """Monomials outside the leading-monomial ideal, in ambient coordinates, ascending."""
    if basis.is_unit:
        return []
    if ideal_dimension(basis) != 0:
        raise PolynomialError("Standard monomials requested for a positive-dimensional ideal")
    leads = basis.leading_monomials()
    n = len(basis.ambient)
    start = (0,) * n
    seen: Set[Monomial] = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for m in frontier:
            for i in range(n):
                cand = m[:i] + (m[i] + 1,) + m[i + 1:]
                if cand in seen or any(monomial_divides(lm, cand) for lm in leads):
                    continue
                seen.add(cand)
                nxt.append(cand)
        frontier = nxt
    key = basis.order.key_for(basis.ambient)
    return sorted(seen, key=key)


def quotient_dimension(basis: GroebnerBasis) -> int:
    return len(standard_monomials(basis))


def _monomials_of_degree(n: int, k: int) -> List[Monomial]:
    if n == 0:
        return [()] if k == 0 else []
    if n == 1:
        return [(k,)]
    out = []
    for first in range(k, -1, -1):
        for rest in _monomials_of_degree(n - 1, k - first):
            out.append((first,) + rest)
    return out


def local_multiplicity(
    basis: GroebnerBasis,
    point: Sequence[Fraction],
    limits: Optional[GroebnerLimits] = None,
) -> int:
    """Length of the local ring of the ideal at a rational point; 0 off the variety."""
    ambient = basis.ambient
    if len(point) != len(ambient):
        raise PolynomialError(f"Point {tuple(point)} does not match variables {ambient}")
    values = dict(zip(ambient, point))
    if any(g.evaluate(values) != 0 for g in basis.basis):
        return 0
    n = len(ambient)
    if n == 0:
        return 1
    shift = {
        name: ExactPolynomial.variable(name, ambient) + Fraction(value)
        for name, value in zip(ambient, point)
    }
    moved = [g.subs(shift) for g in basis.basis]
    previous = 1
    k = 2
    while True:
        powers = [ExactPolynomial(ambient, {m: 1}) for m in _monomials_of_degree(n, k)]
        local = groebner_basis(moved + powers, basis.order, limits, ambient=ambient)
        current = quotient_dimension(local)
        if current == previous:
            return current
        previous = current
        k += 1


@dataclass(frozen=True)
class RationalZeros:
    solutions: Tuple[Tuple[Fraction, ...], ...]
    nonrational: bool


def rational_zeros(basis: GroebnerBasis) -> RationalZeros:
    """Rational points of a zero-dimensional lex basis by triangular back-substitution."""
    if basis.is_unit:
        return RationalZeros(solutions=(), nonrational=False)
    if ideal_dimension(basis) != 0:
        raise PolynomialError("rational_zeros needs a zero-dimensional ideal")
    ambient = basis.ambient
    partials: List[Dict[str, Fraction]] = [{}]
    done: Set[str] = set()
    nonrational = False
    for var in reversed(basis.order.priority):
        scope = done | {var}
        relevant = [g for g in basis.basis if set(g.used_variables()) <= scope]
        extended: List[Dict[str, Fraction]] = []
        for assignment in partials:
            specialized = [g.subs(assignment) for g in relevant] if assignment else list(relevant)
            nonzero = [p for p in specialized if not p.is_zero]
            if not nonzero:
                raise PolynomialError(f"No eliminant constrains {var}; ideal is not zero-dimensional")
            h = nonzero[0]
            for p in nonzero[1:]:
                h = univariate_gcd(h, p)
            if h.is_constant:
                continue
            roots = rational_roots(h)
            if squarefree_part(h).degree() > len(roots):
                nonrational = True
            for root, _ in roots:
                extended.append({**assignment, var: root})
        partials = extended
        done.add(var)
    solutions = sorted(tuple(a[name] for name in ambient) for a in partials)
    return RationalZeros(solutions=tuple(solutions), nonrational=nonrational)
