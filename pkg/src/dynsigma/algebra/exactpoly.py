"""Exact sparse multivariate polynomials over Q.

A polynomial owns an explicit, ordered variable list; monomials are exponent
tuples aligned with it. Coefficients are ``fractions.Fraction`` and zero
coefficients are never stored.
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import QQ, Poly, Rational, Symbol
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyRing

from dynsigma.core.errors import PolynomialError, PolynomialParseError, VariableMismatchError

ExactRational = Fraction
Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_GRAMMAR_RE = re.compile(r"^[A-Za-z0-9_+\-*/^()\s]*$")
_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


class _MinusInfinity:
    """Degree of the zero polynomial; compares below every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "-inf"

    def __lt__(self, other) -> bool:
        return not isinstance(other, _MinusInfinity)

    def __le__(self, other) -> bool:
        return True

    def __gt__(self, other) -> bool:
        return False

    def __ge__(self, other) -> bool:
        return isinstance(other, _MinusInfinity)

    def __eq__(self, other) -> bool:
        return isinstance(other, _MinusInfinity)

    def __hash__(self) -> int:
        return hash("dynsigma.minus_infinity")

    def __add__(self, other):
        return self

    __radd__ = __add__


MINUS_INFINITY = _MinusInfinity()


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    if isinstance(text, (int, Fraction)) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise PolynomialParseError(f"Not a rational literal: {text!r}")
    numerator, _, denominator = text.replace(" ", "").partition("/")
    if denominator and int(denominator) == 0:
        raise PolynomialParseError(f"Zero denominator in rational literal: {text!r}")
    return Fraction(int(numerator), int(denominator or 1))


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def monomial_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


@dataclass(frozen=True)
class MonomialOrder:
    priority: Tuple[str, ...]
    kind: str = "lex"

    def __post_init__(self) -> None:
        if self.kind != "lex":
            raise PolynomialError(f"Unsupported monomial order: {self.kind}")
        if len(set(self.priority)) != len(self.priority):
            raise PolynomialError("Monomial order priority repeats a variable")

    @classmethod
    def lex(cls, *names: str) -> "MonomialOrder":
        return cls(priority=tuple(names))

    def key_for(self, variables: Sequence[str]) -> Callable[[Monomial], Monomial]:
        if set(variables) != set(self.priority) or len(variables) != len(self.priority):
            raise VariableMismatchError(
                f"Order priority {self.priority} is not a permutation of {tuple(variables)}"
            )
        index = [list(variables).index(name) for name in self.priority]
        if index == list(range(len(index))):
            return lambda m: m
        return lambda m: tuple(m[i] for i in index)


class ExactPolynomial:
    __slots__ = ("variables", "_terms", "_hash")

    def __init__(
        self,
        variables: Sequence[str],
        terms: Optional[Mapping[Monomial, Scalar]] = None,
    ) -> None:
        names = tuple(variables)
        for name in names:
            if not _NAME_RE.match(name):
                raise PolynomialError(f"Invalid variable name: {name!r}")
        if len(set(names)) != len(names):
            raise PolynomialError(f"Duplicate variable in {names}")
        clean: Dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != len(names):
                raise PolynomialError(f"Monomial {mono} does not match variables {names}")
            if any((not isinstance(e, int)) or e < 0 for e in mono):
                raise PolynomialError(f"Invalid exponent vector {mono}")
            value = Fraction(coeff)
            if value:
                clean[mono] = clean.get(mono, Fraction(0)) + value
                if not clean[mono]:
                    del clean[mono]
        self.variables = names
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, variables: Tuple[str, ...], terms: Dict[Monomial, Fraction]) -> "ExactPolynomial":
        poly = object.__new__(cls)
        poly.variables = variables
        poly._terms = terms
        poly._hash = None
        return poly

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "ExactPolynomial":
        return cls(variables)

    @classmethod
    def constant(cls, value: Scalar, variables: Sequence[str]) -> "ExactPolynomial":
        names = tuple(variables)
        return cls(names, {(0,) * len(names): value})

    @classmethod
    def one(cls, variables: Sequence[str]) -> "ExactPolynomial":
        return cls.constant(1, variables)

    @classmethod
    def variable(cls, name: str, variables: Sequence[str]) -> "ExactPolynomial":
        names = tuple(variables)
        if name not in names:
            raise PolynomialError(f"Unknown variable {name!r} for {names}")
        mono = tuple(1 if v == name else 0 for v in names)
        return cls(names, {mono: 1})

    @classmethod
    def parse(cls, text: str, variables: Sequence[str]) -> "ExactPolynomial":
        names = tuple(variables)
        if not isinstance(text, str) or not text.strip():
            raise PolynomialParseError("Empty polynomial text")
        if not _GRAMMAR_RE.match(text) or "__" in text or "**" in text:
            raise PolynomialParseError(f"Polynomial text outside the grammar: {text!r}")
        symbols = [Symbol(name) for name in names]
        local = {name: sym for name, sym in zip(names, symbols)}
        try:
            expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMATIONS)
        except Exception as exc:
            raise PolynomialParseError(f"Cannot parse {text!r}: {exc}") from exc
        unknown = sorted(str(s) for s in getattr(expr, "free_symbols", set()) - set(symbols))
        if unknown:
            raise PolynomialParseError(f"Unknown variables {unknown} in {text!r}")
        if not symbols:
            if not getattr(expr, "is_Rational", False):
                raise PolynomialParseError(f"Not a rational constant: {text!r}")
            return cls.constant(Fraction(int(expr.p), int(expr.q)), names)
        try:
            poly = Poly(expr, *symbols, domain=QQ)
        except Exception as exc:
            raise PolynomialParseError(f"Not a polynomial over Q in {names}: {text!r}") from exc
        terms = {}
        for mono, coeff in poly.terms():
            terms[tuple(int(e) for e in mono)] = Fraction(int(coeff.p), int(coeff.q))
        return cls(names, terms)

    # -- inspection ---------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise PolynomialError(f"{self} is not constant")
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def monomials(self) -> List[Monomial]:
        return list(self._terms)

    def coefficient(self, monomial: Monomial) -> Fraction:
        return self._terms.get(tuple(monomial), Fraction(0))

    def terms_dict(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def degree(self):
        if not self._terms:
            return MINUS_INFINITY
        return max(sum(m) for m in self._terms)

    def degree_in(self, var: str):
        idx = self._index(var)
        if not self._terms:
            return MINUS_INFINITY
        return max(m[idx] for m in self._terms)

    def used_variables(self) -> Tuple[str, ...]:
        used = [False] * self.nvars
        for mono in self._terms:
            for i, e in enumerate(mono):
                if e:
                    used[i] = True
        return tuple(v for v, flag in zip(self.variables, used) if flag)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    def sorted_terms(self, order: Optional[MonomialOrder] = None) -> List[Tuple[Monomial, Fraction]]:
        key = order.key_for(self.variables) if order is not None else (lambda m: m)
        return sorted(self._terms.items(), key=lambda item: key(item[0]), reverse=True)

    def leading_term(self, order: Optional[MonomialOrder] = None) -> Tuple[Monomial, Fraction]:
        if not self._terms:
            raise PolynomialError("Zero polynomial has no leading term")
        key = order.key_for(self.variables) if order is not None else (lambda m: m)
        mono = max(self._terms, key=key)
        return mono, self._terms[mono]

    def leading_monomial(self, order: Optional[MonomialOrder] = None) -> Monomial:
        return self.leading_term(order)[0]

    def leading_coefficient(self, order: Optional[MonomialOrder] = None) -> Fraction:
        return self.leading_term(order)[1]

    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise PolynomialError(f"Unknown variable {var!r} for {self.variables}") from None

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "ExactPolynomial":
        if isinstance(other, ExactPolynomial):
            if other.variables != self.variables:
                raise VariableMismatchError(
                    f"Variable lists differ: {self.variables} vs {other.variables}"
                )
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return ExactPolynomial.constant(other, self.variables)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            value = out.get(mono, 0) + coeff
            if value:
                out[mono] = value
            else:
                out.pop(mono, None)
        return ExactPolynomial._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "ExactPolynomial":
        return ExactPolynomial._raw(self.variables, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                out[mono] = out.get(mono, 0) + c1 * c2
        return ExactPolynomial._raw(self.variables, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> "ExactPolynomial":
        factor = Fraction(factor)
        if not factor:
            return ExactPolynomial.zero(self.variables)
        return ExactPolynomial._raw(self.variables, {m: c * factor for m, c in self._terms.items()})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                raise ZeroDivisionError("polynomial division by zero")
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, exponent: int) -> "ExactPolynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise PolynomialError(f"Exponent must be a non-negative integer, got {exponent!r}")
        result = ExactPolynomial.one(self.variables)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, ExactPolynomial):
            return self.variables == other.variables and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_constant and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and substitution ------------------------------------

    def diff(self, var: str) -> "ExactPolynomial":
        idx = self._index(var)
        out: Dict[Monomial, Fraction] = {}
        for mono, coeff in self._terms.items():
            e = mono[idx]
            if e:
                lowered = mono[:idx] + (e - 1,) + mono[idx + 1:]
                out[lowered] = coeff * e
        return ExactPolynomial._raw(self.variables, out)

    def subs(
        self,
        assignment: Mapping[str, Union["ExactPolynomial", Scalar]],
        target_variables: Optional[Sequence[str]] = None,
    ) -> "ExactPolynomial":
        target = tuple(target_variables) if target_variables is not None else self.variables
        for name in assignment:
            self._index(name)
        images: List[ExactPolynomial] = []
        for name in self.variables:
            if name in assignment:
                image = assignment[name]
                if isinstance(image, ExactPolynomial):
                    if image.variables != target:
                        raise VariableMismatchError(
                            f"Image of {name} lives in {image.variables}, expected {target}"
                        )
                else:
                    image = ExactPolynomial.constant(image, target)
            else:
                if name not in target:
                    raise VariableMismatchError(f"Variable {name} has no image in {target}")
                image = ExactPolynomial.variable(name, target)
            images.append(image)

        powers: Dict[Tuple[int, int], ExactPolynomial] = {}

        def power(i: int, e: int) -> ExactPolynomial:
            key = (i, e)
            if key not in powers:
                powers[key] = images[i] if e == 1 else power(i, e - 1) * images[i]
            return powers[key]

        acc: Dict[Monomial, Fraction] = {}
        unit = (0,) * len(target)
        for mono, coeff in self._terms.items():
            term = {unit: coeff}
            for i, e in enumerate(mono):
                if not e:
                    continue
                factor = power(i, e)
                nxt: Dict[Monomial, Fraction] = {}
                for m1, c1 in term.items():
                    for m2, c2 in factor._terms.items():
                        m = tuple(a + b for a, b in zip(m1, m2))
                        nxt[m] = nxt.get(m, 0) + c1 * c2
                term = nxt
            for m, c in term.items():
                acc[m] = acc.get(m, 0) + c
        return ExactPolynomial._raw(target, {m: c for m, c in acc.items() if c})

    def evaluate(self, values: Mapping[str, Scalar]) -> Fraction:
        point = []
        for name in self.variables:
            if name not in values:
                if self.degree_in(name) > 0:
                    raise PolynomialError(f"No value supplied for {name}")
                point.append(Fraction(0))
            else:
                point.append(Fraction(values[name]))
        total = Fraction(0)
        for mono, coeff in self._terms.items():
            term = coeff
            for value, e in zip(point, mono):
                if e:
                    term *= value ** e
            total += term
        return total

    def with_variables(self, variables: Sequence[str]) -> "ExactPolynomial":
        names = tuple(variables)
        if names == self.variables:
            return self
        missing = [v for v in self.used_variables() if v not in names]
        if missing:
            raise VariableMismatchError(f"Cannot drop used variables {missing}")
        index = {name: i for i, name in enumerate(self.variables)}
        out = {}
        for mono, coeff in self._terms.items():
            out[tuple(mono[index[n]] if n in index else 0 for n in names)] = coeff
        return ExactPolynomial(names, out)

    def coefficients_in(self, var: str) -> Dict[int, "ExactPolynomial"]:
        idx = self._index(var)
        buckets: Dict[int, Dict[Monomial, Fraction]] = {}
        for mono, coeff in self._terms.items():
            e = mono[idx]
            buckets.setdefault(e, {})[mono[:idx] + (0,) + mono[idx + 1:]] = coeff
        return {e: ExactPolynomial._raw(self.variables, t) for e, t in buckets.items()}

    # -- normalization ------------------------------------------------

    def content(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        num = 0
        den = 1
        for coeff in self._terms.values():
            num = math.gcd(num, coeff.numerator)
            den = den * coeff.denominator // math.gcd(den, coeff.denominator)
        return Fraction(num, den)

    def primitive(self, order: Optional[MonomialOrder] = None) -> "ExactPolynomial":
        if not self._terms:
            return self
        factor = self.content()
        if self.leading_coefficient(order) < 0:
            factor = -factor
        return self.scale(Fraction(1) / factor)

    def monic(self, order: Optional[MonomialOrder] = None) -> "ExactPolynomial":
        if not self._terms:
            return self
        return self.scale(Fraction(1) / self.leading_coefficient(order))

    # -- printing -----------------------------------------------------

    def to_string(self, order: Optional[MonomialOrder] = None) -> str:
        if not self._terms:
            return "0"
        out = []
        for k, (mono, coeff) in enumerate(self.sorted_terms(order)):
            factors = [
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.variables, mono)
                if e
            ]
            magnitude = abs(coeff)
            if not factors:
                body = format_rational(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = format_rational(magnitude) + "*" + "*".join(factors)
            if k == 0:
                out.append(("-" if coeff < 0 else "") + body)
            else:
                out.append((" - " if coeff < 0 else " + ") + body)
        return "".join(out)

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"ExactPolynomial({self.to_string()!r}, {self.variables})"


def poly_arith(p: ExactPolynomial, q: Union[ExactPolynomial, int], op: str) -> ExactPolynomial:
    if op == "pow":
        if not isinstance(q, int):
            raise PolynomialError("pow expects an integer exponent")
        return p ** q
    if isinstance(q, ExactPolynomial) and q.variables != p.variables:
        raise VariableMismatchError(f"Variable lists differ: {p.variables} vs {q.variables}")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise PolynomialError(f"Unknown operation {op!r}")


def partial_derivative(p: ExactPolynomial, var: str) -> ExactPolynomial:
    return p.diff(var)


def substitute(
    p: ExactPolynomial,
    assignment: Mapping[str, Union[ExactPolynomial, Scalar]],
    target_variables: Optional[Sequence[str]] = None,
) -> ExactPolynomial:
    return p.subs(assignment, target_variables)


def homogenize(p: ExactPolynomial, var: str, degree: Optional[int] = None) -> ExactPolynomial:
    idx = p._index(var)
    if degree is None:
        degree = p.degree()
    out = {}
    for mono, coeff in p.items():
        if mono[idx]:
            raise PolynomialError(f"{var} already occurs in {p}")
        excess = degree - sum(mono)
        if excess < 0:
            raise PolynomialError(f"Term of degree {sum(mono)} exceeds homogenization degree {degree}")
        out[mono[:idx] + (excess,) + mono[idx + 1:]] = coeff
    return ExactPolynomial(p.variables, out)


# -- sympy bridge ------------------------------------------------------
#
# Ring-level algorithms (resultants, determinants, gcds, factoring) run in
# sympy's sparse rings over QQ; ExactPolynomial stays the interchange type.

_PAD_VARIABLE = "u"


@lru_cache(maxsize=None)
def _ring(names: Tuple[str, ...]) -> PolyRing:
    return PolyRing(names or (_PAD_VARIABLE,), QQ, lex)


def _to_ring(p: ExactPolynomial):
    ring = _ring(p.variables)
    if not p.variables:
        return ring.from_dict({(0,): QQ(c.numerator, c.denominator) for _, c in p.items()})
    return ring.from_dict({m: QQ(c.numerator, c.denominator) for m, c in p.items()})


def _from_ring(element, variables: Tuple[str, ...]) -> ExactPolynomial:
    terms = {}
    for mono, coeff in element.items():
        terms[tuple(mono)[: len(variables)]] = Fraction(int(coeff.numerator), int(coeff.denominator))
    return ExactPolynomial._raw(variables, terms)


def _sympy_rational(value: Fraction) -> Rational:
    return Rational(value.numerator, value.denominator)


def bareiss_determinant(
    matrix: Sequence[Sequence[ExactPolynomial]],
    variables: Optional[Sequence[str]] = None,
) -> ExactPolynomial:
    """Fraction-free determinant over QQ[variables]."""
    n = len(matrix)
    if n == 0:
        if variables is None:
            raise PolynomialError("Empty matrix needs an explicit variable list")
        return ExactPolynomial.one(variables)
    names = matrix[0][0].variables if variables is None else tuple(variables)
    if any(len(row) != n for row in matrix):
        raise PolynomialError("Determinant of a non-square matrix")
    for row in matrix:
        for entry in row:
            if entry.variables != names:
                raise VariableMismatchError(f"Matrix entry in {entry.variables}, expected {names}")
    domain = _ring(names).to_domain()
    rows = [[_to_ring(entry) for entry in row] for row in matrix]
    return _from_ring(DomainMatrix(rows, (n, n), domain).det(), names)


def univariate_resultant(F: ExactPolynomial, G: ExactPolynomial, var: str) -> ExactPolynomial:
    """Sylvester resultant in ``var``; Res(F, G) = lc(F)^deg(G) * prod G(roots of F)."""
    if F.variables != G.variables:
        raise VariableMismatchError(f"Variable lists differ: {F.variables} vs {G.variables}")
    if F.is_zero:
        raise PolynomialError("Resultant with the zero polynomial F")
    names = F.variables
    if G.is_zero:
        return ExactPolynomial.zero(names)
    m = F.degree_in(var)
    n = G.degree_in(var)
    if m == 0 and n == 0:
        return ExactPolynomial.one(names)
    if m == 0:
        return F ** n
    if n == 0:
        return G ** m

    idx = F._index(var)
    others = [i for i in range(len(names)) if i != idx]
    gens = [Symbol(var)] + [Symbol(names[i]) for i in others]

    def as_poly(p: ExactPolynomial) -> Poly:
        rep = {
            (mono[idx],) + tuple(mono[i] for i in others): _sympy_rational(coeff)
            for mono, coeff in p.items()
        }
        return Poly.from_dict(rep, *gens, domain=QQ)

    result = as_poly(F).resultant(as_poly(G))
    if not isinstance(result, Poly):
        return ExactPolynomial.constant(Fraction(int(result.p), int(result.q)), names)
    terms = {}
    for mono, coeff in result.terms():
        full = [0] * len(names)
        for i, e in zip(others, mono):
            full[i] = int(e)
        terms[tuple(full)] = Fraction(int(coeff.p), int(coeff.q))
    return ExactPolynomial(names, terms)


# -- univariate helpers ------------------------------------------------


def _single_variable(p: ExactPolynomial) -> Optional[str]:
    used = p.used_variables()
    if len(used) > 1:
        raise PolynomialError(f"{p} is not univariate")
    return used[0] if used else None


def univariate_gcd(p: ExactPolynomial, q: ExactPolynomial) -> ExactPolynomial:
    if p.variables != q.variables:
        raise VariableMismatchError(f"Variable lists differ: {p.variables} vs {q.variables}")
    var = _single_variable(p) or _single_variable(q)
    if var is None:
        if p.is_zero and q.is_zero:
            return ExactPolynomial.zero(p.variables)
        return ExactPolynomial.one(p.variables)
    if _single_variable(p) not in (None, var) or _single_variable(q) not in (None, var):
        raise PolynomialError(f"gcd of {p} and {q} is not univariate")
    local = (var,)
    g = _to_ring(p.with_variables(local)).gcd(_to_ring(q.with_variables(local)))
    if g:
        g = g.monic()
    return _from_ring(g, local).with_variables(p.variables)


def squarefree_part(p: ExactPolynomial) -> ExactPolynomial:
    var = _single_variable(p)
    if var is None:
        return p.monic() if not p.is_zero else p
    local = (var,)
    part = _to_ring(p.with_variables(local)).sqf_part().monic()
    return _from_ring(part, local).with_variables(p.variables)


def rational_roots(p: ExactPolynomial) -> List[Tuple[Fraction, int]]:
    """All rational roots of a univariate polynomial with exact multiplicities, ascending."""
    if p.is_zero:
        raise PolynomialError("rational_roots of the zero polynomial")
    var = _single_variable(p)
    if var is None:
        return []
    local = (var,)
    _, factors = _to_ring(p.with_variables(local)).factor_list()
    roots: List[Tuple[Fraction, int]] = []
    for factor, multiplicity in factors:
        linear = _from_ring(factor, local)
        if linear.degree() != 1:
            continue
        root = -linear.coefficient((0,)) / linear.coefficient((1,))
        roots.append((root, int(multiplicity)))
    return sorted(roots)
