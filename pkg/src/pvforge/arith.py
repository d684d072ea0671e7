"""Exact arithmetic: rationals, multivariate polynomials, rational functions.

Rationals are :class:`fractions.Fraction`.  Polynomials are sparse maps from
exponent vectors to rational coefficients, ordered graded-lexicographically
with the variable order fixed at construction; storage and the gcd kernel
come from sympy's sparse ``PolyRing``.  A :class:`RationalFunction` is always
kept in canonical form: coprime numerator and denominator, denominator with
leading coefficient 1, zero stored as ``0/1``.  Two rational functions over
the same variables are equal exactly when their components are equal.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from sympy import Symbol
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from .errors import SingularMatrixError, ZeroDenominatorError

BigRational = Fraction


@lru_cache(maxsize=None)
def poly_ring(variables: tuple[str, ...]) -> PolyRing:
    return PolyRing([Symbol(v) for v in variables], QQ, grlex)


def _qq(c):
    if isinstance(c, Fraction):
        return QQ(c.numerator, c.denominator)
    if isinstance(c, int):
        return QQ(c)
    if isinstance(c, Rational):
        return QQ(int(c.numerator), int(c.denominator))
    raise TypeError(f"not a rational scalar: {c!r}")


def _frac(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _is_scalar(c) -> bool:
    return isinstance(c, (int, Fraction)) or (isinstance(c, Rational) and not isinstance(c, bool))


class MultiPolynomial:
    """Immutable polynomial over Q in a fixed, ordered list of variables."""

    __slots__ = ("variables", "_p")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], object] | None = None):
        self.variables = tuple(variables)
        ring = poly_ring(self.variables)
        p = ring.zero
        if terms:
            nv = len(self.variables)
            data = {}
            for exps, c in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != nv or any(e < 0 for e in exps):
                    raise ValueError(f"bad exponent vector {exps} for variables {self.variables}")
                c = _qq(c)
                if c:
                    data[exps] = data.get(exps, QQ(0)) + c
            p = ring.from_dict({k: v for k, v in data.items() if v})
        self._p = p

    @classmethod
    def _wrap(cls, variables, elem) -> "MultiPolynomial":
        obj = cls.__new__(cls)
        obj.variables = variables
        obj._p = elem
        return obj

    @classmethod
    def constant(cls, variables: Sequence[str], c) -> "MultiPolynomial":
        variables = tuple(variables)
        return cls._wrap(variables, poly_ring(variables).ground_new(_qq(c)))

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "MultiPolynomial":
        variables = tuple(variables)
        return cls._wrap(variables, poly_ring(variables).gens[variables.index(name)])

    def terms(self) -> dict[tuple[int, ...], Fraction]:
        """Nonzero terms, highest first in grlex order."""
        return {m: _frac(c) for m, c in self._p.terms()}

    def is_zero(self) -> bool:
        return not self._p

    def __bool__(self):
        return bool(self._p)

    def is_constant(self) -> bool:
        return self._p.is_ground

    @property
    def leading_coefficient(self) -> Fraction:
        return _frac(self._p.LC)

    @property
    def leading_exponent(self) -> tuple[int, ...]:
        return self._p.LM

    def total_degree(self) -> int:
        if not self._p:
            return -1
        return max(sum(m) for m in self._p.keys())

    def used_variables(self) -> frozenset[str]:
        used = set()
        for m in self._p.keys():
            for v, e in zip(self.variables, m):
                if e:
                    used.add(v)
        return frozenset(used)

    def _other(self, other):
        if isinstance(other, MultiPolynomial):
            if other.variables != self.variables:
                raise ValueError("polynomials over different variable orders")
            return other._p
        if _is_scalar(other):
            return poly_ring(self.variables).ground_new(_qq(other))
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return MultiPolynomial._wrap(self.variables, self._p + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return MultiPolynomial._wrap(self.variables, self._p - o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return MultiPolynomial._wrap(self.variables, o - self._p)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return MultiPolynomial._wrap(self.variables, self._p * o)

    __rmul__ = __mul__

    def __neg__(self):
        return MultiPolynomial._wrap(self.variables, -self._p)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        if k == 0:
            # 0^0 = 1, as for Python numbers
            return MultiPolynomial.constant(self.variables, 1)
        return MultiPolynomial._wrap(self.variables, self._p ** k)

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self._p == o

    def __hash__(self):
        return hash((self.variables, self._p))

    def gcd(self, other: "MultiPolynomial") -> "MultiPolynomial":
        """Greatest common divisor, monic in grlex order (gcd(0, 0) = 0)."""
        g = self._p.gcd(self._other(other))
        if g:
            g = g.quo_ground(g.LC)
        return MultiPolynomial._wrap(self.variables, g)

    def lcm(self, other: "MultiPolynomial") -> "MultiPolynomial":
        """Least common multiple, monic in grlex order."""
        o = self._other(other)
        if not self._p or not o:
            return MultiPolynomial._wrap(self.variables, self._p.ring.zero)
        _, a, _ = self._p.cofactors(o)
        m = a * o
        return MultiPolynomial._wrap(self.variables, m.quo_ground(m.LC))

    def exquo(self, other: "MultiPolynomial") -> "MultiPolynomial":
        """Exact quotient; raises ValueError when ``other`` does not divide."""
        o = self._other(other)
        if not o:
            raise ZeroDenominatorError("division of a polynomial by zero")
        q, r = self._p.div(o)
        if r:
            raise ValueError("inexact polynomial division")
        return MultiPolynomial._wrap(self.variables, q)

    def diff(self, name: str) -> "MultiPolynomial":
        ring = poly_ring(self.variables)
        return MultiPolynomial._wrap(self.variables, self._p.diff(ring.gens[self.variables.index(name)]))

    def __repr__(self):
        return f"MultiPolynomial({format_polynomial(self)!r}, {self.variables})"

    def __str__(self):
        return format_polynomial(self)


def _canonical(ring, n, d):
    """Reduce n/d to lowest terms with monic denominator (sympy elements)."""
    if not d:
        raise ZeroDenominatorError("rational function with zero denominator")
    if not n:
        return ring.zero, ring.one
    _, n, d = n.cofactors(d)
    lc = d.LC
    if lc != 1:
        n = n.quo_ground(lc)
        d = d.quo_ground(lc)
    return n, d


def _monic(n, d):
    lc = d.LC
    if lc != 1:
        return n.quo_ground(lc), d.quo_ground(lc)
    return n, d


class RationalFunction:
    """Canonical quotient of two polynomials over Q (an element of Q(vars))."""

    __slots__ = ("variables", "_n", "_d")

    def __init__(self, num, den=None, variables: Sequence[str] | None = None):
        if isinstance(num, MultiPolynomial):
            variables = num.variables
            n = num._p
        else:
            if variables is None:
                raise TypeError("variables required when numerator is a scalar")
            variables = tuple(variables)
            n = poly_ring(variables).ground_new(_qq(num))
        ring = poly_ring(variables)
        if den is None:
            d = ring.one
        elif isinstance(den, MultiPolynomial):
            if den.variables != variables:
                raise ValueError("numerator and denominator over different variables")
            d = den._p
        else:
            d = ring.ground_new(_qq(den))
        self.variables = variables
        self._n, self._d = _canonical(ring, n, d)

    @classmethod
    def _raw(cls, variables, n, d) -> "RationalFunction":
        obj = cls.__new__(cls)
        obj.variables = variables
        obj._n = n
        obj._d = d
        return obj

    @classmethod
    def constant(cls, variables: Sequence[str], c) -> "RationalFunction":
        variables = tuple(variables)
        ring = poly_ring(variables)
        return cls._raw(variables, ring.ground_new(_qq(c)), ring.one)

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "RationalFunction":
        variables = tuple(variables)
        ring = poly_ring(variables)
        return cls._raw(variables, ring.gens[variables.index(name)], ring.one)

    @property
    def ring(self) -> PolyRing:
        return poly_ring(self.variables)

    @property
    def numerator(self) -> MultiPolynomial:
        return MultiPolynomial._wrap(self.variables, self._n)

    @property
    def denominator(self) -> MultiPolynomial:
        return MultiPolynomial._wrap(self.variables, self._d)

    def is_zero(self) -> bool:
        return not self._n

    def __bool__(self):
        return bool(self._n)

    def is_ground(self) -> bool:
        """True when the value is a rational number."""
        return self._n.is_ground and self._d.is_ground

    def to_fraction(self) -> Fraction:
        if not self.is_ground():
            raise ValueError(f"{self} is not a rational constant")
        if not self._n:
            return Fraction(0)
        return _frac(self._n.LC) / _frac(self._d.LC)

    def used_variables(self) -> frozenset[str]:
        return self.numerator.used_variables() | self.denominator.used_variables()

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.variables != self.variables:
                raise ValueError(
                    f"rational functions over different variables {self.variables} / {other.variables}"
                )
            return other._n, other._d
        if isinstance(other, MultiPolynomial):
            if other.variables != self.variables:
                raise ValueError("operands over different variables")
            return other._p, poly_ring(self.variables).one
        if _is_scalar(other):
            ring = poly_ring(self.variables)
            c = _qq(other)
            return ring.ground_new(c), ring.one
        return None

    def _add(self, b, d):
        a, c = self._n, self._d
        if c == d:
            n = a + b
            if not n:
                return RationalFunction._raw(self.variables, n, poly_ring(self.variables).one)
            if d.is_ground:
                return RationalFunction._raw(self.variables, n, d)
            g, n, d = n.cofactors(d)
            return RationalFunction._raw(self.variables, *_monic(n, d))
        if c.is_ground and d.is_ground:
            return RationalFunction._raw(self.variables, a * d.LC + b * c.LC, c * d.LC)._fix_ground()
        # Henrici: with g = gcd(c, d) only g can share factors with the new numerator
        g, c1, d1 = c.cofactors(d)
        n = a * d1 + b * c1
        ring = poly_ring(self.variables)
        if not n:
            return RationalFunction._raw(self.variables, ring.zero, ring.one)
        den = c * d1
        if not g.is_ground:
            h, n1, _ = n.cofactors(g)
            # over QQ a trivial gcd may come back as a non-unit constant
            if not h.is_ground:
                n, den = n1, den.exquo(h)
        return RationalFunction._raw(self.variables, *_monic(n, den))

    def _fix_ground(self):
        self._n, self._d = _monic(self._n, self._d)
        return self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._add(*o)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(self.variables, -self._n, self._d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._add(-o[0], o[1])

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (-self)._add(*o)

    def _mul(self, c, d):
        a, b = self._n, self._d
        ring = poly_ring(self.variables)
        if not a or not c:
            return RationalFunction._raw(self.variables, ring.zero, ring.one)
        if not d.is_ground and not a.is_ground:
            _, a, d = a.cofactors(d)
        if not b.is_ground and not c.is_ground:
            _, c, b = c.cofactors(b)
        return RationalFunction._raw(self.variables, *_monic(a * c, b * d))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._mul(*o)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self._n:
            raise ZeroDenominatorError("inverse of zero")
        return RationalFunction._raw(self.variables, *_monic(self._d, self._n))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o[0]:
            raise ZeroDenominatorError("division by zero rational function")
        return self._mul(o[1], o[0])

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.inverse()._mul(*o)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            # 0^0 = 1, as for Python numbers
            return RationalFunction.constant(self.variables, 1)
        return RationalFunction._raw(self.variables, self._n ** k, self._d ** k)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._n == o[0] and self._d == o[1]

    def __hash__(self):
        if self.is_ground():
            return hash(self.to_fraction())
        return hash((self.variables, self._n, self._d))

    def diff(self, name: str) -> "RationalFunction":
        """Partial derivative with respect to the named variable."""
        ring = poly_ring(self.variables)
        x = ring.gens[self.variables.index(name)]
        n, d = self._n, self._d
        if d.is_ground:
            return RationalFunction._raw(self.variables, n.diff(x), d)
        num = n.diff(x) * d - n * d.diff(x)
        return RationalFunction._raw(self.variables, *_canonical(ring, num, d * d))

    def embed(self, variables: Sequence[str]) -> "RationalFunction":
        """The same element viewed over a variable list containing ours."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        idx = [variables.index(v) for v in self.variables]
        ring = poly_ring(variables)
        nv = len(variables)

        def move(p):
            out = {}
            for m, c in p.items():
                e = [0] * nv
                for i, k in zip(idx, m):
                    e[i] = k
                out[tuple(e)] = c
            return ring.from_dict(out)

        return RationalFunction._raw(variables, *_monic(move(self._n), move(self._d)))

    def compose(self, values: Mapping[str, "RationalFunction"], variables: Sequence[str]) -> "RationalFunction":
        """Substitute ``values`` for our variables; result lives over ``variables``.

        Variables without an entry in ``values`` map to the same-named
        variable of the target.
        """
        variables = tuple(variables)
        images = []
        for v in self.variables:
            if v in values:
                images.append(values[v])
            else:
                images.append(RationalFunction.variable(variables, v))
        num = _evaluate(self._n, images, variables)
        den = _evaluate(self._d, images, variables)
        return num / den

    def __repr__(self):
        return f"RationalFunction({format_rational_function(self)!r}, {self.variables})"

    def __str__(self):
        return format_rational_function(self)


def _evaluate(p, images: list[RationalFunction], variables) -> RationalFunction:
    acc = RationalFunction.constant(variables, 0)
    powers: dict[tuple[int, int], RationalFunction] = {}
    for m, c in p.terms():
        term = RationalFunction.constant(variables, _frac(c))
        for i, e in enumerate(m):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = images[i] ** e
                term = term * powers[key]
        acc = acc + term
    return acc


def normalize(num: MultiPolynomial, den: MultiPolynomial) -> RationalFunction:
    """Canonical rational function num/den; raises on a zero denominator."""
    if den.is_zero():
        raise ZeroDenominatorError("normalize: zero denominator")
    return RationalFunction(num, den)


# -- printing in the expression grammar -------------------------------------


def _format_coefficient(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _format_monomial(variables, exps) -> str:
    parts = []
    for v, e in zip(variables, exps):
        if e == 1:
            parts.append(v)
        elif e:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def format_polynomial(p: MultiPolynomial) -> str:
    pieces = []
    for exps, c in p.terms().items():
        mono = _format_monomial(p.variables, exps)
        mag = abs(c)
        if not mono:
            body = _format_coefficient(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coefficient(mag)}*{mono}"
        if not pieces:
            pieces.append("-" + body if c < 0 else body)
        else:
            pieces.append(("- " if c < 0 else "+ ") + body)
    return " ".join(pieces) if pieces else "0"


def _integral_scale(num: MultiPolynomial, den: MultiPolynomial) -> Fraction:
    """Factor making every coefficient of num and den a coprime integer."""
    coeffs = list(num.terms().values()) + list(den.terms().values())
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    g = 0
    for c in coeffs:
        g = gcd(g, (c * lcm).numerator)
    return Fraction(lcm, g or 1)


def format_rational_function(r: RationalFunction) -> str:
    if r.denominator == 1:
        return format_polynomial(r.numerator)
    scale = _integral_scale(r.numerator, r.denominator)
    numer = r.numerator * scale
    den = r.denominator * scale
    num = format_polynomial(numer)
    if len(numer.terms()) > 1:
        num = f"({num})"
    terms = den.terms()
    den_s = format_polynomial(den)
    single = len(terms) == 1
    if single:
        (exps, c), = terms.items()
        single = c == 1 and sum(1 for e in exps if e) == 1
    if not single:
        den_s = f"({den_s})"
    return f"{num}/{den_s}"


# -- matrices and linear systems ---------------------------------------------


class ScalarField(Enum):
    CONSTANTS = "constants-Q"
    LNAT = "abstract-L"


class ExactMatrix:
    """Immutable rows x cols grid of exact field elements."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable], cols: int | None = None):
        grid = tuple(tuple(r) for r in entries)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        if any(len(r) != cols for r in grid):
            raise ValueError("ragged matrix")
        self.rows = len(grid)
        self.cols = cols
        self.entries = grid

    @classmethod
    def identity(cls, n: int, one=Fraction(1)) -> "ExactMatrix":
        zero = one - one
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def tolist(self):
        return [list(r) for r in self.entries]

    def map(self, f) -> "ExactMatrix":
        return ExactMatrix([[f(e) for e in r] for r in self.entries], self.cols)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            ri = self.entries[i]
            row = []
            for j in range(other.cols):
                acc = ri[0] * other.entries[0][j]
                for k in range(1, self.cols):
                    acc = acc + ri[k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return ExactMatrix(out, other.cols)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols
        )

    def __neg__(self):
        return self.map(lambda e: -e)

    def scale(self, c) -> "ExactMatrix":
        return self.map(lambda e: e * c)

    def is_zero(self) -> bool:
        return all(not e for r in self.entries for e in r)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and all(
            a == b for r, s in zip(self.entries, other.entries) for a, b in zip(r, s)
        )

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return "ExactMatrix([" + ", ".join("[" + ", ".join(str(e) for e in r) + "]" for r in self.entries) + "])"

    def det(self):
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        if self.rows == 0:
            return Fraction(1)
        m = self.tolist()
        n = self.rows
        det = m[0][0] - m[0][0] + 1
        for c in range(n):
            p = next((r for r in range(c, n) if m[r][c]), None)
            if p is None:
                return det - det
            if p != c:
                m[c], m[p] = m[p], m[c]
                det = -det
            piv = m[c][c]
            det = det * piv
            for r in range(c + 1, n):
                if m[r][c]:
                    f = m[r][c] / piv
                    m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        return det

    def inverse(self) -> "ExactMatrix":
        """Gauss-Jordan inverse; raises SingularMatrixError."""
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        if n == 0:
            return self
        one = _unit(self.entries[0][0])
        zero = one - one
        aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.entries)]
        red, pivots = rref(aug, 2 * n)
        if pivots[:n] != list(range(n)) or len(pivots) < n:
            raise SingularMatrixError("matrix is singular")
        return ExactMatrix([r[n:] for r in red[:n]], n)


def _unit(sample):
    """The multiplicative identity of the field ``sample`` lives in."""
    return sample - sample + 1


def rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; pivot = first nonzero entry in column order.

    Returns the nonzero reduced rows and their pivot columns.
    """
    m = [list(r) for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [e / piv for e in m[r]]
        pr = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], pr)]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def _check_field(entries, field: ScalarField):
    for e in entries:
        if field is ScalarField.CONSTANTS:
            if not _is_scalar(e):
                raise TypeError(f"entry {e!r} is not a rational constant")
        elif not isinstance(e, RationalFunction):
            raise TypeError(f"entry {e!r} is not a rational function")


def nullspace(m: ExactMatrix, field: ScalarField = ScalarField.CONSTANTS, *, one=None) -> list[tuple]:
    """Basis of {v : m v = 0}, returned in reduced row echelon form.

    ``one`` fixes the scalar type when ``m`` has no entries over ``LNAT``.
    """
    flat = [e for r in m.entries for e in r]
    _check_field(flat, field)
    if one is None:
        if flat:
            one = _unit(flat[0])
        elif field is ScalarField.CONSTANTS:
            one = Fraction(1)
        else:
            raise ValueError("nullspace over L needs a sample element when the matrix is empty")
    if field is ScalarField.CONSTANTS:
        one = Fraction(one)
        rows = [[Fraction(e) for e in r] for r in m.entries]
    else:
        rows = m.entries
    zero = one - one
    red, pivots = rref(rows, m.cols)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * m.cols
        v[f] = one
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    reduced, _ = rref(basis, m.cols)
    return [tuple(v) for v in reduced]


def rank(m: ExactMatrix) -> int:
    return len(rref(m.entries, m.cols)[1])


def in_span(basis: Sequence[Sequence], v: Sequence) -> bool:
    """Exact linear-membership test of ``v`` in the span of ``basis``."""
    if not any(v):
        return True
    if not basis:
        return False
    n = len(v)
    return len(rref(list(basis) + [list(v)], n)[1]) == len(rref(basis, n)[1])
