"""Truncated power series in X over rational-function coefficients.

Holds the universal Taylor morphism a -> sum_k d^k(a)/k! X^k for a single
derivation, series matrix algebra, the fundamental-series recursion for
Y' = iota(A) Y, and the matrix B = iota(Z) (Z#)^-1 together with the test
that its coefficients lie in the base field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .arith import ExactMatrix, RationalFunction, format_rational_function
from .errors import OrderMismatchError, TowerError
from .tower import DifferentialTower, SystemSpec, require_fundamental

SERIES_VARIABLE = "X"


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients of X^0 .. X^order."""

    coefficients: tuple[RationalFunction, ...]

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("a truncated series needs at least the constant coefficient")

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def variables(self) -> tuple[str, ...]:
        return self.coefficients[0].variables

    @classmethod
    def constant(cls, c: RationalFunction, order: int) -> "TruncatedSeries":
        zero = c - c
        return cls((c,) + (zero,) * order)

    def __getitem__(self, k: int) -> RationalFunction:
        return self.coefficients[k]

    def _check(self, other: "TruncatedSeries"):
        if other.order != self.order:
            raise OrderMismatchError(f"series orders differ: {self.order} vs {other.order}")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        return TruncatedSeries(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        return TruncatedSeries(tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self):
        return TruncatedSeries(tuple(-a for a in self.coefficients))

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return TruncatedSeries(tuple(a * other for a in self.coefficients))

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise OrderMismatchError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(self.coefficients[: order + 1])

    def derivative(self) -> "TruncatedSeries":
        """d/dX; the result has order one less (order 0 stays order 0)."""
        if self.order == 0:
            return TruncatedSeries((self.coefficients[0] - self.coefficients[0],))
        return TruncatedSeries(tuple(c * k for k, c in enumerate(self.coefficients) if k))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def __str__(self):
        return format_series(self)


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at the common order."""
    a._check(b)
    n = a.order
    ac, bc = a.coefficients, b.coefficients
    out = []
    for k in range(n + 1):
        acc = None
        for i in range(k + 1):
            if ac[i] and bc[k - i]:
                term = ac[i] * bc[k - i]
                acc = term if acc is None else acc + term
        out.append(acc if acc is not None else ac[0] - ac[0])
    return TruncatedSeries(tuple(out))


def taylor(e: RationalFunction, t: DifferentialTower, order: int) -> TruncatedSeries:
    """Universal Taylor expansion: coefficient k is d^k(e)/k!."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if t.derivation_count != 1:
        raise TowerError("the Taylor morphism is implemented for a single derivation")
    e = t.element(e)
    coeffs = [e]
    d = e
    for k in range(1, order + 1):
        d = t.derive(d)
        coeffs.append(d * Fraction(1, factorial(k)))
    return TruncatedSeries(tuple(coeffs))


class TruncatedSeriesMatrix:
    """n x n matrix of series sharing one order, stored as coefficient matrices."""

    __slots__ = ("n", "order", "coefficients")

    def __init__(self, coefficients: Sequence[ExactMatrix]):
        coefficients = tuple(coefficients)
        if not coefficients:
            raise ValueError("need at least the constant coefficient matrix")
        n = coefficients[0].rows
        for c in coefficients:
            if c.rows != n or c.cols != n:
                raise ValueError("coefficient matrices must be square of one size")
        self.n = n
        self.order = len(coefficients) - 1
        self.coefficients = coefficients

    @classmethod
    def from_entries(cls, grid: Sequence[Sequence[TruncatedSeries]]) -> "TruncatedSeriesMatrix":
        orders = {s.order for row in grid for s in row}
        if len(orders) != 1:
            raise OrderMismatchError(f"entries have different orders {sorted(orders)}")
        (order,) = orders
        n = len(grid)
        return cls([ExactMatrix([[grid[i][j][k] for j in range(n)] for i in range(n)]) for k in range(order + 1)])

    @classmethod
    def constant(cls, m: ExactMatrix, order: int) -> "TruncatedSeriesMatrix":
        zero = m.map(lambda e: e - e)
        return cls([m] + [zero] * order)

    def entry(self, i: int, j: int) -> TruncatedSeries:
        return TruncatedSeries(tuple(c[i, j] for c in self.coefficients))

    @property
    def entries(self) -> list[list[TruncatedSeries]]:
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]

    def __getitem__(self, k: int) -> ExactMatrix:
        return self.coefficients[k]

    def _check(self, other):
        if other.order != self.order:
            raise OrderMismatchError(f"series matrix orders differ: {self.order} vs {other.order}")
        if other.n != self.n:
            raise ValueError("series matrices of different sizes")

    def __add__(self, other):
        self._check(other)
        return TruncatedSeriesMatrix([a + b for a, b in zip(self.coefficients, other.coefficients)])

    def __sub__(self, other):
        self._check(other)
        return TruncatedSeriesMatrix([a - b for a, b in zip(self.coefficients, other.coefficients)])

    def __matmul__(self, other):
        return series_matrix_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeriesMatrix):
            return NotImplemented
        return self.order == other.order and self.n == other.n and all(
            a == b for a, b in zip(self.coefficients, other.coefficients)
        )

    def __hash__(self):
        return hash(self.coefficients)

    def truncate(self, order: int) -> "TruncatedSeriesMatrix":
        if order > self.order:
            raise OrderMismatchError(f"cannot extend order {self.order} to {order}")
        return TruncatedSeriesMatrix(self.coefficients[: order + 1])

    def derivative(self) -> "TruncatedSeriesMatrix":
        if self.order == 0:
            return TruncatedSeriesMatrix([self.coefficients[0].map(lambda e: e - e)])
        return TruncatedSeriesMatrix([c.scale(k) for k, c in enumerate(self.coefficients) if k])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def __repr__(self):
        return f"TruncatedSeriesMatrix(n={self.n}, order={self.order})"


def series_matrix_mul(a: TruncatedSeriesMatrix, b: TruncatedSeriesMatrix) -> TruncatedSeriesMatrix:
    a._check(b)
    out = []
    for k in range(a.order + 1):
        acc = None
        for i in range(k + 1):
            if a[i].is_zero() or b[k - i].is_zero():
                continue
            term = a[i] @ b[k - i]
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else a[0].map(lambda e: e - e))
    return TruncatedSeriesMatrix(out)


def taylor_matrix(m: ExactMatrix, t: DifferentialTower, order: int) -> TruncatedSeriesMatrix:
    grid = [[taylor(m[i, j], t, order) for j in range(m.cols)] for i in range(m.rows)]
    return TruncatedSeriesMatrix.from_entries(grid)


def series_matrix_inverse(m: TruncatedSeriesMatrix) -> TruncatedSeriesMatrix:
    """Inverse through the truncation order.

    Raises SingularMatrixError when the constant term is not invertible.
    """
    r0 = m[0].inverse()
    out = [r0]
    for k in range(1, m.order + 1):
        acc = None
        for j in range(1, k + 1):
            if m[j].is_zero():
                continue
            term = m[j] @ out[k - j]
            acc = term if acc is None else acc + term
        if acc is None:
            out.append(r0.map(lambda e: e - e))
        else:
            out.append(-(r0 @ acc))
    return TruncatedSeriesMatrix(out)


def solve_fundamental(a_series: TruncatedSeriesMatrix) -> TruncatedSeriesMatrix:
    """Fundamental series B with B(0) = I and dB/dX = A B.

    With A = sum A_k X^k / k! and B = sum B_k X^k / k!, comparing the
    coefficients of X^(k-1) gives B_k = sum_{l+m=k-1} (k-1)!/(l! m!) A_l B_m.
    """
    n = a_series.n
    N = a_series.order
    one = a_series[0][0, 0] - a_series[0][0, 0] + 1
    A = [a_series[k].scale(factorial(k)) for k in range(N + 1)]
    B = [ExactMatrix.identity(n, one)]
    for k in range(1, N + 1):
        acc = None
        for l in range(k):
            m = k - 1 - l
            if A[l].is_zero():
                continue
            w = Fraction(factorial(k - 1), factorial(l) * factorial(m))
            term = (A[l] @ B[m]).scale(w)
            acc = term if acc is None else acc + term
        B.append(acc if acc is not None else B[0].map(lambda e: e - e))
    return TruncatedSeriesMatrix([B[k].scale(Fraction(1, factorial(k))) for k in range(N + 1)])


def compute_B(s: SystemSpec, order: int) -> TruncatedSeriesMatrix:
    """B = iota(Z) (Z#)^-1, where Z# is Z viewed as a constant series."""
    require_fundamental(s)
    iz = taylor_matrix(s.Z, s.tower, order)
    zsharp = TruncatedSeriesMatrix.constant(s.Z, order)
    return series_matrix_mul(iz, series_matrix_inverse(zsharp))


@dataclass(frozen=True)
class MembershipWitness:
    row: int
    col: int
    degree: int
    coefficient: RationalFunction

    def __str__(self):
        return f"entry ({self.row},{self.col}) degree {self.degree} coefficient {self.coefficient}"


@dataclass(frozen=True)
class MembershipResult:
    ok: bool
    witness: MembershipWitness | None = None

    def __bool__(self):
        return self.ok


def check_membership_base(m: TruncatedSeriesMatrix, t: DifferentialTower) -> MembershipResult:
    """True iff every coefficient is generator-free; otherwise the first offender.

    Entries are scanned row-major, degrees upward; witness indices are 1-based.
    """
    for i in range(m.n):
        for j in range(m.n):
            for k in range(m.order + 1):
                c = m[k][i, j]
                if not t.is_base_element(c):
                    return MembershipResult(False, MembershipWitness(i + 1, j + 1, k, c))
    return MembershipResult(True)


def format_series(s: TruncatedSeries, var: str = SERIES_VARIABLE) -> str:
    """The truncated series as a polynomial in ``var`` in the expression grammar."""
    pieces = []
    for k, c in enumerate(s.coefficients):
        if c.is_zero():
            continue
        neg = False
        body = format_rational_function(c)
        if len(c.numerator.terms()) == 1 and c.numerator.leading_coefficient < 0:
            neg = True
            body = format_rational_function(-c)
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono:
            if body == "1":
                body = mono
            else:
                simple = len(c.numerator.terms()) == 1 and c.denominator == 1
                body = (body if simple else f"({body})") + "*" + mono
        if not pieces:
            pieces.append("-" + body if neg else body)
        else:
            pieces.append(("- " if neg else "+ ") + body)
    return " ".join(pieces) if pieces else "0"
