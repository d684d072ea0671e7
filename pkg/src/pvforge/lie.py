"""Lie algebras of the Picard-Vessiot group and of the Galois hull.

PV side: constant matrices M such that D(Z) = Z M extends to a K-linear
derivation of L.  Because the generators are free, D is fixed by its values
on them, D(g_k) = sum_pq dG_k/dz_pq (Z) (Z M)_pq, and the only conditions are
that D reproduces Z M on every entry expression E_ij:

    sum_k dE_ij/dg_k D(g_k) - (Z M)_ij = 0   in L.

Clearing denominators and matching monomials gives a linear system over Q.

Hull side: the same relations after the Taylor morphism, with unknowns
N~ over L (first-order deformation iota(Z) -> iota(Z)(I + eps N~)).  Each
coefficient of X^0 .. X^N gives one linear equation over L.  The acting
matrix on B = iota(Z)(Z#)^-1 is Z# N~ (Z#)^-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import ExactMatrix, RationalFunction, ScalarField, in_span, nullspace, rref
from .errors import InstabilityError, MembershipError
from .series import (
    TruncatedSeries,
    check_membership_base,
    compute_B,
    series_mul,
    taylor,
)
from .tower import SystemSpec, require_fundamental, z_symbol

SPLIT_CAVEAT = "split-over-Q assumed"
STABILITY_MARGIN = 4


@dataclass(frozen=True)
class LieAlgebraResult:
    side: str
    field: ScalarField
    dimension: int
    basis: tuple[ExactMatrix, ...]
    diagnostics: dict = field(default_factory=dict, compare=False)
    b_action_basis: tuple[ExactMatrix, ...] = ()
    caveats: tuple[str, ...] = ()


@dataclass(frozen=True)
class ComparisonReport:
    pv: LieAlgebraResult
    hull: LieAlgebraResult
    dimensions_equal: bool
    transport_verified: bool
    orders: tuple[int, int]
    transported: tuple[ExactMatrix, ...] = ()
    transported_b_action: tuple[ExactMatrix, ...] = ()


def _vec_to_matrix(v, n):
    return ExactMatrix([[v[r * n + q] for q in range(n)] for r in range(n)])


def _matrix_to_vec(m: ExactMatrix):
    return [m[r, q] for r in range(m.rows) for q in range(m.cols)]


class _Relations:
    """Partial derivatives shared by both sides.

    ``dE[i][j][k]`` = dE_ij/dg_k in L and ``dG[k][p][q]`` = dG_k/dz_pq at z = Z.
    """

    def __init__(self, s: SystemSpec):
        t = s.tower
        n = s.n
        self.spec = s
        self.n = n
        self.gens = t.generators
        self.dE = [[[s.Z[i, j].diff(g) for g in self.gens] for j in range(n)] for i in range(n)]
        self.dG = []
        for g in self.gens:
            r = s.recovery[g]
            self.dG.append([[s.substitute_z(r.diff(z_symbol(p, q, n))) for q in range(n)] for p in range(n)])

    def pv_coefficients(self) -> list[list[RationalFunction]]:
        """Row (i,j), column (r,q): coefficient of m_rq in relation (i,j)."""
        s, n = self.spec, self.n
        Z = s.Z
        zero = Z[0, 0] - Z[0, 0]
        # w[k][r][q]: coefficient of m_rq in D(g_k)
        w = []
        for k in range(len(self.gens)):
            w.append([[sum((self.dG[k][p][q] * Z[p, r] for p in range(n)), zero)
                       for q in range(n)] for r in range(n)])
        rows = []
        for i in range(n):
            for j in range(n):
                row = []
                for r in range(n):
                    for q in range(n):
                        c = sum((self.dE[i][j][k] * w[k][r][q] for k in range(len(self.gens))), zero)
                        if j == q:
                            c = c - Z[i, r]
                        row.append(c)
                rows.append(row)
        return rows

    def hull_coefficients(self, order: int) -> list[list[TruncatedSeries]]:
        """Series analogue of pv_coefficients, built from Taylor expansions."""
        s, n, t = self.spec, self.n, self.spec.tower
        iz = [[taylor(s.Z[i, j], t, order) for j in range(n)] for i in range(n)]
        zero = TruncatedSeries.constant(s.Z[0, 0] - s.Z[0, 0], order)
        idG = [[[taylor(self.dG[k][p][q], t, order) for q in range(n)] for p in range(n)]
               for k in range(len(self.gens))]
        idE = [[[taylor(self.dE[i][j][k], t, order) for k in range(len(self.gens))]
                for j in range(n)] for i in range(n)]
        W = []
        for k in range(len(self.gens)):
            Wk = []
            for r in range(n):
                Wk.append([_series_sum([series_mul(idG[k][p][q], iz[p][r]) for p in range(n)], zero)
                           for q in range(n)])
            W.append(Wk)
        rows = []
        for i in range(n):
            for j in range(n):
                row = []
                for r in range(n):
                    for q in range(n):
                        c = _series_sum([series_mul(idE[i][j][k], W[k][r][q]) for k in range(len(self.gens))],
                                        zero)
                        if j == q:
                            c = c - iz[i][r]
                        row.append(c)
                rows.append(row)
        return rows


def _series_sum(items, zero):
    acc = zero
    for it in items:
        if not it.is_zero():
            acc = acc + it
    return acc


def _clear_denominators(row: list[RationalFunction]) -> list[list[Fraction]]:
    """Split sum_c row[c] m_c = 0 (m_c rational) into one Q-equation per monomial."""
    nonzero = [c for c in row if c]
    if not nonzero:
        return []
    den = nonzero[0].denominator
    for c in nonzero[1:]:
        den = den.lcm(c.denominator)
    polys = [(c * RationalFunction(den)).numerator if c else None for c in row]
    monomials = []
    seen = set()
    for p in polys:
        if p is None:
            continue
        for m in p.terms():
            if m not in seen:
                seen.add(m)
                monomials.append(m)
    out = []
    for m in sorted(monomials, reverse=True):
        out.append([p.terms().get(m, Fraction(0)) if p is not None else Fraction(0) for p in polys])
    return out


def pv_constraint_system(s: SystemSpec) -> list[list[Fraction]]:
    """The homogeneous linear system over Q whose solutions are the PV matrices."""
    rel = _Relations(s)
    eqs = []
    for row in rel.pv_coefficients():
        eqs.extend(_clear_denominators(row))
    return eqs


def pv_lie(s: SystemSpec) -> LieAlgebraResult:
    """Lie algebra of the differential Galois group, as constant matrices M."""
    require_fundamental(s)
    n = s.n
    eqs = pv_constraint_system(s)
    m = ExactMatrix(eqs, n * n)
    basis = nullspace(m, ScalarField.CONSTANTS)
    red, pivots = rref(eqs, n * n)
    diagnostics = {
        "unknowns": n * n,
        "relations": n * n,
        "equations": len(eqs),
        "rank": len(pivots),
        "reduced_system": [list(r) for r in red],
        "pivots": pivots,
    }
    return LieAlgebraResult(
        side="PV",
        field=ScalarField.CONSTANTS,
        dimension=len(basis),
        basis=tuple(_vec_to_matrix(v, n) for v in basis),
        diagnostics=diagnostics,
        caveats=(SPLIT_CAVEAT,),
    )


def pv_residuals(s: SystemSpec, M) -> ExactMatrix:
    """Re-substitute a candidate M directly: D(g_k) from Z M, then each relation.

    Returns the n x n matrix of residuals in L (all zero iff M is admissible).
    """
    t = s.tower
    n = s.n
    Mm = ExactMatrix([[t.element(Fraction(v)) for v in row] for row in M])
    ZM = s.Z @ Mm
    zvals = s.z_values()
    dg = {}
    for g in t.generators:
        r = s.recovery[g]
        acc = t.element(0)
        for p in range(n):
            for q in range(n):
                acc = acc + r.diff(z_symbol(p, q, n)).compose(zvals, t.variables) * ZM[p, q]
        dg[g] = acc
    res = []
    for i in range(n):
        row = []
        for j in range(n):
            e = s.Z[i, j]
            acc = t.element(0)
            for g in t.generators:
                acc = acc + e.diff(g) * dg[g]
            row.append(acc - ZM[i, j])
        res.append(row)
    return ExactMatrix(res)


def _hull_solve(rel: _Relations, order: int):
    n = rel.n
    one = rel.spec.tower.element(1)
    rows = []
    for coeffs in rel.hull_coefficients(order):
        for d in range(order + 1):
            row = [c[d] for c in coeffs]
            if any(row):
                rows.append(row)
    m = ExactMatrix(rows, n * n)
    return nullspace(m, ScalarField.LNAT, one=one), len(rows), n * n * (order + 1)


def hull_lie(s: SystemSpec, order: int = 12) -> LieAlgebraResult:
    """Lie algebra of infinitesimal hull automorphisms, as matrices N~ over L.

    The solution space is recomputed at ``order + 4`` and must coincide.
    """
    require_fundamental(s)
    t = s.tower
    hi = order + STABILITY_MARGIN
    B = compute_B(s, hi)
    mem = check_membership_base(B, t)
    if not mem:
        raise MembershipError(mem.witness)
    rel = _Relations(s)
    basis, nrows, total = _hull_solve(rel, order)
    basis_hi, nrows_hi, total_hi = _hull_solve(rel, hi)
    if basis != basis_hi:
        raise InstabilityError(
            f"hull solution spaces differ between orders {order} (dim {len(basis)}) "
            f"and {hi} (dim {len(basis_hi)})"
        )
    n = s.n
    mats = tuple(_vec_to_matrix(v, n) for v in basis)
    zs = s.Z
    zs_inv = zs.inverse()
    b_action = tuple(zs @ m @ zs_inv for m in mats)
    diagnostics = {
        "unknowns": n * n,
        "equations": total,
        "nonzero_equations": nrows,
        "orders": (order, hi),
        "stable": True,
    }
    return LieAlgebraResult(
        side="hull",
        field=ScalarField.LNAT,
        dimension=len(basis),
        basis=mats,
        diagnostics=diagnostics,
        b_action_basis=b_action,
    )


def hull_residuals(s: SystemSpec, Ntilde: ExactMatrix, order: int) -> list[TruncatedSeries]:
    """Series residuals of every transported relation under iota(Z) -> iota(Z)(I + eps N~)."""
    rel = _Relations(s)
    n = s.n
    vec = _matrix_to_vec(Ntilde)
    out = []
    for coeffs in rel.hull_coefficients(order):
        acc = None
        for c, v in zip(coeffs, vec):
            term = c * v
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def transport(s: SystemSpec, M: ExactMatrix) -> tuple[ExactMatrix, ExactMatrix]:
    """PV matrix M -> (N~ acting on iota(Z), N acting on B).

    M is constant, so iota(Z M) = iota(Z) M and N~ = M; on B the same
    deformation reads N = Z# M (Z#)^-1.
    """
    t = s.tower
    nt = M.map(lambda c: t.element(Fraction(c)))
    return nt, s.Z @ nt @ s.Z.inverse()


def compare_lie(s: SystemSpec, order: int = 12) -> ComparisonReport:
    """Compare dimensions and transport the PV basis into the hull algebra."""
    pv = pv_lie(s)
    hull = hull_lie(s, order)
    equal = pv.dimension == hull.dimension
    hull_vecs = [_matrix_to_vec(m) for m in hull.basis]
    moved, moved_b = [], []
    ok = equal
    for M in pv.basis:
        nt, nb = transport(s, M)
        moved.append(nt)
        moved_b.append(nb)
        if not in_span(hull_vecs, _matrix_to_vec(nt)):
            ok = False
    hull_b = [_matrix_to_vec(m) for m in hull.b_action_basis]
    for nb in moved_b:
        if not in_span(hull_b, _matrix_to_vec(nb)):
            ok = False
    return ComparisonReport(
        pv=pv,
        hull=hull,
        dimensions_equal=equal,
        transport_verified=ok,
        orders=(order, order + STABILITY_MARGIN),
        transported=tuple(moved),
        transported_b_action=tuple(moved_b),
    )
