"""Differential field presentations and linear systems Y' = AY over them.

A :class:`DifferentialTower` presents a differential field L = Q(base, generators)
with one or more commuting derivations, each given by the derivative of every
variable.  The base variables generate the subfield K; their rules may only
mention base variables so that K is a differential subfield.  Generators are
taken to be algebraically independent over K.

A :class:`SystemSpec` adds a matrix A over K, a candidate fundamental matrix Z
over L, and recovery expressions writing each generator back as a rational
function of the symbols ``z11 .. znn`` and the base variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .arith import ExactMatrix, RationalFunction
from .errors import FundamentalMatrixError, TowerError
from .expr import NAME_RE, parse_rational_function


def z_symbol(i: int, j: int, n: int) -> str:
    """Name of the symbol standing for entry (i, j) of Z (0-based input)."""
    if n < 10:
        return f"z{i + 1}{j + 1}"
    return f"z{i + 1}_{j + 1}"


def z_symbols(n: int) -> tuple[str, ...]:
    return tuple(z_symbol(i, j, n) for i in range(n) for j in range(n))


def _as_element(value, variables: tuple[str, ...]) -> RationalFunction:
    if isinstance(value, RationalFunction):
        if value.variables != variables:
            value = value.embed(variables)
        return value
    if isinstance(value, (int, Fraction)):
        return RationalFunction.constant(variables, value)
    return parse_rational_function(str(value), variables)


class DifferentialTower:
    """Q(base, generators) with commuting derivations given by variable rules.

    ``base`` and ``generators`` map each name to its derivative.  With more
    than one derivation, each value is a sequence with one rule per
    derivation.  Rules are expression strings or :class:`RationalFunction`
    values over the full variable list.
    """

    def __init__(self, base: Mapping[str, object], generators: Mapping[str, object] | None = None,
                 derivations: int = 1):
        generators = dict(generators or {})
        base = dict(base)
        if derivations < 1:
            raise TowerError("at least one derivation is required")
        if not base:
            raise TowerError("a tower needs at least one base variable")
        self.base = tuple(base)
        self.generators = tuple(generators)
        self.variables = self.base + self.generators
        self.derivation_count = derivations
        seen = set()
        for v in self.variables:
            if not NAME_RE.fullmatch(v):
                raise TowerError(f"invalid variable name {v!r}")
            if v in seen:
                raise TowerError(f"variable {v!r} declared twice")
            seen.add(v)

        rules: list[dict[str, RationalFunction]] = [dict() for _ in range(derivations)]
        for name, spec in list(base.items()) + list(generators.items()):
            per = list(spec) if isinstance(spec, (list, tuple)) else [spec]
            if len(per) != derivations:
                raise TowerError(f"variable {name!r} needs exactly {derivations} derivative rule(s)")
            for i, r in enumerate(per):
                rules[i][name] = _as_element(r, self.variables)
        for i in range(derivations):
            for b in self.base:
                stray = rules[i][b].used_variables() - set(self.base)
                if stray:
                    raise TowerError(
                        f"rule for base variable {b!r} mentions generator(s) {sorted(stray)}; "
                        "the base field must be closed under differentiation"
                    )
        self._rules = tuple(rules)
        self._cache: dict = {}
        if derivations > 1:
            for v in self.variables:
                for i in range(derivations):
                    for j in range(i + 1, derivations):
                        a = self.derive(self._rules[j][v], i)
                        b = self.derive(self._rules[i][v], j)
                        if a != b:
                            raise TowerError(
                                f"derivations {i} and {j} do not commute on {v!r}: {a} vs {b}"
                            )

    def rule(self, name: str, which: int = 0) -> RationalFunction:
        return self._rules[which][name]

    def element(self, value) -> RationalFunction:
        """Coerce an expression string, number or rational function into L."""
        return _as_element(value, self.variables)

    def variable(self, name: str) -> RationalFunction:
        return RationalFunction.variable(self.variables, name)

    def is_base_element(self, e: RationalFunction) -> bool:
        return not (e.used_variables() & set(self.generators))

    def derive(self, e: RationalFunction, which: int = 0) -> RationalFunction:
        """Apply derivation ``which`` using linearity, Leibniz and quotient rules."""
        if not 0 <= which < self.derivation_count:
            raise IndexError(f"derivation index {which} out of range")
        if not isinstance(e, RationalFunction) or e.variables != self.variables:
            e = self.element(e)
        key = (e, which)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        rules = self._rules[which]
        num, den = e.numerator, e.denominator
        dnum = self._derive_poly(num, rules)
        if den == 1:
            out = dnum
        else:
            dden = self._derive_poly(den, rules)
            n = RationalFunction(num)
            d = RationalFunction(den)
            out = (dnum * d - n * dden) / (d * d)
        if len(self._cache) > 20000:
            self._cache.clear()
        self._cache[key] = out
        return out

    def _derive_poly(self, p, rules) -> RationalFunction:
        acc = RationalFunction.constant(self.variables, 0)
        used = p.used_variables()
        for v in self.variables:
            if v in used:
                r = rules[v]
                if r:
                    acc = acc + RationalFunction(p.diff(v)) * r
        return acc

    def derive_n(self, e: RationalFunction, k: int, which: int = 0) -> RationalFunction:
        for _ in range(k):
            e = self.derive(e, which)
        return e

    def __repr__(self):
        def show(names):
            return ", ".join(f"{v}'={'/'.join(str(r[v]) for r in self._rules)}" for v in names)

        return f"DifferentialTower(base[{show(self.base)}], generators[{show(self.generators)}])"


def derive(e: RationalFunction, t: DifferentialTower, which: int = 0) -> RationalFunction:
    return t.derive(e, which)


def is_constant(e: RationalFunction, t: DifferentialTower) -> bool:
    return all(t.derive(e, i).is_zero() for i in range(t.derivation_count))


@dataclass(frozen=True)
class ConstantProbe:
    element: RationalFunction
    is_constant: bool
    in_rationals: bool

    @property
    def new_constant(self) -> bool:
        return self.is_constant and not self.in_rationals


def new_constants_report(t: DifferentialTower, probes: Sequence) -> list[ConstantProbe]:
    """Classify each probe: constant or not, and constant outside Q."""
    out = []
    for p in probes:
        e = t.element(p)
        out.append(ConstantProbe(e, is_constant(e, t), e.is_ground()))
    return out


def recovery_variables(n: int, base: Sequence[str]) -> tuple[str, ...]:
    return z_symbols(n) + tuple(base)


@dataclass(frozen=True)
class SystemSpec:
    """Y' = AY over the base of ``tower`` with candidate fundamental matrix Z."""

    tower: DifferentialTower
    A: ExactMatrix
    Z: ExactMatrix
    recovery: Mapping[str, RationalFunction] = field(default_factory=dict)

    def __post_init__(self):
        t = self.tower
        if t.derivation_count != 1:
            raise TowerError("linear systems need a tower with a single derivation")
        n = self.A.rows
        if self.A.cols != n or self.Z.rows != n or self.Z.cols != n:
            raise TowerError(f"A and Z must both be square of the same size (got {n}x{self.A.cols}, "
                             f"{self.Z.rows}x{self.Z.cols})")
        if n == 0:
            raise TowerError("empty system")
        clash = set(z_symbols(n)) & set(t.variables)
        if clash:
            raise TowerError(f"tower variables {sorted(clash)} collide with the Z entry symbols")
        for i in range(n):
            for j in range(n):
                a = self.A[i, j]
                if a.variables != t.variables or self.Z[i, j].variables != t.variables:
                    raise TowerError(f"entry ({i + 1},{j + 1}) is not over the tower variables")
                if not t.is_base_element(a):
                    raise TowerError(f"A entry ({i + 1},{j + 1}) = {a} involves generators")
        rv = recovery_variables(n, t.base)
        if set(self.recovery) != set(t.generators):
            missing = sorted(set(t.generators) - set(self.recovery))
            extra = sorted(set(self.recovery) - set(t.generators))
            raise TowerError(f"recovery expressions must cover exactly the generators "
                             f"(missing {missing}, unexpected {extra})")
        for g, r in self.recovery.items():
            if r.variables != rv:
                raise TowerError(f"recovery for {g!r} is not over {rv}")

    @classmethod
    def build(cls, tower: DifferentialTower, A, Z, recovery: Mapping[str, object] | None = None) -> "SystemSpec":
        """Build from nested lists of expression strings (or elements)."""
        A = ExactMatrix([[tower.element(e) for e in row] for row in A])
        Z = ExactMatrix([[tower.element(e) for e in row] for row in Z])
        rv = recovery_variables(A.rows, tower.base)
        rec = {}
        for g, r in (recovery or {}).items():
            rec[g] = _as_element(r, rv)
        return cls(tower, A, Z, rec)

    @property
    def n(self) -> int:
        return self.A.rows

    @property
    def recovery_variables(self) -> tuple[str, ...]:
        return recovery_variables(self.n, self.tower.base)

    def z_values(self) -> dict[str, RationalFunction]:
        n = self.n
        return {z_symbol(i, j, n): self.Z[i, j] for i in range(n) for j in range(n)}

    def substitute_z(self, r: RationalFunction) -> RationalFunction:
        """Evaluate a recovery-ring element at the entries of Z."""
        return r.compose(self.z_values(), self.tower.variables)

    def rescaled(self, C0: Sequence[Sequence]) -> "SystemSpec":
        """The same system with fundamental matrix Z*C0 for invertible rational C0."""
        n = self.n
        t = self.tower
        c = ExactMatrix([[t.element(Fraction(v)) for v in row] for row in C0])
        Z2 = self.Z @ c
        rv = self.recovery_variables
        cinv = ExactMatrix([[RationalFunction.constant(rv, e.to_fraction()) for e in row]
                            for row in c.inverse().entries])
        zmat = ExactMatrix([[RationalFunction.variable(rv, z_symbol(i, j, n)) for j in range(n)]
                            for i in range(n)])
        back = zmat @ cinv
        subst = {z_symbol(i, j, n): back[i, j] for i in range(n) for j in range(n)}
        rec = {g: r.compose(subst, rv) for g, r in self.recovery.items()}
        return SystemSpec(t, self.A, Z2, rec)


def generic_system(A: Sequence[Sequence], base: str = "x", prefix: str = "g") -> SystemSpec:
    """Y' = AY with Z a matrix of independent generators g_ij, g_ij' = (A G)_ij.

    ``A`` holds expression strings over the single base variable ``base``
    (with base' = 1).
    """
    n = len(A)
    names = [[f"{prefix}{i + 1}{j + 1}" if n < 10 else f"{prefix}{i + 1}_{j + 1}" for j in range(n)]
             for i in range(n)]
    flat = tuple([base] + [v for row in names for v in row])
    a = [[parse_rational_function(str(e), flat) for e in row] for row in A]
    gens = {}
    for i in range(n):
        for j in range(n):
            acc = RationalFunction.constant(flat, 0)
            for k in range(n):
                acc = acc + a[i][k] * RationalFunction.variable(flat, names[k][j])
            gens[names[i][j]] = acc
    tower = DifferentialTower({base: "1"}, gens)
    Z = [[names[i][j] for j in range(n)] for i in range(n)]
    recovery = {names[i][j]: z_symbol(i, j, n) for i in range(n) for j in range(n)}
    return SystemSpec.build(tower, a, Z, recovery)


@dataclass(frozen=True)
class FundamentalDiagnostics:
    det: RationalFunction
    ode_failures: tuple[tuple[int, int, RationalFunction], ...]
    recovery_failures: tuple[tuple[str, RationalFunction], ...]

    @property
    def det_ok(self) -> bool:
        return not self.det.is_zero()

    @property
    def ode_ok(self) -> bool:
        return not self.ode_failures

    @property
    def recovery_ok(self) -> bool:
        return not self.recovery_failures

    @property
    def passed(self) -> bool:
        return self.det_ok and self.ode_ok and self.recovery_ok

    def summary(self) -> str:
        parts = []
        if not self.ode_ok:
            parts.append("Z' != AZ at " + ", ".join(f"({i},{j}) residual {r}" for i, j, r in self.ode_failures))
        if not self.det_ok:
            parts.append("det Z = 0")
        if not self.recovery_ok:
            parts.append("recovery mismatch for " + ", ".join(f"{g} -> {v}" for g, v in self.recovery_failures))
        return "; ".join(parts) or "all checks pass"


def check_fundamental(s: SystemSpec) -> FundamentalDiagnostics:
    """Check Z' = AZ entrywise, det Z != 0, and recovery consistency.

    Failure witnesses use 1-based entry indices.
    """
    t = s.tower
    n = s.n
    AZ = s.A @ s.Z
    ode = []
    for i in range(n):
        for j in range(n):
            res = t.derive(s.Z[i, j]) - AZ[i, j]
            if not res.is_zero():
                ode.append((i + 1, j + 1, res))
    rec = []
    for g in t.generators:
        value = s.substitute_z(s.recovery[g])
        if value != t.variable(g):
            rec.append((g, value))
    return FundamentalDiagnostics(s.Z.det(), tuple(ode), tuple(rec))


def require_fundamental(s: SystemSpec) -> FundamentalDiagnostics:
    diag = check_fundamental(s)
    if not diag.passed:
        raise FundamentalMatrixError(diag)
    return diag
