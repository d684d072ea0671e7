"""Shared fixtures-by-hand: bundled systems and seeded random corpora."""

import random
from fractions import Fraction

from pvforge.arith import RationalFunction
from pvforge.expr import Add, Div, Int, Mul, Neg, Pow, Sub, Var
from pvforge.specdoc import bundled_spec_path, load_spec
from pvforge.tower import generic_system

SYSTEM_SPECS = ("exp", "log", "zero", "torus", "pi")
TOWER_SPECS = SYSTEM_SPECS + ("xy",)


def bundled(name):
    return load_spec(bundled_spec_path(name))


def bundled_system(name):
    return bundled(name).system


def random_polynomial(rng, variables, degree=2, terms=3, coeff=5):
    p = RationalFunction.constant(variables, 0)
    for _ in range(rng.randint(1, terms)):
        c = Fraction(rng.randint(-coeff, coeff), rng.randint(1, 3))
        mono = RationalFunction.constant(variables, c)
        for _ in range(rng.randint(0, degree)):
            mono = mono * RationalFunction.variable(variables, rng.choice(variables))
        p = p + mono
    return p


def random_element(rng, variables, degree=2):
    """A random rational function; about half have a nontrivial denominator."""
    num = random_polynomial(rng, variables, degree)
    if rng.random() < 0.5:
        return num
    den = random_polynomial(rng, variables, 1, terms=2)
    while den.is_zero():
        den = random_polynomial(rng, variables, 1, terms=2)
    return num / den


def random_A(rng, n, degree=2):
    """n x n expression strings, polynomials in x of degree <= 2, not all zero."""
    while True:
        rows = []
        for _ in range(n):
            row = []
            for _ in range(n):
                if rng.random() < 0.4:
                    row.append("0")
                    continue
                cs = [rng.randint(-3, 3) for _ in range(rng.randint(1, degree + 1))]
                row.append(" + ".join(f"({c})*x^{k}" for k, c in enumerate(cs)))
            rows.append(row)
        if any(r != "0" for row in rows for r in row):
            return rows


def random_systems(count=20, seed=2024):
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = 1 + k % 3
        out.append(generic_system(random_A(rng, n)))
    return out


def random_expression(rng, variables, depth=4):
    """Random expression tree; leaves are small integers or variables."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return Int(rng.randint(0, 12))
        return Var(rng.choice(variables))
    kind = rng.randrange(6)
    if kind == 0:
        return Neg(random_expression(rng, variables, depth - 1))
    if kind == 5:
        return Pow(random_expression(rng, variables, depth - 1), rng.randint(-2, 3))
    op = (Add, Sub, Mul, Div)[kind - 1]
    return op(random_expression(rng, variables, depth - 1), random_expression(rng, variables, depth - 1))
