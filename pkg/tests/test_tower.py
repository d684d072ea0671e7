import random
from fractions import Fraction

import pytest

from pvforge.errors import FundamentalMatrixError, TowerError
from pvforge.tower import (
    DifferentialTower,
    SystemSpec,
    check_fundamental,
    derive,
    is_constant,
    new_constants_report,
    require_fundamental,
)

from helpers import SYSTEM_SPECS, bundled, bundled_system, random_element, random_systems


@pytest.fixture
def log_tower():
    return DifferentialTower({"x": "1"}, {"l": "1/x"})


@pytest.fixture
def exp_tower():
    return DifferentialTower({"x": "1"}, {"e": "e"})


def test_derive_base_variable():
    t = DifferentialTower({"x": "1"})
    assert derive(t.element("x"), t) == 1


def test_derive_log(log_tower):
    t = log_tower
    assert derive(t.element("l"), t) == t.element("1/x")


def test_derive_difference_in_xy_tower():
    t = DifferentialTower({"x": "1", "y": "1"})
    assert derive(t.element("x - y"), t).is_zero()
    assert is_constant(t.element("x - y"), t)


def test_leibniz_by_hand(exp_tower):
    t = exp_tower
    assert derive(t.element("e*x"), t) == t.element("e*x + e")


def test_is_constant_basics():
    t = DifferentialTower({"x": "1"})
    assert not is_constant(t.element("x"), t)
    assert is_constant(t.element("7/3"), t)


def test_pi_tower_constant():
    t = DifferentialTower({"e": "e"}, {"q": "q"})
    assert is_constant(t.element("q/e"), t)


def test_new_constants_report():
    t = DifferentialTower({"e": "e"}, {"q": "q"})
    rep = new_constants_report(t, ["q/e", "7/3", "e"])
    assert [p.new_constant for p in rep] == [True, False, False]
    assert rep[1].is_constant and rep[1].in_rationals
    assert not rep[2].is_constant
    x = DifferentialTower({"x": "1"})
    (px,) = new_constants_report(x, ["x"])
    assert not px.is_constant


def test_quotient_rule(log_tower):
    t = log_tower
    assert derive(t.element("l/x"), t) == t.element("(1 - l)/x^2")


def test_two_derivations_commute():
    t = DifferentialTower({"x": ["1", "0"], "y": ["0", "1"]}, {"u": ["u", "2*u"]}, derivations=2)
    rng = random.Random(5)
    for _ in range(40):
        a = random_element(rng, t.variables)
        assert t.derive(t.derive(a, 0), 1) == t.derive(t.derive(a, 1), 0)
    # with separate partials, x - y is not a constant
    assert not is_constant(t.element("x - y"), t)


def test_non_commuting_rules_rejected():
    with pytest.raises(TowerError):
        DifferentialTower({"x": ["1", "0"], "y": ["0", "x"]}, derivations=2)


def test_tower_validation():
    with pytest.raises(TowerError):
        DifferentialTower({})
    with pytest.raises(TowerError):
        DifferentialTower({"x": "l"}, {"l": "1/x"})
    with pytest.raises(TowerError):
        DifferentialTower({"x": ["1", "0"]}, derivations=1)
    clash = DifferentialTower({"x": "1"}, {"z11": "z11"})
    with pytest.raises(TowerError):
        SystemSpec.build(clash, [["1"]], [["z11"]], {"z11": "z11"})


@pytest.mark.parametrize("name", ["exp", "log", "zero", "torus", "pi"])
def test_random_derivation_laws(name):
    t = bundled(name).tower
    rng = random.Random(hash(name) % 1000)
    for _ in range(40):
        a = random_element(rng, t.variables)
        b = random_element(rng, t.variables)
        assert t.derive(a * b) == t.derive(a) * b + a * t.derive(b)
        al, be = Fraction(rng.randint(-5, 5), 3), Fraction(rng.randint(-5, 5), 2)
        assert t.derive(a * al + b * be) == t.derive(a) * al + t.derive(b) * be
        if a:
            assert t.derive(a * a.inverse()).is_zero()


def test_leibniz_200_pairs():
    t = bundled("log").tower
    rng = random.Random(200)
    for _ in range(200):
        a = random_element(rng, t.variables)
        b = random_element(rng, t.variables)
        assert t.derive(a * b) == t.derive(a) * b + a * t.derive(b)


def test_check_fundamental_exp():
    d = check_fundamental(bundled_system("exp"))
    assert d.passed
    assert d.det == bundled_system("exp").tower.element("e")


def test_check_fundamental_log_determinant_sign():
    s = bundled_system("log")
    d = check_fundamental(s)
    assert d.passed
    assert d.det == s.tower.element("-1/x")


def test_check_fundamental_trivial():
    d = check_fundamental(bundled_system("zero"))
    assert d.passed and d.det == 1


def _perturbed(s, i, j):
    Z = [[s.Z[a, b] for b in range(s.n)] for a in range(s.n)]
    Z[i][j] = Z[i][j] + 1
    return SystemSpec.build(s.tower, [[s.A[a, b] for b in range(s.n)] for a in range(s.n)], Z, s.recovery)


@pytest.mark.parametrize("name", SYSTEM_SPECS)
def test_perturbation_breaks_ode_gate(name):
    # Adding 1 to an entry breaks Z' = AZ unless the perturbation itself solves
    # the system; the check must fail exactly when it does.
    s = bundled_system(name)
    for i in range(s.n):
        for j in range(s.n):
            p = _perturbed(s, i, j)
            d = check_fundamental(p)
            # AZ gains column i of A in column j, while Z' is unchanged
            breaks = any(s.A[a, i] for a in range(s.n))
            assert d.ode_ok != breaks
            if breaks:
                assert not d.passed
                with pytest.raises(FundamentalMatrixError):
                    require_fundamental(p)


def test_log_z12_perturbation_still_solves():
    # column 1 of A is zero, so the constant column (2, 0) still solves Y' = AY
    s = bundled_system("log")
    p = _perturbed(s, 0, 1)
    assert check_fundamental(p).ode_ok


def test_broken_witness():
    d = check_fundamental(bundled_system("broken"))
    assert not d.passed
    ((i, j, r),) = d.ode_failures
    assert (i, j) == (1, 1)
    assert r == -1


def test_recovery_mismatch_detected():
    t = DifferentialTower({"x": "1"}, {"e": "e"})
    s = SystemSpec.build(t, [["1"]], [["e"]], {"e": "2*z11"})
    d = check_fundamental(s)
    assert d.ode_ok and not d.recovery_ok


def test_system_validation():
    t = DifferentialTower({"x": "1"}, {"e": "e"})
    with pytest.raises(TowerError):
        SystemSpec.build(t, [["e"]], [["e"]], {"e": "z11"})
    with pytest.raises(TowerError):
        SystemSpec.build(t, [["1"]], [["e"]], {})
    with pytest.raises(TowerError):
        SystemSpec.build(t, [["1", "0"]], [["e"]], {"e": "z11"})


def test_random_systems_are_fundamental():
    for s in random_systems():
        assert check_fundamental(s).passed


def test_rescaled_system_stays_fundamental():
    s = bundled_system("log").rescaled([[1, 2], [0, 3]])
    assert check_fundamental(s).passed
