from fractions import Fraction

import pytest

from flatconn.expr import Expr, jet, param, render, x, y
from flatconn.jets import is_symmetry_evolution, total_derivative
from flatconn import flatrep
from flatconn.kdv import build_kdv, miura_at


def u(k):
    return jet(1, (1,) * k)


@pytest.fixture(scope="module")
def kdv():
    return build_kdv()


def test_evolution_rule(kdv):
    assert total_derivative(kdv.scheme, 2, Expr.wrap(u(0))) == u(3) + 6 * u(0) * u(1)


def test_miura_flat_with_symbolic_parameter(kdv):
    assert flatrep.check_flat_rep(kdv.miura).verdict == "pass"
    assert kdv.miura.a(1, 3) == param("lam") + u(0) + y(1) ** 2


def test_named_symmetries(kdv):
    assert set(kdv.symmetries) == {
        "x-translation", "t-translation", "galilean", "scaling",
    }
    for phi in kdv.symmetries.values():
        assert is_symmetry_evolution(kdv.scheme, [phi]).verdict == "pass"
    assert kdv.symmetries["galilean"] == 1 + 6 * x(2) * u(1)
    assert kdv.symmetries["scaling"] == \
        2 * u(0) + x(1) * u(1) + 3 * x(2) * (u(3) + 6 * u(0) * u(1))


def test_lambda_family_cocycle_verbatim(kdv):
    res = flatrep.infinitesimal_deformation(kdv.miura, kdv.lam)
    assert res.cocycle == {
        (1, 3): Expr.wrap(1) + Expr.wrap(0),
        (2, 3): -(2 * u(0) + 8 * param("lam") + 4 * y(1) ** 2),
    }
    assert res.report.verdict == "pass"


def test_miura_at_rational_values(kdv):
    spec0 = miura_at(kdv, Fraction(0))
    assert spec0.a(1, 3) == u(0) + y(1) ** 2
    assert render(spec0.a(2, 3)) == "2*u[0]^2 + 2*u[0]*y1^2 + 2*u[1]*y1 + u[2]"
    spec_half = miura_at(kdv, Fraction(1, 2))
    assert flatrep.check_flat_rep(spec_half).verdict == "pass"
