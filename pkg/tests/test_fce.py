import random

import pytest

from flatconn.expr import Expr, const, fc, jet, param, render, v, x, ZERO, ONE
from flatconn import fce
from flatconn.linsolve import AnsatzSpec
from helpers import fc_pool, fc_symbols, rand_expr


@pytest.fixture
def ch():
    return fce.FcChart(2, 1)


@pytest.fixture
def ch2():
    return fce.FcChart(2, 2)


def test_fc_vertical_examples(ch2):
    assert fce.fc_vertical(ch2, 1, Expr.wrap(v(1))) == ONE
    assert fce.fc_vertical(ch2, 1, Expr.wrap(v(2))).is_zero()
    assert fce.fc_vertical(ch2, 2, Expr.wrap(fc(1, (1,), ()))) == fc(1, (1,), (2,)) + ZERO
    s = fc(1, (2,), ())
    assert fce.fc_vertical(ch2, 1, s ** 2) == 2 * s * fc(1, (2,), (1,))
    with pytest.raises(ValueError):
        fce.fc_vertical(ch2, 3, Expr.wrap(v(1)))


def test_fc_total_examples(ch):
    assert fce.fc_total(ch, 1, Expr.wrap(v(1))) == fc(1, (1,), ()) + ZERO
    assert fce.fc_total(ch, 1, Expr.wrap(fc(1, (2,), ()))) == fc(1, (1, 2), ()) + ZERO
    got = fce.fc_total(ch, 1, Expr.wrap(fc(1, (2,), (1,))))
    assert got == fc(1, (1, 2), (1,)) - fc(1, (1,), (1,)) * fc(1, (2,), (1,))
    assert fce.fc_total(ch, 1, Expr.wrap(x(1))) == ONE
    assert fce.fc_total(ch, 1, Expr.wrap(x(2))).is_zero()
    with pytest.raises(ValueError):
        fce.fc_total(ch, 3, Expr.wrap(v(1)))


def test_fc_total_well_defined(ch2):
    # the recursion peels A in an arbitrary order; answers must agree
    for s in fc_symbols(2, 2, 3, 3):
        for i in (1, 2):
            assert fce._total_symbol(ch2, i, s) == \
                fce._total_symbol(ch2, i, s, peel_last=True)


def test_fc_total_commutes_with_itself(ch2):
    rng = random.Random(19)
    pool = fc_pool(2, 2)
    for _ in range(6):
        f = rand_expr(rng, pool)
        a = fce.fc_total(ch2, 1, fce.fc_total(ch2, 2, f))
        b = fce.fc_total(ch2, 2, fce.fc_total(ch2, 1, f))
        assert a == b


def test_commutation_identity(ch2):
    # [D_i, D_{v^b}] = - sum_g v_i^{g,b} D_{v^g} on random functions
    rng = random.Random(20)
    pool = fc_pool(2, 2)
    for _ in range(6):
        f = rand_expr(rng, pool, terms=2)
        for i in (1, 2):
            for b in (1, 2):
                lhs = fce.fc_total(ch2, i, fce.fc_vertical(ch2, b, f)) - \
                    fce.fc_vertical(ch2, b, fce.fc_total(ch2, i, f))
                rhs = ZERO
                for g in (1, 2):
                    rhs = rhs - fc(g, (i,), (b,)) * fce.fc_vertical(ch2, g, f)
                assert lhs == rhs


def test_flatness_residual_examples():
    assert all(r.is_zero() for r in fce.flatness_residual(fce.ConnectionSpec(2, 1, {})))
    flat = fce.ConnectionSpec(2, 1, {(1, 1): Expr.wrap(x(2)), (2, 1): Expr.wrap(x(1))})
    assert all(r.is_zero() for r in fce.flatness_residual(flat))
    bent = fce.ConnectionSpec(2, 1, {(1, 1): Expr.wrap(v(1)), (2, 1): x(1) * v(1)})
    assert [render(r) for r in fce.flatness_residual(bent)] == ["v1"]


def test_connection_spec_rejects_fc_coefficients():
    with pytest.raises(ValueError):
        fce.ConnectionSpec(2, 1, {(1, 1): Expr.wrap(fc(1, (1,), ()))})
    with pytest.raises(ValueError):
        fce.ConnectionSpec(2, 1, {(3, 1): Expr.wrap(v(1))})


def test_dfc_constant_cochain(ch2):
    # d(1 (x) D_{v^1}) = - sum_{i,b} v_i^{b,1} dx_i (x) D_{v^b}
    c = fce.cochain0(ch2, [ONE, ZERO])
    image = fce.dfc(c)
    for i in (1, 2):
        for b in (1, 2):
            assert image.component((i,), b) == -Expr.wrap(fc(b, (i,), (1,)))


def test_dfc_matches_spec_coordinates(ch):
    cv = fce.cochain0(ch, [Expr.wrap(v(1))])
    image = fce.dfc(cv)
    for i in (1, 2):
        assert image.component((i,), 1) == \
            fc(1, (i,), ()) - fc(1, (i,), (1,)) * v(1)


def test_dfc_squared_zero_random(ch2):
    rng = random.Random(21)
    pool = fc_pool(2, 2, max_i=2, max_a=1)
    for _ in range(15):
        c0 = fce.cochain0(ch2, [rand_expr(rng, pool), rand_expr(rng, pool)])
        assert fce.dfc(fce.dfc(c0)).is_zero()
        c1 = fce.cochain1(ch2, {
            ((1,), 1): rand_expr(rng, pool), ((2,), 2): rand_expr(rng, pool),
        })
        assert fce.dfc(fce.dfc(c1)).is_zero()


def test_zero_acyclicity_spot_check(ch2):
    rng = random.Random(22)
    pool = fc_pool(2, 2, max_i=2, max_a=1)
    done = 0
    while done < 50:
        q = fce.cochain0(ch2, [rand_expr(rng, pool), rand_expr(rng, pool)])
        if q.is_zero():
            continue
        assert not fce.dfc(q).is_zero()
        done += 1


def test_symmetry_from_f_examples(ch2):
    e1 = fce.cochain0(ch2, [ONE, ZERO])
    phi = fce.symmetry_from_f(ch2, e1)
    for i in (1, 2):
        for a in (1, 2):
            assert phi.component((i,), a) == -Expr.wrap(fc(a, (i,), (1,)))
    zero = fce.cochain0(ch2, [ZERO, ZERO])
    assert fce.symmetry_from_f(ch2, zero).is_zero()


def test_is_symmetry(ch):
    rng = random.Random(24)
    pool = fc_pool(2, 1, max_i=1, max_a=1)
    f = fce.cochain0(ch, [rand_expr(rng, pool)])
    assert fce.is_symmetry(ch, fce.symmetry_from_f(ch, f)).verdict == "pass"
    # phi_i = v_i^{1,0} is not a symmetry: the image carries v_i^{1,1} v_j^{1,0} terms
    bad = fce.cochain1(ch, {
        ((1,), 1): Expr.wrap(fc(1, (1,), ())),
        ((2,), 1): Expr.wrap(fc(1, (2,), ())),
    })
    rep = fce.is_symmetry(ch, bad)
    assert rep.verdict == "fail"
    expected = (
        fc(1, (2,), (1,)) * fc(1, (1,), ()) - fc(1, (1,), (1,)) * fc(1, (2,), ())
    )
    assert fce.dfc(bad).component((1, 2), 1) == expected
    assert fce.is_symmetry(ch, fce.cochain1(ch, {})).verdict == "pass"


def test_recover_f_round_trip(ch2):
    rng = random.Random(25)
    pool = fc_pool(2, 2, max_i=1, max_a=1)
    for _ in range(10):
        f = fce.cochain0(ch2, [rand_expr(rng, pool, terms=2), rand_expr(rng, pool, terms=2)])
        phi = fce.symmetry_from_f(ch2, f)
        assert fce.recover_f(ch2, phi) == f


def test_recover_f_named_examples(ch2):
    # product of the two fiber coordinates
    f = fce.cochain0(ch2, [v(1) * v(2), ZERO])
    assert fce.recover_f(ch2, fce.symmetry_from_f(ch2, f)) == f
    # the constant section e1 from its cocycle -v_i^{a,1}
    phi = fce.cochain1(ch2, {
        ((i,), a): -Expr.wrap(fc(a, (i,), (1,))) for i in (1, 2) for a in (1, 2)
    })
    got = fce.recover_f(ch2, phi)
    assert got == fce.cochain0(ch2, [ONE, ZERO])
    # zero is recovered uniquely
    assert fce.recover_f(ch2, fce.cochain1(ch2, {})) == fce.cochain0(ch2, [ZERO, ZERO])


def test_recover_f_rejects_non_cocycles(ch):
    bad = fce.cochain1(ch, {((1,), 1): Expr.wrap(fc(1, (1,), ()))})
    with pytest.raises(ValueError):
        fce.recover_f(ch, bad)


def test_recover_f_bounded_no_is_bound_relative(ch):
    # force an ansatz too small to contain the true f
    f = fce.cochain0(ch, [v(1) ** 3])
    phi = fce.symmetry_from_f(ch, f)
    tiny = AnsatzSpec(symbols=(v(1),), degree=1)
    assert fce.recover_f(ch, phi, tiny) is None
    assert fce.recover_f(ch, phi) == f  # default bounds do contain it


def test_prolong_symmetry_examples(ch2):
    e1 = fce.cochain0(ch2, [ONE, ZERO])
    t1 = fc(1, (1,), ())
    t2 = fc(1, (1,), (2,))
    got = fce.prolong_symmetry(ch2, e1, [t1, t2])
    assert got[t1] == -Expr.wrap(fc(1, (1,), (1,)))
    assert got[t2] == -Expr.wrap(fc(1, (1,), (1, 2)))
    zero = fce.cochain0(ch2, [ZERO, ZERO])
    assert all(e.is_zero() for e in fce.prolong_symmetry(ch2, zero, [t1, t2]).values())
    with pytest.raises(ValueError):
        fce.prolong_symmetry(ch2, e1, [v(1)])


def test_bracket0_examples(ch2):
    e1 = fce.cochain0(ch2, [ONE, ZERO])
    e2 = fce.cochain0(ch2, [ZERO, ONE])
    assert fce.bracket0(ch2, e1, e2).is_zero()


def test_bracket0_v_against_one():
    ch = fce.FcChart(2, 1)
    f = fce.cochain0(ch, [Expr.wrap(v(1))])
    g = fce.cochain0(ch, [ONE])
    assert fce.bracket0(ch, f, g) == fce.cochain0(ch, [-ONE])


def test_bracket0_antisymmetry_and_jacobi(ch2):
    rng = random.Random(26)
    pool = fc_pool(2, 2, max_i=1, max_a=1)
    for _ in range(5):
        f, g, h = (
            fce.cochain0(ch2, [rand_expr(rng, pool, terms=2), rand_expr(rng, pool, terms=2)])
            for _ in range(3)
        )
        assert fce.bracket0(ch2, f, f).is_zero()
        fg, gf = fce.bracket0(ch2, f, g), fce.bracket0(ch2, g, f)
        assert all((a + b).is_zero() for a, b in zip(fg.data, gf.data))
        j = [
            fce.bracket0(ch2, f, fce.bracket0(ch2, g, h)),
            fce.bracket0(ch2, g, fce.bracket0(ch2, h, f)),
            fce.bracket0(ch2, h, fce.bracket0(ch2, f, g)),
        ]
        assert all((a + b + c).is_zero() for a, b, c in zip(*[t.data for t in j]))


def test_commutator_oracle(ch2):
    rng = random.Random(27)
    pool = fc_pool(2, 2, max_i=1, max_a=1)
    targets = [Expr.wrap(s) for s in [v(1), v(2)] + fc_symbols(2, 2, 2, 2)]
    for _ in range(2):
        f = fce.cochain0(ch2, [rand_expr(rng, pool, terms=2), rand_expr(rng, pool, terms=2)])
        g = fce.cochain0(ch2, [rand_expr(rng, pool, terms=2), rand_expr(rng, pool, terms=2)])
        fg = fce.bracket0(ch2, f, g)
        for s in targets:
            lhs = fce.symmetry_action(ch2, fg, s)
            rhs = fce.symmetry_action(ch2, f, fce.symmetry_action(ch2, g, s)) - \
                fce.symmetry_action(ch2, g, fce.symmetry_action(ch2, f, s))
            assert lhs == rhs
