"""The equation of flat connections and its symmetry calculus.

On the equation of flat connections, the functions v_I^{a,A} (printed
v[a;I;A]) form a coordinate system; the library implements the total
derivatives D_i and the vertical derivatives D_{v^b} directly in this chart,
the differential d_fc of the vertical complex, and the dictionary between
symmetries and single functions f = (f^a): every symmetry generating section
is phi_i^a = D_i(f^a) - v_i^{a,b} f^b, and f is recoverable from phi.

Run:  python3 demos/02_fce_symmetries.py
"""

from flatconn.expr import Expr, fc, render, v, x
from flatconn import fce

chart = fce.FcChart(n=2, m=1)

# --- the two generating derivations -----------------------------------------

print("D_1(v1)          =", render(fce.fc_total(chart, 1, Expr.wrap(v(1)))))
print("D_1(v[1;2;])     =", render(fce.fc_total(chart, 1, Expr.wrap(fc(1, (2,), ())))))
print("D_1(v[1;2;1])    =", render(fce.fc_total(chart, 1, Expr.wrap(fc(1, (2,), (1,))))))
print("D_{v^1}(v[1;2;]) =", render(fce.fc_vertical(chart, 1, Expr.wrap(fc(1, (2,), ())))))

# --- the differential and its square ----------------------------------------

f = fce.cochain0(chart, [Expr.wrap(v(1))])
phi = fce.symmetry_from_f(chart, f)
print("\nsymmetry of f = v1:")
for (dirs, alpha), e in sorted(phi.items()):
    print("  phi_%d = %s" % (dirs[0], render(e)))
print("d_fc(phi) =", fce.dfc(phi))
print("is_symmetry:", fce.is_symmetry(chart, phi).verdict)

# --- recovery: the complex is 0- and 1-acyclic -------------------------------

recovered = fce.recover_f(chart, phi)
print("recover_f gives back f = v1:", recovered == f)

# a 1-cochain that is NOT closed is not a symmetry
bad = fce.cochain1(chart, {
    ((1,), 1): Expr.wrap(fc(1, (1,), ())),
    ((2,), 1): Expr.wrap(fc(1, (2,), ())),
})
print("phi_i = v_i is a symmetry:", fce.is_symmetry(chart, bad).verdict)

# --- the induced bracket on 0-cochains ---------------------------------------

g = fce.cochain0(chart, [Expr.wrap(1) + Expr.wrap(0)])
print("\n{v1, 1} =", fce.bracket0(chart, f, g))

# the bracket mirrors the commutator of the prolonged symmetry fields
s = Expr.wrap(fc(1, (1,), ()))
lhs = fce.symmetry_action(chart, fce.bracket0(chart, f, g), s)
rhs = fce.symmetry_action(chart, f, fce.symmetry_action(chart, g, s)) - \
    fce.symmetry_action(chart, g, fce.symmetry_action(chart, f, s))
print("commutator oracle at v[1;1;]:", render(lhs), "==", render(rhs))
