"""Flat representations of differential equations.

A flat representation over a scheme whose directions split into base
directions x_1..x_{n'} and fiber directions (coverings contribute trivial
y-fibers, the self-dual Yang-Mills example also reclassifies two genuine
independents as fiber directions) is the family of fields

    F_i = D_{x_i} + sum_d a_i^d D_d,   i over base directions,

subject to [F_i, F_j] = 0.  This module verifies that condition, realizes
the induced morphism onto the equation of flat connections as a pullback of
coordinates, differentiates parametric families into deformation 1-cocycles,
tests cocycles for exactness inside a bounded ansatz, and lifts equation
symmetries to the covering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .expr import (
    KIND_BASEFIBER, KIND_FC, KIND_FIBER, KIND_INDEP, KIND_JET, KIND_PARAM,
    Expr, ONE, Symbol, ZERO, fc, jet as jet_symbol, param, render, y,
)
from .jets import (
    DerivScheme, Evolution, Extended, evolutionary_apply, is_symmetry_evolution,
    total_derivative,
)
from .linsolve import AnsatzSpec, solve_by_superposition
from .reports import FAIL, PASS, Report
from .vforms import Derivation

__all__ = [
    "FlatRepSpec", "AnsatzSpec", "check_flat_rep", "pullback",
    "infinitesimal_deformation", "DeformationResult", "exactness_test",
    "symmetry_cocycle", "lift_symmetry", "covering_to_flatrep",
    "du_vertical", "du_cochain1", "is_closed", "default_ansatz",
]

# Cochains of the representation complex: (base direction, fiber direction)
# -> coefficient for degree 1, (i, j, fiber) -> coefficient for degree 2.
Cochain1 = Dict[Tuple[int, int], Expr]


@dataclass
class FlatRepSpec:
    """Declarative flat representation: scheme, direction split, coefficients."""

    scheme: DerivScheme
    base_dirs: Tuple[int, ...]
    fiber_dirs: Tuple[int, ...]
    coeffs: Dict[Tuple[int, int], Expr] = field(default_factory=dict)
    _valid: bool = field(default=False, repr=False)

    def __post_init__(self):
        seen = set(self.base_dirs) | set(self.fiber_dirs)
        if len(seen) != len(self.base_dirs) + len(self.fiber_dirs):
            raise ValueError("base and fiber directions overlap")
        for d in seen:
            self.scheme.check_direction(d)
        cleaned = {}
        for (i, d), e in self.coeffs.items():
            if i not in self.base_dirs or d not in self.fiber_dirs:
                raise ValueError("coefficient a_%d^%d outside the declared split" % (i, d))
            e = Expr.wrap(e)
            if not e.is_zero():
                cleaned[(i, d)] = e
        self.coeffs = cleaned

    def a(self, i: int, d: int) -> Expr:
        return self.coeffs.get((i, d), ZERO)

    def derivation(self, i: int) -> Derivation:
        """F_i = D_{x_i} + sum_d a_i^d D_d."""
        dirs = {i: ONE}
        for d in self.fiber_dirs:
            dirs[d] = self.a(i, d)
        return Derivation(self.scheme, dirs=dirs)

    def f_apply(self, i: int, e: Expr) -> Expr:
        out = total_derivative(self.scheme, i, e)
        for d in self.fiber_dirs:
            a = self.a(i, d)
            if not a.is_zero():
                out = out + a * total_derivative(self.scheme, d, e)
        return out

    def fiber_coord(self, d: int) -> Symbol:
        return self.scheme.indep(d)

    def subs(self, bindings: Mapping[Symbol, Expr]) -> "FlatRepSpec":
        return FlatRepSpec(
            self.scheme,
            self.base_dirs,
            self.fiber_dirs,
            {key: e.subs(bindings) for key, e in self.coeffs.items()},
        )


def check_flat_rep(spec: FlatRepSpec) -> Report:
    """Residuals of [F_i, F_j] = 0 for i < j, one per fiber direction."""
    residuals = []
    ok = True
    for ai, i in enumerate(spec.base_dirs):
        for j in spec.base_dirs[ai + 1:]:
            bracket = spec.derivation(i).bracket(spec.derivation(j))
            for b in spec.base_dirs:
                if b in bracket.dirs:  # pragma: no cover - scheme contract
                    raise AssertionError("commutator has a horizontal component")
            for d in spec.fiber_dirs:
                r = bracket.dirs.get(d, ZERO)
                residuals.append(render(r))
                ok = ok and r.is_zero()
    spec._valid = ok
    return Report(task="check-flatrep", verdict=PASS if ok else FAIL, residuals=residuals)


def _require_valid(spec: FlatRepSpec) -> None:
    if not spec._valid and not check_flat_rep(spec).ok:
        raise ValueError("flat representation does not satisfy [F_i, F_j] = 0")


def pullback(spec: FlatRepSpec, f: Expr) -> Expr:
    """Image of a function on the equation of flat connections under the
    morphism determined by the representation.

    phi*(x_i) = i-th base coordinate, phi*(v^a) = a-th fiber coordinate,
    phi*(v_{Ii}^{a,0}) = F_i phi*(v_I^{a,0}) with phi*(v_i^{a,0}) = a_i^a,
    and phi*(v_I^{a,A+b}) = D_{fiber b} phi*(v_I^{a,A}); flatness makes the
    recursion order irrelevant.
    """
    _require_valid(spec)
    memo = getattr(spec, "_pullback_memo", None)
    if memo is None:
        memo = spec._pullback_memo = {}

    n, m = len(spec.base_dirs), len(spec.fiber_dirs)

    def image(s: Symbol) -> Expr:
        got = memo.get(s)
        if got is not None:
            return got
        k = s.kind
        if k == KIND_INDEP and s.index <= n:
            out = Expr.wrap(spec.scheme.indep(spec.base_dirs[s.index - 1]))
        elif k == KIND_FC:
            if s.index > m or any(i > n for i in s.ii) or any(a > m for a in s.aa):
                raise ValueError("symbol %s outside the matching fc chart" % render(s))
            if s.aa:
                beta = s.aa[-1]
                prev = image(fc(s.index, s.ii, s.aa[:-1]))
                out = total_derivative(spec.scheme, spec.fiber_dirs[beta - 1], prev)
            elif len(s.ii) == 1:
                out = spec.a(spec.base_dirs[s.ii[0] - 1], spec.fiber_dirs[s.index - 1])
            else:
                prev = image(fc(s.index, s.ii[:-1], ()))
                out = spec.f_apply(spec.base_dirs[s.ii[-1] - 1], prev)
        elif k == KIND_BASEFIBER and s.index <= m:
            out = Expr.wrap(spec.fiber_coord(spec.fiber_dirs[s.index - 1]))
        elif k == KIND_PARAM:
            out = Expr.wrap(s)
        else:
            raise ValueError("symbol %s is foreign to the fc chart" % render(s))
        memo[s] = out
        return out

    f = Expr.wrap(f)
    return f.subs({s: image(s) for s in f.symbols() if s.kind != KIND_PARAM})


def _coeff_derivative(spec: FlatRepSpec, c: int, i: int, d: int) -> Expr:
    """D_c(a_i^d), cached per spec (hit once per basis element otherwise)."""
    memo = getattr(spec, "_dcoeff_memo", None)
    if memo is None:
        memo = spec._dcoeff_memo = {}
    got = memo.get((c, i, d))
    if got is None:
        got = memo[(c, i, d)] = total_derivative(spec.scheme, c, spec.a(i, d))
    return got


def du_vertical(spec: FlatRepSpec, vert: Mapping[int, Expr]) -> Cochain1:
    """d_U(V) for a vertical field V = sum_d b^d D_d:
    component (i, d) = F_i(b^d) - V(a_i^d)."""
    out: Cochain1 = {}
    for i in spec.base_dirs:
        for d in spec.fiber_dirs:
            val = spec.f_apply(i, Expr.wrap(vert.get(d, ZERO)))
            for c in spec.fiber_dirs:
                b = Expr.wrap(vert.get(c, ZERO))
                if not b.is_zero():
                    val = val - b * _coeff_derivative(spec, c, i, d)
            if not val.is_zero():
                out[(i, d)] = val
    return out


def du_cochain1(spec: FlatRepSpec, c: Cochain1) -> Dict[Tuple[int, int, int], Expr]:
    """d_U on 1-cochains; component (i, j, d) for i < j."""
    out: Dict[Tuple[int, int, int], Expr] = {}
    for ai, i in enumerate(spec.base_dirs):
        for j in spec.base_dirs[ai + 1:]:
            for d in spec.fiber_dirs:
                val = spec.f_apply(i, Expr.wrap(c.get((j, d), ZERO)))
                val = val - spec.f_apply(j, Expr.wrap(c.get((i, d), ZERO)))
                for e in spec.fiber_dirs:
                    cj = Expr.wrap(c.get((j, e), ZERO))
                    ci = Expr.wrap(c.get((i, e), ZERO))
                    if not cj.is_zero():
                        val = val - cj * total_derivative(spec.scheme, e, spec.a(i, d))
                    if not ci.is_zero():
                        val = val + ci * total_derivative(spec.scheme, e, spec.a(j, d))
                if not val.is_zero():
                    out[(i, j, d)] = val
    return out


def is_closed(spec: FlatRepSpec, c: Cochain1) -> bool:
    return not du_cochain1(spec, c)


@dataclass
class DeformationResult:
    base: FlatRepSpec
    cocycle: Cochain1
    report: Report


def infinitesimal_deformation(
    family: FlatRepSpec, p: Symbol, at: Optional[Fraction] = None
) -> DeformationResult:
    """Infinitesimal part of a parametric family of flat representations.

    The family must be flat identically in the parameter.  The cocycle is the
    epsilon-coefficient after shifting p -> p0 + eps (p0 = ``at``, or the
    symbolic parameter itself when ``at`` is None); its closedness is
    verified, not assumed.
    """
    if p.kind != KIND_PARAM:
        raise ValueError("deformation parameter must be a parameter symbol")
    if not check_flat_rep(family).ok:
        raise ValueError("family is not flat for the symbolic parameter")
    eps = param("_eps")
    base_point = Expr.wrap(p if at is None else Fraction(at))
    cocycle: Cochain1 = {}
    for (i, d), e in family.coeffs.items():
        shifted = e.subs({p: base_point + eps})
        u1 = shifted.coefficient(eps, 1)
        if not u1.is_zero():
            cocycle[(i, d)] = u1
    base = family if at is None else family.subs({p: Expr.wrap(Fraction(at))})
    check_flat_rep(base)
    residuals = du_cochain1(base, cocycle)
    report = Report(
        task="deformation",
        verdict=PASS if not residuals else FAIL,
        residuals=[render(e) for e in residuals.values()] or ["0"],
    )
    if residuals:  # pragma: no cover - guaranteed by the flatness identity
        raise AssertionError("deformation cocycle is not closed")
    return DeformationResult(base=base, cocycle=cocycle, report=report)


def exactness_test(
    spec: FlatRepSpec, c: Cochain1, ansatz: AnsatzSpec
) -> Optional[Dict[int, Expr]]:
    """Solve d_U(V) = c for a vertical field V inside the ansatz.

    Returns the witness components {fiber direction: b^d} or None
    (bounded-no).  A returned witness has been re-substituted into d_U and
    checked against c exactly.
    """
    _require_valid(spec)
    if not is_closed(spec, c):
        raise ValueError("cochain is not closed; exactness is ill-posed")
    monos = ansatz.monomials()
    keys = [(i, d) for i in spec.base_dirs for d in spec.fiber_dirs]
    images = []
    for d in spec.fiber_dirs:
        for mu in monos:
            img = du_vertical(spec, {d: mu})
            images.append([img.get(k, ZERO) for k in keys])
    coeffs = solve_by_superposition(images, [c.get(k, ZERO) for k in keys])
    if coeffs is None:
        return None
    witness: Dict[int, Expr] = {}
    for di, d in enumerate(spec.fiber_dirs):
        acc = ZERO
        for j, mu in enumerate(monos):
            q = coeffs[di * len(monos) + j]
            if q:
                acc = acc + q * mu
        witness[d] = acc
    back = du_vertical(spec, witness)
    for i in spec.base_dirs:
        for d in spec.fiber_dirs:
            if back.get((i, d), ZERO) != c.get((i, d), ZERO):  # pragma: no cover
                raise AssertionError("exactness witness fails verification")
    return witness


def symmetry_cocycle(spec: FlatRepSpec, phi: Sequence[Expr], check: bool = True) -> Cochain1:
    """c_S = [[U, S]] for the lift of the equation symmetry with generating
    functions phi; component (i, d) = -S(a_i^d)."""
    if check:
        base = spec.scheme.base if isinstance(spec.scheme, Extended) else spec.scheme
        if not isinstance(base, Evolution):
            raise ValueError("symmetry check requires an evolution scheme underneath")
        if not is_symmetry_evolution(base, phi).ok:
            raise ValueError("phi is not a symmetry of the underlying equation")
    out: Cochain1 = {}
    for (i, d), a in spec.coeffs.items():
        val = -evolutionary_apply(spec.scheme, phi, a)
        if not val.is_zero():
            out[(i, d)] = val
    return out


def lift_symmetry(
    spec: FlatRepSpec, phi: Sequence[Expr], ansatz: AnsatzSpec, check: bool = True
) -> Optional[Dict[int, Expr]]:
    """Fiber components of a lift of the symmetry phi to the covering.

    Solves the exactness problem for c_S; the lifted symmetry is
    Ev_phi + sum_d a^d D_d with a^d = -b^d for the exactness witness V.
    Returns None when no lift exists inside the ansatz (bounded-no).
    """
    _require_valid(spec)
    c = symmetry_cocycle(spec, phi, check=check)
    witness = exactness_test(spec, c, ansatz)
    if witness is None:
        return None
    lift = {d: -witness[d] for d in spec.fiber_dirs}
    for i in spec.base_dirs:
        for d in spec.fiber_dirs:
            res = spec.f_apply(i, lift[d]) - evolutionary_apply(spec.scheme, phi, spec.a(i, d))
            for e in spec.fiber_dirs:
                if not lift[e].is_zero():
                    res = res - lift[e] * total_derivative(spec.scheme, e, spec.a(i, d))
            if not res.is_zero():  # pragma: no cover - solver safety net
                raise AssertionError("lift witness fails the commutation condition")
    return lift


def covering_to_flatrep(
    base: DerivScheme, fields: Mapping[int, Mapping[int, Expr]], nfibers: int
) -> FlatRepSpec:
    """Trivially extend an equation by fibers y^b and package vertical fields
    X_i = sum_b a_i^b D_{y^b} as a flat-representation candidate.

    check_flat_rep on the result is exactly the covering condition
    [D_i + X_i, D_j + X_j] = 0.  Input must be vertical: coefficients may
    involve the base chart and the declared fibers only.
    """
    if nfibers < 1:
        raise ValueError("need at least one fiber")
    fibers = tuple(y(b) for b in range(1, nfibers + 1))
    ext = Extended(base, fibers)
    coeffs: Dict[Tuple[int, int], Expr] = {}
    for i, comps in fields.items():
        base.check_direction(i)
        for b, e in comps.items():
            if not 1 <= b <= nfibers:
                raise ValueError("fiber index %d out of range" % b)
            e = Expr.wrap(e)
            for s in e.symbols():
                if s.kind == KIND_FIBER:
                    if s not in fibers:
                        raise ValueError("undeclared fiber %s in covering field" % render(s))
                elif s.kind not in (KIND_JET, KIND_INDEP, KIND_PARAM):
                    raise ValueError(
                        "covering fields must be vertical over the equation chart; got %s"
                        % render(s)
                    )
            coeffs[(i, base.ndirs + b)] = e
    return FlatRepSpec(
        scheme=ext,
        base_dirs=tuple(range(1, base.ndirs + 1)),
        fiber_dirs=tuple(range(base.ndirs + 1, base.ndirs + nfibers + 1)),
        coeffs=coeffs,
    )


def default_ansatz(
    spec: FlatRepSpec,
    extra: Sequence[Expr] = (),
    degree: Optional[int] = None,
    order: Optional[int] = None,
) -> AnsatzSpec:
    """Default bounded ansatz for exactness/lifting over a representation.

    Pool: base and fiber coordinates, jet variables up to the maximal order
    seen in the data plus one, and every parameter present.  Degree bound:
    maximal total degree seen plus one.  ``degree``/``order`` override.
    """
    exprs = list(spec.coeffs.values()) + [Expr.wrap(e) for e in extra]
    max_deg = 0
    max_ord = 0
    deps = set()
    params = set()
    for e in exprs:
        max_deg = max(max_deg, e.total_degree())
        for s in e.symbols():
            if s.kind == KIND_JET:
                max_ord = max(max_ord, len(s.sigma))
                deps.add(s.index)
            elif s.kind == KIND_PARAM:
                params.add(s)
    degree = max_deg + 1 if degree is None else degree
    order = max_ord + 1 if order is None else order
    pool = set(params)
    for i in range(1, spec.scheme.ndirs + 1):
        pool.add(spec.scheme.indep(i))
    for alpha in sorted(deps):
        for k in range(order + 1):
            pool.add(jet_symbol(alpha, (1,) * k))
    return AnsatzSpec(symbols=tuple(sorted(pool, key=lambda s: s.key)), degree=degree)
