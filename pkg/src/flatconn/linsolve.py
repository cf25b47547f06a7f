"""Bounded polynomial ansaetze and exact linear solving over Q.

The exactness and lifting questions in this package reduce to: does a linear
operator equation have a polynomial solution whose monomials come from a
declared finite pool?  An :class:`AnsatzSpec` fixes the pool (allowed symbols
and a total-degree cap) and generates undetermined coefficients as fresh
parameter symbols; :func:`solve_undetermined` extracts the linear system by
collecting monomials and runs exact Gaussian elimination.

A "no solution" answer is always relative to the ansatz (bounded-no).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple

from .expr import Expr, KIND_PARAM, ONE, Symbol, ZERO, param

__all__ = ["AnsatzSpec", "solve_undetermined", "solve_linear", "NonlinearSystem"]


class NonlinearSystem(ValueError):
    """The residuals are not linear in the undetermined coefficients."""


_UNKNOWN_PREFIX = "_c_"


@dataclass
class AnsatzSpec:
    """A finite monomial pool: ``symbols`` up to total degree ``degree``.

    ``params`` records every undetermined coefficient this spec has generated
    (one batch per :meth:`general_element` call).
    """

    symbols: Tuple[Symbol, ...]
    degree: int
    params: List[Symbol] = field(default_factory=list)
    _counter: int = 0

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree bound must be nonnegative")
        ordered = tuple(sorted(set(self.symbols), key=lambda s: s.key))
        if any(s.name.startswith(_UNKNOWN_PREFIX) for s in ordered if s.kind == KIND_PARAM):
            raise ValueError("ansatz symbols collide with generated unknowns")
        self.symbols = ordered

    def monomials(self) -> List[Expr]:
        """All monomials of the pool, in a deterministic order."""
        out = [ONE]
        for d in range(1, self.degree + 1):
            for combo in combinations_with_replacement(self.symbols, d):
                mono = []
                for s in combo:
                    if mono and mono[-1][0] is s:
                        mono[-1] = (s, mono[-1][1] + 1)
                    else:
                        mono.append((s, 1))
                out.append(Expr({tuple(mono): Fraction(1)}))
        return out

    def general_element(self, tag: str = "c") -> Tuple[Expr, List[Symbol]]:
        """sum_j c_j mu_j with fresh undetermined coefficients c_j."""
        coeffs = []
        e = ZERO
        for mono in self.monomials():
            c = param("%s%s_%d" % (_UNKNOWN_PREFIX, tag, self._counter))
            self._counter += 1
            coeffs.append(c)
            e = e + c * mono
        self.params.extend(coeffs)
        return e, coeffs


def _linear_rows(residuals: Sequence[Expr], unknowns: Sequence[Symbol]):
    """Collect the system {residual == 0 identically} as rows over Q.

    Each row is (coeffs: dict col -> Fraction, const: Fraction) representing
    sum coeffs[j] x_j + const = 0; rows are keyed by (residual index, carrier
    monomial) and returned in a deterministic order.
    """
    index = {s: j for j, s in enumerate(unknowns)}
    rows: Dict[tuple, Tuple[Dict[int, Fraction], List[Fraction]]] = {}
    for ridx, e in enumerate(residuals):
        for mono, c in Expr.wrap(e).terms.items():
            cols = [(s, p) for s, p in mono if s in index]
            rest = tuple(sp for sp in mono if sp[0] not in index)
            key = (ridx, rest)
            row = rows.get(key)
            if row is None:
                row = ({}, [Fraction(0)])
                rows[key] = row
            if not cols:
                row[1][0] += c
            elif len(cols) == 1 and cols[0][1] == 1:
                j = index[cols[0][0]]
                row[0][j] = row[0].get(j, Fraction(0)) + c
            else:
                raise NonlinearSystem("monomial %r is nonlinear in the unknowns" % (mono,))
    ordered = []
    for key in sorted(rows, key=lambda k: (k[0], tuple((s.key, p) for s, p in k[1]))):
        coeffs, const = rows[key]
        coeffs = {j: q for j, q in coeffs.items() if q}
        ordered.append((coeffs, const[0]))
    return ordered


def solve_linear(rows) -> Optional[Dict[int, Fraction]]:
    """One exact solution of the sparse system, or None if inconsistent.

    Free columns are set to zero.  The system is first split into connected
    components (rows sharing no columns are independent); fully homogeneous
    components are solved by zero without elimination, the rest are reduced
    incrementally against a pivot basis with deterministic min-column
    pivoting.
    """
    # Union-find over columns to split independent blocks.
    parent: Dict[int, int] = {}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for coeffs, const in rows:
        cols = list(coeffs)
        for c in cols:
            parent.setdefault(c, c)
        for a, b in zip(cols, cols[1:]):
            union(a, b)

    blocks: Dict[Optional[int], list] = {}
    for coeffs, const in rows:
        root = find(next(iter(coeffs))) if coeffs else None
        blocks.setdefault(root, []).append((coeffs, const))

    solution: Dict[int, Fraction] = {}
    for root, block in blocks.items():
        if root is None:
            if any(const != 0 for _, const in block):
                return None
            continue
        if all(const == 0 for _, const in block):
            continue  # homogeneous block: the zero solution works
        partial = _eliminate(block)
        if partial is None:
            return None
        solution.update(partial)
    return solution


def _eliminate(rows) -> Optional[Dict[int, Fraction]]:
    pivots: Dict[int, Tuple[Dict[int, Fraction], Fraction]] = {}
    for coeffs, const in rows:
        row = dict(coeffs)
        rhs = const
        while row:
            hit = None
            for c in row:
                if c in pivots and (hit is None or c < hit):
                    hit = c
            if hit is None:
                break
            prow, prhs = pivots[hit]
            factor = row.pop(hit)
            for c, q in prow.items():
                if c == hit:
                    continue
                acc = row.get(c, Fraction(0)) - factor * q
                if acc:
                    row[c] = acc
                else:
                    row.pop(c, None)
            rhs -= factor * prhs
        if not row:
            if rhs != 0:
                return None
            continue
        lead = min(row)
        inv = 1 / row[lead]
        row = {c: q * inv for c, q in row.items()}
        pivots[lead] = (row, rhs * inv)
    out: Dict[int, Fraction] = {}
    for c in sorted(pivots, reverse=True):
        prow, prhs = pivots[c]
        # Row reads: x_c + sum_{c' > c} q x_{c'} + rhs = 0.
        val = -prhs
        for cc, q in prow.items():
            if cc != c:
                val -= q * out.get(cc, Fraction(0))
        out[c] = val
    return out


def solve_undetermined(
    residuals: Sequence[Expr], unknowns: Sequence[Symbol]
) -> Optional[Dict[Symbol, Fraction]]:
    """Values for the unknowns making every residual vanish identically.

    Returns None when the system is inconsistent (bounded-no at the caller's
    ansatz).  Unknowns not constrained by any equation come back as zero.
    """
    rows = _linear_rows(residuals, unknowns)
    sol = solve_linear(rows)
    if sol is None:
        return None
    return {s: sol.get(j, Fraction(0)) for j, s in enumerate(unknowns)}


def solve_by_superposition(
    images: Sequence[Sequence[Expr]], target: Sequence[Expr]
) -> Optional[List[Fraction]]:
    """Coefficients c with sum_j c_j images[j] == target componentwise.

    ``images[j]`` holds the components of a linear operator applied to the
    j-th basis element; exploiting linearity this way avoids symbolic
    undetermined coefficients entirely.  Returns None when no combination
    exists (bounded-no at the basis).
    """
    ncomp = len(target)
    rows: Dict[tuple, Tuple[Dict[int, Fraction], List[Fraction]]] = {}

    def row_for(comp: int, mono) -> Tuple[Dict[int, Fraction], List[Fraction]]:
        key = (comp, mono)
        row = rows.get(key)
        if row is None:
            row = ({}, [Fraction(0)])
            rows[key] = row
        return row

    for j, comps in enumerate(images):
        if len(comps) != ncomp:
            raise ValueError("image %d has %d components, expected %d"
                             % (j, len(comps), ncomp))
        for ci, e in enumerate(comps):
            for mono, q in Expr.wrap(e).terms.items():
                coeffs, _ = row_for(ci, mono)
                coeffs[j] = coeffs.get(j, Fraction(0)) + q
    for ci, e in enumerate(target):
        for mono, q in Expr.wrap(e).terms.items():
            row_for(ci, mono)[1][0] -= q
    ordered = []
    for key in sorted(rows, key=lambda k: (k[0], tuple((s.key, p) for s, p in k[1]))):
        coeffs, const = rows[key]
        coeffs = {j: q for j, q in coeffs.items() if q}
        ordered.append((coeffs, const[0]))
    sol = solve_linear(ordered)
    if sol is None:
        return None
    return [sol.get(j, Fraction(0)) for j in range(len(images))]
