"""Command line front end: bind problem files to library operations.

Exit codes: 0 for pass/witness verdicts, 1 for fail/bounded-no, 2 for input
errors (bad flags, unreadable files, parse or validation failures).
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from typing import Dict, List, Optional

from .expr import Expr, ZERO, jet, param, render, x, y
from .jets import Evolution, is_symmetry_evolution
from .linsolve import AnsatzSpec
from . import fce, flatrep, problems, sdym
from .kdv import build_kdv, miura_at
from .reports import BOUNDED_NO, FAIL, PASS, Report, WITNESS, emit_report

__all__ = ["run", "main"]

_FILE_TASKS = (
    "check-flat", "dfc", "symmetry-from-f", "recover-f", "bracket",
    "check-flatrep", "pullback", "deformation", "exactness", "lift",
)
_BUILTIN_TASKS = (
    "kdv-verify", "kdv-lift", "kdv-deformation",
    "sdym-expand", "sdym-flatrep", "sdym-ugh",
)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flatconn", description=__doc__)
    sub = p.add_subparsers(dest="task", required=True)

    def common(sp):
        fmt = sp.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="JSON report")
        fmt.add_argument("--human", action="store_true", help="line-oriented report (default)")
        sp.add_argument("--degree", type=int, help="ansatz total-degree bound override")
        sp.add_argument("--order", type=int, help="ansatz jet-order bound override")
        sp.add_argument("--lambda", dest="lam", type=Fraction,
                        help="rational parameter value (symbolic when omitted)")
        sp.add_argument("--k", type=int, default=2, help="matrix size for sdym tasks")

    for name in _FILE_TASKS:
        sp = sub.add_parser(name)
        sp.add_argument("problem", help="problem file path")
        common(sp)
    for name in _BUILTIN_TASKS:
        sp = sub.add_parser(name)
        if name == "kdv-lift":
            sp.add_argument("name", help="symmetry name (x-translation, t-translation, "
                                         "galilean, scaling)")
        if name == "sdym-ugh":
            sp.add_argument("--h", default="a1", choices=("a1", "const"),
                            help="gauge generator choice")
        common(sp)
    return p


def _load(args) -> problems.ProblemFile:
    with open(args.problem, "r", encoding="utf-8") as fh:
        text = fh.read()
    pf = problems.parse_problem(text)
    if pf.task is not None and pf.task != args.task:
        raise ValueError("problem file declares task %r, invoked as %r" % (pf.task, args.task))
    pf.task = args.task
    problems._check_sections(pf)
    return pf


def _sym_components(pf: problems.ProblemFile, fam: str) -> List[Expr]:
    bucket = pf.symmetry.get(fam)
    if not bucket:
        raise ValueError("[symmetry] must bind %s1..%s%d" % (fam, fam, pf.m))
    return [bucket.get((a,), ZERO) for a in range(1, pf.m + 1)]


def _fc_cochain1(pf: problems.ProblemFile) -> fce.Cochain:
    bucket = pf.symmetry.get("phi")
    if not bucket:
        raise ValueError("[symmetry] must bind phi<i>_<a> components")
    chart = pf.fc_chart()
    return fce.cochain1(chart, {((i,), a): e for (i, a), e in bucket.items()})


def _cochain_witness(c: fce.Cochain, m: int) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for (dirs, alpha), e in sorted(c.items()):
        tag = "".join(str(i) for i in dirs)
        key = ("phi%s" % tag) if m == 1 else "phi%s_%d" % (tag, alpha)
        if c.degree == 0:
            key = "f%d" % alpha
        out[key] = render(e)
    if not out:
        out["result"] = "0"
    return out


def _fce_ansatz(pf, args, phi) -> Optional[AnsatzSpec]:
    explicit = pf.ansatz(degree=args.degree)
    if explicit is not None:
        return explicit
    ans = fce.default_recover_ansatz(pf.fc_chart(), phi)
    if args.degree is not None:
        ans = AnsatzSpec(symbols=ans.symbols, degree=args.degree)
    return ans


def _flatrep_ansatz(pf, args, spec, extras) -> AnsatzSpec:
    explicit = pf.ansatz(degree=args.degree) if pf is not None else None
    if explicit is not None:
        return explicit
    return flatrep.default_ansatz(spec, extras, degree=args.degree, order=args.order)


def _bound_note(ansatz: AnsatzSpec) -> Dict[str, str]:
    return {
        "bound_degree": str(ansatz.degree),
        "bound_symbols": ", ".join(render(s) for s in ansatz.symbols),
    }


# ---------------------------------------------------------------------------
# task handlers
# ---------------------------------------------------------------------------

def _t_check_flat(args) -> Report:
    pf = _load(args)
    rs = fce.flatness_residual(pf.connection_spec())
    ok = all(r.is_zero() for r in rs)
    return Report("check-flat", PASS if ok else FAIL, [render(r) for r in rs])


def _t_dfc(args) -> Report:
    pf = _load(args)
    chart = pf.fc_chart()
    if "f" in pf.symmetry:
        c = fce.cochain0(chart, _sym_components(pf, "f"))
    else:
        c = _fc_cochain1(pf)
    image = fce.dfc(c)
    return Report("dfc", PASS, [], _cochain_witness(image, pf.m))


def _t_symmetry_from_f(args) -> Report:
    pf = _load(args)
    chart = pf.fc_chart()
    f = fce.cochain0(chart, _sym_components(pf, "f"))
    phi = fce.symmetry_from_f(chart, f)
    return Report("symmetry-from-f", PASS, [], _cochain_witness(phi, pf.m))


def _t_recover_f(args) -> Report:
    pf = _load(args)
    chart = pf.fc_chart()
    phi = _fc_cochain1(pf)
    ansatz = _fce_ansatz(pf, args, phi)
    f = fce.recover_f(chart, phi, ansatz)
    if f is None:
        return Report("recover-f", BOUNDED_NO, [], _bound_note(ansatz))
    return Report("recover-f", WITNESS, [],
                  {"f%d" % a: render(e) for a, e in enumerate(f.data, 1)})


def _t_bracket(args) -> Report:
    pf = _load(args)
    chart = pf.fc_chart()
    f = fce.cochain0(chart, _sym_components(pf, "f"))
    g = fce.cochain0(chart, _sym_components(pf, "g"))
    h = fce.bracket0(chart, f, g)
    return Report("bracket", PASS, [],
                  {"h%d" % a: render(e) for a, e in enumerate(h.data, 1)})


def _t_check_flatrep(args) -> Report:
    pf = _load(args)
    rep = flatrep.check_flat_rep(pf.flat_representation())
    rep.task = "check-flatrep"
    return rep


def _t_pullback(args) -> Report:
    pf = _load(args)
    spec = pf.flat_representation()
    text = pf.task_options.get("expr")
    if not text:
        raise ValueError("pullback needs an 'expr' option in [task]")
    env = problems._Env(len(spec.base_dirs), len(spec.fiber_dirs), "fc", (), pf.params)
    e = problems._parse_expr(text, env, 0)
    return Report("pullback", PASS, [], {"pullback": render(flatrep.pullback(spec, e))})


def _t_deformation(args) -> Report:
    pf = _load(args)
    spec = pf.flat_representation()
    pname = pf.task_options.get("param")
    if pname is None:
        if len(pf.params) != 1:
            raise ValueError("deformation needs a 'param' option or exactly one parameter")
        pname = pf.params[0]
    elif pname not in pf.params:
        raise ValueError("parameter %r is not declared in the chart" % pname)
    at = args.lam
    if at is None and "at" in pf.task_options:
        at = Fraction(pf.task_options["at"])
    res = flatrep.infinitesimal_deformation(spec, param(pname), at)
    witness = {
        "c%d_%d" % (i, d): render(e) for (i, d), e in sorted(res.cocycle.items())
    }
    return Report("deformation", PASS, res.report.residuals, witness)


def _map_fiber_cochain(pf, spec) -> Dict:
    shift = spec.scheme.base.ndirs
    return {(i, shift + b): e for (i, b), e in pf.cochain.items()}


def _t_exactness(args) -> Report:
    pf = _load(args)
    spec = pf.flat_representation()
    if not flatrep.check_flat_rep(spec).ok:
        raise ValueError("the declared representation is not flat")
    c = _map_fiber_cochain(pf, spec)
    ansatz = _flatrep_ansatz(pf, args, spec, list(c.values()))
    witness = flatrep.exactness_test(spec, c, ansatz)
    if witness is None:
        return Report("exactness", BOUNDED_NO, [], _bound_note(ansatz))
    shift = spec.scheme.base.ndirs
    return Report("exactness", WITNESS, [],
                  {"b%d" % (d - shift): render(e) for d, e in sorted(witness.items())})


def _t_lift(args) -> Report:
    pf = _load(args)
    spec = pf.flat_representation()
    if not flatrep.check_flat_rep(spec).ok:
        raise ValueError("the declared representation is not flat")
    phi = _sym_components(pf, "phi")
    scheme = spec.scheme.base
    if not is_symmetry_evolution(scheme, phi).ok:
        raise ValueError("phi is not a symmetry of the declared equation")
    ansatz = _flatrep_ansatz(pf, args, spec, phi)
    lift = flatrep.lift_symmetry(spec, phi, ansatz, check=False)
    if lift is None:
        return Report("lift", BOUNDED_NO, [], _bound_note(ansatz))
    shift = scheme.ndirs
    return Report("lift", WITNESS, [],
                  {"a%d" % (d - shift): render(e) for d, e in sorted(lift.items())})


def _t_kdv_verify(args) -> Report:
    bundle = build_kdv()
    residuals = list(flatrep.check_flat_rep(bundle.miura).residuals)
    for name in sorted(bundle.symmetries):
        residuals.extend(is_symmetry_evolution(bundle.scheme, [bundle.symmetries[name]]).residuals)
    ok = all(r == "0" for r in residuals)
    return Report("kdv-verify", PASS if ok else FAIL, residuals)


def _t_kdv_lift(args) -> Report:
    bundle = build_kdv()
    if args.name not in bundle.symmetries:
        raise ValueError("unknown KdV symmetry %r (have: %s)"
                         % (args.name, ", ".join(sorted(bundle.symmetries))))
    phi = bundle.symmetries[args.name]
    spec = bundle.miura if args.lam is None else miura_at(bundle, args.lam)
    ansatz = flatrep.default_ansatz(spec, [phi], degree=args.degree, order=args.order)
    lift = flatrep.lift_symmetry(spec, [phi], ansatz)
    if lift is None:
        return Report("kdv-lift", BOUNDED_NO, [], _bound_note(ansatz))
    return Report("kdv-lift", WITNESS, [], {"a": render(lift[3])})


def _t_kdv_deformation(args) -> Report:
    bundle = build_kdv()
    res = flatrep.infinitesimal_deformation(bundle.miura, bundle.lam, args.lam)
    witness = {"c%d" % i: render(e) for (i, _), e in sorted(res.cocycle.items())}
    return Report("kdv-deformation", PASS, res.report.residuals, witness)


def _t_sdym_expand(args) -> Report:
    ms = sdym.lambda_expand(args.k)
    witness = {}
    for deg, m in enumerate(ms):
        for p, row in enumerate(m, 1):
            for q, e in enumerate(row, 1):
                witness["lambda%d_%d%d" % (deg, p, q)] = render(e)
    return Report("sdym-expand", PASS, [], witness)


def _t_sdym_flatrep(args) -> Report:
    rep = sdym.build_flatrep(args.k, args.lam)
    out = flatrep.check_flat_rep(rep.spec)
    out.task = "sdym-flatrep"
    return out


def _t_sdym_ugh(args) -> Report:
    return sdym.verify_ugh(args.k, args.h)


_HANDLERS = {
    "check-flat": _t_check_flat,
    "dfc": _t_dfc,
    "symmetry-from-f": _t_symmetry_from_f,
    "recover-f": _t_recover_f,
    "bracket": _t_bracket,
    "check-flatrep": _t_check_flatrep,
    "pullback": _t_pullback,
    "deformation": _t_deformation,
    "exactness": _t_exactness,
    "lift": _t_lift,
    "kdv-verify": _t_kdv_verify,
    "kdv-lift": _t_kdv_lift,
    "kdv-deformation": _t_kdv_deformation,
    "sdym-expand": _t_sdym_expand,
    "sdym-flatrep": _t_sdym_flatrep,
    "sdym-ugh": _t_sdym_ugh,
}


def run(argv: List[str]) -> int:
    """Execute one task; report to stdout, diagnostics to stderr."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    t0 = time.monotonic()
    try:
        report = _HANDLERS[args.task](args)
    except (problems.ParseError, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    report.ms = int((time.monotonic() - t0) * 1000)
    print(emit_report(report, "json" if args.json else "human"))
    return 0 if report.ok else 1


def main() -> None:  # pragma: no cover - thin wrapper
    sys.exit(run(sys.argv[1:]))
