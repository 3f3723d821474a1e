"""Command-line front end.

    permlab <verb> [options] [--format json|csv|text] [--output PATH]

Exit status: 0 on success, 1 on domain errors (failed preconditions,
infeasibility, order guards, a failing ``verify``), 2 on usage errors and
unreadable or malformed input files.

CSV columns per verb:

    permanent   method,value
    classify    property,value
    bound       n,s,e,value,source,hypotheses_met,reading,supremum,note
    construct   row,<one column per matrix column>
    search      n,s,class,seed,restarts,steps_per_restart,best_value,formula_value,gap,evaluations,feasible,exact_value
    evidence    n,s,observed,block_grid,conjectured_grid,conjectured_formula,conjectured_literal
    evidence --omega3
                s,points,best_value,candidate_a0,candidate_a1,envelope,excess
    verify      name,passed,cases,detail

``transform`` and ``decompose`` always print JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from pathlib import Path

from permlab import bounds, cycles, matrix, permanent, search, serialize, transforms, verify
from permlab.errors import PermlabError
from permlab.serialize import fraction_str, to_jsonable


class InputError(Exception):
    """Unreadable or malformed input file; exit status 2."""


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _load(path: str) -> matrix.Matrix:
    try:
        return matrix.load_matrix(path)
    except OSError as exc:
        raise InputError(f"cannot read matrix file {path}: {exc.strerror or exc}") from None
    except matrix.MatrixFormatError as exc:
        raise InputError(f"malformed matrix file {path}: {exc}") from None


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else fraction_str(v) if isinstance(v, Fraction) else v for v in r])
    return buf.getvalue()


def _json(payload) -> str:
    return serialize.dumps(payload) + "\n"


def _fmt(v) -> str:
    return str(v) if isinstance(v, Fraction) else repr(v) if isinstance(v, float) else str(v)


class Output:
    """Per-verb rendering: a JSON payload plus optional CSV and text forms."""

    def __init__(self, payload, csv_header=None, csv_rows=None, text=None):
        self.payload = payload
        self.csv_header = csv_header
        self.csv_rows = csv_rows
        self.text = text

    def render(self, fmt: str) -> str:
        if fmt == "csv" and self.csv_header is not None:
            return _csv(self.csv_header, self.csv_rows)
        if fmt == "text" and self.text is not None:
            return self.text if self.text.endswith("\n") else self.text + "\n"
        return _json(self.payload)


# -- verbs ----------------------------------------------------------------------


def cmd_permanent(args) -> Output:
    a = _load(args.input)
    target = matrix.i_minus(a) if args.of == "i-minus" else a
    methods = ["naive", "ryser", "gray"] if args.method == "all" else [args.method]
    values = {}
    for m in methods:
        if m == "naive":
            values[m] = permanent.permanent_naive(target)
        elif m == "ryser":
            values[m] = permanent.permanent(target)
        else:
            values[m] = permanent.permanent_gray(target)
    payload = {"n": a.n, "of": args.of, "values": values}
    text = "\n".join(f"{k}: {_fmt(v)}" for k, v in values.items()) if len(values) > 1 else _fmt(values[methods[0]])
    return Output(payload, ["method", "value"], [[k, v] for k, v in values.items()], text)


def cmd_classify(args) -> Output:
    rep = matrix.classify(_load(args.input))
    d = to_jsonable(rep)
    text = "\n".join(f"{k}: {v}" for k, v in d.items())
    return Output(rep, ["property", "value"], [[k, v] for k, v in d.items()], text)


BOUND_HEADER = ["n", "s", "e", "value", "source", "hypotheses_met", "reading", "supremum", "note"]


def _bound_row(r: bounds.BoundReport) -> list:
    return [r.n, r.s, r.e, r.value, r.source, r.hypotheses_met, r.reading, r.supremum, r.note]


def cmd_bound(args) -> Output:
    if args.conjecture:
        literal, consistent = bounds.conjecture_values(args.conjecture, args.n, args.s)
        reports = {"literal": [literal], "consistent": [consistent], "both": [literal, consistent]}[args.reading]
    elif args.k is not None:
        reports = [bounds.subdefect_bound(args.n, args.k)]
    elif args.s is not None:
        reports = [bounds.theorem_bound(args.n, args.s)]
    else:
        reports = [bounds.BoundReport(args.n, Fraction(args.n), args.n - args.n % 2, bounds.malek_bound(args.n),
                                      "row substochastic maximum", None, True)]
    payload = reports[0] if len(reports) == 1 else reports
    text = "\n".join(
        f"{r.reading + ': ' if r.reading else ''}{r.value}"
        f"{'' if r.hypotheses_met else '  (hypotheses not met)'}{'  ' + r.note if r.note else ''}"
        for r in reports
    )
    return Output(payload, BOUND_HEADER, [_bound_row(r) for r in reports], text)


def cmd_construct(args) -> Output:
    kind = args.kind
    if kind == "extremal":
        a = bounds.construct_extremal(_need(args, "n"), _need(args, "s"))
    elif kind == "rowsub_odd":
        a = bounds.construct_rowsub_odd(_need(args, "n"), _need(args, "s"))
    elif kind == "omega3_a0":
        a = bounds.omega3_candidates(_need(args, "s"))[0]
    elif kind == "omega3_a1":
        a = bounds.omega3_candidates(_need(args, "s"))[1]
    else:
        a = bounds.circulant3(_need(args, "x"))
    payload = {"kind": kind, "n": a.n, "sigma": matrix.sigma(a), "per_i_minus": permanent.per_i_minus(a),
               "matrix": a}
    rows = [[i, *row] for i, row in enumerate(a.entries)]
    return Output(payload, ["row", *map(str, range(a.n))], rows, matrix.format_matrix(a))


def _need(args, name):
    v = getattr(args, name)
    if v is None:
        raise argparse.ArgumentError(None, f"--{name} is required for --kind {args.kind}")
    return v


def cmd_transform(args) -> Output:
    a = _load(args.input)
    if args.op == "epsilon_shift":
        for name in ("i", "j", "eps"):
            if getattr(args, name) is None:
                raise argparse.ArgumentError(None, f"--{name} is required for epsilon_shift")
        out = transforms.epsilon_shift(a, args.i, args.j, args.eps)
        steps = [transforms.TransformStep("epsilon_shift", ((args.i, args.i), (args.i, args.j)), args.eps,
                                          permanent.per_i_minus(a), permanent.per_i_minus(out))]
    elif args.op == "zero_diagonalize":
        out, steps = transforms.zero_diagonalize(a, args.preserve)
    elif args.op == "concentrate_rows":
        out, steps = transforms.concentrate_rows(a)
    else:
        out, steps = transforms.pair_up(a), []
    payload = {
        "op": args.op,
        "input": a,
        "output": out,
        "per_before": permanent.per_i_minus(a),
        "per_after": permanent.per_i_minus(out),
        "steps": steps,
    }
    return Output(payload)


def cmd_decompose(args) -> Output:
    a = _load(args.input)
    dec = cycles.decompose(a)
    payload = {
        "n": a.n,
        "cycles": [{"vertices": list(c.vertices), "length": c.length, "weight_product": c.weight_product,
                    "factor": c.factor} for c in dec.cycles],
        "per_i_minus": cycles.per_via_cycles(a),
    }
    return Output(payload)


SEARCH_HEADER = ["n", "s", "class", "seed", "restarts", "steps_per_restart", "best_value", "formula_value", "gap",
                 "evaluations", "feasible", "exact_value"]


def _search_config(args) -> search.SearchConfig:
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise InputError(f"cannot read config file {args.config}: {exc.strerror or exc}") from None
        try:
            return serialize.loads(search.SearchConfig, text)
        except serialize.DecodeError as exc:
            raise InputError(f"malformed config file {args.config}: {exc}") from None
    if args.n is None:
        raise argparse.ArgumentError(None, "search needs --config or --n")
    s = float(args.s) if args.s is not None else float(args.n)
    cls = args.matrix_class or ("doubly_stochastic" if s == args.n else "doubly_substochastic_fixed_sum")
    kw = {k: v for k, v in (("restarts", args.restarts), ("steps_per_restart", args.steps),
                            ("seed", args.seed), ("initial_step", args.initial_step),
                            ("final_step", args.final_step), ("tolerance", args.tolerance)) if v is not None}
    return search.SearchConfig(n=args.n, s=s, matrix_class=cls, **kw)


def cmd_search(args) -> Output:
    res = search.maximize(_search_config(args))
    c = res.config
    row = [c.n, c.s, c.matrix_class, c.seed, c.restarts, c.steps_per_restart, res.best_value, res.formula_value,
           res.gap, res.evaluations, res.feasible, res.exact_value]
    text = (
        f"best per(I - A) = {res.best_value!r}  (restart {res.best_restart} of {c.restarts})\n"
        f"reference ({res.formula_source}) = {res.formula_value!r}, gap {res.gap!r}\n"
        f"exact value of the rounded matrix = {res.exact_value}\n"
        + "\n".join("  " + " ".join(f"{v:.6f}" for v in r) for r in res.best_matrix)
    )
    return Output(res, SEARCH_HEADER, [row], text)


def cmd_evidence(args) -> Output:
    if args.omega3:
        s_values = args.s or search.grid_points(Fraction(17, 8), 3, Fraction(1, 8))
        rep = search.omega3_sweep(s_values, args.grid_step)
        rows = [[r.s, r.points, r.best_value, *r.candidate_values, r.envelope, r.excess] for r in rep.rows]
        payload = {
            "grid_step": rep.grid_step,
            "rows": [dict(to_jsonable(r), envelope=fraction_str(r.envelope), excess=fraction_str(r.excess))
                     for r in rep.rows],
            "notes": list(rep.notes),
        }
        text = "\n".join(
            [f"{'s':>8} {'grid max':>12} {'envelope':>12} {'excess':>12}"]
            + [f"{str(r.s):>8} {float(r.best_value):12.8f} {float(r.envelope):12.8f} {float(r.excess):12.8f}"
               for r in rep.rows]
            + [f"note: {n}" for n in rep.notes]
        )
        return Output(payload, ["s", "points", "best_value", "candidate_a0", "candidate_a1", "envelope", "excess"],
                      rows, text)
    if args.n is None:
        raise argparse.ArgumentError(None, "evidence needs --n (or --omega3)")
    s_values = args.s or [Fraction(args.n)]
    rep = search.evidence_report(args.n, [float(s) for s in s_values], args.grid_step, seed=args.seed,
                                 restarts=args.restarts or 0, steps_per_restart=args.steps or 0)
    rows = [[rep.n, r.s, r.observed, r.block_grid, r.conjectured_grid, r.conjectured_formula, r.conjectured_literal]
            for r in rep.rows]
    text = "\n".join(
        [f"{'s':>8} {'observed':>12} {'conj (grid)':>12} {'conj (formula)':>15} {'literal':>10}"]
        + [f"{r.s:>8} {r.observed:12.8f} {float(r.conjectured_grid):12.8f} {float(r.conjectured_formula):15.8f}"
           f" {float(r.conjectured_literal):10.4f}" for r in rep.rows]
        + [f"note: {n}" for n in rep.notes]
    )
    header = ["n", "s", "observed", "block_grid", "conjectured_grid", "conjectured_formula", "conjectured_literal"]
    return Output(rep, header, rows, text)


def cmd_verify(args) -> Output:
    rep = verify.run_all()
    rows = [[c.name, c.passed, c.cases, c.detail] for c in rep.checks]
    text = "\n".join(f"{'PASS' if c.passed else 'FAIL'} {c.name} ({c.cases} cases){'  ' + c.detail if c.detail else ''}"
                     for c in rep.checks)
    out = Output({"passed": rep.passed, "checks": rep.checks}, ["name", "passed", "cases", "detail"], rows, text)
    out.failed = not rep.passed
    return out


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--output", help="write the report here instead of standard output")

    p = argparse.ArgumentParser(prog="permlab", description="Permanents of I - A for substochastic A.")
    sub = p.add_subparsers(dest="verb", required=True)

    q = sub.add_parser("permanent", parents=[common], help="permanent of a matrix file")
    q.add_argument("--input", required=True)
    q.add_argument("--method", choices=["ryser", "naive", "gray", "all"], default="ryser")
    q.add_argument("--of", choices=["matrix", "i-minus"], default="matrix",
                   help="evaluate per(A) or per(I - A)")
    q.set_defaults(func=cmd_permanent)

    q = sub.add_parser("classify", parents=[common], help="class membership and sub-defect")
    q.add_argument("--input", required=True)
    q.set_defaults(func=cmd_classify)

    q = sub.add_parser("bound", parents=[common], help="closed-form bounds and conjectured values")
    q.add_argument("--n", type=int, required=True)
    g = q.add_mutually_exclusive_group()
    g.add_argument("--s", type=_rational, help="entry sum")
    g.add_argument("--k", type=int, help="sub-defect")
    q.add_argument("--conjecture", choices=["odd_stochastic", "omega3", "odd_substochastic"])
    q.add_argument("--reading", choices=["consistent", "literal", "both"], default="both")
    q.set_defaults(func=cmd_bound)

    q = sub.add_parser("construct", parents=[common], help="extremal and candidate matrices")
    q.add_argument("--kind", choices=["extremal", "rowsub_odd", "omega3_a0", "omega3_a1", "circulant3"],
                   default="extremal")
    q.add_argument("--n", type=int)
    q.add_argument("--s", type=_rational)
    q.add_argument("--x", type=_rational)
    q.set_defaults(func=cmd_construct)

    q = sub.add_parser("transform", parents=[common], help="value-monotone matrix surgeries (JSON)")
    q.add_argument("--input", required=True)
    q.add_argument("--op", choices=["epsilon_shift", "zero_diagonalize", "concentrate_rows", "pair_up"],
                   required=True)
    q.add_argument("--preserve", choices=["row_substochastic", "doubly_substochastic"], default="row_substochastic")
    q.add_argument("--i", type=int)
    q.add_argument("--j", type=int)
    q.add_argument("--eps", type=_rational)
    q.set_defaults(func=cmd_transform)

    q = sub.add_parser("decompose", parents=[common], help="cycle factorization of per(I - A) (JSON)")
    q.add_argument("--input", required=True)
    q.set_defaults(func=cmd_decompose)

    q = sub.add_parser("search", parents=[common], help="numerical maximization of per(I - A)")
    q.add_argument("--config", help="SearchConfig as a JSON document")
    q.add_argument("--n", type=int)
    q.add_argument("--s", type=_rational)
    q.add_argument("--class", dest="matrix_class", choices=list(search.CLASSES))
    q.add_argument("--restarts", type=int)
    q.add_argument("--steps", type=int)
    q.add_argument("--seed", type=int)
    q.add_argument("--initial-step", type=float)
    q.add_argument("--final-step", type=float)
    q.add_argument("--tolerance", type=float)
    q.set_defaults(func=cmd_search)

    q = sub.add_parser("evidence", parents=[common], help="observed maxima against conjectured values")
    q.add_argument("--n", type=int, choices=[3, 5, 7])
    q.add_argument("--s", type=_rational, nargs="+")
    q.add_argument("--omega3", action="store_true", help="exact 3x3 grid sweep instead of the search")
    q.add_argument("--grid-step", type=_rational, default=Fraction(1, 8))
    q.add_argument("--restarts", type=int)
    q.add_argument("--steps", type=int)
    q.add_argument("--seed", type=int, default=20160901)
    q.set_defaults(func=cmd_evidence)

    q = sub.add_parser("verify", parents=[common], help="run the invariant suite on built-in fixtures")
    q.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
        text = out.render(args.format)
    except argparse.ArgumentError as exc:
        parser.print_usage(sys.stderr)
        print(f"permlab {args.verb}: error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"permlab {args.verb}: {exc}", file=sys.stderr)
        return 2
    except PermlabError as exc:
        print(f"permlab {args.verb}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            print(f"permlab {args.verb}: cannot write {args.output}: {exc.strerror or exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 1 if getattr(out, "failed", False) else 0


if __name__ == "__main__":
    sys.exit(main())
