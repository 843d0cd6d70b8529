"""Command-line front end: ``stringtop COMMAND FILE [--max-degree N] [--json PATH]``.

Exit codes: 0 success, 1 a verdict failed, 2 usage or parse error,
3 insufficient truncation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from stringtop import pd, stringops
from stringtop.algebras import format_element
from stringtop.fileformat import AlgebraFileError, parse_algebra_text
from stringtop.graded import NotAComplexError, TruncationError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TRUNCATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class Result:
    degrees: list = field(default_factory=list)
    betti: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    lines: list = field(default_factory=list)
    ok: bool = True

    def set_betti(self, betti: dict):
        self.degrees = sorted(betti)
        self.betti = [betti[p] for p in self.degrees]

    def verdict(self, name, passed, text):
        self.verdicts[name] = {"pass": bool(passed), "message": text}
        self.ok = self.ok and bool(passed)
        self.lines.append(f"{name}: {text}")


def _num(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _table_lines(title, rows, headers):
    rows = [[str(c) for c in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(headers)]
    out = [title, "  ".join(h.rjust(w) for h, w in zip(headers, widths))]
    out += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
    return out


def _betti_lines(title, betti):
    return _table_lines(title, [(p, b) for p, b in sorted(betti.items())], ["degree", "betti"])


def _need(af, kinds, command):
    if af.kind not in kinds:
        raise UsageError(f"{command} needs a {' or '.join(kinds)} algebra, got {af.kind}")


def _truncation(af, args, default=None, required=True):
    if args.max_degree is not None:
        return args.max_degree
    if af.max_degree is not None:
        return af.max_degree
    if default is not None:
        return default
    if required:
        raise UsageError("--max-degree is required for infinite models")
    return None


def cmd_check_pd(af, args, res):
    _need(af, ("finite-pd",), "check-pd")
    v = pd.check_poincare_duality(af.algebra)
    if v.ok:
        res.verdict("poincare_duality", True, "pass")
    else:
        res.verdict("poincare_duality", False,
                    f"fail, axiom {v.axiom}" + (f" in degree {v.degree}" if v.degree is not None
                                                else "") + f": {v.message}")
        if v.rank_defect is not None:
            res.tables["rank_defect"] = {str(v.degree): v.rank_defect}
    return af.algebra.top_degree


def cmd_betti(af, args, res):
    if af.kind == "finite-pd":
        N = _truncation(af, args, af.algebra.top_degree)
        betti = af.algebra.homology(N).betti()
    elif af.kind == "bg":
        N = _truncation(af, args)
        betti = af.algebra.model().homology(N).betti()
    else:
        N = _truncation(af, args)
        betti = af.algebra.homology(N).betti()
    res.set_betti(betti)
    res.lines += _betti_lines(f"H^*({af.name}), valid up to degree {N}", betti)
    return N


def cmd_loop_betti(af, args, res):
    if af.kind == "sullivan":
        N = _truncation(af, args)
        t = stringops.loop_betti_sullivan(af.algebra, N)
    elif af.kind == "bg":
        N = _truncation(af, args)
        t = stringops.loop_betti_sullivan(af.algebra.model(), N)
    else:
        N = _truncation(af, args, 2 * af.algebra.m)
        t = stringops.loop_betti_hochschild(af.algebra, N)
    res.set_betti(t.betti)
    res.lines += _betti_lines(f"H^*(L{af.name}) ({t.provenance}), valid up to degree {N}",
                              t.betti)
    if af.kind == "finite-pd" and af.model is not None:
        s = stringops.loop_betti_sullivan(af.model, N)
        res.tables["sullivan_betti"] = {str(p): b for p, b in s.betti.items()}
        res.verdict("cross_check", s.betti == t.betti,
                    "Sullivan and Hochschild Betti numbers agree" if s.betti == t.betti
                    else "Sullivan and Hochschild Betti numbers differ")
    return N


def _pd_algebra(af, command):
    _need(af, ("finite-pd",), command)
    v = pd.check_poincare_duality(af.algebra)
    if not v:
        raise pd.PDError(f"not a Poincaré duality algebra: {v.message}")
    return af.algebra


def cmd_loop_product(af, args, res):
    A = _pd_algebra(af, "loop-product")
    N = _truncation(af, args, 2 * A.m)
    lp = stringops.dual_loop_product(A, N)
    rows, table = [], {}
    for (b, c), val in sorted(lp.table.items()):
        text = format_element(val)
        table[f"{b} * {c}"] = {k: _num(v) for k, v in val.items()}
        rows.append((b, c, text))
    res.tables["loop_product"] = table
    res.set_betti(lp.coords.hom.betti())
    res.lines += _table_lines(f"loop product on H_*(L{af.name}), degree shift -{A.m}, "
                              f"products b•c of degree <= {N}", rows, ["b", "c", "b•c"])
    res.verdict("nontrivial", True, "loop product is nontrivial" if lp.is_nontrivial()
                else "loop product vanishes in the computed range")
    return N


def cmd_loop_coproduct(af, args, res):
    A = _pd_algebra(af, "loop-coproduct")
    N = _truncation(af, args, 2 * A.m)
    r = stringops.loop_coproduct_psi(A, N)
    res.tables["psi_ranks"] = {str(p): k for p, k in r.ranks.items()}
    res.tables["psi_unit"] = {r.target.format_key(k): _num(v) for k, v in r.unit_image.items()}
    res.verdict("closed_form", r.closed_form_ok and r.chain_map_ok,
                f"psi(1⊗1⊗c) = {r.chi}·Ω⊗c and psi vanishes on the augmentation ideal"
                if r.closed_form_ok and r.chain_map_ok else "closed form for psi fails")
    res.verdict("coproduct", True, r.verdict)
    return N


def cmd_fiber_intersection(af, args, res):
    A = _pd_algebra(af, "fiber-intersection")
    N = _truncation(af, args, 2 * A.m)
    values = af.model_values() if af.model is not None else None
    r = stringops.intersection_with_fiber(A, N, af.model, values)
    rows = [(p, r.source_betti.get(p, 0), r.hochschild_ranks[p],
             "" if r.sullivan_ranks is None else r.sullivan_ranks[p])
            for p in sorted(r.hochschild_ranks)]
    res.lines += _table_lines(f"H(B̄A) -> H(CH(A)), multiplication by ω, degree +{A.m}",
                              rows, ["degree", "dim H(B̄A)", "rank", "rank (Sullivan)"])
    res.set_betti(r.source_betti)
    res.tables["ranks"] = {str(p): k for p, k in r.hochschild_ranks.items()}
    if r.sullivan_ranks is not None:
        res.tables["sullivan_ranks"] = {str(p): k for p, k in r.sullivan_ranks.items()}
        res.verdict("routes_agree", r.routes_agree,
                    "ranks agree" if r.routes_agree else "ranks differ between the two routes")
    return N


def cmd_diagonal_class(af, args, res):
    A = _pd_algebra(af, "diagonal-class")
    D = pd.diagonal_class(A)
    text = pd.format_tensor(A, D)
    res.tables["diagonal_class"] = {f"{a}⊗{b}": _num(c) for (a, b), c in D.items()}
    res.tables["dual_basis"] = {k: A.format(v) for k, v in pd.dual_basis(A).items()}
    res.lines.append(f"D = {text}")
    res.verdict("central", True, "(a⊗1)D = (1⊗a)D for every basis element a")
    return A.top_degree


def cmd_module_property(af, args, res):
    A = _pd_algebra(af, "module-property")
    N = _truncation(af, args, 2 * A.m)
    co, ho = stringops.check_module_property(A, N)
    for v in (co, ho):
        res.verdict(f"module_{v.side}", v.ok,
                    f"{v.checked} cases, " + ("no counterexample" if v.ok
                                              else f"counterexample {v.counterexample}"))
    return N


def cmd_bg_loop_product(af, args, res):
    _need(af, ("bg",), "bg-loop-product")
    N = _truncation(af, args)
    v = stringops.bg_loop_product(af.algebra, N)
    res.tables["checks"] = dict(v.checks)
    res.verdict("loop_product", v.ok, f"loop product trivial up to degree {N}" if v.ok
                else "could not verify triviality: " + ", ".join(
                    k for k, ok in v.checks.items() if not ok))
    return N


def cmd_bg_loop_coproduct(af, args, res):
    _need(af, ("bg",), "bg-loop-coproduct")
    N = _truncation(af, args)
    v = stringops.bg_loop_coproduct(af.algebra, N)
    res.tables["checks"] = dict(v.checks)
    res.verdict("loop_coproduct", v.ok,
                f"dual coproduct surjective up to degree {N}, so the coproduct is injective"
                if v.ok else "could not verify surjectivity: " + ", ".join(
                    k for k, ok in v.checks.items() if not ok))
    return N


def cmd_ext_diagonal(af, args, res):
    if af.kind == "bg":
        model = af.algebra.model()
    else:
        _need(af, ("sullivan",), "ext-diagonal")
        model = af.algebra
    N = _truncation(af, args)
    r = stringops.ext_diagonal(model, args.copies, N, args.gorenstein_dim)
    res.set_betti(r.dims)
    rows = [(p, r.dims[p], r.expected.get(p, "")) for p in sorted(r.dims)]
    res.lines += _table_lines(f"Ext of the {args.copies}-fold diagonal of {af.name}, "
                              f"degrees -{N}..{N}", rows, ["degree", "dim", "expected"])
    res.tables["expected"] = {str(p): v for p, v in r.expected.items()}
    res.tables["shift"] = r.shift
    if r.matches:
        res.verdict("pattern", True, f"matches the cohomology of {af.name} shifted by "
                                     f"{r.shift} (d = {_num(r.d) if r.d is not None else '?'})")
    else:
        res.verdict("pattern", False, f"pattern falsified at degree {r.first_failure}")
    return N


COMMANDS = {
    "check-pd": cmd_check_pd,
    "betti": cmd_betti,
    "loop-betti": cmd_loop_betti,
    "loop-product": cmd_loop_product,
    "loop-coproduct": cmd_loop_coproduct,
    "fiber-intersection": cmd_fiber_intersection,
    "diagonal-class": cmd_diagonal_class,
    "module-property": cmd_module_property,
    "bg-loop-product": cmd_bg_loop_product,
    "bg-loop-coproduct": cmd_bg_loop_coproduct,
    "ext-diagonal": cmd_ext_diagonal,
}


def build_parser():
    p = argparse.ArgumentParser(prog="stringtop",
                                description="Rational string topology computations.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("file", help="algebra presentation file")
    p.add_argument("--max-degree", type=int, default=None, metavar="N",
                   help="truncation degree (required for infinite models)")
    p.add_argument("--json", metavar="PATH", help="write a JSON result document")
    p.add_argument("--copies", type=int, default=2, help="ext-diagonal: number of factors n")
    p.add_argument("--gorenstein-dim", type=int, default=None,
                   help="ext-diagonal: check this d instead of inferring it")
    return p


def run(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        with open(args.file, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    res = Result()
    try:
        if args.max_degree is not None and args.max_degree < 0:
            raise UsageError("--max-degree must be >= 0")
        af = parse_algebra_text(raw.decode("utf-8"), args.file)
        N = COMMANDS[args.command](af, args, res)
    except (AlgebraFileError, UsageError, UnicodeDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (pd.PDError, NotAComplexError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    for line in res.lines:
        print(line, file=stdout)
    if args.json:
        doc = {
            "command": args.command,
            "input": args.file,
            "input_sha256": hashlib.sha256(raw).hexdigest(),
            "truncation": N,
            "valid_up_to": N,
            "degrees": res.degrees,
            "betti": res.betti,
            "tables": res.tables,
            "verdicts": res.verdicts,
            "timing_seconds": round(time.perf_counter() - start, 6),
        }
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True, ensure_ascii=False)
            fh.write("\n")
    return EXIT_OK if res.ok else EXIT_FAIL


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
