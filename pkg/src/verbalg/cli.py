"""Command-line interface.

Exit codes: 0 verdict computed, 1 usage or parse error, 2 budget exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from pathlib import Path

from . import freeforms
from .closure import (
    closure_member,
    geom_equivalent,
    is_closed_system,
    solutions,
)
from .finite import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    enumerate_homs,
    in_variety,
    variety_violation,
)
from .report import Report, algebra_json, map_json
from .search import (
    SearchConfig,
    auto_equivalent,
    classify_strongly_stable,
    counterexample_search,
    enumerate_word_systems,
)
from .signature import VarietySpec
from .terms import TermError
from .textio import (
    ParseError,
    format_algebra,
    format_system,
    format_variety,
    parse_algebra,
    parse_query,
    parse_system,
    parse_variety,
    parse_words,
)
from .verbal import VerbalError, derive_algebra

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class _Inputs:
    """Loads input files and remembers a content hash for each."""

    def __init__(self):
        self.hashes: dict[str, str] = {}

    def text(self, role: str, path: str) -> str:
        try:
            data = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        self.hashes[role] = hashlib.sha256(data.encode()).hexdigest()
        return data

    def variety(self, ref: str) -> VarietySpec:
        if ref in freeforms.BUILTIN_IDS and not os.path.exists(ref):
            spec = freeforms.builtin_spec(ref)
            self.hashes["variety"] = "builtin:" + ref
            return spec
        return _located(ref, lambda: parse_variety(self.text("variety", ref)))

    def algebra(self, role: str, path: str, spec: VarietySpec):
        return _located(path, lambda: parse_algebra(self.text(role, path), spec))

    def system(self, path: str, spec: VarietySpec):
        return _located(path, lambda: parse_system(self.text("system", path), spec.signature))

    def words(self, role: str, path: str, spec: VarietySpec):
        return _located(path, lambda: parse_words(self.text(role, path), spec.signature))


def _located(path: str, thunk):
    try:
        return thunk()
    except ParseError as exc:
        raise ParseError(f"{path}: {exc.message}", exc.line, exc.column, exc.expected) from None


def _builtin_config(spec: VarietySpec, args) -> SearchConfig:
    vid = freeforms.builtin_id(spec)
    if vid is None:
        raise UsageError("this command needs a built-in variety (act or automaton) or an identical spec file")
    return SearchConfig(vid, max_word_size=args.max_word_size, fragment_bound=args.fragment_bound,
                        probe_size=args.probe_size, include_projections=args.include_projections,
                        budget=args.budget, jobs=args.jobs)


def _geom_json(g) -> dict:
    out = {"verdict": g.verdict, "alphabets_checked": g.alphabets_checked, "kernels_checked": g.kernels_checked}
    if g.system is not None:
        out["witness"] = {
            "alphabet": g.alphabet,
            "system": format_system(g.system),
            "pair": [str(g.pair[0]), str(g.pair[1])],
            "pair_in_closure_over": g.closed_over,
        }
    return out


# -- commands ------------------------------------------------------------------------------

def cmd_validate(args, io: _Inputs, rep: Report) -> str:
    spec = io.variety(args.variety)
    lines = [f"variety {spec.name or '(unnamed)'}: ok"]
    models = []
    for k, path in enumerate(args.model or []):
        H = io.algebra(f"model{k}", path, spec)
        bad = variety_violation(H, spec, args.budget)
        entry = {"file": Path(path).name, "in_variety": bad is None}
        if bad is not None:
            idx, a = bad
            ident = spec.identities[idx]
            names = {x: H.carriers[ident.variables[x]][v] for x, v in sorted(a.items())}
            entry["failing_identity"] = {"index": idx, "identity": str(ident), "assignment": names}
            lines.append(f"{path}: identity {idx} fails at {names}")
        else:
            lines.append(f"{path}: in variety")
        models.append(entry)
    if args.system:
        T = io.system(args.system, spec)
        lines.append(f"{args.system}: {len(T.pairs)} equations over {len(T.alphabet)} variables")
    if args.words:
        W = io.words("words", args.words, spec)
        lines.append(f"{args.words}: {W}")
    rep.verdict = "VALID" if all(m["in_variety"] for m in models) else "NOT_IN_VARIETY"
    rep.result = {"variety": format_variety(spec), "models": models}
    return "\n".join(lines)


def cmd_homs(args, io, rep):
    spec = io.variety(args.variety)
    A = io.algebra("source", args.source, spec)
    B = io.algebra("target", args.target, spec)
    homs = enumerate_homs(spec.signature, A, B, args.budget)
    rep.verdict = f"{len(homs)} HOMOMORPHISMS"
    rep.bounds = {"budget": args.budget}
    rep.result = {"count": len(homs), "homomorphisms": [map_json(A, B, h) for h in homs]}
    return "\n".join([f"{len(homs)} homomorphism(s)"] + [str(map_json(A, B, h)) for h in homs])


def cmd_closure(args, io, rep):
    spec = io.variety(args.variety)
    H = io.algebra("model", args.model, spec)
    T = io.system(args.system, spec)
    sols = solutions(T, H, args.budget)
    answers = []
    for q in args.query or []:
        try:
            pair = parse_query(q, spec.signature, T.variables)
        except ParseError as exc:
            raise ParseError(f"query {q!r}: {exc.message}", exc.line, exc.column, exc.expected) from None
        answers.append({"query": q, "in_closure": closure_member(T, H, pair, args.budget)})
    result = {"solutions": len(sols), "queries": answers}
    if args.check_closed:
        if spec.identities:
            raise UsageError("--check-closed is only available for varieties without identities")
        v = is_closed_system(T, H, depth=args.depth, budget=args.budget)
        result["closed_up_to_depth"] = {"depth": args.depth, "closed": v.closed,
                                        "witness": [str(t) for t in v.witness] if v.witness else None}
    rep.bounds = {"budget": args.budget}
    rep.verdict = "TRUE" if answers and all(a["in_closure"] for a in answers) else (
        "FALSE" if answers else f"{len(sols)} SOLUTIONS")
    rep.result = result
    lines = [f"{len(sols)} solution(s)"]
    lines += [f"{a['query']}: {'in closure' if a['in_closure'] else 'not in closure'}" for a in answers]
    return "\n".join(lines)


def cmd_geom_eq(args, io, rep):
    spec = io.variety(args.variety)
    H1 = io.algebra("left", args.left, spec)
    H2 = io.algebra("right", args.right, spec)
    g = geom_equivalent(H1, H2, args.max_generators, args.budget)
    rep.verdict = g.verdict
    rep.bounds = {"max_generators": args.max_generators, "budget": args.budget}
    rep.result = _geom_json(g)
    text = g.verdict
    if g.pair is not None:
        text += f"\n  over X = {g.alphabet}: {g.pair[0]} = {g.pair[1]} lies in the closure over algebra {g.closed_over} only"
    return text


def cmd_derive(args, io, rep):
    spec = io.variety(args.variety)
    H = io.algebra("model", args.model, spec)
    W = io.words("words", args.words, spec)
    D = derive_algebra(H, W)
    member = in_variety(D, spec, args.budget)
    rep.verdict = "IN_VARIETY" if member else "NOT_IN_VARIETY"
    rep.result = {"words": W.as_dict(), "derived": algebra_json(D), "in_variety": member}
    return format_algebra(D).rstrip() + f"\n# derived algebra in variety: {member}"


def cmd_search_words(args, io, rep):
    spec = io.variety(args.variety)
    cfg = _builtin_config(spec, args)
    report = classify_strongly_stable(cfg)
    rep.verdict = f"{len(report.accepted)} ACCEPTED"
    rep.bounds = report.to_dict()["bounds"]
    rep.result = report.to_dict()
    lines = [f"examined {report.examined}, rejected {len(report.rejected)}, accepted {len(report.accepted)}"]
    lines += [f"  accepted: {a.words}" for a in report.accepted]
    lines += [f"  rejected: {r.words} ({r.reason})" for r in report.rejected]
    return "\n".join(lines)


def _candidate_words(args, io, spec):
    if args.words:
        return [io.words(f"words{k}", p, spec) for k, p in enumerate(args.words)]
    return None


def cmd_auto_eq(args, io, rep):
    spec = io.variety(args.variety)
    H1 = io.algebra("left", args.left, spec)
    H2 = io.algebra("right", args.right, spec)
    candidates = _candidate_words(args, io, spec)
    cfg = None
    if candidates is None:
        if freeforms.builtin_id(spec) is None:
            candidates = list(enumerate_word_systems(spec, args.max_word_size, args.include_projections))
        else:
            cfg = _builtin_config(spec, args)
    v = auto_equivalent(H1, H2, cfg, args.max_generators, spec=spec, candidates=candidates, budget=args.budget)
    rep.verdict = v.verdict
    rep.bounds = {"max_generators": args.max_generators, "max_word_size": args.max_word_size,
                  "fragment_bound": args.fragment_bound, "budget": args.budget}
    rep.result = {
        "words": v.words.as_dict() if v.words else None,
        "tried": [{"words": W.as_dict(), **_geom_json(g)} for W, g in v.tried],
    }
    return v.verdict + (f" with {v.words}" if v.words else "")


def cmd_counterexample(args, io, rep):
    spec = io.variety(args.variety)
    if not args.words:
        raise UsageError("counterexample needs --words")
    W = io.words("words", args.words[0], spec)
    models = None
    if args.model:
        models = [io.algebra(f"model{k}", p, spec) for k, p in enumerate(args.model)]
        for k, H in enumerate(models):
            if not in_variety(H, spec, args.budget):
                raise UsageError(f"{args.model[k]} is not in the variety")
    out = counterexample_search(spec, W, args.max_size, models, args.max_generators, args.budget)
    rep.bounds = {"max_size": args.max_size, "max_generators": args.max_generators, "budget": args.budget}
    if out.hit is None:
        rep.verdict = "NONE"
        rep.result = {"scanned": out.scanned, "hit": None}
        return f"no counterexample among {out.scanned} model(s)"
    h = out.hit
    rep.verdict = "FOUND"
    rep.result = {
        "scanned": out.scanned,
        "hit": {"index": h.index, "model": format_algebra(h.model), "derived": format_algebra(h.derived),
                **_geom_json(h.verdict), "reverified": True},
    }
    return f"counterexample (model #{h.index}):\n{format_algebra(h.model).rstrip()}\nwitness: {h.verdict.pair[0]} = {h.verdict.pair[1]}"


COMMANDS = {
    "validate": cmd_validate,
    "homs": cmd_homs,
    "closure": cmd_closure,
    "geom-eq": cmd_geom_eq,
    "derive": cmd_derive,
    "search-words": cmd_search_words,
    "auto-eq": cmd_auto_eq,
    "counterexample": cmd_counterexample,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="verbalg", description="Many-sorted universal algebra workbench.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--variety", required=True, help="variety file or built-in id (act, automaton)")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        sp.add_argument("--json", metavar="PATH", help="write the JSON report to PATH ('-' for stdout)")
        sp.add_argument("--jobs", type=int, default=1)
        return sp

    def search_opts(sp):
        sp.add_argument("--max-word-size", type=int, default=3)
        sp.add_argument("--fragment-bound", type=int, default=6)
        sp.add_argument("--probe-size", type=int, default=2)
        sp.add_argument("--include-projections", action="store_true")

    sp = common(sub.add_parser("validate", help="check a variety and optional models, systems, words"))
    sp.add_argument("--model", action="append")
    sp.add_argument("--system")
    sp.add_argument("--words")

    sp = common(sub.add_parser("homs", help="enumerate homomorphisms"))
    sp.add_argument("source")
    sp.add_argument("target")

    sp = common(sub.add_parser("closure", help="closure membership queries"))
    sp.add_argument("--model", required=True)
    sp.add_argument("--system", required=True)
    sp.add_argument("--query", action="append")
    sp.add_argument("--check-closed", action="store_true")
    sp.add_argument("--depth", type=int, default=2)

    sp = common(sub.add_parser("geom-eq", help="geometric equivalence up to a generator bound"))
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--max-generators", type=int, default=3)

    sp = common(sub.add_parser("derive", help="derived algebra of a model under a word system"))
    sp.add_argument("--model", required=True)
    sp.add_argument("--words", required=True)

    sp = common(sub.add_parser("search-words", help="classify word systems of a built-in variety"))
    search_opts(sp)

    sp = common(sub.add_parser("auto-eq", help="automorphic equivalence via derived algebras"))
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--words", action="append")
    sp.add_argument("--max-generators", type=int, default=3)
    search_opts(sp)

    sp = common(sub.add_parser("counterexample", help="scan models for one not equivalent to its derived algebra"))
    sp.add_argument("--words", action="append")
    sp.add_argument("--model", action="append")
    sp.add_argument("--max-size", type=int, default=2)
    sp.add_argument("--max-generators", type=int, default=2)
    return p


def run_command(argv, stdout=None, stderr=None) -> tuple[int, Report | None]:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE, None
    except SystemExit as exc:  # --help
        return (EXIT_OK if not exc.code else EXIT_USAGE), None
    io = _Inputs()
    rep = Report(args.command)
    start = time.perf_counter()
    code = EXIT_OK
    try:
        text = COMMANDS[args.command](args, io, rep)
    except BudgetExceeded as exc:
        rep.verdict = "BUDGET_EXCEEDED"
        rep.result = {"what": exc.what, "needed": exc.needed, "budget": exc.budget}
        text = f"budget exceeded: {exc}"
        code = EXIT_BUDGET
    except (UsageError, ParseError, TermError, VerbalError, freeforms.UnsupportedVariety) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE, None
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE, None
    rep.inputs = io.hashes
    rep.seconds = time.perf_counter() - start
    if args.json != "-":
        print(text, file=stdout)
    if args.json:
        data = rep.to_json()
        if args.json == "-":
            stdout.write(data)
        else:
            tmp = Path(args.json + ".tmp")
            tmp.write_text(data, encoding="utf-8")
            tmp.replace(args.json)
    return code, rep


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)[0]


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
