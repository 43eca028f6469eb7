"""Command-line front end.

Exit codes: 0 success, 1 negative verdict (a proof fails to check, a
formula is false, a counterexample exists, a transformation rejects its
input), 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .elimination import ElimTrace, eliminate_all, herbrand_disjunction, proof_metrics
from .kernel import ProofError, check_proof, format_proof, proof_from_json, proof_to_json
from .parser import parse, parse_formula, parse_term, pretty
from .semantics import (
    BoundExceeded, ExtChoiceFunction, SemanticsError, check_consequence, check_truth_mode, eval as sem_eval, load_model,
)
from .syntax import Eps, EpsilonSyntaxError, Signature, Term, degree, epsilon_type, iter_nodes, rank
from .transforms import deduction_transform, embed_proof, substitute_proof
from .translate import epsilon_translate


class UsageError(Exception):
    pass


class Negative(Exception):
    """Carries output for a negative verdict."""

    def __init__(self, data, text):
        super().__init__(text)
        self.data = data
        self.text = text


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _signature(args) -> Signature | None:
    path = getattr(args, "signature", None)
    return Signature.from_json(_read_json(path)) if path else None


def _proof(args):
    return proof_from_json(_read_json(args.proof))


def _proof_out(p, extra=None):
    data = proof_to_json(p)
    if extra:
        data = {**extra, "proof": data}
    return data, format_proof(p)


# ---------------------------------------------------------------------------
# verbs


def cmd_parse(args):
    e = parse(args.expr, _signature(args), "term" if args.term else "formula")
    return {"input": args.expr, "normalized": pretty(e), "canon": e.canon}, pretty(e)


def cmd_translate(args):
    e = parse(args.expr, _signature(args), "term" if args.term else "formula")
    out, trace = epsilon_translate(e)
    steps = [{"clause": s.clause, "source": pretty(s.source), "result": pretty(s.result)} for s in trace.steps]
    return {"input": pretty(e), "translation": pretty(out), "steps": steps}, pretty(out)


def cmd_typeof(args):
    t = parse_term(args.expr, _signature(args))
    if not isinstance(t, Eps):
        raise UsageError("typeof expects an epsilon term")
    ty, slots = epsilon_type(t)
    data = {"term": pretty(t), "type": pretty(ty.pattern), "key": ty.key, "arity": ty.arity,
            "slots": [pretty(s) for s in slots], "degree": degree(t), "rank": rank(t)}
    text = "\n".join([f"type:   {data['type']}", f"slots:  {', '.join(data['slots']) or '(none)'}",
                      f"degree: {data['degree']}", f"rank:   {data['rank']}"])
    return data, text


def cmd_check(args):
    p = _proof(args)
    rep = check_proof(p)
    data = rep.to_json()
    data["calculus"] = p.calculus
    if rep.ok:
        mt = proof_metrics(p, check=False)
        data["metrics"] = mt.to_json()
        text = f"ok: {pretty(rep.conclusion)} ({p.calculus}, {len(p.lines)} lines)"
        return data, text
    text = "\n".join(f"line {i + 1}: {r}" for i, r in rep.failures)
    raise Negative(data, "proof does not check\n" + text)


def cmd_deduce(args):
    p = _proof(args)
    a = parse_formula(args.discharge, p.sig)
    return _proof_out(deduction_transform(p, a))


def cmd_subst(args):
    p = _proof(args)
    t = parse_term(args.term_text, p.sig)
    return _proof_out(substitute_proof(p, args.var, t))


def cmd_embed(args):
    return _proof_out(embed_proof(_proof(args)))


def cmd_eliminate(args):
    p = _proof(args)
    if not args.with_identity and any(l.just.rule == "EqEps" for l in p.lines):
        raise UsageError("the proof uses identity axioms for epsilon terms; pass --with-identity")
    q, trace = eliminate_all(p)
    data, text = _proof_out(q, {"trace": trace.to_json()})
    return data, _trace_text(trace) + "\n" + text


def _trace_text(trace: ElimTrace) -> str:
    rows = []
    for s in trace.steps:
        b, a = s.before, s.after
        rows.append(f"{s.strategy:8} {pretty(s.term)}  (rank {b.rank}, order {b.order(b.rank)}) -> "
                    f"(rank {a.rank}, order {a.order(a.rank) if a.rank >= 0 else 0})")
    return "\n".join(rows) if rows else "no epsilon steps needed"


def cmd_herbrand(args):
    res = herbrand_disjunction(_proof(args))
    data = res.to_json()
    data["proof"] = proof_to_json(res.proof)
    lines = [f"skeleton: {pretty(res.skeleton)}"]
    for w in res.witnesses:
        lines.append("  " + ", ".join(f"{h} := {pretty(t)}" for h, t in zip(res.holes, w)))
    lines.append(f"disjunction: {pretty(res.proof.conclusion)}")
    return data, "\n".join(lines)


def cmd_eval(args):
    m, chooser, s = load_model(_read_json(args.model))
    e = parse(args.expr, None, "term" if args.term else "formula")
    if isinstance(e, Term):
        if chooser is None and any(isinstance(n, Eps) for n in iter_nodes(e)):
            raise UsageError("the model has no choice table")
        value = sem_eval(m, chooser or ExtChoiceFunction.least(m.size), s, e)
        return {"expr": pretty(e), "value": value}, str(value)
    mode = args.mode
    if mode in ("local", "truth") and chooser is None:
        raise UsageError(f"{mode} truth needs a choice table in the model")
    ok = check_truth_mode(m, e, mode, phi=chooser, s=s, intensional=args.intensional)
    data = {"expr": pretty(e), "mode": mode, "value": ok}
    if not ok:
        raise Negative(data, "false")
    return data, "true"


def cmd_consequence(args):
    sig = _signature(args)
    gamma = [parse_formula(g, sig) for g in args.gamma]
    a = parse_formula(args.expr, sig)
    v = check_consequence(gamma, a, args.mode, args.max_domain, sig, intensional=args.intensional)
    data = v.to_json()
    if v.holds:
        return data, f"holds on all structures up to size {args.max_domain} ({v.structures} checked)"
    raise Negative(data, "counterexample:\n" + json.dumps(data["counterexample"], indent=2))


# ---------------------------------------------------------------------------
# wiring


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="epscalc", description="epsilon calculus toolkit")
    sub = ap.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.set_defaults(fn=fn)
        return p

    for name, fn, help_ in (("parse", cmd_parse, "parse and echo a formula"),
                            ("translate", cmd_translate, "epsilon translation of a formula")):
        p = verb(name, fn, help_)
        p.add_argument("expr")
        p.add_argument("--term", action="store_true", help="parse a term instead of a formula")
        p.add_argument("--signature", help="signature JSON file")
    p = verb("typeof", cmd_typeof, "epsilon type, degree and rank of a term")
    p.add_argument("expr")
    p.add_argument("--signature")
    for name, fn, help_ in (("check", cmd_check, "check a proof file"),
                            ("embed", cmd_embed, "embed a quantifier proof into the epsilon calculus"),
                            ("herbrand", cmd_herbrand, "extract a Herbrand disjunction")):
        verb(name, fn, help_).add_argument("proof")
    p = verb("deduce", cmd_deduce, "discharge a hypothesis")
    p.add_argument("proof")
    p.add_argument("--discharge", required=True)
    p = verb("subst", cmd_subst, "substitute a term for a variable throughout a proof")
    p.add_argument("proof")
    p.add_argument("--var", required=True)
    p.add_argument("--term", dest="term_text", required=True)
    p = verb("eliminate", cmd_eliminate, "eliminate critical formulas")
    p.add_argument("proof")
    p.add_argument("--with-identity", action="store_true")
    p = verb("eval", cmd_eval, "evaluate in a finite model")
    p.add_argument("expr")
    p.add_argument("--model", required=True)
    p.add_argument("--term", action="store_true")
    p.add_argument("--mode", choices=("local", "truth", "generic", "valid"), default="local")
    p.add_argument("--intensional", action="store_true")
    p = verb("consequence", cmd_consequence, "search finite models for a counterexample")
    p.add_argument("expr")
    p.add_argument("--gamma", action="append", default=[], help="a premise; repeat for several")
    p.add_argument("--mode", choices=("l", "t", "g", "v"), default="l")
    p.add_argument("--max-domain", type=int, default=2)
    p.add_argument("--intensional", action="store_true")
    p.add_argument("--signature")
    return ap


def _emit(args, data, text, stream):
    if args.format == "json":
        print(json.dumps(data, indent=2), file=stream)
    else:
        print(text, file=stream)


def run(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        data, text = args.fn(args)
    except Negative as neg:
        _emit(args, neg.data, neg.text, sys.stdout)
        return 1
    except (UsageError, EpsilonSyntaxError, BoundExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ProofError, SemanticsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (KeyError, ValueError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return 2
    _emit(args, data, text, sys.stdout)
    return 0


def main() -> None:
    sys.exit(run())
