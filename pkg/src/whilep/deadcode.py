"""Dead-code elimination driven by the two analyses.

Assignments and lookups into dead variables, and heap writes whose
every possible target is dead, become skip. A cons with no live result
keeps its allocation (the heap domain must evolve as in the original)
but its arguments are zeroed. dispose is never removed and guards are
never rewritten. Each rewrite is justified by a derivation that the
certificate checker accepts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .certificate import Derivation, Judgment
from .lang import (
    Assign, Cons, Dispose, If, IntLit, Lookup, Mutate, Seq, Skip, Stmt,
    While, stmt_vars,
)
from .liveness import LiveStmt, LiveType, _cons_live, live_annotate
from .pointsto import WidenConfig, abs_eval, addr_part, annotate, bottom


@dataclass
class OptResult:
    optimized: Stmt
    derivation: Derivation
    entry: LiveType  # bottom points-to, computed entry live set
    exit: LiveType   # exit points-to, the caller's final live set


def rewrite(node: LiveStmt, cfg: WidenConfig) -> tuple[Stmt, Derivation]:
    """Rewrite one annotated node, returning residual and derivation."""
    s = node.stmt
    pre = LiveType(node.ann.pre, node.live_pre)
    post = LiveType(node.ann.post, node.live_post)

    if isinstance(s, Seq):
        first, first_d = rewrite(node.children[0], cfg)
        rest, rest_d = rewrite(node.children[1], cfg)
        residual: Stmt = Seq(first, rest)
        return residual, Derivation("seq_d", Judgment(s, pre, post, residual),
                                    (first_d, rest_d))
    if isinstance(s, If):
        then_r, then_d = rewrite(node.children[0], cfg)
        else_r, else_d = rewrite(node.children[1], cfg)
        residual = If(s.cond, then_r, else_r)
        return residual, Derivation("if_d", Judgment(s, pre, post, residual),
                                    (then_d, else_d))
    if isinstance(s, While):
        body_r, body_d = rewrite(node.children[0], cfg)
        residual = While(s.cond, body_r)
        return residual, Derivation("whl_d", Judgment(s, pre, post, residual),
                                    (body_d,))

    if isinstance(s, Skip):
        rule, residual = "skip", s
    elif isinstance(s, Assign):
        if s.var in node.live_post:
            rule, residual = "ass_d2", s
        else:
            rule, residual = "ass_d1", Skip()
    elif isinstance(s, Cons):
        hit, _ = _cons_live(s, node.ann.pre, node.live_post, cfg)
        if hit:
            rule, residual = "con_d2", s
        else:
            rule, residual = "con_d1", Cons(s.var, tuple(IntLit(0) for _ in s.args))
    elif isinstance(s, Lookup):
        if s.var in node.live_post:
            rule, residual = "lok_d2", s
        else:
            rule, residual = "lok_d1", Skip()
    elif isinstance(s, Mutate):
        if addr_part(abs_eval(s.target, node.ann.pre)) & node.live_post:
            rule, residual = "mut_d2", s
        else:
            rule, residual = "mut_d1", Skip()
    elif isinstance(s, Dispose):
        rule, residual = "dis_d", s
    else:
        raise TypeError(f"not a statement: {s!r}")
    return residual, Derivation(rule, Judgment(s, pre, post, residual))


def optimize(s: Stmt, final_live, cfg: WidenConfig = WidenConfig()) -> OptResult:
    """Analyze from the bottom type, then eliminate dead code.

    final_live lists what the caller observes after the program ends;
    it must only mention program variables.
    """
    variables = stmt_vars(s)
    final_live = frozenset(final_live)
    stray = {x for x in final_live if isinstance(x, str)} - set(variables)
    if stray:
        raise ValueError(f"final live set mentions unknown variables: {sorted(stray)}")
    ann = annotate(s, bottom(variables), cfg)
    live = live_annotate(ann, final_live, cfg)
    residual, derivation = rewrite(live, cfg)
    return OptResult(
        optimized=residual,
        derivation=derivation,
        entry=LiveType(ann.pre, live.live_pre),
        exit=LiveType(ann.post, live.live_post),
    )


def strip_dead_cons(s: Stmt) -> Stmt:
    """Drop zero-argument-only allocations left by dead-cons rewrites.

    After this the residual's heap domain may differ from the original's,
    so the similarity guarantee on heap domains no longer holds.
    """
    if isinstance(s, Seq):
        return Seq(strip_dead_cons(s.first), strip_dead_cons(s.rest))
    if isinstance(s, If):
        return If(s.cond, strip_dead_cons(s.then_body), strip_dead_cons(s.else_body))
    if isinstance(s, While):
        return While(s.cond, strip_dead_cons(s.body))
    if isinstance(s, Cons) and all(a == IntLit(0) for a in s.args):
        return Skip()
    return s
