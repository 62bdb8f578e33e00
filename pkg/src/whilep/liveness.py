"""Backward liveness over stack variables and heap cells.

A live set mixes variable names with abstract addresses. The analysis
walks a points-to-annotated program backwards from a caller-supplied
final live set; each node's entry set records what must be preserved
for the program to compute the same live results. Heap writes never
kill (the written cell is only known up to a set), and the guard of a
branch or loop is always live.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lang import (
    Assign, Cons, Dispose, If, Lookup, Mutate, Seq, Skip, Stmt, While,
    free_vars,
)
from .memory import Address, ProgState
from .pointsto import (
    AnnStmt, PointsTo, WidenConfig, abs_eval, addr_part, cap_address,
    cons_block,
)


@dataclass(frozen=True)
class LiveType:
    """A points-to type paired with a live set; the unit of judgment."""

    pts: PointsTo
    live: frozenset


def live_pre_expr(e, post: frozenset) -> frozenset:
    """Entry live set of evaluating e with post live afterwards."""
    return post | free_vars(e)


@dataclass
class LiveStmt:
    """A points-to-annotated node plus its entry/exit live sets."""

    ann: AnnStmt
    live_pre: frozenset
    live_post: frozenset
    children: tuple = ()

    @property
    def stmt(self) -> Stmt:
        return self.ann.stmt


def _cons_live(s: Cons, pre: PointsTo, post: frozenset, cfg: WidenConfig):
    """The touched-and-live set I and the entry live set for a cons."""
    n = len(s.args)
    _, cells = cons_block(pre, n, cfg.instance_cap)
    touched = cells | {s.var}
    hit = touched & post
    if not hit:
        return hit, post
    if hit == {s.var}:
        return hit, post - {s.var}
    live_positions = {a.index for a in cells if a in post}
    entry = set(post) - {s.var}
    for j in live_positions:
        entry |= free_vars(s.args[j - 1])
    return hit, frozenset(entry)


def leaf_live_pre(s: Stmt, pre_pts: PointsTo, post: frozenset,
                  cfg: WidenConfig) -> frozenset:
    """Entry live set of a leaf statement given its exit live set."""
    if isinstance(s, Skip):
        return post
    if isinstance(s, Assign):
        if s.var not in post:
            return post
        return (post - {s.var}) | free_vars(s.expr)
    if isinstance(s, Cons):
        return _cons_live(s, pre_pts, post, cfg)[1]
    if isinstance(s, Lookup):
        if s.var not in post:
            return post
        targets = addr_part(abs_eval(s.addr, pre_pts))
        return (post - {s.var}) | free_vars(s.addr) | targets
    if isinstance(s, Mutate):
        targets = addr_part(abs_eval(s.target, pre_pts))
        entry = post | free_vars(s.target)
        if targets & post:
            entry |= free_vars(s.value)
        return entry
    if isinstance(s, Dispose):
        return post | free_vars(s.addr)
    raise TypeError(f"not a leaf statement: {s!r}")


_MAX_ITER = 10_000


def live_annotate(ann: AnnStmt, post: frozenset, cfg: WidenConfig) -> LiveStmt:
    """Annotate every node with entry/exit live sets, backwards from post."""
    s = ann.stmt
    if isinstance(s, Seq):
        rest = live_annotate(ann.children[1], post, cfg)
        first = live_annotate(ann.children[0], rest.live_pre, cfg)
        return LiveStmt(ann, first.live_pre, post, (first, rest))
    if isinstance(s, If):
        then_live = live_annotate(ann.children[0], post, cfg)
        else_live = live_annotate(ann.children[1], post, cfg)
        pre = free_vars(s.cond) | then_live.live_pre | else_live.live_pre
        return LiveStmt(ann, pre, post, (then_live, else_live))
    if isinstance(s, While):
        # least fixpoint above the exit set plus the guard: the body is
        # re-analyzed with the loop head as its exit until nothing grows
        head = post | free_vars(s.cond)
        for _ in range(_MAX_ITER):
            body = live_annotate(ann.children[0], head, cfg)
            grown = head | body.live_pre
            if grown == head:
                return LiveStmt(ann, head, post, (body,))
            head = grown
        raise RuntimeError("loop liveness failed to stabilize")
    return LiveStmt(ann, leaf_live_pre(s, ann.pre, post, cfg), post)


def models_live(st: ProgState, p: PointsTo, live: frozenset,
                cfg: WidenConfig) -> bool:
    """The model relation restricted to the live portion of the state.

    The heap-domain clause stays global (every allocated cell is tracked);
    the value clauses apply only to live variables and live cells.
    """
    cap = cfg.instance_cap
    for a in st.heap:
        if cap_address(a, cap) not in p.env:
            return False
    for x, v in st.stack.items():
        if x in live and isinstance(v, Address):
            if cap_address(v, cap) not in p.image(x):
                return False
    for a, v in st.heap.items():
        abstract = cap_address(a, cap)
        if abstract in live and isinstance(v, Address):
            if cap_address(v, cap) not in p.image(abstract):
                return False
    return True


def similar_states(st1: ProgState, st2: ProgState, p: PointsTo,
                   live: frozenset, cfg: WidenConfig) -> bool:
    """Same heap domain, both model (p, live), and agreement on live data."""
    if st1.heap.keys() != st2.heap.keys():
        return False
    if not (models_live(st1, p, live, cfg) and models_live(st2, p, live, cfg)):
        return False
    for key in live:
        if isinstance(key, str):
            if st1.stack.get(key) != st2.stack.get(key):
                return False
    cap = cfg.instance_cap
    for a, v in st1.heap.items():
        if cap_address(a, cap) in live and st2.heap[a] != v:
            return False
    return True
