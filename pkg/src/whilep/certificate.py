"""Machine-checkable derivations for the dead-code rewrite.

A derivation node records one rule application: the original statement,
its residual, the entry/exit (points-to, live) pairs, and premise
derivations. check() revalidates everything from scratch: rule/statement
shape, side conditions recomputed from the node's own entry type, the
rewrite itself, and how premises compose. The consequence rule (csq_d)
is accepted on input even though the optimizer never emits it.

Certificates serialize to JSON with statements embedded as canonical
source text; serialization is deterministic, so structurally equal
derivations produce byte-identical documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .lang import (
    Assign, Cons, Dispose, If, IntLit, Lookup, Mutate, ParseError, Seq, Skip,
    Stmt, While, free_vars, parse, pretty,
)
from .liveness import LiveType, leaf_live_pre, _cons_live
from .pointsto import (
    PointsTo, WidenConfig, abs_eval, addr_part, join, leq, live_from_list,
    live_to_list, pts_from_doc, pts_to_doc, transfer,
)


@dataclass(frozen=True)
class Judgment:
    stmt: Stmt
    pre: LiveType
    post: LiveType
    residual: Stmt


@dataclass(frozen=True)
class Derivation:
    rule: str
    judgment: Judgment
    premises: tuple = ()


RULE_ARITY = {
    "skip": 0, "ass_d1": 0, "ass_d2": 0, "con_d1": 0, "con_d2": 0,
    "lok_d1": 0, "lok_d2": 0, "mut_d1": 0, "mut_d2": 0, "dis_d": 0,
    "seq_d": 2, "if_d": 2, "whl_d": 1, "csq_d": 1,
}

_RULE_FORM = {
    "skip": Skip, "ass_d1": Assign, "ass_d2": Assign,
    "con_d1": Cons, "con_d2": Cons, "lok_d1": Lookup, "lok_d2": Lookup,
    "mut_d1": Mutate, "mut_d2": Mutate, "dis_d": Dispose,
    "seq_d": Seq, "if_d": If, "whl_d": While,
}


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    path: str = ""
    reason: str = ""


def _fail(path: str, reason: str) -> CheckResult:
    return CheckResult(False, path, reason)


ACCEPT = CheckResult(True)


def check(d: Derivation, cfg: WidenConfig = WidenConfig()) -> CheckResult:
    """Accept iff every node is a valid rule application."""
    return _check(d, "root", cfg)


def _check(d: Derivation, path: str, cfg: WidenConfig) -> CheckResult:
    j = d.judgment
    s, r = j.stmt, j.residual
    pre_p, pre_l = j.pre.pts, j.pre.live
    post_p, post_l = j.post.pts, j.post.live

    arity = RULE_ARITY.get(d.rule)
    if arity is None:
        return _fail(path, f"unknown rule {d.rule!r}")
    if len(d.premises) != arity:
        return _fail(path, f"{d.rule} takes {arity} premises, got {len(d.premises)}")
    form = _RULE_FORM.get(d.rule)
    if form is not None and not isinstance(s, form):
        return _fail(path, f"{d.rule} does not apply to {pretty(s)!r}")

    if d.rule == "csq_d":
        inner = d.premises[0]
        ij = inner.judgment
        if ij.stmt != s:
            return _fail(path, "csq_d premise proves a different statement")
        if ij.residual != r:
            return _fail(path, "csq_d premise emits a different residual")
        if not (leq(pre_p, ij.pre.pts) and pre_l >= ij.pre.live):
            return _fail(path, "csq_d entry is not below the premise entry")
        if not (leq(ij.post.pts, post_p) and ij.post.live >= post_l):
            return _fail(path, "csq_d premise exit is not below the exit")
        return _check(inner, f"{path}.premises[0]", cfg)

    if d.rule == "seq_d":
        first, rest = d.premises
        if first.judgment.stmt != s.first or rest.judgment.stmt != s.rest:
            return _fail(path, "seq_d premises do not cover the two halves")
        if first.judgment.pre != j.pre:
            return _fail(path, "seq_d entry does not match the first premise")
        if first.judgment.post != rest.judgment.pre:
            return _fail(path, "seq_d premises do not chain")
        if rest.judgment.post != j.post:
            return _fail(path, "seq_d exit does not match the second premise")
        if r != Seq(first.judgment.residual, rest.judgment.residual):
            return _fail(path, "seq_d residual is not the premises' sequence")
        for i, premise in enumerate(d.premises):
            result = _check(premise, f"{path}.premises[{i}]", cfg)
            if not result.ok:
                return result
        return ACCEPT

    if d.rule == "if_d":
        then_d, else_d = d.premises
        if then_d.judgment.stmt != s.then_body or else_d.judgment.stmt != s.else_body:
            return _fail(path, "if_d premises do not cover the branches")
        if then_d.judgment.pre.pts != pre_p or else_d.judgment.pre.pts != pre_p:
            return _fail(path, "if_d branches must start at the entry type")
        if post_p != join(then_d.judgment.post.pts, else_d.judgment.post.pts):
            return _fail(path, "if_d exit type is not the branch join")
        if then_d.judgment.post.live != post_l or else_d.judgment.post.live != post_l:
            return _fail(path, "if_d branches must end at the exit live set")
        expected = free_vars(s.cond) | then_d.judgment.pre.live | else_d.judgment.pre.live
        if pre_l != expected:
            return _fail(path, "if_d entry live set is not guard + branch entries")
        if r != If(s.cond, then_d.judgment.residual, else_d.judgment.residual):
            return _fail(path, "if_d residual does not rebuild the branches")
        for i, premise in enumerate(d.premises):
            result = _check(premise, f"{path}.premises[{i}]", cfg)
            if not result.ok:
                return result
        return ACCEPT

    if d.rule == "whl_d":
        body = d.premises[0]
        bj = body.judgment
        if bj.stmt != s.body:
            return _fail(path, "whl_d premise does not cover the body")
        if not leq(pre_p, post_p):
            return _fail(path, "whl_d entry type is not below the invariant")
        if bj.pre.pts != post_p:
            return _fail(path, "whl_d body must start at the invariant")
        if not leq(bj.post.pts, post_p):
            return _fail(path, "whl_d invariant is not closed under the body")
        if not pre_l >= free_vars(s.cond) | post_l:
            return _fail(path, "whl_d head live set misses the guard or exit")
        if bj.post.live != pre_l:
            return _fail(path, "whl_d body must end at the head live set")
        if not bj.pre.live <= pre_l:
            return _fail(path, "whl_d head live set is not closed under the body")
        if r != While(s.cond, bj.residual):
            return _fail(path, "whl_d residual does not rebuild the loop")
        return _check(body, f"{path}.premises[0]", cfg)

    # leaf rules: recompute the transfer, the live rule, the side
    # condition, and the rewrite from the node's own entry type
    if post_p != transfer(s, pre_p, cfg):
        return _fail(path, "exit points-to type does not match the transfer")
    if pre_l != leaf_live_pre(s, pre_p, post_l, cfg):
        return _fail(path, "entry live set does not match the live rule")

    if d.rule == "skip":
        cond, residual = True, s
    elif d.rule == "ass_d1":
        cond, residual = s.var not in post_l, Skip()
    elif d.rule == "ass_d2":
        cond, residual = s.var in post_l, s
    elif d.rule in ("con_d1", "con_d2"):
        hit, _ = _cons_live(s, pre_p, post_l, cfg)
        if d.rule == "con_d1":
            cond = not hit
            residual = Cons(s.var, tuple(IntLit(0) for _ in s.args))
        else:
            cond, residual = bool(hit), s
    elif d.rule == "lok_d1":
        cond, residual = s.var not in post_l, Skip()
    elif d.rule == "lok_d2":
        cond, residual = s.var in post_l, s
    elif d.rule in ("mut_d1", "mut_d2"):
        touched = addr_part(abs_eval(s.target, pre_p)) & post_l
        if d.rule == "mut_d1":
            cond, residual = not touched, Skip()
        else:
            cond, residual = bool(touched), s
    else:  # dis_d
        cond, residual = True, s
    if not cond:
        return _fail(path, f"side condition of {d.rule} does not hold")
    if r != residual:
        return _fail(path, f"residual does not match the {d.rule} rewrite")
    return ACCEPT


# --- document format ---

class FormatError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


_FIELDS = {"rule", "stmt", "residual", "pre", "post", "premises"}


def _type_doc(t: LiveType) -> dict:
    return {"pts": pts_to_doc(t.pts), "live": live_to_list(t.live)}


def _node_doc(d: Derivation) -> dict:
    j = d.judgment
    return {
        "rule": d.rule,
        "stmt": pretty(j.stmt),
        "residual": pretty(j.residual),
        "pre": _type_doc(j.pre),
        "post": _type_doc(j.post),
        "premises": [_node_doc(p) for p in d.premises],
    }


def serialize(d: Derivation) -> str:
    return json.dumps(_node_doc(d), indent=2, sort_keys=True) + "\n"


def _type_from_doc(doc, path: str) -> LiveType:
    if not isinstance(doc, dict) or set(doc) != {"pts", "live"}:
        raise FormatError(path, "expected an object with 'pts' and 'live'")
    pts_doc, live_doc = doc["pts"], doc["live"]
    if not isinstance(pts_doc, dict) or not all(
            isinstance(k, str) and isinstance(v, list) and
            all(isinstance(a, str) for a in v) for k, v in pts_doc.items()):
        raise FormatError(f"{path}.pts", "expected an object of string lists")
    if not isinstance(live_doc, list) or not all(isinstance(k, str) for k in live_doc):
        raise FormatError(f"{path}.live", "expected a list of strings")
    try:
        pts = pts_from_doc(pts_doc)
    except ValueError as err:
        raise FormatError(f"{path}.pts", str(err)) from None
    try:
        live = live_from_list(live_doc)
    except ValueError as err:
        raise FormatError(f"{path}.live", str(err)) from None
    return LiveType(pts, live)


def _parse_stmt(text, path: str) -> Stmt:
    if not isinstance(text, str):
        raise FormatError(path, "expected statement source text")
    try:
        return parse(text)
    except ParseError as err:
        raise FormatError(path, f"unparsable statement: {err}") from None


def _node_from_doc(doc, path: str) -> Derivation:
    if not isinstance(doc, dict):
        raise FormatError(path, "expected an object")
    if set(doc) != _FIELDS:
        extra = set(doc) ^ _FIELDS
        raise FormatError(path, f"wrong field set (difference: {sorted(extra)})")
    rule = doc["rule"]
    if rule not in RULE_ARITY:
        raise FormatError(f"{path}.rule", f"unknown rule {rule!r}")
    premises_doc = doc["premises"]
    if not isinstance(premises_doc, list):
        raise FormatError(f"{path}.premises", "expected a list")
    if len(premises_doc) != RULE_ARITY[rule]:
        raise FormatError(
            f"{path}.premises",
            f"{rule} takes {RULE_ARITY[rule]} premises, got {len(premises_doc)}")
    judgment = Judgment(
        _parse_stmt(doc["stmt"], f"{path}.stmt"),
        _type_from_doc(doc["pre"], f"{path}.pre"),
        _type_from_doc(doc["post"], f"{path}.post"),
        _parse_stmt(doc["residual"], f"{path}.residual"),
    )
    premises = tuple(
        _node_from_doc(p, f"{path}.premises[{i}]")
        for i, p in enumerate(premises_doc))
    return Derivation(rule, judgment, premises)


def deserialize(text: str) -> Derivation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise FormatError("root", f"not valid JSON: {err}") from None
    return _node_from_doc(doc, "root")
