"""Flow-sensitive points-to analysis over stack variables and heap cells.

A points-to type maps every program variable, plus a tracked set of
abstract addresses, to the set of addresses its value may be. Abstract
addresses mirror runtime ones; allocation inside loops is kept finite by
an instance cap: once a block's instance number would exceed the cap,
it is folded onto the cap instance, which from then on stands for every
concrete instance at or above it (a summary). Strong updates are only
allowed through a singleton target below the cap.

The model relation compares runtime addresses against the analysis
through cap_address, which is the identity until the cap is reached.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lang import (
    AExp, Assign, BinOp, Cons, Dispose, If, IntLit, Lookup, Mutate, Nil,
    Seq, Skip, Stmt, Var, While,
)
from .memory import Address, ProgState, addr_shift, parse_addr

Key = object  # str (variable) or Address (tracked cell)


@dataclass(frozen=True)
class WidenConfig:
    """Analysis knobs: the instance cap K and default interpreter fuel.

    break_weak_update is a sabotage switch for the test harness: it makes
    multi-target heap writes drop the union with the old image, which is
    unsound and must be caught by the differential suites.
    """

    instance_cap: int = 3
    fuel: int = 100_000
    break_weak_update: bool = False


EMPTY: frozenset = frozenset()


@dataclass(frozen=True)
class PointsTo:
    env: dict  # Key -> frozenset[Address]

    def image(self, key: Key) -> frozenset:
        return self.env.get(key, EMPTY)

    def tracked(self) -> frozenset:
        return frozenset(k for k in self.env if isinstance(k, Address))

    def variables(self) -> frozenset:
        return frozenset(k for k in self.env if isinstance(k, str))


def bottom(variables) -> PointsTo:
    """Least type over the given variables: everything points nowhere."""
    return PointsTo({x: EMPTY for x in variables})


def leq(p: PointsTo, q: PointsTo) -> bool:
    for key, image in p.env.items():
        if key not in q.env:
            return False
        if not image <= q.env[key]:
            return False
    return True


def join(p: PointsTo, q: PointsTo) -> PointsTo:
    env = dict(p.env)
    for key, image in q.env.items():
        old = env.get(key)
        env[key] = image if old is None else old | image
    return PointsTo(env)


def cap_address(a: Address, cap: int) -> Address:
    """Fold instances beyond the cap onto the cap's summary instance."""
    if a.instance <= cap:
        return a
    return Address(a.length, cap, a.index)


def widen(p: PointsTo, cap: int) -> PointsTo:
    env: dict = {}
    changed = False
    for key, image in p.env.items():
        if isinstance(key, Address) and key.instance > cap:
            key = cap_address(key, cap)
            changed = True
        capped = frozenset(cap_address(a, cap) for a in image)
        if len(capped) != len(image):
            changed = True
        old = env.get(key)
        env[key] = capped if old is None else old | capped
    return PointsTo(env) if changed else p


# --- abstract expression evaluation ---

@dataclass(frozen=True)
class ExactInt:
    value: int


@dataclass(frozen=True)
class AddrSet:
    addrs: frozenset


AbsValue = ExactInt | AddrSet


def addr_part(v: AbsValue) -> frozenset:
    return v.addrs if isinstance(v, AddrSet) else EMPTY


def _shifts(addrs: frozenset, k: int) -> frozenset:
    out = set()
    for a in addrs:
        shifted = addr_shift(a, k)
        if shifted is not None:
            out.add(shifted)
    return frozenset(out)


def _variants(addrs: frozenset) -> frozenset:
    """Every in-block shift of every address: the unknown-offset closure."""
    out = set()
    for a in addrs:
        for i in range(1, a.length + 1):
            out.add(Address(a.length, a.instance, i))
    return frozenset(out)


def abs_eval(e: AExp, p: PointsTo) -> AbsValue:
    """Abstract value of e: an exact integer or a set of possible addresses.

    An AddrSet V promises only that an address result lies in V; the
    concrete value may always be some integer or nil instead.
    """
    if isinstance(e, IntLit):
        return ExactInt(e.value)
    if isinstance(e, Nil):
        return AddrSet(EMPTY)
    if isinstance(e, Var):
        return AddrSet(p.image(e.name))
    if isinstance(e, BinOp):
        v1 = abs_eval(e.lhs, p)
        v2 = abs_eval(e.rhs, p)
        if isinstance(v1, ExactInt) and isinstance(v2, ExactInt):
            if e.op == "+":
                return ExactInt(v1.value + v2.value)
            if e.op == "-":
                return ExactInt(v1.value - v2.value)
            return ExactInt(v1.value * v2.value)
        if e.op == "*":
            return AddrSet(EMPTY)  # multiplication never yields an address
        if isinstance(v2, ExactInt):  # addrs (+|-) known offset
            k = v2.value if e.op == "+" else -v2.value
            return AddrSet(_shifts(v1.addrs, k))
        if isinstance(v1, ExactInt):  # known int + addrs; int - addrs is undefined
            if e.op == "+":
                return AddrSet(_shifts(v2.addrs, v1.value))
            return AddrSet(EMPTY)
        # both sides may be addresses or unknown integers: any in-block
        # shift of the left side, plus of the right side under +
        if e.op == "+":
            return AddrSet(_variants(v1.addrs) | _variants(v2.addrs))
        return AddrSet(_variants(v1.addrs))
    raise TypeError(f"not an arithmetic expression: {e!r}")


# --- transfer functions and annotation ---

@dataclass
class AnnStmt:
    """A statement with its entry and exit types; children in source order
    (first/rest for Seq, then/else for If, body for While)."""

    stmt: Stmt
    pre: PointsTo
    post: PointsTo
    children: tuple = ()
    invariant: PointsTo | None = None  # While only


def cons_block(p: PointsTo, length: int, cap: int) -> tuple[int, frozenset]:
    """Abstract allocation at a cons of the given arity.

    Returns (v, cells): v is the least instance whose block is untracked
    by p, and cells are the capped addresses of every block instance the
    allocation may occupy (instances 1..v, folded at the cap).
    """
    used = {k.instance for k in p.env
            if isinstance(k, Address) and k.length == length}
    v = 1
    while v in used:
        v += 1
    cells = frozenset(
        Address(length, min(i, cap), j)
        for i in range(1, v + 1)
        for j in range(1, length + 1))
    return v, cells


def _transfer_leaf(s: Stmt, p: PointsTo, cfg: WidenConfig) -> PointsTo:
    if isinstance(s, (Skip, Dispose)):
        return p
    if isinstance(s, Assign):
        env = dict(p.env)
        env[s.var] = addr_part(abs_eval(s.expr, p))
        return PointsTo(env)
    if isinstance(s, Cons):
        n = len(s.args)
        images = [addr_part(abs_eval(a, p)) for a in s.args]
        v, _ = cons_block(p, n, cfg.instance_cap)
        env = dict(p.env)
        env[s.var] = frozenset(Address(n, i, 1) for i in range(1, v + 1))
        for i in range(1, v + 1):
            for j in range(1, n + 1):
                cell = Address(n, i, j)
                env[cell] = env.get(cell, EMPTY) | images[j - 1]
        return widen(PointsTo(env), cfg.instance_cap)
    if isinstance(s, Lookup):
        targets = addr_part(abs_eval(s.addr, p))
        image: frozenset = EMPTY
        for a in targets:
            image |= p.image(a)
        env = dict(p.env)
        env[s.var] = image
        return PointsTo(env)
    if isinstance(s, Mutate):
        targets = addr_part(abs_eval(s.target, p))
        if not targets:
            return p
        stored = addr_part(abs_eval(s.value, p))
        env = dict(p.env)
        only = next(iter(targets)) if len(targets) == 1 else None
        if only is not None and only.instance < cfg.instance_cap:
            env[only] = stored  # strong update: unique, non-summary target
        else:
            for a in targets:
                if cfg.break_weak_update:
                    env[a] = stored
                else:
                    env[a] = env.get(a, EMPTY) | stored
        return PointsTo(env)
    raise TypeError(f"not a leaf statement: {s!r}")


_MAX_ITER = 10_000


def annotate(s: Stmt, p: PointsTo, cfg: WidenConfig) -> AnnStmt:
    """Run the analysis from entry type p, annotating every node."""
    if isinstance(s, Seq):
        first = annotate(s.first, p, cfg)
        rest = annotate(s.rest, first.post, cfg)
        return AnnStmt(s, p, rest.post, (first, rest))
    if isinstance(s, If):
        then_ann = annotate(s.then_body, p, cfg)
        else_ann = annotate(s.else_body, p, cfg)
        return AnnStmt(s, p, join(then_ann.post, else_ann.post),
                       (then_ann, else_ann))
    if isinstance(s, While):
        # inflationary iteration; the address universe under the cap is
        # finite, so this terminates with entry <= inv and step(inv) <= inv
        inv = p
        for _ in range(_MAX_ITER):
            body = annotate(s.body, inv, cfg)
            grown = join(inv, body.post)
            if grown == inv:
                return AnnStmt(s, p, inv, (body,), invariant=inv)
            inv = grown
        raise RuntimeError("loop analysis failed to stabilize")
    post = _transfer_leaf(s, p, cfg)
    return AnnStmt(s, p, post)


def transfer(s: Stmt, p: PointsTo, cfg: WidenConfig) -> PointsTo:
    """Exit type of s from entry type p."""
    return annotate(s, p, cfg).post


def models(st: ProgState, p: PointsTo, cfg: WidenConfig) -> bool:
    """Does the runtime state satisfy the type, up to instance capping?"""
    cap = cfg.instance_cap
    for a in st.heap:
        if cap_address(a, cap) not in p.env:
            return False
    for x, v in st.stack.items():
        if isinstance(v, Address) and cap_address(v, cap) not in p.image(x):
            return False
    for a, v in st.heap.items():
        if isinstance(v, Address):
            if cap_address(v, cap) not in p.image(cap_address(a, cap)):
                return False
    return True


# --- textual form (shared by the certificate format and the CLI) ---

def key_to_str(key: Key) -> str:
    return key if isinstance(key, str) else repr(key)


def key_from_str(text: str) -> Key | None:
    """Inverse of key_to_str; None when text is neither shape."""
    a = parse_addr(text)
    if a is not None:
        return a
    if text.isidentifier():
        return text
    return None


def key_sort_key(key: Key):
    if isinstance(key, str):
        return (0, key, 0, 0, 0)
    return (1, "", key.length, key.instance, key.index)


def pts_to_doc(p: PointsTo) -> dict:
    return {
        key_to_str(key): [repr(a) for a in sorted(image)]
        for key, image in p.env.items()
    }


def pts_from_doc(doc: dict) -> PointsTo:
    env = {}
    for text, addrs in doc.items():
        key = key_from_str(text)
        if key is None:
            raise ValueError(f"bad points-to key: {text!r}")
        image = set()
        for item in addrs:
            a = parse_addr(item)
            if a is None:
                raise ValueError(f"bad address in image of {text!r}: {item!r}")
            image.add(a)
        env[key] = frozenset(image)
    return PointsTo(env)


def live_to_list(live: frozenset) -> list:
    return [key_to_str(k) for k in sorted(live, key=key_sort_key)]


def live_from_list(items: list) -> frozenset:
    out = set()
    for text in items:
        key = key_from_str(text)
        if key is None:
            raise ValueError(f"bad live-set entry: {text!r}")
        out.add(key)
    return frozenset(out)
