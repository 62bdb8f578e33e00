"""Random programs, random states, and differential soundness suites.

gen_program grows seed-reproducible programs that exercise every
statement form, with loops biased toward counter-bounded shapes and an
occasional conditional re-allocation pattern (two possible blocks behind
one variable) so that weak heap updates actually happen. gen_state
builds a state satisfying a given points-to type.

run_soundness_suite replays the analyses' guarantees against the
interpreter: preservation of the points-to model (t1), of the
live-restricted model (t2), similarity preservation on twin states (t3),
and original-versus-optimized similarity (t4), plus the abstract
evaluation guarantee on single expressions (lemma1). Twin states only
rerandomize storage the programs can never consult (dead variables no
expression reads; dead cells when the program is lookup-free): anything
looser would let a dead evaluation abort one run and not the other,
which no analysis in this package claims to prevent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .deadcode import optimize
from .interp import Aborted, EvalError, Final, OutOfFuel, eval_aexp, execute
from .lang import (
    AExp, And, Assign, BExp, BinOp, BoolLit, Cmp, Cons, Dispose, If, IntLit,
    Lookup, Mutate, Nil, Not, Or, Seq, Skip, Stmt, Var, While, free_vars,
    read_vars, seq_of, stmt_vars,
)
from .memory import NIL, Address, ProgState
from .liveness import live_annotate, models_live, similar_states
from .pointsto import (
    AddrSet, ExactInt, PointsTo, WidenConfig, abs_eval, annotate, bottom,
    cap_address, cons_block, models,
)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_stmts: int = 12
    max_vars: int = 4
    int_range: tuple[int, int] = (-3, 9)
    cons_max_arity: int = 3
    loop_bound_bias: float = 0.85


def gen_aexp(rng: random.Random, cfg: GenConfig, names, depth: int = 2) -> AExp:
    if depth <= 0 or rng.random() < 0.55:
        roll = rng.random()
        if roll < 0.45:
            return IntLit(rng.randint(*cfg.int_range))
        if roll < 0.92:
            return Var(rng.choice(names))
        return Nil()
    op = rng.choice(("+", "+", "-", "*"))
    return BinOp(op, gen_aexp(rng, cfg, names, depth - 1),
                 gen_aexp(rng, cfg, names, depth - 1))


def gen_bexp(rng: random.Random, cfg: GenConfig, names) -> BExp:
    roll = rng.random()
    if roll < 0.05:
        return BoolLit(rng.random() < 0.5)
    lhs = Var(rng.choice(names)) if rng.random() < 0.7 else gen_aexp(rng, cfg, names, 1)
    cmp = Cmp(rng.choice(("=", "<", "<=")), lhs, gen_aexp(rng, cfg, names, 1))
    if roll < 0.75:
        return cmp
    if roll < 0.85:
        return Not(cmp)
    other = Cmp(rng.choice(("=", "<", "<=")), Var(rng.choice(names)),
                gen_aexp(rng, cfg, names, 1))
    return And(cmp, other) if roll < 0.95 else Or(cmp, other)


class _Gen:
    def __init__(self, rng: random.Random, cfg: GenConfig):
        self.rng = rng
        self.cfg = cfg
        self.names = [f"v{i + 1}" for i in range(max(1, cfg.max_vars))]
        self.ptrs: set[str] = set()  # variables likely holding addresses

    def program(self) -> Stmt:
        return seq_of(self.block(max(1, self.cfg.max_stmts), frozenset()))

    def block(self, budget: int, protected: frozenset) -> list[Stmt]:
        items: list[Stmt] = []
        while budget > 0:
            made, cost = self.stmt(budget, protected)
            items.extend(made)
            budget -= cost
        return items

    def ptr_expr(self) -> AExp:
        rng = self.rng
        if self.ptrs and rng.random() < 0.9:
            base = Var(rng.choice(sorted(self.ptrs)))
            roll = rng.random()
            if roll < 0.72:
                return base
            if roll < 0.88:
                return BinOp("+", base, IntLit(1))
            if roll < 0.94:
                return BinOp("+", base, IntLit(2))
            return BinOp("-", base, IntLit(1))
        return gen_aexp(rng, self.cfg, self.names, 1)

    def cons_arg(self) -> AExp:
        roll = self.rng.random()
        if roll < 0.5:
            return IntLit(self.rng.randint(*self.cfg.int_range))
        if roll < 0.85:
            return Var(self.rng.choice(self.names))
        return self.calc_expr(1)

    def calc_expr(self, depth: int = 2) -> AExp:
        """Arithmetic biased toward integer-valued data, so that generated
        assignments usually evaluate rather than abort."""
        rng = self.rng
        if depth <= 0 or rng.random() < 0.5:
            plain = [x for x in self.names if x not in self.ptrs]
            if plain and rng.random() < 0.5:
                return Var(rng.choice(plain))
            return IntLit(rng.randint(*self.cfg.int_range))
        op = rng.choice(("+", "+", "-", "*"))
        return BinOp(op, self.calc_expr(depth - 1), self.calc_expr(depth - 1))

    def stmt(self, budget: int, protected: frozenset):
        """One generation step: ([statements], units consumed)."""
        rng = self.rng
        roll = rng.random()
        writable = [x for x in self.names if x not in protected]
        if budget >= 3 and roll < 0.08:
            then_budget = rng.randint(1, budget - 2)
            else_budget = rng.randint(1, budget - 1 - then_budget)
            cond = gen_bexp(rng, self.cfg, self.names)
            before = set(self.ptrs)
            then_body = seq_of(self.block(then_budget, protected))
            after_then = self.ptrs
            self.ptrs = before
            else_body = seq_of(self.block(else_budget, protected))
            self.ptrs = after_then & self.ptrs  # pointer on both paths only
            return [If(cond, then_body, else_body)], 1 + then_budget + else_budget
        if budget >= 5 and roll < 0.18 and writable:
            if rng.random() < self.cfg.loop_bound_bias:
                counter = rng.choice(writable)
                self.ptrs.discard(counter)
                bound = rng.randint(1, 4)
                body_budget = rng.randint(1, budget - 4)
                before = set(self.ptrs)
                body = self.block(body_budget, protected | {counter})
                self.ptrs &= before  # body may not run at all
                body.append(Assign(counter, BinOp("+", Var(counter), IntLit(1))))
                loop = While(Cmp("<", Var(counter), IntLit(bound)), seq_of(body))
                return [Assign(counter, IntLit(0)), loop], 3 + body_budget
            body_budget = rng.randint(1, budget - 1)
            cond = gen_bexp(rng, self.cfg, self.names)
            before = set(self.ptrs)
            loop = While(cond, seq_of(self.block(body_budget, protected)))
            self.ptrs &= before
            return [loop], 1 + body_budget
        if budget >= 4 and roll < 0.24 and writable:
            # conditional re-allocation: x may point at either block, so a
            # later write through x is a weak update
            x = rng.choice(writable)
            arity = rng.randint(1, self.cfg.cons_max_arity)
            first = Cons(x, tuple(self.cons_arg() for _ in range(arity)))
            again = Cons(x, tuple(self.cons_arg() for _ in range(arity)))
            branch = If(gen_bexp(rng, self.cfg, self.names), again, Skip())
            write = Mutate(self.ptr_expr() if rng.random() < 0.3 else Var(x),
                           self.cons_arg())
            self.ptrs.add(x)
            return [first, branch, write], 4
        return [self.leaf(writable)], 1

    def leaf(self, writable) -> Stmt:
        rng = self.rng
        roll = rng.random()
        target = rng.choice(writable) if writable else None
        if roll < 0.26 and target:
            if self.ptrs and rng.random() < 0.2:
                expr = Var(rng.choice(sorted(self.ptrs)))  # pointer copy
            else:
                expr = self.calc_expr(2)
            if free_vars(expr) & self.ptrs:
                self.ptrs.add(target)
            else:
                self.ptrs.discard(target)
            return Assign(target, expr)
        if roll < 0.48 and target:
            arity = rng.randint(1, self.cfg.cons_max_arity)
            self.ptrs.add(target)
            return Cons(target, tuple(self.cons_arg() for _ in range(arity)))
        if roll < 0.64 and target and self.ptrs:
            self.ptrs.discard(target)  # cell contents may be anything
            return Lookup(target, self.ptr_expr())
        if roll < 0.84 and self.ptrs:
            value = Var(rng.choice(self.names)) if rng.random() < 0.4 \
                else self.calc_expr(1)
            return Mutate(self.ptr_expr(), value)
        if roll < 0.88 and self.ptrs:
            return Dispose(self.ptr_expr())
        if roll < 0.94:
            return Skip()
        if target:
            return Assign(target, gen_aexp(rng, self.cfg, self.names, 1))
        return Skip()


def gen_program(cfg: GenConfig) -> Stmt:
    """Seed-reproducible random program; equal configs give equal trees."""
    return _Gen(random.Random(f"prog:{cfg.seed}"), cfg).program()


# --- states ---

def _synthetic_ptype(rng: random.Random, variables, cap: int) -> PointsTo:
    """A small nontrivial points-to type over the given variables."""
    env: dict = {x: frozenset() for x in variables}
    blocks = {(rng.randint(1, 3), rng.randint(1, cap))
              for _ in range(rng.randint(1, 3))}
    cells = [Address(n, u, j) for (n, u) in sorted(blocks) for j in range(1, n + 1)]
    for cell in cells:
        env[cell] = frozenset()
    for x in variables:
        if rng.random() < 0.5:
            env[x] = frozenset(rng.sample(cells, rng.randint(1, min(2, len(cells)))))
    for cell in cells:
        if rng.random() < 0.3:
            env[cell] = frozenset((rng.choice(cells),))
    return PointsTo(env)


def _random_value(rng: random.Random, cfg: GenConfig, image: frozenset):
    roll = rng.random()
    if image and roll < 0.45:
        return rng.choice(sorted(image))
    if roll < 0.85:
        return rng.randint(*cfg.int_range)
    return NIL


def _gen_state(rng: random.Random, cfg: GenConfig, p: PointsTo) -> ProgState:
    # draw in sorted order so a seed reproduces across processes
    stack = {x: _random_value(rng, cfg, p.image(x))
             for x in sorted(p.variables())}
    heap = {}
    for a in sorted(p.tracked()):
        if rng.random() < 0.9:
            heap[a] = _random_value(rng, cfg, p.image(a))
    return ProgState(stack, heap)


def gen_state(cfg: GenConfig, p: PointsTo) -> ProgState:
    """A state satisfying the points-to model relation for p."""
    return _gen_state(random.Random(f"state:{cfg.seed}"), cfg, p)


def _junk_value(rng: random.Random, cfg: GenConfig):
    roll = rng.random()
    if roll < 0.5:
        return rng.randint(*cfg.int_range)
    if roll < 0.7:
        return NIL
    length = rng.randint(1, 3)
    return Address(length, rng.randint(1, 4), rng.randint(1, length))


def _has_lookup(s: Stmt) -> bool:
    if isinstance(s, Lookup):
        return True
    if isinstance(s, Seq):
        return _has_lookup(s.first) or _has_lookup(s.rest)
    if isinstance(s, If):
        return _has_lookup(s.then_body) or _has_lookup(s.else_body)
    if isinstance(s, While):
        return _has_lookup(s.body)
    return False


def make_similar_state(rng: random.Random, cfg: GenConfig, st: ProgState,
                       program: Stmt, entry_live: frozenset,
                       widen: WidenConfig) -> ProgState:
    """A twin similar to st at (entry type, entry_live), rerandomized only
    where the program provably never looks: dead variables outside its
    read set, and dead cells when it contains no lookup."""
    twin = st.copy()
    reads = read_vars(program)
    for x in twin.stack:
        if x not in entry_live and x not in reads:
            twin.stack[x] = _junk_value(rng, cfg)
    if not _has_lookup(program):
        cap = widen.instance_cap
        for a in twin.heap:
            if cap_address(a, cap) not in entry_live:
                twin.heap[a] = _junk_value(rng, cfg)
    return twin


# --- differential suites ---

_ALL_CHECKS = ("t1", "t2", "t3", "t4", "lemma1")


def _zero_dead_cons_args(deriv, widen: WidenConfig) -> Stmt:
    """The derivation's residual with every dead allocation argument
    replaced by 0.

    A kept allocation still evaluates arguments destined for dead cells,
    and when dead-code elimination upstream changed what those arguments
    see, that evaluation alone can abort the residual. Zeroing the dead
    positions removes exactly those evaluations and nothing else, which
    lets the suite tell that documented divergence apart from a genuine
    analysis bug.
    """
    j = deriv.judgment
    stmt = j.stmt
    if deriv.rule == "seq_d":
        assert isinstance(stmt, Seq)
        return Seq(_zero_dead_cons_args(deriv.premises[0], widen),
                   _zero_dead_cons_args(deriv.premises[1], widen))
    if deriv.rule == "if_d":
        assert isinstance(stmt, If)
        return If(stmt.cond,
                  _zero_dead_cons_args(deriv.premises[0], widen),
                  _zero_dead_cons_args(deriv.premises[1], widen))
    if deriv.rule == "whl_d":
        assert isinstance(stmt, While)
        return While(stmt.cond, _zero_dead_cons_args(deriv.premises[0], widen))
    if deriv.rule == "csq_d":
        return _zero_dead_cons_args(deriv.premises[0], widen)
    if deriv.rule == "con_d2":
        assert isinstance(stmt, Cons)
        _, cells = cons_block(j.pre.pts, len(stmt.args), widen.instance_cap)
        live_positions = {a.index for a in cells if a in j.post.live}
        args = tuple(arg if i + 1 in live_positions else IntLit(0)
                     for i, arg in enumerate(stmt.args))
        return Cons(stmt.var, args)
    return j.residual


def _lemma1_trial(rng: random.Random, cfg: GenConfig, widen: WidenConfig) -> bool:
    names = [f"v{i + 1}" for i in range(max(1, cfg.max_vars))]
    p = _synthetic_ptype(rng, names, widen.instance_cap)
    st = _gen_state(rng, cfg, p)
    e = gen_aexp(rng, cfg, names, rng.randint(1, 3))
    abstract = abs_eval(e, p)
    try:
        value = eval_aexp(e, st.stack)
    except EvalError:
        return True  # both shapes permit failure
    if isinstance(abstract, ExactInt):
        return isinstance(value, int) and value == abstract.value
    if isinstance(value, Address):
        return cap_address(value, widen.instance_cap) in abstract.addrs
    return True


def run_soundness_suite(n_trials: int, gen_cfg: GenConfig = GenConfig(),
                        checks=_ALL_CHECKS,
                        widen: WidenConfig = WidenConfig(),
                        fuel: int = 1500) -> dict:
    """Run the requested differential checks over n_trials fresh seeds.

    Aborting or fuel-starved reference runs are counted as skipped, never
    as passes. The report carries reproduction seeds for every failure.
    """
    checks = tuple(checks)
    report: dict = {"trials": n_trials, "fuel": fuel, "checks": {}}
    for name in checks:
        entry = {"pass": 0, "skip": 0, "fail": 0, "failing_seeds": []}
        if name == "t4":
            entry["corrected"] = 0
            entry["dead_eval_aborts"] = 0
        report["checks"][name] = entry

    def record(name: str, ok: bool, seed: int):
        entry = report["checks"][name]
        if ok:
            entry["pass"] += 1
        else:
            entry["fail"] += 1
            if len(entry["failing_seeds"]) < 20:
                entry["failing_seeds"].append(seed)

    for trial in range(n_trials):
        seed = gen_cfg.seed + trial
        trial_cfg = replace(gen_cfg, seed=seed)
        rng = random.Random(f"suite:{seed}")

        if "lemma1" in checks:
            record("lemma1", _lemma1_trial(rng, trial_cfg, widen), seed)

        program_checks = [c for c in checks if c != "lemma1"]
        if not program_checks:
            continue
        program = gen_program(trial_cfg)
        variables = sorted(stmt_vars(program))
        base = bottom(variables)
        entry_p = _synthetic_ptype(rng, variables, widen.instance_cap) \
            if rng.random() < 0.35 else base
        ann = annotate(program, entry_p, widen)
        st = _gen_state(rng, trial_cfg, entry_p)
        outcome = execute(program, st, fuel)

        if "t1" in checks:
            if isinstance(outcome, Final):
                record("t1", models(outcome.state, ann.post, widen), seed)
            else:
                report["checks"]["t1"]["skip"] += 1

        final_live = frozenset(x for x in variables if rng.random() < 0.5)
        live = None
        if "t2" in checks or "t3" in checks:
            live = live_annotate(ann, final_live, widen)

        if "t2" in checks:
            if isinstance(outcome, Final):
                ok = models_live(st, entry_p, live.live_pre, widen) and \
                    models_live(outcome.state, ann.post, final_live, widen)
                record("t2", ok, seed)
            else:
                report["checks"]["t2"]["skip"] += 1

        if "t3" in checks:
            if isinstance(outcome, Final):
                twin = make_similar_state(rng, trial_cfg, st, program,
                                          live.live_pre, widen)
                ok = similar_states(st, twin, entry_p, live.live_pre, widen)
                twin_outcome = execute(program, twin, fuel)
                ok = ok and isinstance(twin_outcome, Final) and similar_states(
                    outcome.state, twin_outcome.state, ann.post, final_live, widen)
                record("t3", ok, seed)
            else:
                report["checks"]["t3"]["skip"] += 1

        if "t4" in checks:
            result = optimize(program, final_live, widen)
            if entry_p is base:
                st4, orig4 = st, outcome
            else:
                st4 = _gen_state(rng, trial_cfg, base)
                orig4 = execute(program, st4, fuel)
            twin = make_similar_state(rng, trial_cfg, st4, program,
                                      result.entry.live, widen)
            opt_outcome = execute(result.optimized, twin, fuel)
            if isinstance(orig4, Final):
                if isinstance(opt_outcome, Aborted):
                    # a kept allocation's dead argument may abort on data a
                    # removed statement used to overwrite; retry with those
                    # dead positions zeroed — only that exact divergence is
                    # excused, and the similarity bar still applies
                    patched = _zero_dead_cons_args(result.derivation, widen)
                    if patched != result.optimized:
                        retry = execute(patched, twin, fuel)
                        if isinstance(retry, Final) and similar_states(
                                orig4.state, retry.state, result.exit.pts,
                                result.exit.live, widen):
                            report["checks"]["t4"]["dead_eval_aborts"] += 1
                            report["checks"]["t4"]["skip"] += 1
                            continue
                ok = similar_states(st4, twin, base, result.entry.live, widen) \
                    and isinstance(opt_outcome, Final) \
                    and similar_states(orig4.state, opt_outcome.state,
                                       result.exit.pts, result.exit.live, widen)
                record("t4", ok, seed)
            elif isinstance(orig4, Aborted):
                # nothing to compare, but an optimized run that now finishes
                # is the abort-removal effect worth counting
                report["checks"]["t4"]["skip"] += 1
                if isinstance(opt_outcome, Final):
                    report["checks"]["t4"]["corrected"] += 1
            else:
                report["checks"]["t4"]["skip"] += 1

    return report
