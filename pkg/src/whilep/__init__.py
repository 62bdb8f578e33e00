"""whilep: a batch toolchain for a small heap-manipulating while-language.

Parse and pretty-print programs, execute them under abort-aware big-step
semantics, run flow-sensitive points-to and backward liveness analyses,
emit certified dead-code-eliminated residuals, and stress the whole
stack with differential random testing.
"""

from .lang import (
    AExp, And, Assign, BExp, BinOp, BoolLit, Cmp, Cons, Dispose, If, IntLit,
    Lookup, Mutate, Nil, Not, Or, ParseError, Seq, Skip, Stmt, Var, While,
    free_vars, parse, pretty, read_vars, seq_items, seq_of, stmt_vars,
)
from .memory import NIL, Address, NilValue, ProgState, format_value, parse_addr, value_lt
from .interp import (
    DEFAULT_FUEL, Aborted, EvalError, ExecOutcome, Final, OutOfFuel,
    eval_aexp, eval_bexp, execute, zero_state,
)
from .pointsto import (
    AddrSet, AnnStmt, ExactInt, PointsTo, WidenConfig, abs_eval, annotate,
    bottom, cap_address, join, leq, models, transfer, widen,
)
from .liveness import (
    LiveStmt, LiveType, leaf_live_pre, live_annotate, models_live,
    similar_states,
)
from .deadcode import OptResult, optimize, strip_dead_cons
from .certificate import (
    ACCEPT, CheckResult, Derivation, FormatError, Judgment, check,
    deserialize, serialize,
)
from .harness import GenConfig, gen_program, gen_state, make_similar_state, run_soundness_suite
from .cli import main

__version__ = "0.1.0"

__all__ = [
    "AExp", "And", "Assign", "BExp", "BinOp", "BoolLit", "Cmp", "Cons",
    "Dispose", "If", "IntLit", "Lookup", "Mutate", "Nil", "Not", "Or",
    "ParseError", "Seq", "Skip", "Stmt", "Var", "While", "free_vars",
    "parse", "pretty", "read_vars", "seq_items", "seq_of", "stmt_vars",
    "NIL", "Address", "NilValue", "ProgState", "format_value", "parse_addr",
    "value_lt",
    "DEFAULT_FUEL", "Aborted", "EvalError", "ExecOutcome", "Final",
    "OutOfFuel", "eval_aexp", "eval_bexp", "execute", "zero_state",
    "AddrSet", "AnnStmt", "ExactInt", "PointsTo", "WidenConfig", "abs_eval",
    "annotate", "bottom", "cap_address", "join", "leq", "models", "transfer",
    "widen",
    "LiveStmt", "LiveType", "leaf_live_pre", "live_annotate", "models_live",
    "similar_states",
    "OptResult", "optimize", "strip_dead_cons",
    "ACCEPT", "CheckResult", "Derivation", "FormatError", "Judgment",
    "check", "deserialize", "serialize",
    "GenConfig", "gen_program", "gen_state", "make_similar_state",
    "run_soundness_suite",
    "main",
    "__version__",
]
