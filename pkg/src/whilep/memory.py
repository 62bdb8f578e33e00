"""Runtime values and states: addresses, stacks, heaps.

An address addr(n, u, i) names cell i of the u-th allocated block of
length n; indices run from 1 to n. Blocks are never merged, so a block
is identified by (length, instance) and a cell by the full triple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union


@dataclass(frozen=True, order=True)
class Address:
    length: int
    instance: int
    index: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"block length must be >= 1, got {self.length}")
        if self.instance < 1:
            raise ValueError(f"instance must be >= 1, got {self.instance}")
        if not 1 <= self.index <= self.length:
            raise ValueError(
                f"index must be in 1..{self.length}, got {self.index}")

    def __repr__(self):
        return f"addr({self.length},{self.instance},{self.index})"


class NilValue:
    """The nil constant; a single shared instance lives in NIL."""

    __slots__ = ()

    def __repr__(self):
        return "nil"

    def __eq__(self, other):
        return isinstance(other, NilValue)

    def __hash__(self):
        return hash(NilValue)


NIL = NilValue()

Value = Union[int, NilValue, Address]

Stack = dict  # str -> Value, total on the program's variables
Heap = dict   # Address -> Value, finite


@dataclass
class ProgState:
    stack: Stack
    heap: Heap

    def copy(self) -> "ProgState":
        return ProgState(dict(self.stack), dict(self.heap))


def fresh_instance(allocated: Iterable[Address], length: int) -> int:
    """Least u >= 1 such that no cell of block (length, u) is allocated."""
    used = {a.instance for a in allocated if a.length == length}
    u = 1
    while u in used:
        u += 1
    return u


def addr_shift(a: Address, k: int) -> Address | None:
    """Move k cells within a's block; None when the result leaves 1..length."""
    i = a.index + k
    if 1 <= i <= a.length:
        return Address(a.length, a.instance, i)
    return None


def _rank(v: Value) -> int:
    if isinstance(v, bool):
        raise TypeError("booleans are not values")
    if isinstance(v, int):
        return 0
    if isinstance(v, NilValue):
        return 1
    return 2


def value_lt(v1: Value, v2: Value) -> bool:
    """Total strict order: integers < nil < addresses, addresses by triple."""
    r1, r2 = _rank(v1), _rank(v2)
    if r1 != r2:
        return r1 < r2
    if r1 == 0:
        return v1 < v2
    if r1 == 1:
        return False
    return (v1.length, v1.instance, v1.index) < (v2.length, v2.instance, v2.index)


def format_value(v: Value) -> str:
    if isinstance(v, NilValue):
        return "nil"
    return repr(v) if isinstance(v, Address) else str(v)


_ADDR_RE = re.compile(r"addr\((\d+),(\d+),(\d+)\)\Z")


def parse_addr(text: str) -> Address | None:
    """Read the repr form addr(n,u,i); None when text is not that shape."""
    m = _ADDR_RE.match(text)
    if m is None:
        return None
    try:
        return Address(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    except ValueError:
        return None
