"""Cost monoids.

Two instances are provided: plain integers and lexicographic integer pairs,
each extended with a saturating top element :data:`INF`.  The solvers do
their arithmetic on ``int64`` codes (see :class:`Codec`): a pair ``(a, b)``
becomes ``a * scale + b`` with ``scale`` large enough that the second
component can never carry into the first, and every code at or above
:data:`SAT` means infinity.
"""

from __future__ import annotations

from functools import total_ordering
from typing import Iterable, Union

import numpy as np

INF_CODE = 1 << 60
SAT = 1 << 59
FINITE_LIMIT = 1 << 58


@total_ordering
class _Infinity:
    """The absorbing maximum of every cost monoid."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("spldp-inf")

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


class Lex(tuple):
    """Pair ordered lexicographically, added componentwise."""

    def __new__(cls, a: int, b: int):
        return super().__new__(cls, (int(a), int(b)))

    def __add__(self, other):
        if other is INF:
            return INF
        if other == 0 and not isinstance(other, tuple):
            return self
        return Lex(self[0] + other[0], self[1] + other[1])

    def __radd__(self, other):
        return self.__add__(other)

    def __lt__(self, other):
        if other is INF:
            return True
        return tuple(self) < tuple(other)

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        if other is INF:
            return False
        return tuple(self) > tuple(other)

    def __ge__(self, other):
        return self == other or self > other

    def __repr__(self):
        return f"({self[0]}, {self[1]})"


Cost = Union[int, Lex, _Infinity]

KINDS = ("int", "lex2")


def check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ValueError(f"unknown cost kind {kind!r}; expected one of {KINDS}")
    return kind


def zero(kind: str) -> Cost:
    return Lex(0, 0) if check_kind(kind) == "lex2" else 0


def coerce(kind: str, value) -> Cost:
    """Validate a cost literal (``INF``, ``"inf"``, an int, or a pair)."""
    if value is INF or (isinstance(value, str) and value.lower() in ("inf", "∞")):
        return INF
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise ValueError(f"expected an integer cost, got {value!r}")
        return int(value)
    if kind == "lex2":
        if isinstance(value, (tuple, list)) and len(value) == 2 and all(
                isinstance(x, (int, np.integer)) and not isinstance(x, bool) for x in value):
            return Lex(*value)
        raise ValueError(f"expected a pair of integers, got {value!r}")
    check_kind(kind)


def total(kind: str, values: Iterable[Cost]) -> Cost:
    acc = zero(kind)
    for v in values:
        acc = acc + v
    return acc


def to_json(value: Cost):
    if value is INF:
        return "inf"
    if isinstance(value, Lex):
        return [value[0], value[1]]
    return value


def format_cost(value: Cost) -> str:
    if value is INF:
        return "inf"
    if isinstance(value, Lex):
        return f"({value[0]}, {value[1]})"
    return str(value)


class CodecOverflow(OverflowError):
    pass


class Codec:
    """Order- and sum-preserving map from costs to ``int64`` codes.

    ``bound`` must bound the absolute value of any sum the solver may form
    (for pairs: of the second components), which callers obtain by summing
    the per-edge and per-vertex maxima.
    """

    def __init__(self, kind: str, scale: int = 1, offset: int = 0):
        self.kind = check_kind(kind)
        self.scale = scale
        self.offset = offset

    @classmethod
    def for_values(cls, kind: str, first_bound: int, second_bound: int = 0) -> "Codec":
        """``first_bound``/``second_bound``: sums of per-term maximum magnitudes."""
        if kind == "int":
            if first_bound >= FINITE_LIMIT:
                raise CodecOverflow("integer costs too large for 64-bit arithmetic")
            return cls(kind)
        scale = 2 * second_bound + 1
        if first_bound * scale + second_bound >= FINITE_LIMIT:
            raise CodecOverflow("lexicographic costs too large for 64-bit arithmetic")
        return cls(kind, scale, second_bound)

    def encode(self, value: Cost) -> int:
        if value is INF:
            return INF_CODE
        if self.kind == "lex2":
            return value[0] * self.scale + value[1]
        return int(value)

    def decode(self, code) -> Cost:
        code = int(code)
        if code >= SAT:
            return INF
        if self.kind == "lex2":
            a = (code + self.offset) // self.scale
            return Lex(a, code - a * self.scale)
        return code


def magnitudes(kind: str, values: Iterable[Cost]):
    """Largest finite magnitudes of the first and second components."""
    m1 = m2 = 0
    for v in values:
        if v is INF:
            continue
        if kind == "lex2":
            m1 = max(m1, abs(v[0]))
            m2 = max(m2, abs(v[1]))
        else:
            m1 = max(m1, abs(v))
    return m1, m2


def sat_add(a: np.ndarray, b) -> np.ndarray:
    """Saturating addition on code arrays."""
    out = np.add(a, b)
    np.minimum(out, INF_CODE, out=out)
    out[out >= SAT] = INF_CODE
    return out
