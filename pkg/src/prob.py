"""
Exact values, probabilities and probability mass functions.

Values are plain host objects kept in canonical form:
    bool        -> boolean
    Fraction    -> exact number (integers are denominator-1 fractions)
    Symbol      -> interned text label
    tuple       -> tuple of values
    FunctionValue -> a pure function usable as a random value
Booleans and numbers never compare equal here, even though Python says
True == 1; every comparison goes through value_key().
"""

import re
import sys
from decimal import Decimal
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from src.errors import InvalidPmf, NonBooleanCondition

Prob = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

_BARE_SYMBOL = re.compile(r'^[a-z_][A-Za-z0-9_]*$')


class Symbol(str):
    """Interned text label."""

    __slots__ = ()

    def __new__(cls, text: str):
        return super().__new__(cls, sys.intern(str(text)))

    def __repr__(self) -> str:
        return f"Symbol({str(self)!r})"


class FunctionValue:
    """Marker base for values that are functions (see src.functions.PureFn).

    Subclasses provide a ``name`` attribute.
    """


# =============================================
# VALUES
# =============================================

def to_value(x: Any) -> Any:
    """
    Coerce a host object to its canonical value form.

    Args:
        x: bool, int, float, Fraction, Decimal, str, tuple/list or function value

    Returns:
        Canonical value

    Raises:
        TypeError: If x has no value counterpart
    """
    if isinstance(x, bool):
        return x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # shortest decimal text of the float, so 0.2 means 1/5
        return Fraction(repr(x))
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, Symbol):
        return x
    if isinstance(x, str):
        return Symbol(x)
    if isinstance(x, (tuple, list)):
        return tuple(to_value(e) for e in x)
    if isinstance(x, FunctionValue):
        return x
    raise TypeError(f"cannot use {x!r} ({type(x).__name__}) as a value")


def value_key(v: Any) -> Tuple:
    """Structural identity key of a canonical value (tag first)."""
    if isinstance(v, bool):
        return (0, v)
    if isinstance(v, Fraction):
        return (1, v)
    if isinstance(v, str):
        return (2, str(v))
    if isinstance(v, tuple):
        return (3, tuple(value_key(e) for e in v))
    if isinstance(v, FunctionValue):
        return (4, id(v))
    raise TypeError(f"not a value: {v!r}")


def value_sort_key(v: Any) -> Tuple:
    """Deterministic total order: by tag, then within the tag."""
    if isinstance(v, tuple):
        return (3, tuple(value_sort_key(e) for e in v))
    if isinstance(v, FunctionValue):
        return (4, v.name, id(v))
    return value_key(v)


def to_prob(w: Any) -> Prob:
    """
    Convert a weight to an exact rational.

    Accepts int, Fraction, Decimal, float (via its decimal text) and strings
    such as "0.20" or "1/3".
    """
    if isinstance(w, bool):
        raise InvalidPmf(f"weight must be a number, got {w!r}")
    if isinstance(w, float):
        return Fraction(repr(w))
    try:
        return Fraction(w)
    except (TypeError, ValueError) as e:
        raise InvalidPmf(f"invalid weight {w!r}: {e}") from e


# =============================================
# PMF
# =============================================

class Pmf:
    """
    Condensed finite mapping value -> probability, in insertion order.

    Every probability is > 0 and they sum to exactly 1. Build with condense().
    """

    __slots__ = ('_items', '_index')

    def __init__(self, items: Sequence[Tuple[Any, Prob]]):
        self._items: Tuple[Tuple[Any, Prob], ...] = tuple(items)
        self._index: Dict[Tuple, int] = {value_key(v): i for i, (v, _) in enumerate(self._items)}

    def items(self) -> List[Tuple[Any, Prob]]:
        return list(self._items)

    def values(self) -> List[Any]:
        return [v for v, _ in self._items]

    def probs(self) -> List[Prob]:
        return [p for _, p in self._items]

    def support(self) -> List[Any]:
        """Values in deterministic value order."""
        return sorted(self.values(), key=value_sort_key)

    def __iter__(self) -> Iterator[Tuple[Any, Prob]]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, v: Any) -> bool:
        return value_key(to_value(v)) in self._index

    def prob_of(self, v: Any) -> Prob:
        idx = self._index.get(value_key(to_value(v)))
        return ZERO if idx is None else self._items[idx][1]

    def is_boolean(self) -> bool:
        return all(isinstance(v, bool) for v, _ in self._items)

    def p_true(self) -> Prob:
        """Probability of true; the pmf must be boolean."""
        if not self.is_boolean():
            raise NonBooleanCondition(f"pmf is not boolean: {format_pmf(self)}")
        return self.prob_of(True)

    def as_mapping(self) -> Dict[Tuple, Prob]:
        """Order-free view keyed by value_key()."""
        return {value_key(v): p for v, p in self._items}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pmf):
            return NotImplemented
        return self.as_mapping() == other.as_mapping()

    __hash__ = None

    def __repr__(self) -> str:
        return f"Pmf({format_pmf(self)})"


def condense(entries: Union[Mapping[Any, Any], Iterable[Tuple[Any, Any]]]) -> Pmf:
    """
    Merge equal values, drop zero weights and normalize.

    Args:
        entries: (value, weight) pairs or a mapping value -> weight; weights are
            nonnegative and need not sum to 1

    Returns:
        Pmf in first-occurrence order of the surviving values

    Raises:
        InvalidPmf: If the input is empty, a weight is negative or all are zero
    """
    if isinstance(entries, Mapping):
        entries = entries.items()
    order: List[Tuple] = []
    merged: Dict[Tuple, List] = {}
    for value, weight in entries:
        v = to_value(value)
        w = to_prob(weight)
        if w < 0:
            raise InvalidPmf(f"negative weight {w} for value {format_value(v)}")
        key = value_key(v)
        slot = merged.get(key)
        if slot is None:
            merged[key] = [v, w]
            order.append(key)
        else:
            slot[1] += w

    if not order:
        raise InvalidPmf("empty pmf")

    total = sum((merged[k][1] for k in order), ZERO)
    if total == 0:
        raise InvalidPmf("all weights are zero")

    return Pmf([(merged[k][0], merged[k][1] / total) for k in order if merged[k][1] > 0])


def prob_of(pmf: Pmf, v: Any) -> Prob:
    """Stored probability of v, or exact 0 when absent."""
    return pmf.prob_of(v)


def bernoulli(p: Any) -> Pmf:
    """Boolean pmf {true: p, false: 1-p}."""
    p = to_prob(p)
    if p < 0 or p > 1:
        raise InvalidPmf(f"bernoulli probability out of [0, 1]: {p}")
    return condense([(True, p), (False, ONE - p)])


# =============================================
# RENDERING
# =============================================

def format_prob(p: Prob, mode: str = 'fraction', digits: Optional[int] = None) -> str:
    """
    Render a probability.

    Args:
        p: Exact probability
        mode: 'fraction' for "num/den", 'decimal' for a fixed-point expansion
        digits: Digits after the point in decimal mode (round half to even)

    Returns:
        Rendered text
    """
    p = Fraction(p)
    if mode == 'fraction':
        return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"

    if mode != 'decimal':
        raise ValueError(f"unknown probability format {mode!r}")
    if digits is None or digits < 1:
        raise ValueError(f"decimal mode needs digits >= 1, got {digits}")

    sign = '-' if p < 0 else ''
    # Fraction.__round__ rounds half to even, exactly
    scaled = str(round(abs(p) * 10 ** digits)).rjust(digits + 1, '0')
    return f"{sign}{scaled[:-digits]}.{scaled[-digits:]}"


def format_value(v: Any) -> str:
    """Render a value in model-language syntax."""
    if isinstance(v, bool):
        return 'true' if v else 'false'
    if isinstance(v, Fraction):
        return format_prob(v, 'fraction') if v >= 0 else '-' + format_prob(-v, 'fraction')
    if isinstance(v, str):
        text = str(v)
        if _BARE_SYMBOL.match(text) and text not in ('true', 'false'):
            return text
        escaped = text.replace('\\', '\\\\').replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(v, tuple):
        return '<' + ', '.join(format_value(e) for e in v) + '>'
    if isinstance(v, FunctionValue):
        return '@' + v.name
    return repr(v)


def format_pmf(pmf: Pmf, mode: str = 'fraction', digits: Optional[int] = None) -> str:
    """Render a pmf as {value: prob, ...} in insertion order."""
    body = ', '.join(f"{format_value(v)}: {format_prob(p, mode, digits)}" for v, p in pmf)
    return '{' + body + '}'
