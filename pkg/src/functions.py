"""
Pure deterministic functions applied to values by functional nodes.

A PureFn of arity 1 receives its argument value directly; a PureFn of
arity n > 1 receives an n-tuple (built by tuple_of) and unpacks it.
"""

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Callable, Dict

from src.errors import FunctionError, StatuesError
from src.prob import FunctionValue, format_value, to_value, value_key

# Significant digits used for irrational square roots
SQRT_PRECISION = 50


@dataclass(frozen=True, eq=False)
class PureFn(FunctionValue):
    """
    Named pure function.

    Equality is identity, so a PureFn can serve as a function value inside a pmf.
    """
    name: str
    arity: int
    body: Callable[..., Any]

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError(f"function {self.name!r} needs arity >= 1, got {self.arity}")

    def apply(self, v: Any) -> Any:
        """
        Apply to one argument value (an n-tuple when arity > 1).

        Raises:
            FunctionError: If the body fails or the argument shape is wrong
        """
        if self.arity == 1:
            args = (v,)
        else:
            if not isinstance(v, tuple) or len(v) != self.arity:
                raise FunctionError(
                    f"{self.name} expects {self.arity} arguments, got {format_value(v)}"
                )
            args = v
        try:
            return to_value(self.body(*args))
        except StatuesError:
            raise
        except (ArithmeticError, TypeError, ValueError, IndexError) as e:
            shown = ', '.join(format_value(a) for a in args)
            raise FunctionError(f"{self.name}({shown}) failed: {e}") from e

    def __repr__(self) -> str:
        return f"PureFn({self.name}/{self.arity})"


# =============================================
# ARGUMENT CHECKS
# =============================================

def _num(fname: str, x: Any) -> Fraction:
    if not isinstance(x, Fraction):
        raise FunctionError(f"{fname} expects numbers, got {format_value(x)}")
    return x


def _bool(fname: str, x: Any) -> bool:
    if not isinstance(x, bool):
        raise FunctionError(f"{fname} expects booleans, got {format_value(x)}")
    return x


# =============================================
# ARITHMETIC
# =============================================

def _add(a, b):
    return _num('add', a) + _num('add', b)


def _sub(a, b):
    return _num('sub', a) - _num('sub', b)


def _mul(a, b):
    return _num('mul', a) * _num('mul', b)


def _div(a, b):
    if _num('div', b) == 0:
        raise FunctionError(f"div: division by zero ({format_value(a)} / 0)")
    return _num('div', a) / b


def _pow(a, b):
    a, b = _num('pow', a), _num('pow', b)
    if b.denominator != 1:
        raise FunctionError(f"pow: exponent must be an integer, got {format_value(b)}")
    if a == 0 and b < 0:
        raise FunctionError("pow: zero to a negative power")
    return a ** int(b)


def _sqrt(x):
    x = _num('sqrt', x)
    if x < 0:
        raise FunctionError(f"sqrt of negative number {format_value(x)}")
    num_root, den_root = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if num_root * num_root == x.numerator and den_root * den_root == x.denominator:
        return Fraction(num_root, den_root)
    # irrational: nearest rational at SQRT_PRECISION significant digits
    with localcontext() as ctx:
        ctx.prec = SQRT_PRECISION
        return Fraction((Decimal(x.numerator) / Decimal(x.denominator)).sqrt())


def _min(a, b):
    return min(_num('min', a), _num('min', b))


def _max(a, b):
    return max(_num('max', a), _num('max', b))


# =============================================
# COMPARISON / LOGIC / STRUCTURE
# =============================================

def _eq(a, b):
    return value_key(a) == value_key(b)


def _ne(a, b):
    return value_key(a) != value_key(b)


def _extract(t, i):
    if not isinstance(t, tuple):
        raise FunctionError(f"extract expects a tuple, got {format_value(t)}")
    i = _num('extract', i)
    if i.denominator != 1 or not 1 <= i <= len(t):
        raise FunctionError(f"extract index {format_value(i)} out of range 1..{len(t)}")
    return t[int(i) - 1]


def _in_set(x, members):
    if not isinstance(members, tuple):
        raise FunctionError(f"in_set expects a tuple of members, got {format_value(members)}")
    key = value_key(x)
    return any(value_key(m) == key for m in members)


BUILTINS: Dict[str, PureFn] = {f.name: f for f in [
    PureFn('add', 2, _add),
    PureFn('sub', 2, _sub),
    PureFn('mul', 2, _mul),
    PureFn('div', 2, _div),
    PureFn('neg', 1, lambda x: -_num('neg', x)),
    PureFn('abs', 1, lambda x: abs(_num('abs', x))),
    PureFn('min', 2, _min),
    PureFn('max', 2, _max),
    PureFn('pow', 2, _pow),
    PureFn('sqrt', 1, _sqrt),
    PureFn('id', 1, lambda x: x),
    PureFn('eq', 2, _eq),
    PureFn('ne', 2, _ne),
    PureFn('lt', 2, lambda a, b: _num('lt', a) < _num('lt', b)),
    PureFn('le', 2, lambda a, b: _num('le', a) <= _num('le', b)),
    PureFn('gt', 2, lambda a, b: _num('gt', a) > _num('gt', b)),
    PureFn('ge', 2, lambda a, b: _num('ge', a) >= _num('ge', b)),
    PureFn('and', 2, lambda a, b: _bool('and', a) and _bool('and', b)),
    PureFn('or', 2, lambda a, b: _bool('or', a) or _bool('or', b)),
    PureFn('not', 1, lambda a: not _bool('not', a)),
    PureFn('implies', 2, lambda a, b: (not _bool('implies', a)) or _bool('implies', b)),
    PureFn('iff', 2, lambda a, b: _bool('iff', a) == _bool('iff', b)),
    PureFn('extract', 2, _extract),
    PureFn('in_set', 2, _in_set),
]}


def get_builtin(name: str) -> PureFn:
    """
    Look up a builtin function by name.

    Raises:
        KeyError: If no builtin has that name
    """
    try:
        return BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown function {name!r}; available: {', '.join(sorted(BUILTINS))}") from None
