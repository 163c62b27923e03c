"""Builtin pure functions."""

from fractions import Fraction as F

import pytest

from src.errors import FunctionError
from src.functions import BUILTINS, PureFn, get_builtin
from src.prob import Symbol


def call(name, *args):
    fn = get_builtin(name)
    return fn.apply(args[0] if fn.arity == 1 else tuple(args))


class TestArithmetic:
    def test_exact_rationals(self):
        assert call('add', F(1, 3), F(1, 6)) == F(1, 2)
        assert call('div', F(1), F(3)) == F(1, 3)
        assert call('pow', F(2, 3), F(-2)) == F(9, 4)
        assert call('neg', F(5)) == F(-5)
        assert call('max', F(2), F(7)) == F(7)

    def test_division_by_zero(self):
        with pytest.raises(FunctionError, match='division by zero'):
            call('div', F(1), F(0))

    def test_pow_needs_integer_exponent(self):
        with pytest.raises(FunctionError):
            call('pow', F(2), F(1, 2))
        with pytest.raises(FunctionError):
            call('pow', F(0), F(-1))

    def test_sqrt_exact_for_perfect_squares(self):
        assert call('sqrt', F(9, 4)) == F(3, 2)
        assert call('sqrt', F(0)) == 0

    def test_sqrt_approximates_irrationals(self):
        root = call('sqrt', F(2))
        assert isinstance(root, F)
        assert abs(root * root - 2) < F(1, 10 ** 40)

    def test_sqrt_of_negative(self):
        with pytest.raises(FunctionError):
            call('sqrt', F(-1))

    def test_numbers_only(self):
        with pytest.raises(FunctionError):
            call('add', True, F(1))
        with pytest.raises(FunctionError):
            call('lt', Symbol('a'), F(1))


class TestComparisonsAndLogic:
    def test_equality_on_any_values(self):
        assert call('eq', (F(1), Symbol('a')), (F(1), Symbol('a'))) is True
        assert call('eq', True, F(1)) is False
        assert call('ne', Symbol('a'), Symbol('b')) is True

    def test_ordering(self):
        assert call('le', F(2), F(2)) is True
        assert call('gt', F(1, 3), F(1, 2)) is False

    def test_logic(self):
        assert call('and', True, False) is False
        assert call('or', False, True) is True
        assert call('not', False) is True
        assert call('implies', False, False) is True
        assert call('iff', True, False) is False

    def test_logic_needs_booleans(self):
        with pytest.raises(FunctionError):
            call('not', F(0))


class TestStructure:
    def test_extract_is_one_based(self):
        t = (F(10), F(20), F(30))
        assert call('extract', t, F(1)) == F(10)
        assert call('extract', t, F(3)) == F(30)

    @pytest.mark.parametrize('i', [F(0), F(4), F(3, 2)])
    def test_extract_out_of_range(self, i):
        with pytest.raises(FunctionError):
            call('extract', (F(1), F(2), F(3)), i)

    def test_in_set(self):
        members = (F(2), F(3), F(12))
        assert call('in_set', F(3), members) is True
        assert call('in_set', True, (F(1),)) is False


class TestPureFn:
    def test_wrong_argument_shape(self):
        with pytest.raises(FunctionError):
            get_builtin('add').apply(F(1))
        with pytest.raises(FunctionError):
            get_builtin('add').apply((F(1), F(2), F(3)))

    def test_host_errors_are_wrapped(self):
        broken = PureFn('broken', 1, lambda x: x // 0)
        with pytest.raises(FunctionError, match='broken'):
            broken.apply(F(1))

    def test_results_are_canonical_values(self):
        assert PureFn('half', 1, lambda x: 0.5).apply(F(1)) == F(1, 2)

    def test_arity_must_be_positive(self):
        with pytest.raises(ValueError):
            PureFn('nothing', 0, lambda: 1)

    def test_unknown_builtin(self):
        with pytest.raises(KeyError, match='unknown function'):
            get_builtin('frobnicate')
        assert 'sqrt' in BUILTINS
