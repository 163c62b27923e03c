"""
Brute-force possible-worlds marginalizer.

A world assigns one value to every reachable elementary node and one
alternative index to every reachable mixture node; its weight is the
product of the elementary probabilities and 1/n per mixture choice. The
root is evaluated independently in each world and world weights are
accumulated per resulting value.

This module is ground truth for the Statues engine and deliberately
shares none of its enumeration code.
"""

import itertools
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from src import config
from src.errors import (
    CapExceeded, EmptyDistribution, MissingTableEntry, NonBooleanCondition, NonFunctionValue,
)
from src.pex import (
    Conditional, Elementary, Functional, Mixture, MultiConditional, MultiFunctional, Node,
    Table, TupleNode, reachable_nodes,
)
from src.prob import ONE, FunctionValue, Pmf, Prob, condense, format_value


class _WorldDiscarded(Exception):
    """A condition is false in the current world."""


def _world_factors(root: Node) -> Tuple[List[Elementary], List[Mixture]]:
    nodes = reachable_nodes(root)
    return ([n for n in nodes if isinstance(n, Elementary)],
            [n for n in nodes if isinstance(n, Mixture)])


def count_worlds(root: Node) -> int:
    """Number of possible worlds the oracle would enumerate for root."""
    elementaries, mixtures = _world_factors(root)
    count = 1
    for e in elementaries:
        count *= len(e.pmf)
    for m in mixtures:
        count *= len(m.alternatives)
    return count


def _evaluate(node: Node, world: Dict[int, Any], memo: Dict[int, Any]) -> Any:
    """Value of node in one world; raises _WorldDiscarded on a false condition."""
    if node.id in memo:
        return memo[node.id]

    if isinstance(node, Elementary):
        value = world[node.id]
    elif isinstance(node, Functional):
        value = node.fn.apply(_evaluate(node.arg, world, memo))
    elif isinstance(node, TupleNode):
        head = _evaluate(node.head, world, memo)
        value = (head,) + _evaluate(node.tail, world, memo)
    elif isinstance(node, Conditional):
        _check_condition(node, _evaluate(node.evidence, world, memo))
        value = _evaluate(node.target, world, memo)
    elif isinstance(node, MultiConditional):
        for condition in node.conditions:
            _check_condition(node, _evaluate(condition, world, memo))
        value = _evaluate(node.target, world, memo)
    elif isinstance(node, Table):
        key = _evaluate(node.selector, world, memo)
        branch = node.branch_for(key)
        if branch is None:
            raise MissingTableEntry(f"table {node!r} has no branch for selector value {format_value(key)}")
        value = _evaluate(branch, world, memo)
    elif isinstance(node, MultiFunctional):
        f = _evaluate(node.fnode, world, memo)
        if not isinstance(f, FunctionValue):
            raise NonFunctionValue(f"{node!r} selector produced {format_value(f)}, which is not a function")
        value = f.apply(_evaluate(node.arg, world, memo))
    elif isinstance(node, Mixture):
        value = _evaluate(node.alternatives[world[node.id]], world, memo)
    else:
        raise TypeError(f"unknown node kind {type(node).__name__}")

    memo[node.id] = value
    return value


def _check_condition(node: Node, v: Any):
    if not isinstance(v, bool):
        raise NonBooleanCondition(f"condition of {node!r} produced {format_value(v)}, not a boolean")
    if not v:
        raise _WorldDiscarded()


def oracle_marg(root: Node, cap: Optional[int] = None) -> Pmf:
    """
    Marginal pmf of root by exhaustive world enumeration.

    Args:
        root: Query node
        cap: Maximum number of worlds (default config.ORACLE_WORLD_CAP)

    Returns:
        Normalized Pmf

    Raises:
        CapExceeded: If the model has more worlds than cap
        EmptyDistribution: If every world is discarded
    """
    cap = config.ORACLE_WORLD_CAP if cap is None else cap
    worlds = count_worlds(root)
    if worlds > cap:
        raise CapExceeded(f"{worlds} possible worlds exceed the oracle cap of {cap}")

    elementaries, mixtures = _world_factors(root)
    axes = [list(e.pmf) for e in elementaries] + [
        [(i, Fraction(1, len(m.alternatives))) for i in range(len(m.alternatives))]
        for m in mixtures
    ]
    ids = [n.id for n in elementaries] + [m.id for m in mixtures]

    entries: List[Tuple[Any, Prob]] = []
    for choice in itertools.product(*axes):
        world = {}
        weight = ONE
        for node_id, (v, p) in zip(ids, choice):
            world[node_id] = v
            weight *= p
        try:
            entries.append((_evaluate(root, world, {}), weight))
        except _WorldDiscarded:
            continue

    if not entries:
        raise EmptyDistribution()
    return condense(entries)


def oracle_joint_prob(event: Node, cap: Optional[int] = None) -> Prob:
    """
    Probability that a boolean node is true, by world enumeration.

    Raises:
        NonBooleanCondition: If the event takes a non-boolean value
    """
    return oracle_marg(event, cap).p_true()
