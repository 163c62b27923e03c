"""
Statues exact inference: lazy, binding-aware enumeration of atoms.

Every node is turned into a generator of atoms (value, weight). When a
node yields an atom it is first bound to that value in the query's
binding environment, so any other path reaching the same node during the
consumer's work sees that single value with weight 1. Once the node's
stream is exhausted, the binding is removed. Atoms reaching the root are
condensed and normalized.

Usage:
    from src.statues import marg
    pmf = marg(root)
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Mapping, Optional, Set, Tuple

from src.errors import (
    EmptyDistribution, InvalidObservation, MissingTableEntry, NonBooleanCondition,
    NonFunctionValue, StatuesError, UnknownObservationValue,
)
from src.pex import (
    Conditional, Elementary, Functional, Mixture, MultiConditional, MultiFunctional, Node,
    Table, TupleNode, in_degrees, reachable_nodes,
)
from src.prob import ONE, FunctionValue, Pmf, Prob, condense, format_value, to_value, value_key

Atom = Tuple[Any, Prob]
BindingEnv = Dict[int, Any]

# Trace event kinds
BIND = 'bind'
UNBIND = 'unbind'
YIELD = 'yield'
RELEASE = 'release'
SKIP = 'skip'


@dataclass(frozen=True)
class TraceEvent:
    """
    One step of the enumeration.

    `payload` is the atom for yield/release, the value for bind/unbind and
    the false condition atom for skip. `parent_id`/`slot` name the edge the
    stream serves (None/'root' for the query root).
    """
    step: int
    node_id: int
    kind: str
    payload: Any
    parent_id: Optional[int]
    slot: str
    bound: bool = False


class Statues:
    """
    One query evaluator owning its binding environment and trace.

    Args:
        skip_binding: Never bind the root, nodes reached through a single edge, nor singleton
            elementaries (results are unchanged; only the trace differs)
        trace: Record TraceEvents
    """

    def __init__(self, skip_binding: bool = False, trace: bool = False):
        self.skip_binding = skip_binding
        self.tracing = trace
        self.events: List[TraceEvent] = []
        self.step = 1
        self.env: BindingEnv = {}
        self._no_bind: Set[int] = set()
        self._applied: Dict[Tuple, Any] = {}
        self.root_atoms: List[Atom] = []

    # =============================================
    # QUERIES
    # =============================================

    def marg(self, root: Node, observations: Optional[BindingEnv] = None) -> Pmf:
        """
        Marginal pmf of root.

        Raises:
            EmptyDistribution: If no atom reaches the root
        """
        self.env = dict(observations or {})
        self.root_atoms = []
        self.events = []
        self.step = 1
        self._applied = {}
        self._no_bind = self._single_use_nodes(root) if self.skip_binding else set()
        try:
            for atom in self.gen_atoms(root, self.env):
                self.root_atoms.append(atom)
                if self.tracing:
                    self.step += 1
        finally:
            self.env.clear()
        if not self.root_atoms:
            raise EmptyDistribution()
        return condense(self.root_atoms)

    def _single_use_nodes(self, root: Node) -> Set[int]:
        degrees = in_degrees(root)
        return {
            node.id for node in reachable_nodes(root)
            if degrees[node.id] <= 1
            or (isinstance(node, Elementary) and node.is_singleton())
        }

    # =============================================
    # ENUMERATION
    # =============================================

    def _emit(self, kind: str, node: Node, payload: Any, parent_id: Optional[int],
              slot: str, bound: bool = False):
        self.events.append(TraceEvent(self.step, node.id, kind, payload, parent_id, slot, bound))

    def gen_atoms(self, d: Node, env: BindingEnv, parent_id: Optional[int] = None,
                  slot: str = 'root') -> Iterator[Atom]:
        """
        Atoms of d honoring and maintaining the bindings in env.

        A bound node yields exactly (value, 1). Otherwise each atom of d is
        bound before it is exposed and stays bound until the consumer asks
        for the next one; d is unbound when its stream ends.
        """
        tracing = self.tracing
        if d.id in env:
            v = env[d.id]
            if tracing:
                self._emit(YIELD, d, (v, ONE), parent_id, slot, bound=True)
            yield v, ONE
            if tracing:
                self._emit(RELEASE, d, (v, ONE), parent_id, slot, bound=True)
            return

        if d.id in self._no_bind:
            for atom in self.gen_atoms_by_type(d, env):
                if tracing:
                    self._emit(YIELD, d, atom, parent_id, slot)
                yield atom
                if tracing:
                    self._emit(RELEASE, d, atom, parent_id, slot)
            return

        bound = False
        try:
            for v, p in self.gen_atoms_by_type(d, env):
                env[d.id] = v
                bound = True
                if tracing:
                    self._emit(BIND, d, v, parent_id, slot)
                    self._emit(YIELD, d, (v, p), parent_id, slot)
                yield v, p
                if tracing:
                    self._emit(RELEASE, d, (v, p), parent_id, slot)
        finally:
            if bound:
                v = env.pop(d.id, None)
                if tracing:
                    self._emit(UNBIND, d, v, parent_id, slot)

    def gen_atoms_by_type(self, d: Node, env: BindingEnv) -> Iterator[Atom]:
        """Per-kind atom stream of an unbound node."""
        if isinstance(d, Elementary):
            yield from d.pmf

        elif isinstance(d, Functional):
            for v, p in self.gen_atoms(d.arg, env, d.id, 'arg'):
                yield self._apply(d, d.fn, v), p

        elif isinstance(d, TupleNode):
            for v, p in self.gen_atoms(d.head, env, d.id, 'head'):
                for s, q in self.gen_atoms(d.tail, env, d.id, 'tail'):
                    yield (v,) + s, p * q

        elif isinstance(d, Conditional):
            for v, p in self.gen_atoms(d.evidence, env, d.id, 'evidence'):
                if self._holds(d, v, p):
                    for s, q in self.gen_atoms(d.target, env, d.id, 'target'):
                        yield s, p * q

        elif isinstance(d, Table):
            for v, p in self.gen_atoms(d.selector, env, d.id, 'selector'):
                branch = d.branch_for(v)
                if branch is None:
                    raise MissingTableEntry(
                        f"table {d!r} has no branch for selector value {format_value(v)}"
                    )
                for s, q in self.gen_atoms(branch, env, d.id, f"[{format_value(v)}]"):
                    yield s, p * q

        elif isinstance(d, MultiConditional):
            yield from self._gen_conjunction(d, env, 0, ONE)

        elif isinstance(d, MultiFunctional):
            for f, p in self.gen_atoms(d.fnode, env, d.id, 'fn'):
                if not isinstance(f, FunctionValue):
                    raise NonFunctionValue(
                        f"{d!r} selector produced {format_value(f)}, which is not a function"
                    )
                for v, q in self.gen_atoms(d.arg, env, d.id, 'arg'):
                    yield self._apply(d, f, v), p * q

        elif isinstance(d, Mixture):
            # alternatives are equiprobable
            share = Fraction(1, len(d.alternatives))
            for i, alt in enumerate(d.alternatives, 1):
                for v, p in self.gen_atoms(alt, env, d.id, f"alt{i}"):
                    yield v, p * share

        else:
            raise TypeError(f"unknown node kind {type(d).__name__}")

    def _apply(self, d: Node, fn: FunctionValue, v: Any) -> Any:
        # pure functions: one call per (node, function, argument) within a query
        key = (d.id, value_key(fn), value_key(v))
        if key not in self._applied:
            self._applied[key] = fn.apply(v)
        return self._applied[key]

    def _gen_conjunction(self, d: MultiConditional, env: BindingEnv, i: int,
                         weight: Prob) -> Iterator[Atom]:
        if i == len(d.conditions):
            for s, q in self.gen_atoms(d.target, env, d.id, 'target'):
                yield s, weight * q
            return
        for v, p in self.gen_atoms(d.conditions[i], env, d.id, f"cond{i + 1}"):
            if self._holds(d, v, p):
                yield from self._gen_conjunction(d, env, i + 1, weight * p)

    def _holds(self, d: Node, v: Any, p: Prob) -> bool:
        if not isinstance(v, bool):
            raise NonBooleanCondition(f"condition of {d!r} produced {format_value(v)}, not a boolean")
        if not v and self.tracing:
            self._emit(SKIP, d, (v, p), None, 'condition')
            self.step += 1
        return v


# =============================================
# MODULE-LEVEL API
# =============================================

def marg(root: Node, skip_binding: bool = False) -> Pmf:
    """
    Exact marginal pmf of a node.

    Args:
        root: Query node
        skip_binding: Enable the single-use binding shortcut

    Returns:
        Normalized Pmf in enumeration order

    Raises:
        EmptyDistribution: If the evidence is impossible
        StatuesError: Evaluation errors (non-boolean condition, missing table entry, ...)
    """
    return Statues(skip_binding=skip_binding).marg(root)


def p_true(root: Node, skip_binding: bool = False) -> Prob:
    """Probability that a boolean node is true."""
    return marg(root, skip_binding).p_true()


def gen_atoms(d: Node, env: Optional[BindingEnv] = None) -> Iterator[Atom]:
    """Raw atom stream of d (unnormalized weights) under env."""
    return Statues().gen_atoms(d, {} if env is None else env)


def gen_atoms_by_type(d: Node, env: Optional[BindingEnv] = None) -> Iterator[Atom]:
    return Statues().gen_atoms_by_type(d, {} if env is None else env)


def marg_with_observations(root: Node, observations: Mapping[Node, Any],
                           skip_binding: bool = False) -> Pmf:
    """
    Marginal of root with elementary nodes fixed to observed values.

    Equivalent to conditioning root on the conjunction of the equalities.

    Raises:
        InvalidObservation: If an observed node is not elementary
        UnknownObservationValue: If an observed value is outside the node's domain
    """
    seeded: BindingEnv = {}
    for node, value in observations.items():
        if not isinstance(node, Elementary):
            raise InvalidObservation(f"only elementary nodes can be observed, got {node!r}")
        v = to_value(value)
        if v not in node.pmf:
            raise UnknownObservationValue(
                f"{format_value(v)} is not in the domain of {node!r}"
            )
        seeded[node.id] = v
    return Statues(skip_binding=skip_binding).marg(root, observations=seeded)


def marg_traced(root: Node, skip_binding: bool = False) -> Tuple[Pmf, List[TraceEvent]]:
    """
    Marginal pmf together with the ordered trace of the enumeration.

    On failure the raised error carries `.trace` (events so far) and
    `.partial` (root atoms condensed so far, or None).
    """
    engine = Statues(skip_binding=skip_binding, trace=True)
    try:
        pmf = engine.marg(root)
    except StatuesError as e:
        e.trace = list(engine.events)
        e.partial = condense(engine.root_atoms) if engine.root_atoms else None
        raise
    return pmf, list(engine.events)
