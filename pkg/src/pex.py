"""
Immutable p-expression DAG.

Every constructor returns a fresh node whose children already exist, so
node ids strictly increase from children to parents and no cycle can be
built. Node equality is identity: two elementary nodes built from the
same pmf are two independent random variables.

Nodes overload arithmetic and logic operators so models read naturally:

    d1 = uniform(range(1, 7))
    d2 = uniform(range(1, 7))
    d = d1 + d2
    y = d.given(d.ge(6) & d2.le(4))

Equality is NOT overloaded; use .eq() / .ne().
"""

import itertools
import threading
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from src.functions import BUILTINS, PureFn, get_builtin
from src.prob import Pmf, bernoulli, condense, format_value, to_value, value_key

_id_counter = itertools.count(1)
_id_lock = threading.Lock()


def _next_id() -> int:
    with _id_lock:
        return next(_id_counter)


# =============================================
# NODE TYPES
# =============================================

@dataclass(frozen=True, eq=False, repr=False)
class Node:
    """Base p-expression node; `id` is assigned at construction."""
    id: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'id', _next_id())

    kind = 'node'

    def children(self) -> List[Tuple[str, 'Node']]:
        """Ordered (slot, child) pairs, in enumeration order."""
        return []

    def __repr__(self) -> str:
        return f"{type(self).__name__}#{self.id}"

    # ---- operator sugar -------------------------------------------------
    def __add__(self, other):
        return func('add', [self, other])

    def __radd__(self, other):
        return func('add', [other, self])

    def __sub__(self, other):
        return func('sub', [self, other])

    def __rsub__(self, other):
        return func('sub', [other, self])

    def __mul__(self, other):
        return func('mul', [self, other])

    def __rmul__(self, other):
        return func('mul', [other, self])

    def __truediv__(self, other):
        return func('div', [self, other])

    def __rtruediv__(self, other):
        return func('div', [other, self])

    def __pow__(self, other):
        return func('pow', [self, other])

    def __neg__(self):
        return func('neg', [self])

    def __abs__(self):
        return func('abs', [self])

    def __and__(self, other):
        return func('and', [self, other])

    def __rand__(self, other):
        return func('and', [other, self])

    def __or__(self, other):
        return func('or', [self, other])

    def __ror__(self, other):
        return func('or', [other, self])

    def __invert__(self):
        return func('not', [self])

    def eq(self, other):
        return func('eq', [self, other])

    def ne(self, other):
        return func('ne', [self, other])

    def lt(self, other):
        return func('lt', [self, other])

    def le(self, other):
        return func('le', [self, other])

    def gt(self, other):
        return func('gt', [self, other])

    def ge(self, other):
        return func('ge', [self, other])

    def given(self, evidence, *more):
        """`self given evidence`; extra conditions build a multi-conditional."""
        if more:
            return multi_given(self, [evidence, *more])
        return given(self, evidence)

    def index(self, i: int):
        """1-based tuple element."""
        return func('extract', [self, i])

    def isin(self, members: Iterable[Any]):
        return func('in_set', [self, certain(tuple(to_value(m) for m in members))])


@dataclass(frozen=True, eq=False, repr=False)
class Elementary(Node):
    pmf: Pmf
    kind = 'elementary'

    def is_singleton(self) -> bool:
        return len(self.pmf) == 1


@dataclass(frozen=True, eq=False, repr=False)
class TupleNode(Node):
    head: Node
    tail: Node
    kind = 'tuple'

    def children(self):
        return [('head', self.head), ('tail', self.tail)]


@dataclass(frozen=True, eq=False, repr=False)
class Functional(Node):
    fn: PureFn
    arg: Node
    kind = 'functional'

    def children(self):
        return [('arg', self.arg)]


@dataclass(frozen=True, eq=False, repr=False)
class Conditional(Node):
    target: Node
    evidence: Node
    kind = 'conditional'

    def children(self):
        return [('evidence', self.evidence), ('target', self.target)]


@dataclass(frozen=True, eq=False, repr=False)
class Table(Node):
    selector: Node
    branches: Tuple[Tuple[Any, Node], ...]
    kind = 'table'

    def __post_init__(self):
        if not self.branches:
            raise ValueError("table needs at least one branch")
        index: Dict[Tuple, Node] = {}
        for key, branch in self.branches:
            k = value_key(key)
            if k in index:
                raise ValueError(f"duplicate table key {format_value(key)}")
            index[k] = branch
        object.__setattr__(self, '_index', index)
        super().__post_init__()

    def branch_for(self, v: Any) -> Optional[Node]:
        return self._index.get(value_key(v))

    def children(self):
        return [('selector', self.selector)] + [
            (f"[{format_value(k)}]", b) for k, b in self.branches
        ]


@dataclass(frozen=True, eq=False, repr=False)
class MultiConditional(Node):
    target: Node
    conditions: Tuple[Node, ...]
    kind = 'multi_conditional'

    def __post_init__(self):
        if not self.conditions:
            raise ValueError("multi_given needs at least one condition")
        super().__post_init__()

    def children(self):
        slots = [(f"cond{i}", c) for i, c in enumerate(self.conditions, 1)]
        return slots + [('target', self.target)]


@dataclass(frozen=True, eq=False, repr=False)
class MultiFunctional(Node):
    fnode: Node
    arg: Node
    kind = 'multi_functional'

    def children(self):
        return [('fn', self.fnode), ('arg', self.arg)]


@dataclass(frozen=True, eq=False, repr=False)
class Mixture(Node):
    alternatives: Tuple[Node, ...]
    kind = 'mixture'

    def __post_init__(self):
        if not self.alternatives:
            raise ValueError("mixture needs at least one alternative")
        super().__post_init__()

    def children(self):
        return [(f"alt{i}", a) for i, a in enumerate(self.alternatives, 1)]


# =============================================
# CONSTRUCTORS
# =============================================

def _wrap(x: Any) -> Node:
    """Node handles pass through; host values become certainties."""
    return x if isinstance(x, Node) else certain(x)


def elementary(entries: Union[Pmf, Mapping[Any, Any], Iterable[Tuple[Any, Any]]]) -> Elementary:
    """
    Fresh elementary (independent) random variable.

    Args:
        entries: Pmf, mapping value -> weight, or (value, weight) pairs

    Raises:
        InvalidPmf: If the weights do not condense
    """
    if isinstance(entries, Pmf):
        return Elementary(entries)
    if isinstance(entries, Mapping):
        entries = entries.items()
    return Elementary(condense(entries))


def certain(v: Any) -> Elementary:
    return Elementary(condense([(to_value(v), 1)]))


def bern(p: Any) -> Elementary:
    """Boolean elementary with P(true) = p."""
    return Elementary(bernoulli(p))


def uniform(values: Iterable[Any]) -> Elementary:
    """Equiprobable elementary over the given values."""
    return Elementary(condense([(v, 1) for v in values]))


def tuple_of(elements: Sequence[Any]) -> Node:
    """Right-nested head/tail chain ending in the empty-tuple certainty."""
    elements = list(elements)
    if not elements:
        raise ValueError("tuple_of needs at least one element")
    node: Node = certain(())
    for e in reversed(elements):
        node = TupleNode(_wrap(e), node)
    return node


def _resolve_fn(f: Union[PureFn, str]) -> PureFn:
    return get_builtin(f) if isinstance(f, str) else f


def func(f: Union[PureFn, str], args: Sequence[Any]) -> Functional:
    """
    Apply a pure function to argument nodes.

    Arity > 1 packs the arguments with tuple_of; the function unpacks them.

    Raises:
        ValueError: If the number of arguments differs from the arity
    """
    f = _resolve_fn(f)
    args = list(args)
    if f.arity != len(args):
        raise ValueError(f"{f.name} takes {f.arity} argument(s), got {len(args)}")
    arg = _wrap(args[0]) if f.arity == 1 else tuple_of(args)
    return Functional(f, arg)


def given(target: Any, evidence: Any) -> Conditional:
    return Conditional(_wrap(target), _wrap(evidence))


def table(selector: Any, branches: Union[Mapping[Any, Any], Iterable[Tuple[Any, Any]]]) -> Table:
    """
    Conditional probability table keyed by the selector's values.

    Raises:
        ValueError: If there is no branch or a key repeats
    """
    pairs = branches.items() if isinstance(branches, Mapping) else branches
    return Table(_wrap(selector), tuple((to_value(k), _wrap(b)) for k, b in pairs))


def multi_given(target: Any, conditions: Sequence[Any]) -> MultiConditional:
    """Target restricted by a conjunction whose conditions are checked in order."""
    return MultiConditional(_wrap(target), tuple(_wrap(c) for c in conditions))


def multi_func(fnode: Any, args: Sequence[Any]) -> MultiFunctional:
    """Apply a random function (node over function values) to argument nodes."""
    args = list(args)
    if not args:
        raise ValueError("multi_func needs at least one argument")
    arg = _wrap(args[0]) if len(args) == 1 else tuple_of(args)
    return MultiFunctional(_wrap(fnode), arg)


def mixture(alternatives: Sequence[Any]) -> Mixture:
    """Equiprobable choice between alternative nodes."""
    return Mixture(tuple(_wrap(a) for a in alternatives))


# =============================================
# GRAPH QUERIES
# =============================================

def reachable_nodes(root: Node) -> List[Node]:
    """All nodes reachable from root, deduplicated, in first-visit (preorder) order."""
    seen = set()
    order: List[Node] = []
    stack = [root]
    while stack:
        node = stack.pop()
        if node.id in seen:
            continue
        seen.add(node.id)
        order.append(node)
        stack.extend(child for _, child in reversed(node.children()))
    return order


def reachable_elementaries(root: Node) -> List[Elementary]:
    return [n for n in reachable_nodes(root) if isinstance(n, Elementary)]


def in_degrees(root: Node) -> Dict[int, int]:
    """Number of edges entering each reachable node (the root has 0)."""
    degrees: Dict[int, int] = {}
    for node in reachable_nodes(root):
        degrees.setdefault(node.id, 0)
        for _, child in node.children():
            degrees[child.id] = degrees.get(child.id, 0) + 1
    return degrees


def is_terminator(node: Node) -> bool:
    """The empty-tuple certainty closing a tuple chain."""
    return (isinstance(node, Elementary) and node.is_singleton()
            and node.pmf.values()[0] == ())


def level(root: Node, elide_terminator: bool = True) -> int:
    """
    Longest path from root down to an elementary node.

    With elide_terminator, a tuple cell whose tail is the empty-tuple
    terminator counts as its head alone, as the DAG drawings do.
    """
    memo: Dict[int, int] = {}
    # children always have smaller ids, so ascending id order is bottom-up
    for node in sorted(reachable_nodes(root), key=lambda n: n.id):
        if isinstance(node, Elementary):
            memo[node.id] = 0
        elif elide_terminator and isinstance(node, TupleNode) and is_terminator(node.tail):
            memo[node.id] = memo[node.head.id]
        else:
            memo[node.id] = 1 + max(memo[c.id] for _, c in node.children())
    return memo[root.id]


def node_label(node: Node) -> str:
    """Short automatic label, e.g. `add#12` or `⊗#7`."""
    if isinstance(node, Elementary):
        if node.is_singleton():
            return format_value(node.pmf.values()[0])
        base = 'pmf'
    elif isinstance(node, TupleNode):
        base = '⊗'
    elif isinstance(node, Functional):
        base = node.fn.name
    elif isinstance(node, (Conditional, MultiConditional)):
        base = 'given'
    elif isinstance(node, Table):
        base = 'table'
    elif isinstance(node, MultiFunctional):
        base = 'apply'
    else:
        base = 'mix'
    return f"{base}#{node.id}"


__all__ = [
    'BUILTINS', 'Node', 'Elementary', 'TupleNode', 'Functional', 'Conditional', 'Table',
    'MultiConditional', 'MultiFunctional', 'Mixture',
    'elementary', 'certain', 'bern', 'uniform', 'tuple_of', 'func', 'given', 'table',
    'multi_given', 'multi_func', 'mixture',
    'reachable_nodes', 'reachable_elementaries', 'in_degrees', 'is_terminator', 'level',
    'node_label',
]
