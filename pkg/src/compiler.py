"""
Compile parsed models into p-expression graphs and run their queries.

Identifiers compile to the node bound by their `let`, so every occurrence
shares one node. Each pmf literal (and each `bern`/`uniform`) compiles to
a fresh elementary node, independent of every other.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src.errors import CapExceeded, Diagnostic, DslError, InvalidPmf, StatuesError
from src.functions import get_builtin
from src.oracle import oracle_marg
from src.parser import (
    Apply, Bern, BinOp, Call, Given, Index, InSet, Let, Literal, Mix, Model, Name, PmfLit,
    Query, Span, TableExpr, TupleExpr, UnOp, Uniform, BINARY_FUNCTIONS, UNARY_FUNCTIONS,
    parse, parse_query,
)
from src.pex import (
    Node, bern, certain, elementary, func, given, mixture, multi_func, multi_given, table,
    tuple_of, uniform,
)
from src.prob import Pmf
from src.statues import Statues


@dataclass
class CompiledQuery:
    source: str
    root: Node
    span: Span


@dataclass
class CompiledModel:
    """Named node handles, queries in file order and trace labels by node id."""
    names: Dict[str, Node]
    queries: List[CompiledQuery]
    labels: Dict[int, str] = field(default_factory=dict)
    filename: str = '<model>'
    pmf_literals: int = 0


@dataclass
class QueryResult:
    """Outcome of one query; exactly one of pmf / error is set."""
    source: str
    span: Span
    pmf: Optional[Pmf] = None
    error: Optional[StatuesError] = None
    oracle_pmf: Optional[Pmf] = None
    oracle_error: Optional[StatuesError] = None
    oracle_skipped: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def oracle_checked(self) -> bool:
        return self.oracle_pmf is not None or self.oracle_error is not None

    @property
    def mismatch(self) -> bool:
        """Engine and oracle disagree (values or error kind)."""
        if not self.oracle_checked:
            return False
        if self.pmf is not None and self.oracle_pmf is not None:
            return self.pmf != self.oracle_pmf
        return type(self.error) is not type(self.oracle_error)


class Compiler:
    """Walks a Model AST and builds its graph."""

    def __init__(self, filename: str = '<model>'):
        self.filename = filename
        self.names: Dict[str, Node] = {}
        self.labels: Dict[int, str] = {}
        self.pmf_literals = 0

    def _error(self, message: str, span: Span):
        raise DslError([Diagnostic('error', message, span.line, span.column,
                                   span.end_line, span.end_column, self.filename)])

    def compile_model(self, model: Model) -> CompiledModel:
        queries = []
        for stmt in model.statements:
            if isinstance(stmt, Let):
                node = self.expr(stmt.expr)
                self.names[stmt.name] = node
                # first name wins when an alias re-binds an existing node
                self.labels.setdefault(node.id, stmt.name)
            else:
                queries.append(self.query(stmt))
        return CompiledModel(dict(self.names), queries, dict(self.labels),
                             self.filename, self.pmf_literals)

    def query(self, stmt: Query) -> CompiledQuery:
        return CompiledQuery(stmt.source, self.expr(stmt.expr), stmt.span)

    def expr(self, e: Any) -> Node:
        if isinstance(e, Literal):
            return certain(e.value)
        if isinstance(e, Name):
            if e.name not in self.names:
                self._error(f"{e.name!r} is used before its definition", e.span)
            return self.names[e.name]
        if isinstance(e, PmfLit):
            return self._elementary(lambda: elementary(e.entries), e.span)
        if isinstance(e, Bern):
            return self._elementary(lambda: bern(e.p), e.span)
        if isinstance(e, Uniform):
            return self._elementary(lambda: uniform(e.values), e.span)
        if isinstance(e, BinOp):
            return func(BINARY_FUNCTIONS[e.op], [self.expr(e.left), self.expr(e.right)])
        if isinstance(e, UnOp):
            return func(UNARY_FUNCTIONS[e.op], [self.expr(e.operand)])
        if isinstance(e, Call):
            fn = get_builtin(e.fn)
            if fn.arity != len(e.args):
                self._error(f"{fn.name} takes {fn.arity} argument(s), got {len(e.args)}", e.span)
            return func(fn, [self.expr(a) for a in e.args])
        if isinstance(e, Apply):
            return multi_func(self.expr(e.fn), [self.expr(a) for a in e.args])
        if isinstance(e, Given):
            if not e.conditions:
                self._error("'given' list is empty", e.span)
            target = self.expr(e.target)
            conditions = [self.expr(c) for c in e.conditions]
            if e.multi:
                return multi_given(target, conditions)
            return given(target, conditions[0])
        if isinstance(e, TableExpr):
            selector = self.expr(e.selector)
            return table(selector, [(k, self.expr(b)) for k, b in e.branches])
        if isinstance(e, Mix):
            return mixture([self.expr(a) for a in e.alternatives])
        if isinstance(e, TupleExpr):
            if not e.items:
                return certain(())
            return tuple_of([self.expr(i) for i in e.items])
        if isinstance(e, Index):
            return func('extract', [self.expr(e.target), certain(e.index)])
        if isinstance(e, InSet):
            return func('in_set', [self.expr(e.operand), certain(tuple(e.members))])
        raise TypeError(f"cannot compile {type(e).__name__}")

    def _elementary(self, build, span: Span) -> Node:
        try:
            node = build()
        except InvalidPmf as err:
            self._error(str(err), span)
        self.pmf_literals += 1
        return node


def compile_model(model: Model) -> CompiledModel:
    """
    Build the graph of a parsed model.

    Raises:
        DslError: On statically detectable errors (invalid pmf literal, ...)
    """
    return Compiler(model.filename).compile_model(model)


def load_model(text: str, filename: str = '<model>') -> CompiledModel:
    """Parse and compile model text."""
    return compile_model(parse(text, filename))


def compile_query(compiled: CompiledModel, text: str) -> CompiledQuery:
    """
    Compile a query expression against a model's definitions.

    The query may reference every name the model defines.
    """
    stmt = parse_query(text, compiled.names.keys())
    compiler = Compiler('<query>')
    compiler.names = dict(compiled.names)
    query = compiler.query(stmt)
    compiled.pmf_literals += compiler.pmf_literals
    return query


def run_queries(compiled: CompiledModel, queries: Optional[List[CompiledQuery]] = None,
                oracle: bool = False, skip_binding: bool = False,
                oracle_cap: Optional[int] = None) -> List[QueryResult]:
    """
    Evaluate queries in order; one failing query never stops the next.

    Args:
        compiled: Compiled model
        queries: Queries to run (default: the model's own)
        oracle: Also run the possible-worlds oracle on each query
        skip_binding: Enable the single-use binding shortcut
        oracle_cap: Override for the oracle world cap

    Returns:
        One QueryResult per query, in order
    """
    results = []
    for q in compiled.queries if queries is None else queries:
        result = QueryResult(q.source, q.span)
        try:
            result.pmf = Statues(skip_binding=skip_binding).marg(q.root)
        except StatuesError as e:
            result.error = e

        if oracle:
            try:
                result.oracle_pmf = oracle_marg(q.root, oracle_cap)
            except CapExceeded as e:
                result.oracle_skipped = str(e)
            except StatuesError as e:
                result.oracle_error = e
        results.append(result)
    return results
