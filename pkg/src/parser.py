"""
Lexer and recursive-descent parser for the `.prob` model language.

    % comments run to end of line
    let d1 = uniform(1, 2, 3, 4, 5, 6)
    let d2 = uniform(1, 2, 3, 4, 5, 6)
    let d  = d1 + d2
    query d1 given (d <= 3)

Grammar (lowest binding first):

    model   := stmt*                      stmt := "let" IDENT "=" expr | "query" expr  [";"]
    expr    := or ("given" (or | "[" expr {"," expr} "]"))*
    or      := and ("or" and)*            and  := not ("and" not)*
    not     := "not" not | cmp            cmp  := add [CMPOP add | "in" "{" value {"," value} "}"]
    add     := mul (("+"|"-") mul)*       mul  := unary (("*"|"/") unary)*
    unary   := "-" unary | postfix        postfix := primary ("[" INT "]")*
    primary := number | "true" | "false" | STRING | "@"NAME | IDENT | FN "(" args ")"
             | "{" value ":" weight, ... "}" | "bern" "(" weight ")" | "uniform" "(" values ")"
             | "table" "(" expr ")" "{" value ":" expr, ... "}" | "mix" "{" expr, ... "}"
             | "apply" "(" expr "," args ")" | "<" [add {"," add}] ">" | "(" expr ")"

Bare words are identifiers in expressions and symbols in value positions
(pmf keys, table keys, `in` sets); quoted strings are symbols anywhere.
Weights and values may be written as fractions `1/3`; in expressions `/` is
always a left-associative division.
"""

import re
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Iterable, List, Optional, Set, Tuple

from src.errors import Diagnostic, DslError
from src.functions import BUILTINS
from src.prob import FunctionValue, Symbol, format_prob, format_value, value_key

KEYWORDS = {
    'let', 'query', 'given', 'and', 'or', 'not', 'in', 'true', 'false',
    'table', 'mix', 'bern', 'uniform', 'apply',
}

BINARY_FUNCTIONS = {
    '+': 'add', '-': 'sub', '*': 'mul', '/': 'div',
    '==': 'eq', '!=': 'ne', '<': 'lt', '<=': 'le', '>': 'gt', '>=': 'ge',
    'and': 'and', 'or': 'or',
}
UNARY_FUNCTIONS = {'-': 'neg', 'not': 'not'}
COMPARISONS = ('==', '!=', '<', '<=', '>', '>=')

_TOKEN_RE = re.compile(r"""
    (?P<COMMENT>%[^\n]*)
  | (?P<WS>\s+)
  | (?P<NUMBER>\d+(?:\.\d+)?)
  | (?P<STRING>"(?:[^"\\\n]|\\.)*")
  | (?P<FNREF>@[A-Za-z_]\w*)
  | (?P<IDENT>[A-Za-z_]\w*)
  | (?P<OP>==|!=|<=|>=|[<>+\-*/(){}\[\],:=;])
  | (?P<ERROR>.)
""", re.VERBOSE)


# =============================================
# AST
# =============================================

@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_line: int
    end_column: int


_NO_SPAN = Span(0, 0, 0, 0)


def _span():
    return field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Literal:
    """Number, boolean, symbol or function value in expression position."""
    value: Any
    span: Span = _span()

    def __eq__(self, other):
        if not isinstance(other, Literal):
            return NotImplemented
        return value_key(self.value) == value_key(other.value)

    def __hash__(self):
        return hash(value_key(self.value))


@dataclass(frozen=True)
class Name:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class PmfLit:
    entries: Tuple[Tuple[Any, Fraction], ...]
    span: Span = _span()

    def __eq__(self, other):
        if not isinstance(other, PmfLit):
            return NotImplemented
        return [(value_key(v), w) for v, w in self.entries] == \
            [(value_key(v), w) for v, w in other.entries]

    def __hash__(self):
        return hash(tuple((value_key(v), w) for v, w in self.entries))


@dataclass(frozen=True)
class Bern:
    p: Fraction
    span: Span = _span()


@dataclass(frozen=True)
class Uniform:
    values: Tuple[Any, ...]
    span: Span = _span()

    def __eq__(self, other):
        if not isinstance(other, Uniform):
            return NotImplemented
        return [value_key(v) for v in self.values] == [value_key(v) for v in other.values]

    def __hash__(self):
        return hash(tuple(value_key(v) for v in self.values))


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Any
    right: Any
    span: Span = _span()


@dataclass(frozen=True)
class UnOp:
    op: str
    operand: Any
    span: Span = _span()


@dataclass(frozen=True)
class Call:
    fn: str
    args: Tuple[Any, ...]
    span: Span = _span()


@dataclass(frozen=True)
class Apply:
    fn: Any
    args: Tuple[Any, ...]
    span: Span = _span()


@dataclass(frozen=True)
class Given:
    target: Any
    conditions: Tuple[Any, ...]
    multi: bool
    span: Span = _span()


@dataclass(frozen=True)
class TableExpr:
    selector: Any
    branches: Tuple[Tuple[Any, Any], ...]
    span: Span = _span()

    def __eq__(self, other):
        if not isinstance(other, TableExpr):
            return NotImplemented
        return self.selector == other.selector and \
            [(value_key(k), e) for k, e in self.branches] == \
            [(value_key(k), e) for k, e in other.branches]

    def __hash__(self):
        return hash((self.selector, tuple(value_key(k) for k, _ in self.branches)))


@dataclass(frozen=True)
class Mix:
    alternatives: Tuple[Any, ...]
    span: Span = _span()


@dataclass(frozen=True)
class TupleExpr:
    items: Tuple[Any, ...]
    span: Span = _span()


@dataclass(frozen=True)
class Index:
    target: Any
    index: int
    span: Span = _span()


@dataclass(frozen=True)
class InSet:
    operand: Any
    members: Tuple[Any, ...]
    span: Span = _span()

    def __eq__(self, other):
        if not isinstance(other, InSet):
            return NotImplemented
        return self.operand == other.operand and \
            [value_key(m) for m in self.members] == [value_key(m) for m in other.members]

    def __hash__(self):
        return hash((self.operand, tuple(value_key(m) for m in self.members)))


@dataclass(frozen=True)
class Let:
    name: str
    expr: Any
    span: Span = _span()


@dataclass(frozen=True)
class Query:
    expr: Any
    source: str = field(default='', compare=False)
    span: Span = _span()


@dataclass(frozen=True)
class Model:
    statements: Tuple[Any, ...]
    filename: str = field(default='<model>', compare=False)

    @property
    def definitions(self) -> List[Let]:
        return [s for s in self.statements if isinstance(s, Let)]

    @property
    def queries(self) -> List[Query]:
        return [s for s in self.statements if isinstance(s, Query)]


# =============================================
# LEXER
# =============================================

@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span
    start: int
    end: int


def tokenize(text: str, filename: str = '<model>') -> List[Token]:
    """
    Split model text into tokens, ending with an EOF token.

    Raises:
        DslError: On a character that starts no token
    """
    tokens: List[Token] = []
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        lexeme = m.group()
        col = m.start() - line_start + 1
        end_line = line + lexeme.count('\n')
        if '\n' in lexeme:
            end_col = len(lexeme) - lexeme.rfind('\n')
        else:
            end_col = col + len(lexeme)
        span = Span(line, col, end_line, end_col)

        if kind == 'ERROR':
            raise DslError([Diagnostic('error', f"unexpected character {lexeme!r}",
                                       line, col, line, col + 1, filename)])
        if kind not in ('WS', 'COMMENT'):
            if kind == 'IDENT' and lexeme in KEYWORDS:
                kind = lexeme
            elif kind == 'OP':
                kind = lexeme
            tokens.append(Token(kind, lexeme, span, m.start(), m.end()))

        if '\n' in lexeme:
            line = end_line
            line_start = m.start() + lexeme.rfind('\n') + 1

    eof = Span(line, len(text) - line_start + 1, line, len(text) - line_start + 1)
    tokens.append(Token('EOF', '', eof, len(text), len(text)))
    return tokens


# =============================================
# PARSER
# =============================================

class Parser:
    """
    Recursive-descent parser over a token list.

    Scope checks (use before definition, duplicate `let`) are collected
    while parsing and reported together at the end.
    """

    def __init__(self, text: str, filename: str = '<model>', names: Iterable[str] = ()):
        self.text = text
        self.filename = filename
        self.tokens = tokenize(text, filename)
        self.pos = 0
        self.defined: Set[str] = set(names)
        self.problems: List[Diagnostic] = []

    # ---- token stream ----------------------------------------------------
    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != 'EOF':
            self.pos += 1
        return tok

    def eat(self, kind: str, what: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {what or repr(kind)}, found {self._describe(tok)}", tok.span)
        return self.advance()

    def _describe(self, tok: Token) -> str:
        return 'end of input' if tok.kind == 'EOF' else repr(tok.text)

    def fail(self, message: str, span: Span):
        raise DslError([self._diag(message, span)])

    def _diag(self, message: str, span: Span, severity: str = 'error') -> Diagnostic:
        return Diagnostic(severity, message, span.line, span.column,
                          span.end_line, span.end_column, self.filename)

    def _from(self, start: Token) -> Span:
        last = self.tokens[max(self.pos - 1, 0)]
        return Span(start.span.line, start.span.column, last.span.end_line, last.span.end_column)

    def _finish(self):
        if self.problems:
            raise DslError(self.problems)

    # ---- statements ------------------------------------------------------
    def parse_model(self) -> Model:
        statements = []
        while not self.at('EOF'):
            if self.at(';'):
                self.advance()
                continue
            statements.append(self.statement())
        self._finish()
        return Model(tuple(statements), self.filename)

    def statement(self):
        start = self.peek()
        if self.at('let'):
            self.advance()
            name_tok = self.eat('IDENT', 'a name')
            self.eat('=', "'='")
            expr = self.expr()
            if name_tok.text in self.defined:
                self.problems.append(self._diag(f"duplicate definition of {name_tok.text!r}", name_tok.span))
            self.defined.add(name_tok.text)
            return Let(name_tok.text, expr, self._from(start))
        if self.at('query'):
            self.advance()
            return self.query_body()
        self.fail(f"expected 'let' or 'query', found {self._describe(start)}", start.span)

    def query_body(self) -> Query:
        first = self.peek()
        expr = self.expr()
        last = self.tokens[self.pos - 1]
        return Query(expr, self.text[first.start:last.end], self._from(first))

    # ---- expressions -----------------------------------------------------
    def expr(self):
        start = self.peek()
        node = self.or_expr()
        while self.at('given'):
            self.advance()
            if self.at('['):
                open_tok = self.advance()
                conditions = [] if self.at(']') else self._comma_list(self.expr, ']')
                self.eat(']', "']'")
                if not conditions:
                    self.problems.append(self._diag("'given' list is empty", open_tok.span))
                node = Given(node, tuple(conditions), True, self._from(start))
            else:
                node = Given(node, (self.or_expr(),), False, self._from(start))
        return node

    def or_expr(self):
        return self._left_assoc(self.and_expr, ('or',))

    def and_expr(self):
        return self._left_assoc(self.not_expr, ('and',))

    def not_expr(self):
        if self.at('not'):
            start = self.advance()
            operand = self.not_expr()
            return UnOp('not', operand, self._from(start))
        return self.cmp_expr()

    def cmp_expr(self):
        start = self.peek()
        left = self.add_expr()
        if self.at(*COMPARISONS):
            op = self.advance().kind
            right = self.add_expr()
            return BinOp(op, left, right, self._from(start))
        if self.at('in'):
            self.advance()
            self.eat('{', "'{'")
            members = self._comma_list(self.value, '}')
            self.eat('}', "'}'")
            return InSet(left, tuple(members), self._from(start))
        return left

    def add_expr(self):
        return self._left_assoc(self.mul_expr, ('+', '-'))

    def mul_expr(self):
        return self._left_assoc(self.unary, ('*', '/'))

    def _left_assoc(self, operand, ops):
        start = self.peek()
        node = operand()
        while self.at(*ops):
            op = self.advance().kind
            node = BinOp(op, node, operand(), self._from(start))
        return node

    def unary(self):
        start = self.peek()
        if self.at('-'):
            if self.peek(1).kind == 'NUMBER':
                self.advance()
                return self.postfix(Literal(-self.number(), self._from(start)))
            self.advance()
            return UnOp('-', self.unary(), self._from(start))
        return self.postfix(self.primary())

    def postfix(self, node):
        start_span = getattr(node, 'span', _NO_SPAN)
        while self.at('['):
            self.advance()
            tok = self.eat('NUMBER', 'a tuple index')
            if '.' in tok.text or int(tok.text) < 1:
                self.fail(f"tuple index must be a positive integer, got {tok.text}", tok.span)
            self.eat(']', "']'")
            last = self.tokens[self.pos - 1].span
            node = Index(node, int(tok.text), Span(start_span.line, start_span.column,
                                                  last.end_line, last.end_column))
        return node

    def primary(self):
        tok = self.peek()
        kind = tok.kind

        if kind == 'NUMBER':
            value = self.number()
            return Literal(value, self._from(tok))
        if kind in ('true', 'false'):
            self.advance()
            return Literal(kind == 'true', tok.span)
        if kind == 'STRING':
            self.advance()
            return Literal(Symbol(_unquote(tok.text)), tok.span)
        if kind == 'FNREF':
            return Literal(self.function_value(), tok.span)
        if kind == 'IDENT':
            if self.peek(1).kind == '(':
                return self.call()
            self.advance()
            if tok.text not in self.defined:
                self.problems.append(self._diag(f"{tok.text!r} is used before its definition", tok.span))
            return Name(tok.text, tok.span)
        if kind == '{':
            return self.pmf_literal()
        if kind == 'bern':
            self.advance()
            self.eat('(', "'('")
            p_tok = self.peek()
            p = self.weight()
            if p > 1:
                self.problems.append(self._diag(f"bern probability {format_prob(p)} exceeds 1", p_tok.span))
            self.eat(')', "')'")
            return Bern(p, self._from(tok))
        if kind == 'uniform':
            self.advance()
            self.eat('(', "'('")
            values = self._comma_list(self.value, ')')
            self.eat(')', "')'")
            return Uniform(tuple(values), self._from(tok))
        if kind == 'table':
            return self.table()
        if kind == 'mix':
            self.advance()
            self.eat('{', "'{'")
            alternatives = self._comma_list(self.expr, '}')
            self.eat('}', "'}'")
            return Mix(tuple(alternatives), self._from(tok))
        if kind == 'apply':
            self.advance()
            self.eat('(', "'('")
            fn = self.expr()
            self.eat(',', "',' before the arguments of apply")
            args = self._comma_list(self.expr, ')')
            self.eat(')', "')'")
            return Apply(fn, tuple(args), self._from(tok))
        if kind == '<':
            self.advance()
            items = [] if self.at('>') else self._comma_list(self.add_expr, '>')
            self.eat('>', "'>' closing the tuple")
            return TupleExpr(tuple(items), self._from(tok))
        if kind == '(':
            self.advance()
            inner = self.expr()
            self.eat(')', "')'")
            return inner

        self.fail(f"expected an expression, found {self._describe(tok)}", tok.span)

    def call(self):
        name_tok = self.advance()
        fn = BUILTINS.get(name_tok.text)
        self.eat('(', "'('")
        args = [] if self.at(')') else self._comma_list(self.expr, ')')
        self.eat(')', "')'")
        span = self._from(name_tok)
        if fn is None:
            self.problems.append(self._diag(f"unknown function {name_tok.text!r}", name_tok.span))
        elif fn.arity != len(args):
            self.problems.append(self._diag(
                f"{fn.name} takes {fn.arity} argument(s), got {len(args)}", span))
        return Call(name_tok.text, tuple(args), span)

    def table(self):
        start = self.advance()
        self.eat('(', "'('")
        selector = self.expr()
        self.eat(')', "')'")
        self.eat('{', "'{'")
        branches = []
        seen = set()
        while True:
            key_tok = self.peek()
            key = self.value()
            self.eat(':', "':'")
            branches.append((key, self.expr()))
            if value_key(key) in seen:
                self.problems.append(self._diag(f"duplicate table key {format_value(key)}", key_tok.span))
            seen.add(value_key(key))
            if not self.at(','):
                break
            self.advance()
            if self.at('}'):
                break
        self.eat('}', "'}'")
        return TableExpr(selector, tuple(branches), self._from(start))

    def pmf_literal(self):
        start = self.advance()
        entries = []
        while True:
            entries.append((self.value(), self._colon_weight()))
            if not self.at(','):
                break
            self.advance()
            if self.at('}'):
                break
        self.eat('}', "'}'")
        span = self._from(start)
        if all(w == 0 for _, w in entries):
            self.problems.append(self._diag("pmf literal has no positive weight", span))
        return PmfLit(tuple(entries), span)

    def _colon_weight(self) -> Fraction:
        self.eat(':', "':'")
        return self.weight()

    def _comma_list(self, item, closer: str) -> list:
        items = [item()]
        while self.at(','):
            self.advance()
            if self.at(closer):
                break
            items.append(item())
        return items

    # ---- values ----------------------------------------------------------
    def number(self) -> Fraction:
        """A single NUMBER token; in expressions `/` stays a division."""
        return Fraction(self.eat('NUMBER', 'a number').text)

    def rational(self) -> Fraction:
        """['-'] NUMBER ['/' NUMBER] as an exact rational (weights and values only)."""
        negative = False
        if self.at('-'):
            self.advance()
            negative = True
        tok = self.eat('NUMBER', 'a number')
        value = Fraction(tok.text)
        if self.at('/') and self.peek(1).kind == 'NUMBER':
            self.advance()
            den_tok = self.advance()
            den = Fraction(den_tok.text)
            if den == 0:
                self.fail("division by zero in number literal", den_tok.span)
            value = value / den
        return -value if negative else value

    def weight(self) -> Fraction:
        tok = self.peek()
        if not self.at('NUMBER'):
            self.fail(f"expected a nonnegative weight, found {self._describe(tok)}", tok.span)
        return self.rational()

    def function_value(self) -> FunctionValue:
        tok = self.advance()
        fn = BUILTINS.get(tok.text[1:])
        if fn is None:
            self.fail(f"unknown function {tok.text[1:]!r}", tok.span)
        return fn

    def value(self) -> Any:
        tok = self.peek()
        if tok.kind in ('NUMBER', '-'):
            return self.rational()
        if tok.kind in ('true', 'false'):
            self.advance()
            return tok.kind == 'true'
        if tok.kind == 'IDENT':
            self.advance()
            return Symbol(tok.text)
        if tok.kind == 'STRING':
            self.advance()
            return Symbol(_unquote(tok.text))
        if tok.kind == 'FNREF':
            return self.function_value()
        if tok.kind == '<':
            self.advance()
            items = [] if self.at('>') else self._comma_list(self.value, '>')
            self.eat('>', "'>' closing the tuple")
            return tuple(items)
        self.fail(f"expected a value, found {self._describe(tok)}", tok.span)


def _unquote(text: str) -> str:
    return re.sub(r'\\(.)', r'\1', text[1:-1])


def parse(text: str, filename: str = '<model>') -> Model:
    """
    Parse model text.

    Raises:
        DslError: With one diagnostic per problem found
    """
    return Parser(text, filename).parse_model()


def parse_query(text: str, names: Iterable[str] = (), filename: str = '<query>') -> Query:
    """Parse a single query expression in the scope of already defined names."""
    parser = Parser(text, filename, names)
    query = parser.query_body()
    if not parser.at('EOF'):
        tok = parser.peek()
        parser.problems.append(parser._diag(f"unexpected {parser._describe(tok)} after query", tok.span))
    parser._finish()
    return query


# =============================================
# PRETTY PRINTER
# =============================================

def _quoted(text: str) -> str:
    escaped = text.replace('\\', '\\\\').replace('"', '\\"')
    return f'"{escaped}"'


def _unparse_value(v: Any) -> str:
    """Value-position text; symbols that collide with keywords are quoted."""
    if isinstance(v, str):
        return _quoted(str(v)) if str(v) in KEYWORDS else format_value(v)
    if isinstance(v, tuple):
        return '<' + ', '.join(_unparse_value(e) for e in v) + '>'
    return format_value(v)


def _unparse_literal(v: Any) -> str:
    # bare words in expressions are names, so symbols are always quoted
    if isinstance(v, str):
        return _quoted(str(v))
    if isinstance(v, Fraction):
        return _unparse_number(v)
    if isinstance(v, tuple):
        return '<' + ', '.join(_unparse_literal(e) for e in v) + '>'
    return format_value(v)


def _unparse_number(q: Fraction) -> str:
    # expression literals come from integer or decimal tokens
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return format_value(q)
    return format(Decimal(q.numerator) / Decimal(q.denominator), 'f')


def unparse(node: Any) -> str:
    """Render an AST back to model text, parenthesizing every compound."""
    if isinstance(node, Model):
        return '\n'.join(unparse(s) for s in node.statements) + ('\n' if node.statements else '')
    if isinstance(node, Let):
        return f"let {node.name} = {unparse(node.expr)}"
    if isinstance(node, Query):
        return f"query {unparse(node.expr)}"
    if isinstance(node, Literal):
        return _unparse_literal(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, PmfLit):
        body = ', '.join(f"{_unparse_value(v)}: {format_prob(w)}" for v, w in node.entries)
        return '{' + body + '}'
    if isinstance(node, Bern):
        return f"bern({format_prob(node.p)})"
    if isinstance(node, Uniform):
        return 'uniform(' + ', '.join(_unparse_value(v) for v in node.values) + ')'
    if isinstance(node, BinOp):
        return f"({unparse(node.left)} {node.op} {unparse(node.right)})"
    if isinstance(node, UnOp):
        # `- (3)` stays a negation instead of folding into the literal -3
        return f"({node.op} ({unparse(node.operand)}))"
    if isinstance(node, Call):
        return f"{node.fn}(" + ', '.join(unparse(a) for a in node.args) + ')'
    if isinstance(node, Apply):
        return f"apply({unparse(node.fn)}, " + ', '.join(unparse(a) for a in node.args) + ')'
    if isinstance(node, Given):
        if node.multi:
            conds = ', '.join(unparse(c) for c in node.conditions)
            return f"({unparse(node.target)} given [{conds}])"
        return f"({unparse(node.target)} given {unparse(node.conditions[0])})"
    if isinstance(node, TableExpr):
        body = ', '.join(f"{_unparse_value(k)}: {unparse(e)}" for k, e in node.branches)
        return f"table({unparse(node.selector)}) {{{body}}}"
    if isinstance(node, Mix):
        return 'mix {' + ', '.join(unparse(a) for a in node.alternatives) + '}'
    if isinstance(node, TupleExpr):
        return '<' + ', '.join(unparse(i) for i in node.items) + '>'
    if isinstance(node, Index):
        return f"{unparse(node.target)}[{node.index}]"
    if isinstance(node, InSet):
        members = ', '.join(_unparse_value(m) for m in node.members)
        return f"({unparse(node.operand)} in {{{members}}})"
    raise TypeError(f"cannot unparse {type(node).__name__}")
