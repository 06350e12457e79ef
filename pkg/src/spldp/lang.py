"""Goto-free structured mini-language: AST, parser, printer and closedness check.

Concrete syntax::

    program := seq
    seq     := [stmt] (';' [stmt])*
    stmt    := 'skip' | 'break' | 'continue' | IDENT '=' expr
             | 'if' cond block ['else' (block | ifstmt)]
             | 'while' cond block
             | block
    block   := '{' seq '}'

Conditions are comparisons, boolean connectives (``and``/``&&``, ``or``/``||``,
``not``/``!``), ``true``/``false``, the nondeterministic choice ``?`` or a bare
arithmetic expression.  A missing ``else`` and an empty block both mean ``skip``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple, Union

Pos = Optional[Tuple[int, int]]


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - *
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Var, Neg, BinOp]


@dataclass(frozen=True)
class Compare:
    op: str  # one of < <= > >= == !=
    left: Expr
    right: Expr


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Nondet:
    pass


@dataclass(frozen=True)
class Not:
    operand: "BoolExpr"


@dataclass(frozen=True)
class BoolOp:
    op: str  # 'and' | 'or'
    left: "BoolExpr"
    right: "BoolExpr"


# A bare arithmetic expression is a legal condition (true iff nonzero).
BoolExpr = Union[Compare, BoolConst, Nondet, Not, BoolOp, Expr]

_ARITH = (Num, Var, Neg, BinOp)

_NEGATED_COMPARISON = {"<": ">=", ">=": "<", ">": "<=", "<=": ">", "==": "!=", "!=": "=="}


def negate(cond: BoolExpr) -> BoolExpr:
    """Logical negation, folding comparisons and double negations."""
    if isinstance(cond, Compare):
        return Compare(_NEGATED_COMPARISON[cond.op], cond.left, cond.right)
    if isinstance(cond, Not):
        return cond.operand
    if isinstance(cond, BoolConst):
        return BoolConst(not cond.value)
    return Not(cond)


def variables(node) -> frozenset:
    """Identifiers occurring in an expression or condition."""
    out = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            out.add(n.name)
        elif isinstance(n, (BinOp, Compare, BoolOp)):
            stack.append(n.left)
            stack.append(n.right)
        elif isinstance(n, (Neg, Not)):
            stack.append(n.operand)
    return frozenset(out)


def subexpressions(node) -> Iterator[Expr]:
    """Every arithmetic subexpression (including ``node`` itself if arithmetic)."""
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, _ARITH):
            yield n
        if isinstance(n, (BinOp, Compare, BoolOp)):
            stack.append(n.right)
            stack.append(n.left)
        elif isinstance(n, (Neg, Not)):
            stack.append(n.operand)


# ----------------------------------------------------------------- statements


@dataclass(frozen=True)
class Skip:
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Break:
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Continue:
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: BoolExpr
    then: "Stmt"
    else_: "Stmt"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class While:
    cond: BoolExpr
    body: "Stmt"
    pos: Pos = field(default=None, compare=False, repr=False)


Stmt = Union[Skip, Assign, Break, Continue, Seq, If, While]


def children(stmt: Stmt) -> tuple:
    if isinstance(stmt, Seq):
        return (stmt.first, stmt.second)
    if isinstance(stmt, If):
        return (stmt.then, stmt.else_)
    if isinstance(stmt, While):
        return (stmt.body,)
    return ()


def walk(stmt: Stmt) -> Iterator[Stmt]:
    """Preorder traversal without recursion (programs may nest deeply)."""
    stack = [stmt]
    while stack:
        s = stack.pop()
        yield s
        stack.extend(reversed(children(s)))


def size(stmt: Stmt) -> int:
    return sum(1 for _ in walk(stmt))


def program_variables(stmt: Stmt) -> frozenset:
    out = set()
    for s in walk(stmt):
        if isinstance(s, Assign):
            out.add(s.var)
            out |= variables(s.expr)
        elif isinstance(s, (If, While)):
            out |= variables(s.cond)
    return frozenset(out)


def sequence(stmts: List[Stmt]) -> Stmt:
    """Right-nested ``Seq`` chain; the empty list is ``Skip``."""
    if not stmts:
        return Skip()
    result = stmts[-1]
    for s in reversed(stmts[:-1]):
        result = Seq(s, result)
    return result


# ------------------------------------------------------------------ tokenizer


class SplSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int, token: str):
        super().__init__(f"{line}:{col}: {message} (at {token!r})")
        self.message = message
        self.line = line
        self.col = col
        self.token = token


KEYWORDS = {"skip", "break", "continue", "if", "else", "while", "true", "false", "and", "or", "not"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|&&|\|\||[-+*<>=!?;{}()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # num | ident | kw | op | eof
    text: str
    line: int
    col: int


def tokenize(source: str) -> List[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(source):
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise SplSyntaxError("unexpected character", line, i - line_start + 1, source[i])
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, text, line, i - line_start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = i + text.rindex("\n") + 1
        i = m.end()
    tokens.append(Token("eof", "<eof>", line, i - line_start + 1))
    return tokens


# --------------------------------------------------------------------- parser

_COMPARISONS = ("<", "<=", ">", ">=", "==", "!=")


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise SplSyntaxError(message, tok.line, tok.col, tok.text)

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text in texts

    def take(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text: str, opener: Optional[Token] = None) -> Token:
        if not self.at(text):
            if opener is not None and self.tok.kind == "eof":
                self.error(f"unclosed {opener.text!r} opened at {opener.line}:{opener.col}", opener)
            self.error(f"expected {text!r}")
        return self.take()

    # statements

    def program(self) -> Stmt:
        body = self.seq()
        if self.tok.kind != "eof":
            self.error("unexpected token")
        return body

    def seq(self) -> Stmt:
        stmts = []
        while True:
            if self.tok.kind == "eof" or self.at("}"):
                break
            if self.at(";"):
                self.take()
                continue
            stmts.append(self.stmt())
            if not (self.at(";") or self.at("}") or self.tok.kind == "eof"):
                self.error("expected ';'")
        return sequence(stmts)

    def block(self) -> Stmt:
        opener = self.expect("{")
        body = self.seq()
        self.expect("}", opener)
        return body

    def stmt(self) -> Stmt:
        tok = self.tok
        pos = (tok.line, tok.col)
        if self.at("skip"):
            self.take()
            return Skip(pos=pos)
        if self.at("break"):
            self.take()
            return Break(pos=pos)
        if self.at("continue"):
            self.take()
            return Continue(pos=pos)
        if self.at("while"):
            self.take()
            cond = self.cond()
            return While(cond, self.block(), pos=pos)
        if self.at("if"):
            return self.if_stmt()
        if self.at("{"):
            return self.block()
        if tok.kind == "ident":
            self.take()
            self.expect("=")
            return Assign(tok.text, self.arith(), pos=pos)
        self.error("expected a statement")

    def if_stmt(self) -> Stmt:
        tok = self.take()
        cond = self.cond()
        then = self.block()
        else_: Stmt = Skip()
        if self.at("else"):
            self.take()
            else_ = self.if_stmt() if self.at("if") else self.block()
        return If(cond, then, else_, pos=(tok.line, tok.col))

    # expressions: one precedence climb for both sorts, sort-checked on the way up

    def cond(self) -> BoolExpr:
        return self.disjunction()

    def arith(self) -> Expr:
        tok = self.tok
        e = self.disjunction()
        if not isinstance(e, _ARITH):
            self.error("expected an arithmetic expression", tok)
        return e

    def disjunction(self):
        left = self.conjunction()
        while self.at("or", "||"):
            self.take()
            left = BoolOp("or", left, self.conjunction())
        return left

    def conjunction(self):
        left = self.negation()
        while self.at("and", "&&"):
            self.take()
            left = BoolOp("and", left, self.negation())
        return left

    def negation(self):
        if self.at("not", "!"):
            self.take()
            return Not(self.negation())
        return self.comparison()

    def comparison(self):
        tok = self.tok
        left = self.additive()
        if self.at(*_COMPARISONS):
            op = self.take().text
            rtok = self.tok
            right = self.additive()
            self._check_arith(left, tok)
            self._check_arith(right, rtok)
            return Compare(op, left, right)
        return left

    def _check_arith(self, e, tok):
        if not isinstance(e, _ARITH):
            self.error("expected an arithmetic expression", tok)

    def additive(self):
        tok = self.tok
        left = self.term()
        while self.at("+", "-"):
            op = self.take().text
            rtok = self.tok
            right = self.term()
            self._check_arith(left, tok)
            self._check_arith(right, rtok)
            left = BinOp(op, left, right)
        return left

    def term(self):
        tok = self.tok
        left = self.unary()
        while self.at("*"):
            self.take()
            rtok = self.tok
            right = self.unary()
            self._check_arith(left, tok)
            self._check_arith(right, rtok)
            left = BinOp("*", left, right)
        return left

    def unary(self):
        if self.at("-"):
            self.take()
            tok = self.tok
            operand = self.unary()
            self._check_arith(operand, tok)
            return Neg(operand)
        return self.primary()

    def primary(self):
        tok = self.tok
        if tok.kind == "num":
            self.take()
            return Num(int(tok.text))
        if tok.kind == "ident":
            self.take()
            return Var(tok.text)
        if self.at("true", "false"):
            self.take()
            return BoolConst(tok.text == "true")
        if self.at("?"):
            self.take()
            return Nondet()
        if self.at("("):
            self.take()
            inner = self.disjunction()
            self.expect(")", tok)
            return inner
        self.error("expected an expression")


def parse(source: str) -> Stmt:
    """Parse program text into a statement tree; raises :class:`SplSyntaxError`.

    The parser is recursive descent, so nesting beyond the interpreter's
    recursion limit is reported as a syntax error rather than a crash.
    """
    parser = _Parser(source)
    try:
        return parser.program()
    except RecursionError:
        raise SplSyntaxError("nesting too deep", parser.tok.line, parser.tok.col, parser.tok.text) from None


def parse_expr(source: str) -> Expr:
    p = _Parser(source)
    e = p.arith()
    if p.tok.kind != "eof":
        p.error("unexpected token")
    return e


def parse_cond(source: str) -> BoolExpr:
    p = _Parser(source)
    e = p.cond()
    if p.tok.kind != "eof":
        p.error("unexpected token")
    return e


# -------------------------------------------------------------------- printer

_PREC = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5, "*": 6, "neg": 7, "atom": 8}


def _prec(e) -> int:
    if isinstance(e, BoolOp):
        return _PREC[e.op]
    if isinstance(e, Not):
        return _PREC["not"]
    if isinstance(e, Compare):
        return _PREC["cmp"]
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def _wrap(e, needs: bool) -> str:
    s = format_expr(e)
    return f"({s})" if needs else s


def format_expr(e) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BoolConst):
        return "true" if e.value else "false"
    if isinstance(e, Nondet):
        return "?"
    if isinstance(e, Neg):
        return "-" + _wrap(e.operand, _prec(e.operand) < _PREC["neg"])
    if isinstance(e, Not):
        return "!" + _wrap(e.operand, _prec(e.operand) < _PREC["not"])
    if isinstance(e, Compare):
        # comparisons do not chain
        return f"{_wrap(e.left, _prec(e.left) <= _PREC['cmp'])} {e.op} {_wrap(e.right, _prec(e.right) <= _PREC['cmp'])}"
    if isinstance(e, (BinOp, BoolOp)):
        p = _prec(e)
        return f"{_wrap(e.left, _prec(e.left) < p)} {e.op} {_wrap(e.right, _prec(e.right) <= p)}"
    raise TypeError(f"not an expression: {e!r}")


def format_stmt(stmt: Stmt, indent: int = 0) -> str:
    """Pretty-print; ``parse(format_stmt(t)) == t`` for every tree ``t``."""
    lines: List[str] = []
    _emit(stmt, indent, lines)
    return "\n".join(lines)


def _emit(stmt: Stmt, indent: int, out: List[str]) -> None:
    pad = "    " * indent
    if isinstance(stmt, Seq):
        parts = []
        s = stmt
        while isinstance(s, Seq):
            parts.append(s.first)
            s = s.second
        parts.append(s)
        for k, part in enumerate(parts):
            if isinstance(part, Seq):
                # left-nested sequence keeps its shape through an explicit block
                out.append(pad + "{")
                _emit(part, indent + 1, out)
                out.append(pad + "}")
            else:
                _emit(part, indent, out)
            if k < len(parts) - 1:
                out[-1] += ";"
    elif isinstance(stmt, Skip):
        out.append(pad + "skip")
    elif isinstance(stmt, Break):
        out.append(pad + "break")
    elif isinstance(stmt, Continue):
        out.append(pad + "continue")
    elif isinstance(stmt, Assign):
        out.append(f"{pad}{stmt.var} = {format_expr(stmt.expr)}")
    elif isinstance(stmt, If):
        out.append(f"{pad}if {format_expr(stmt.cond)} {{")
        _emit(stmt.then, indent + 1, out)
        out.append(pad + "} else {")
        _emit(stmt.else_, indent + 1, out)
        out.append(pad + "}")
    elif isinstance(stmt, While):
        out.append(f"{pad}while {format_expr(stmt.cond)} {{")
        _emit(stmt.body, indent + 1, out)
        out.append(pad + "}")
    else:
        raise TypeError(f"not a statement: {stmt!r}")


# ----------------------------------------------------------------- closedness


@dataclass(frozen=True)
class Violation:
    kind: str  # 'break' | 'continue'
    pos: Pos

    def __str__(self) -> str:
        where = f"{self.pos[0]}:{self.pos[1]}" if self.pos else "?"
        return f"{where}: '{self.kind}' outside of any while loop"


def check_closed(program: Stmt) -> List[Violation]:
    violations = []
    stack = [(program, 0)]
    while stack:
        s, depth = stack.pop()
        if isinstance(s, (Break, Continue)) and depth == 0:
            violations.append(Violation("break" if isinstance(s, Break) else "continue", s.pos))
        inner = depth + 1 if isinstance(s, While) else depth
        stack.extend((c, inner) for c in reversed(children(s)))
    return violations
