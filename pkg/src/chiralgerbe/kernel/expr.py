"""Text grammar for rational expressions.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := INT | NAME | '(' expr ')'

Whitespace is insignificant.  NAME must be one of the declared variables
(by default x1..xn).
"""
from __future__ import annotations

import re
from typing import Sequence

from ..errors import DivisionByZeroError, ParseError
from .ratfunc import RatFunc

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9']*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str, line):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        col = m.start(m.lastgroup) + 1
        tokens.append((m.lastgroup, m.group(m.lastgroup), col))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text, names, nvars, line):
        self.tokens = _tokenize(text, line)
        self.i = 0
        self.names = {name: k + 1 for k, name in enumerate(names)}
        self.nvars = nvars
        self.line = line

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, self.line, tok[2])

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)

    def parse(self):
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        val = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return val

    def expr(self):
        val = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek()[1] in ("*", "/"):
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                val = val * rhs
            else:
                try:
                    val = val / rhs
                except DivisionByZeroError:
                    raise self.error("division by zero", tok) from None
        return val

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            val = self.unary()
            return -val if op == "-" else val
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            caret = self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "int":
                raise self.error("exponent must be an integer literal", tok)
            try:
                return base ** (sign * int(tok[1]))
            except DivisionByZeroError:
                raise self.error("negative power of zero", caret) from None
        return base

    def atom(self):
        tok = self.take()
        kind, text, _ = tok
        if kind == "int":
            return RatFunc.const(self.nvars, int(text))
        if kind == "name":
            if text not in self.names:
                raise self.error(f"undeclared variable {text!r}", tok)
            return RatFunc.var(self.nvars, self.names[text])
        if text == "(":
            val = self.expr()
            self.expect(")")
            return val
        if kind == "end":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected {text!r}", tok)


def parse_ratexpr(text: str, variables: Sequence[str] | int, line: int | None = None) -> RatFunc:
    if isinstance(variables, int):
        variables = [f"x{i}" for i in range(1, variables + 1)]
    variables = list(variables)
    return _Parser(text, variables, len(variables), line).parse()
