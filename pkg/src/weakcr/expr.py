"""Surface syntax for free-algebra expressions.

Tokens: the generators S, T, S', T' (apostrophe marks the adjoint), the
imaginary unit i, and numeric literals (integers or decimals, kept exact as
rationals).  Operators by loosening precedence:

    ^  integer power   >   juxtaposition, *, /   >   unary -   >   binary + -

Juxtaposition multiplies ("S T" is the word ST); '/' divides by a scalar
subexpression so that rational coefficients such as 3/2 re-parse.  Parsing
yields a small expression tree that lowers losslessly to an NCPoly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .algebra import GaussRational, NCPoly, render
from .errors import ExprEvalError, ExprSyntaxError, UnknownIdentifierError

_GEN_LETTERS = ("S", "T")


class Token(NamedTuple):
    kind: str  # GEN NUM I OP LPAREN RPAREN END
    value: object
    line: int
    column: int


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        start_col = col
        if ch in "+-*/^":
            tokens.append(Token("OP", ch, line, start_col))
            i += 1
            col += 1
            continue
        if ch == "(":
            tokens.append(Token("LPAREN", ch, line, start_col))
            i += 1
            col += 1
            continue
        if ch == ")":
            tokens.append(Token("RPAREN", ch, line, start_col))
            i += 1
            col += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            lit = text[i:j]
            if lit.endswith("."):
                lit = lit[:-1]
                j -= 1
            tokens.append(Token("NUM", Fraction(lit), line, start_col))
            col += j - i
            i = j
            continue
        if ch in _GEN_LETTERS:
            name = ch
            i += 1
            col += 1
            if i < n and text[i] == "'":
                name += "'"
                i += 1
                col += 1
            tokens.append(Token("GEN", name, line, start_col))
            continue
        if ch == "i":
            tokens.append(Token("I", ch, line, start_col))
            i += 1
            col += 1
            continue
        if ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            raise UnknownIdentifierError(
                f"unknown identifier {text[i:j]!r}", line, start_col
            )
        raise ExprSyntaxError(f"unexpected character {ch!r}", line, start_col)
    tokens.append(Token("END", None, line, col))
    return tokens


# expression nodes are plain tuples:
#   ("gen", name) ("num", Fraction) ("i",)
#   ("neg", e) ("add", a, b) ("sub", a, b) ("mul", a, b) ("div", a, b)
#   ("pow", e, n)
OperatorExpr = tuple

_ATOM_STARTS = {"GEN", "NUM", "I", "LPAREN"}


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(msg, tok.line, tok.column)

    def parse(self):
        expr = self.sum_expr()
        tok = self.peek()
        if tok.kind != "END":
            self.fail(f"unexpected {tok.value!r}")
        return expr

    def sum_expr(self):
        node = self.unary_expr()
        while self.peek().kind == "OP" and self.peek().value in "+-":
            op = self.advance().value
            rhs = self.unary_expr()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def unary_expr(self):
        if self.peek().kind == "OP" and self.peek().value == "-":
            self.advance()
            return ("neg", self.unary_expr())
        return self.product_expr()

    def product_expr(self):
        node = self.power_expr()
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.value in "*/":
                self.advance()
                rhs = self.power_expr()
                node = ("mul" if tok.value == "*" else "div", node, rhs)
            elif tok.kind in _ATOM_STARTS:
                node = ("mul", node, self.power_expr())
            else:
                return node

    def power_expr(self):
        node = self.atom()
        while self.peek().kind == "OP" and self.peek().value == "^":
            self.advance()
            tok = self.peek()
            if tok.kind != "NUM" or tok.value.denominator != 1:
                self.fail("exponent must be a nonnegative integer")
            self.advance()
            node = ("pow", node, int(tok.value))
        return node

    def atom(self):
        tok = self.advance()
        if tok.kind == "GEN":
            return ("gen", tok.value)
        if tok.kind == "NUM":
            return ("num", tok.value)
        if tok.kind == "I":
            return ("i",)
        if tok.kind == "LPAREN":
            node = self.sum_expr()
            closing = self.advance()
            if closing.kind != "RPAREN":
                raise ExprSyntaxError("expected ')'", closing.line, closing.column)
            return node
        if tok.kind == "END":
            raise ExprSyntaxError("unexpected end of input", tok.line, tok.column)
        self.fail(f"unexpected {tok.value!r}", tok)


def parse_operator_expr(text):
    """Parse to an expression tree; syntax errors carry line and column."""
    return _Parser(_tokenize(text)).parse()


def to_ncpoly(expr):
    """Lower an expression tree to an exact NCPoly."""
    kind = expr[0]
    if kind == "gen":
        return NCPoly.gen(expr[1])
    if kind == "num":
        return NCPoly.from_word((), GaussRational(expr[1]))
    if kind == "i":
        return NCPoly.from_word((), GaussRational(0, 1))
    if kind == "neg":
        return -to_ncpoly(expr[1])
    if kind == "add":
        return to_ncpoly(expr[1]) + to_ncpoly(expr[2])
    if kind == "sub":
        return to_ncpoly(expr[1]) - to_ncpoly(expr[2])
    if kind == "mul":
        return to_ncpoly(expr[1]) * to_ncpoly(expr[2])
    if kind == "div":
        divisor = to_ncpoly(expr[2])
        if not divisor.is_scalar():
            raise ExprEvalError("can only divide by a scalar expression")
        scalar = divisor.coefficient(())
        if not scalar:
            raise ExprEvalError("division by zero")
        numerator = to_ncpoly(expr[1])
        return numerator * (GaussRational(1) / scalar)
    if kind == "pow":
        return to_ncpoly(expr[1]) ** expr[2]
    raise ExprEvalError(f"unknown node {kind!r}")


def parse_to_poly(text):
    """Parse and lower in one step."""
    return to_ncpoly(parse_operator_expr(text))


def pretty_print(p):
    """Canonical text form; parse_to_poly(pretty_print(p)) == p exactly."""
    return render(p)
