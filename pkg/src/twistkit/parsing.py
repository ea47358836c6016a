"""Tokenizer, expression parser and canonical printer for scalars and forms.

Expression grammar (whitespace insensitive)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | wedge
    wedge  := atom ("^" atom)*
    atom   := INTEGER | "i" | IDENT | "X" "[" IDENT "]"
            | "(" expr ")" | "[" expr ("," expr)* "]"

``^`` is the wedge product and binds tighter than ``*``.  Identifiers are
resolved against a namespace: coordinates become scalars, coframe names
become basis one-forms and ``X[e]`` is the frame field dual to ``e``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .scalar import GaussianRational, Poly, Scalar, _imag_str

__all__ = [
    "ParseError",
    "Token",
    "tokenize",
    "ExprParser",
    "parse_scalar",
    "parse_form",
    "format_scalar",
    "format_form",
    "format_vector",
    "format_matrix",
]

RESERVED = frozenset({"i", "X"})


class ParseError(ValueError):
    """Syntax or semantic error with a source position."""

    def __init__(self, message: str, line: int = 1, col: int = 1, expected=()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        where = f"line {line}, column {col}"
        extra = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}: {message}{extra}")


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, IDENT, OP, END
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()\[\],;]))")


def tokenize(text: str, line: int = 1, col: int = 1) -> list[Token]:
    tokens = []
    pos = 0
    cur_line, line_start = line, -col + 1
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            # locate the offending character
            bad = pos + (len(text[pos:]) - len(stripped))
            cur_line, line_start = _advance(text, pos, bad, cur_line, line_start)
            raise ParseError(f"unexpected character {text[bad]!r}", cur_line, bad - line_start + 1)
        start = m.start(m.lastindex)
        cur_line, line_start = _advance(text, pos, start, cur_line, line_start)
        c = start - line_start + 1
        if m.group(1):
            tokens.append(Token("NUM", m.group(1), cur_line, c))
        elif m.group(2):
            tokens.append(Token("IDENT", m.group(2), cur_line, c))
        else:
            tokens.append(Token("OP", m.group(3), cur_line, c))
        pos = m.end()
    cur_line, line_start = _advance(text, pos, len(text), cur_line, line_start)
    tokens.append(Token("END", "", cur_line, len(text) - line_start + 1))
    return tokens


def _advance(text, start, stop, line, line_start):
    seg = text[start:stop]
    k = seg.count("\n")
    if k:
        line += k
        line_start = start + seg.rfind("\n") + 1
    return line, line_start


class ExprParser:
    """Recursive-descent evaluator over a namespace of named values.

    ``namespace`` maps identifiers to Scalars, Forms or VectorFields.
    ``frame`` maps coframe names to frame indices for ``X[name]``.  If
    ``free_variables`` is true, unknown identifiers become coordinate
    variables instead of errors.
    """

    def __init__(self, tokens, namespace: Mapping[str, object], frame=None, free_variables=False):
        self.tokens = tokens
        self.pos = 0
        self.ns = namespace
        self.frame = frame or {}
        self.free = free_variables

    # -- token helpers ------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def _accept(self, text):
        if self.tok.kind == "OP" and self.tok.text == text:
            self.pos += 1
            return True
        return False

    def _expect(self, text):
        if not self._accept(text):
            raise self.error(f"unexpected {self._describe(self.tok)}", expected=[repr(text)])

    def error(self, message, token=None, expected=()):
        t = token or self.tok
        return ParseError(message, t.line, t.col, expected)

    @staticmethod
    def _describe(tok):
        return "end of input" if tok.kind == "END" else repr(tok.text)

    def at_end(self):
        return self.tok.kind == "END"

    def parse_all(self):
        value = self.parse_value()
        if not self.at_end():
            raise self.error(f"unexpected {self._describe(self.tok)}", expected=["operator", "end of input"])
        return value

    # -- grammar ------------------------------------------------------------
    def parse_value(self):
        return self.parse_expr()

    def parse_expr(self):
        value = self.parse_term()
        while True:
            tok = self.tok
            if self._accept("+"):
                value = _combine("+", value, self.parse_term(), tok, self)
            elif self._accept("-"):
                value = _combine("-", value, self.parse_term(), tok, self)
            else:
                return value

    def parse_term(self):
        value = self.parse_unary()
        while True:
            tok = self.tok
            if self._accept("*"):
                value = _combine("*", value, self.parse_unary(), tok, self)
            elif self._accept("/"):
                value = _combine("/", value, self.parse_unary(), tok, self)
            else:
                return value

    def parse_unary(self):
        tok = self.tok
        if self._accept("-"):
            v = self.parse_unary()
            if isinstance(v, list):
                raise self.error("cannot negate a list", tok)
            return -v
        if self._accept("+"):
            return self.parse_unary()
        return self.parse_wedge()

    def parse_wedge(self):
        value = self.parse_atom()
        while True:
            tok = self.tok
            if self._accept("^"):
                value = _combine("^", value, self.parse_atom(), tok, self)
            else:
                return value

    def parse_atom(self):
        tok = self.tok
        if tok.kind == "NUM":
            self.pos += 1
            return Scalar(int(tok.text))
        if tok.kind == "IDENT":
            self.pos += 1
            if tok.text == "i":
                return Scalar(GaussianRational(0, 1))
            if tok.text == "X" and self.tok.kind == "OP" and self.tok.text == "[":
                self.pos += 1
                name_tok = self.tok
                if name_tok.kind != "IDENT":
                    raise self.error("expected a coframe name", expected=["identifier"])
                self.pos += 1
                self._expect("]")
                if name_tok.text not in self.frame:
                    raise self.error(f"unknown coframe symbol {name_tok.text!r}", name_tok)
                from .exterior import VectorField

                return VectorField.frame(self.frame[name_tok.text])
            if tok.text in self.ns:
                return self.ns[tok.text]
            if self.free and tok.text not in RESERVED:
                return Scalar.var(tok.text)
            raise self.error(f"unknown name {tok.text!r}", tok)
        if self._accept("("):
            value = self.parse_expr()
            self._expect(")")
            return value
        if self._accept("["):
            items = [self.parse_expr()]
            while self._accept(","):
                items.append(self.parse_expr())
            self._expect("]")
            return items
        raise self.error(
            f"unexpected {self._describe(tok)}",
            expected=["number", "identifier", "'('", "'['"],
        )


def _combine(op, lhs, rhs, tok, parser):
    from .exterior import Form, VectorField, wedge

    if isinstance(lhs, list) or isinstance(rhs, list):
        raise parser.error(f"operator {op!r} cannot be applied to a list", tok)
    try:
        if op == "+":
            return _add(lhs, rhs)
        if op == "-":
            return _add(lhs, -rhs)
        if op == "*":
            if isinstance(lhs, Scalar) or isinstance(rhs, Scalar):
                return lhs * rhs
            raise TypeError("product of two forms: use '^' for the wedge product")
        if op == "/":
            if not isinstance(rhs, Scalar):
                raise TypeError("division is only by scalars")
            if rhs.is_zero():
                raise ZeroDivisionError("division by zero")
            return lhs * rhs.inverse() if not isinstance(lhs, Scalar) else lhs / rhs
        if op == "^":
            if isinstance(lhs, Scalar) and isinstance(rhs, Scalar):
                raise TypeError("'^' is the wedge product, not a power")
            if isinstance(lhs, VectorField) or isinstance(rhs, VectorField):
                raise TypeError("cannot wedge vector fields")
            if isinstance(lhs, Scalar):
                return lhs * rhs
            if isinstance(rhs, Scalar):
                return lhs * rhs
            return wedge(lhs, rhs)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise parser.error(str(exc), tok) from None
    raise AssertionError(op)


def _add(lhs, rhs):
    from .exterior import Form, VectorField

    if isinstance(lhs, Scalar) and isinstance(rhs, Scalar):
        return lhs + rhs
    # a scalar next to a form: only 0 or a degree-0 form makes sense
    if isinstance(lhs, Scalar) and isinstance(rhs, (Form, VectorField)) and lhs.is_zero():
        return rhs
    if isinstance(rhs, Scalar) and isinstance(lhs, (Form, VectorField)) and rhs.is_zero():
        return lhs
    if isinstance(lhs, Scalar) and isinstance(rhs, Form) and rhs.degree == 0:
        return Form.function(lhs) + rhs
    if isinstance(rhs, Scalar) and isinstance(lhs, Form) and lhs.degree == 0:
        return lhs + Form.function(rhs)
    if isinstance(lhs, Form) and isinstance(rhs, Form):
        if lhs.degree != rhs.degree and not (lhs.is_zero() or rhs.is_zero()):
            raise ValueError(f"degree mismatch: {lhs.degree} and {rhs.degree}")
        return lhs + rhs
    if isinstance(lhs, VectorField) and isinstance(rhs, VectorField):
        return lhs + rhs
    raise TypeError(f"cannot add {type(lhs).__name__} and {type(rhs).__name__}")


def parse_scalar(text: str, variables: Iterable[str] | None = None) -> Scalar:
    """Parse a scalar expression; with ``variables=None`` any name is a variable."""
    if variables is None:
        parser = ExprParser(tokenize(text), {}, free_variables=True)
    else:
        ns = {}
        for v in variables:
            ns[v] = Scalar.var(v)
        parser = ExprParser(tokenize(text), ns)
    value = parser.parse_all()
    if not isinstance(value, Scalar):
        raise ParseError("expected a scalar expression")
    return value


def parse_form(text: str, model) -> "Form":
    """Parse a form expression in the coframe of ``model``."""
    from .exterior import Form

    parser = ExprParser(tokenize(text), model.namespace(), frame=model.frame_index())
    value = parser.parse_all()
    if isinstance(value, Scalar):
        return Form.function(value)
    if not isinstance(value, Form):
        raise ParseError("expected a form expression")
    return value


# -- printing ---------------------------------------------------------------


def _mono_key(order):
    def key(item):
        m = dict(item[0])
        return (sum(m.values()), tuple(m.get(v, 0) for v in order))

    return key


def _format_monomial(m) -> str:
    parts = []
    for v, e in m:
        parts.extend([v] * e)
    return "*".join(parts)


def _format_coefficient(c: GaussianRational, first: bool, has_mono: bool):
    """Return (sign, body) for a polynomial term coefficient."""
    if c.is_real():
        r = c.re
        sign = "-" if r < 0 else "+"
        r = abs(r)
        if r == 1 and has_mono:
            return sign, ""
        return sign, str(r) + ("*" if has_mono else "")
    if not c.re and c.im:
        sign = "-" if c.im < 0 else "+"
        im = abs(c.im)
        body = _imag_str(im)
        return sign, body + ("*" if has_mono else "")
    return "+", f"({c})" + ("*" if has_mono else "")


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    if p.is_constant():
        return str(p.constant_value())
    order = sorted(p.variables())
    items = sorted(p.terms.items(), key=_mono_key(order), reverse=True)
    out = []
    for k, (m, c) in enumerate(items):
        sign, body = _format_coefficient(c, k == 0, bool(m))
        term = body + _format_monomial(m)
        if k == 0:
            out.append(("-" if sign == "-" else "") + term)
        else:
            out.append(f" {sign} {term}")
    return "".join(out)


def format_scalar(s: Scalar) -> str:
    num = format_poly(s.num)
    if s.den.is_constant():
        return num
    den = format_poly(s.den)
    if len(s.num.terms) > 1 or (s.num.is_constant() and not s.num.constant_value().is_real()
                                and s.num.constant_value().re):
        num = f"({num})"
    if not (len(s.den.terms) == 1 and len(next(iter(s.den.terms))) == 1
            and next(iter(s.den.terms))[0][1] == 1 and next(iter(s.den.terms.values())) == 1):
        den = f"({den})"
    return f"{num}/{den}"


def _format_coeff_prefix(c: Scalar, first: bool) -> tuple[str, str]:
    """Sign and multiplier text for a basis element with coefficient ``c``."""
    if c.is_constant() and c.constant_value().is_real():
        r = c.constant_value().re
        sign = "-" if r < 0 else "+"
        r = abs(r)
        return sign, ("" if r == 1 else f"{r}*")
    if c.is_constant():
        return _format_coefficient(c.constant_value(), first, True)
    text = format_scalar(c)
    if len(c.num.terms) == 1:
        m, k = next(iter(c.num.terms.items()))
        if k.is_real() and k.re < 0:
            return "-", f"{format_scalar(-c)}*"
        if k.is_real():
            return "+", f"{text}*"
    return "+", f"({text})*"


def _format_linear(pairs, first_sign_inline=True) -> str:
    if not pairs:
        return "0"
    out = []
    for k, (c, basis) in enumerate(pairs):
        sign, prefix = _format_coeff_prefix(c, k == 0)
        term = prefix + basis
        if k == 0:
            out.append(("-" if sign == "-" else "") + term)
        else:
            out.append(f" {sign} {term}")
    return "".join(out)


def format_form(form, names=None) -> str:
    """Canonical text of a form; ``names`` lists the coframe symbols."""
    if form.degree == 0:
        return format_scalar(form.terms.get((), Scalar(0)))
    pairs = []
    for idx in sorted(form.terms):
        label = "^".join(names[t] if names else f"e{t}" for t in idx)
        pairs.append((form.terms[idx], label))
    return _format_linear(pairs)


def format_vector(vec, names=None) -> str:
    pairs = []
    for k in sorted(vec.components):
        label = f"X[{names[k] if names else f'e{k}'}]"
        pairs.append((vec.components[k], label))
    return _format_linear(pairs)


def format_matrix(rows) -> str:
    return "[" + ", ".join("[" + ", ".join(format_scalar(Scalar.coerce(x)) for x in row) + "]" for row in rows) + "]"
