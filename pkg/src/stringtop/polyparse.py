"""Parser for polynomial strings such as ``-2*x*sx + 1/2 y^2``.

Grammar::

    poly   := ['+'|'-'] term (('+'|'-') term)*
    term   := [coeff] factor* | coeff
    coeff  := INT ['/' INT]
    factor := NAME ['^' INT]        (factors may be separated by '*' or spaces)

Names start with a letter or underscore and may contain letters, digits,
underscores and primes.  ``0`` is the zero polynomial.
"""

from __future__ import annotations

import re
from fractions import Fraction

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*/^]))")


class PolyParseError(ValueError):
    def __init__(self, message, column):
        super().__init__(f"column {column}: {message}")
        self.column = column
        self.message = message


def _tokens(text):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise PolyParseError(f"unexpected character {text[col - 1]!r}", col)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


def parse_polynomial(text: str):
    """Parse into a list of ``(coefficient, [(name, exponent), ...])`` terms."""
    toks = _tokens(text)
    i = 0
    terms = []

    def peek():
        return toks[i]

    sign = 1
    if peek()[0] == "op" and peek()[1] in "+-":
        sign = -1 if peek()[1] == "-" else 1
        i += 1
    while True:
        coeff = Fraction(sign)
        factors = []
        saw = False
        kind, val, col = peek()
        if kind == "num":
            num = int(val)
            i += 1
            if peek()[0] == "op" and peek()[1] == "/":
                i += 1
                kind, val, col = peek()
                if kind != "num":
                    raise PolyParseError("expected denominator", col)
                if int(val) == 0:
                    raise PolyParseError("zero denominator", col)
                num = Fraction(num, int(val))
                i += 1
            coeff *= num
            saw = True
            if peek()[0] == "op" and peek()[1] == "*":
                i += 1
                if peek()[0] != "name":
                    raise PolyParseError("expected a generator name after '*'", peek()[2])
        while peek()[0] == "name":
            name = peek()[1]
            i += 1
            exp = 1
            if peek()[0] == "op" and peek()[1] == "^":
                i += 1
                kind, val, col = peek()
                if kind != "num":
                    raise PolyParseError("expected an integer exponent", col)
                exp = int(val)
                i += 1
            factors.append((name, exp))
            saw = True
            if peek()[0] == "op" and peek()[1] == "*":
                i += 1
                if peek()[0] != "name":
                    raise PolyParseError("expected a generator name after '*'", peek()[2])
        if not saw:
            kind, val, col = peek()
            raise PolyParseError(f"expected a term, found {val or 'end of input'!r}", col)
        terms.append((coeff, factors))
        kind, val, col = peek()
        if kind == "end":
            break
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            i += 1
            continue
        raise PolyParseError(f"unexpected {val!r}", col)
    return [(c, f) for c, f in terms if c]


def evaluate(terms, algebra, atoms):
    """Evaluate parsed terms in ``algebra``; ``atoms`` maps names to elements."""
    from stringtop.algebras import add_into, scale

    out = {}
    for coeff, factors in terms:
        value = algebra.one()
        for name, exp in factors:
            if name not in atoms:
                raise KeyError(name)
            for _ in range(exp):
                value = algebra.mul(value, atoms[name])
        add_into(out, scale(value, coeff))
    return out
