"""Graded-commutative dg algebras with an explicit basis in each degree.

Elements are sparse dicts ``{basis key: Fraction}``.  Subclasses supply
``basis(p)``, ``degree(key)``, ``mul_keys`` and ``d_key``; everything else
(linear extension, cochain complexes, homology) is shared here.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Hashable, Mapping

from stringtop.graded import ChainComplex, complex_from_operator, homology


def add_into(acc: dict, elem: Mapping, coeff=1):
    for k, v in elem.items():
        if v:
            w = acc.get(k, 0) + coeff * v
            if w:
                acc[k] = w
            else:
                acc.pop(k, None)
    return acc


def scale(elem: Mapping, coeff) -> dict:
    if not coeff:
        return {}
    return {k: coeff * v for k, v in elem.items() if v}


def clean(elem: Mapping) -> dict:
    return {k: Fraction(v) for k, v in elem.items() if v}


class GradedAlgebra:
    """Base class: a cdga given on basis keys."""

    name = "A"

    def basis(self, p) -> tuple:
        raise NotImplementedError

    def degree(self, key) -> int:
        raise NotImplementedError

    def unit_key(self):
        raise NotImplementedError

    def mul_keys(self, a, b) -> dict:
        raise NotImplementedError

    def d_key(self, key) -> dict:
        raise NotImplementedError

    # finite algebras override; None means unbounded
    top_degree = None

    def one(self) -> dict:
        return {self.unit_key(): Fraction(1)}

    def mul(self, x: Mapping, y: Mapping) -> dict:
        out = {}
        for a, u in x.items():
            for b, v in y.items():
                add_into(out, self.mul_keys(a, b), u * v)
        return out

    def d(self, x: Mapping) -> dict:
        out = {}
        for k, c in x.items():
            add_into(out, self.d_key(k), c)
        return out

    def element_degree(self, x: Mapping):
        """Degree of a homogeneous element (None for 0); raises if mixed."""
        degs = {self.degree(k) for k, v in x.items() if v}
        if len(degs) > 1:
            raise ValueError(f"non-homogeneous element with degrees {sorted(degs)}")
        return degs.pop() if degs else None

    def cochain_complex(self, hi, lo=0) -> ChainComplex:
        return complex_from_operator(self.basis, self.d_key, lo, hi)

    def homology(self, upto):
        """Homology through degree ``upto`` (materializes one degree further)."""
        return homology(self.cochain_complex(upto + 1), range(0, upto + 1))

    def format_key(self, key) -> str:
        return str(key)

    def format(self, x: Mapping) -> str:
        return format_element(x, self.format_key)


def format_element(x: Mapping, fmt=str) -> str:
    if not x:
        return "0"
    parts = []
    for k, c in x.items():
        name = fmt(k)
        c = Fraction(c)
        if name == "1":
            term = str(abs(c))
        elif abs(c) == 1:
            term = name
        else:
            term = f"{abs(c)}*{name}"
        parts.append(("-" if c < 0 else "+", term))
    s = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
    for sign, term in parts[1:]:
        s += f" {sign} {term}"
    return s


class FiniteCDGA(GradedAlgebra):
    """Finite-dimensional cdga from labels, a multiplication table and d.

    ``products`` maps ``(a, b)`` to an element; missing pairs involving the
    unit are filled in, the mirrored pair ``(b, a)`` is filled by graded
    commutativity, and anything else missing is zero.
    """

    def __init__(self, degrees: Mapping[Hashable, int], unit, products=None,
                 differential=None, name="A"):
        self.name = name
        self.degrees = dict(degrees)
        if unit not in self.degrees or self.degrees[unit] != 0:
            raise ValueError("unit must be a basis label of degree 0")
        self.unit = unit
        self.top_degree = max(self.degrees.values(), default=0)
        self._by_degree = {}
        for lab, p in self.degrees.items():
            self._by_degree.setdefault(p, []).append(lab)
        self._table = {}
        one = Fraction(1)
        for lab in self.degrees:
            self._table[(unit, lab)] = {lab: one}
            self._table[(lab, unit)] = {lab: one}
        self.explicit_products = {}
        for (a, b), val in (products or {}).items():
            val = clean(val)
            self.explicit_products[(a, b)] = val
            self._table[(a, b)] = val
        for (a, b), val in list(self.explicit_products.items()):
            if (b, a) not in self.explicit_products:
                sign = -1 if (self.degrees[a] * self.degrees[b]) % 2 else 1
                self._table[(b, a)] = scale(val, sign)
        self.differential = {k: clean(v) for k, v in (differential or {}).items()}
        for a, b in self._table:
            if a not in self.degrees or b not in self.degrees:
                raise ValueError(f"product ({a}, {b}) uses an unknown label")

    def basis(self, p):
        return tuple(self._by_degree.get(p, ()))

    def degree(self, key):
        return self.degrees[key]

    def unit_key(self):
        return self.unit

    def labels(self):
        return sorted(self.degrees, key=lambda l: self.degrees[l])

    def mul_keys(self, a, b):
        return self._table.get((a, b), {})

    def d_key(self, key):
        return self.differential.get(key, {})

    def parse(self, text: str) -> dict:
        """Evaluate a polynomial string in the basis labels."""
        from stringtop.polyparse import evaluate, parse_polynomial

        atoms = {lab: {lab: Fraction(1)} for lab in self.degrees if isinstance(lab, str)}
        return evaluate(parse_polynomial(text), self, atoms)

    def check_structure(self):
        """First structural defect found, or None.

        Checks degrees of products and d, graded commutativity, associativity,
        d^2 = 0 and the Leibniz rule on every basis pair/triple.
        """
        labs = list(self.degrees)
        deg = self.degrees
        for (a, b), val in self._table.items():
            for k in val:
                if deg[k] != deg[a] + deg[b]:
                    return f"product {a}*{b} has a term {k} of the wrong degree"
        for k, val in self.differential.items():
            for t in val:
                if deg[t] != deg[k] + 1:
                    return f"d does not raise degree by 1 on {k}"
        for a in labs:
            for b in labs:
                ab = self.mul_keys(a, b)
                ba = self.mul_keys(b, a)
                sign = -1 if (deg[a] * deg[b]) % 2 else 1
                if ab != scale(ba, sign):
                    return f"not graded-commutative on ({a}, {b})"
        for a in labs:
            for b in labs:
                ab = self.mul_keys(a, b)
                for c in labs:
                    left = self.mul(ab, {c: 1})
                    right = self.mul({a: 1}, self.mul_keys(b, c))
                    if left != right:
                        return f"not associative on ({a}, {b}, {c})"
        for a in labs:
            if self.d(self.d_key(a)):
                return f"d^2 != 0 on {a}"
        for a in labs:
            for b in labs:
                lhs = self.d(self.mul_keys(a, b))
                rhs = add_into(self.mul(self.d_key(a), {b: 1}),
                               self.mul({a: 1}, self.d_key(b)),
                               -1 if deg[a] % 2 else 1)
                if lhs != rhs:
                    return f"d is not a derivation on ({a}, {b})"
        return None


class TensorAlgebra(GradedAlgebra):
    """Tensor product of two algebras with the Koszul sign rule.

    Keys are pairs ``(a, b)``; ``(a ⊗ b)(c ⊗ e) = (-1)^{|b||c|} ac ⊗ be``.
    """

    def __init__(self, left: GradedAlgebra, right: GradedAlgebra, name=None):
        self.left = left
        self.right = right
        self.name = name or f"{left.name}⊗{right.name}"
        if left.top_degree is not None and right.top_degree is not None:
            self.top_degree = left.top_degree + right.top_degree
        self._basis = lru_cache(maxsize=None)(self._compute_basis)

    def _compute_basis(self, p):
        out = []
        top = p if self.left.top_degree is None else min(p, self.left.top_degree)
        for q in range(0, top + 1):
            for a in self.left.basis(q):
                for b in self.right.basis(p - q):
                    out.append((a, b))
        return tuple(out)

    def basis(self, p):
        return self._basis(p) if p >= 0 else ()

    def degree(self, key):
        return self.left.degree(key[0]) + self.right.degree(key[1])

    def unit_key(self):
        return (self.left.unit_key(), self.right.unit_key())

    def mul_keys(self, x, y):
        a, b = x
        c, e = y
        sign = -1 if (self.right.degree(b) * self.left.degree(c)) % 2 else 1
        out = {}
        for ac, u in self.left.mul_keys(a, c).items():
            for be, v in self.right.mul_keys(b, e).items():
                out[(ac, be)] = out.get((ac, be), 0) + sign * u * v
        return {k: v for k, v in out.items() if v}

    def d_key(self, key):
        a, b = key
        out = {}
        for da, u in self.left.d_key(a).items():
            out[(da, b)] = out.get((da, b), 0) + u
        sign = -1 if self.left.degree(a) % 2 else 1
        for db, v in self.right.d_key(b).items():
            out[(a, db)] = out.get((a, db), 0) + sign * v
        return {k: v for k, v in out.items() if v}

    def format_key(self, key):
        return f"{self.left.format_key(key[0])}⊗{self.right.format_key(key[1])}"


def tensor(x: Mapping, y: Mapping) -> dict:
    """Elementwise tensor of two sparse elements (no sign)."""
    return {(a, b): u * v for a, u in x.items() for b, v in y.items() if u and v}
