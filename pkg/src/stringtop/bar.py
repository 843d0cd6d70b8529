"""Two-sided bar construction, the reduced bar coalgebra and Hochschild chains.

A bar word ``n[a_1|...|a_k]m`` is stored as ``(n, (a_1, ..., a_k), m)`` with
basis keys of the algebra as letters; the letters are basis elements of
positive degree.  Its degree is ``|n| + sum(|a_i| - 1) + |m|``.  Hochschild
chains ``a[a_1|...|a_k]`` are stored as ``(a, (a_1, ..., a_k))``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from stringtop.algebras import GradedAlgebra, add_into, format_element
from stringtop.cdga import GroundField
from stringtop.graded import (
    ChainComplex, GradedBasis, LinearMapByDegree, complex_from_operator, map_from_operator,
)

K = "k"
A_MOD = "A"


def _sign(e):
    return -1 if e % 2 else 1


class _Words:
    """Words in the positive-degree basis of A, enumerated by suspended degree."""

    def __init__(self, A: GradedAlgebra):
        if A.basis(1):
            raise ValueError("bar constructions here need A^1 = 0")
        self.A = A
        self._cache = {}

    def letters(self, q):
        """Letters of suspended degree q (algebra degree q + 1)."""
        return self.A.basis(q + 1)

    def of_degree(self, q) -> tuple:
        out = self._cache.get(q)
        if out is None:
            if q < 0:
                out = ()
            elif q == 0:
                out = ((),)
            else:
                words = []
                for first in range(1, q + 1):
                    for a in self.letters(first):
                        for rest in self.of_degree(q - first):
                            words.append((a,) + rest)
                words.sort(key=len)
                out = tuple(words)
            self._cache[q] = out
        return out


def word_degree(A, word) -> int:
    return sum(A.degree(a) - 1 for a in word)


def format_word(A, word) -> str:
    return "[" + "|".join(A.format_key(a) for a in word) + "]"


def _reduced(A, x):
    """Project onto the augmentation ideal by dropping the degree-0 part."""
    return {k: c for k, c in x.items() if A.degree(k) > 0}


class BarComplex:
    """``B(N, A, M)`` for N, M each the ground field (``"k"``) or A itself."""

    def __init__(self, A: GradedAlgebra, left=A_MOD, right=A_MOD):
        if left not in (K, A_MOD) or right not in (K, A_MOD):
            raise ValueError("modules must be 'k' or 'A'")
        self.A = A
        self.left, self.right = left, right
        self.words = _Words(A)
        self.field = GroundField()
        self.N = A if left == A_MOD else self.field
        self.M = A if right == A_MOD else self.field
        self._basis = lru_cache(maxsize=None)(self._compute_basis)
        self._dcache = {}

    def _compute_basis(self, p):
        out = []
        tops = (p if self.N.top_degree is None else min(p, self.N.top_degree))
        for i in range(0, tops + 1):
            for n in self.N.basis(i):
                for q in range(0, p - i + 1):
                    for w in self.words.of_degree(q):
                        for m in self.M.basis(p - i - q):
                            out.append((n, w, m))
        out.sort(key=lambda key: len(key[1]))
        return tuple(out)

    def basis(self, p):
        return self._basis(p) if p >= 0 else ()

    def degree(self, key) -> int:
        n, w, m = key
        return self.N.degree(n) + word_degree(self.A, w) + self.M.degree(m)

    def _left_act(self, n, a):
        if self.left == A_MOD:
            return self.A.mul_keys(n, a)
        return {n: Fraction(1)} if self.A.degree(a) == 0 else {}

    def _right_act(self, a, m):
        if self.right == A_MOD:
            return self.A.mul_keys(a, m)
        return {m: Fraction(1)} if self.A.degree(a) == 0 else {}

    def d0_key(self, key) -> dict:
        n, w, m = key
        A = self.A
        out = {}
        for dn, c in self.N.d_key(n).items():
            add_into(out, {(dn, w, m): c})
        eps = self.N.degree(n)
        for i, a in enumerate(w):
            for da, c in A.d_key(a).items():
                add_into(out, {(n, w[:i] + (da,) + w[i + 1:], m): c}, -_sign(eps))
            eps += A.degree(a) - 1
        for dm, c in self.M.d_key(m).items():
            add_into(out, {(n, w, dm): c}, _sign(eps))
        return out

    def d1_key(self, key) -> dict:
        n, w, m = key
        A = self.A
        out = {}
        k = len(w)
        if not k:
            return out
        for na, c in self._left_act(n, w[0]).items():
            add_into(out, {(na, w[1:], m): c}, _sign(self.N.degree(n)))
        eps = self.N.degree(n) + A.degree(w[0]) - 1
        for i in range(1, k):
            prod = _reduced(A, A.mul_keys(w[i - 1], w[i]))
            for ab, c in prod.items():
                add_into(out, {(n, w[:i - 1] + (ab,) + w[i + 1:], m): c}, _sign(eps))
            eps += A.degree(w[i]) - 1
        eps_k = self.N.degree(n) + word_degree(A, w[:-1])
        for am, c in self._right_act(w[-1], m).items():
            add_into(out, {(n, w[:-1], am): c}, -_sign(eps_k))
        return out

    def d_key(self, key) -> dict:
        out = self._dcache.get(key)
        if out is None:
            out = add_into(self.d0_key(key), self.d1_key(key))
            self._dcache[key] = out
        return out

    def d(self, x) -> dict:
        out = {}
        for k, c in x.items():
            add_into(out, self.d_key(k), c)
        return out

    def complex(self, hi, lo=0) -> ChainComplex:
        return complex_from_operator(self.basis, self.d_key, lo, hi)

    def format_key(self, key) -> str:
        n, w, m = key
        left = "" if self.left == K else self.A.format_key(n)
        right = "" if self.right == K else self.A.format_key(m)
        return f"{left}{format_word(self.A, w)}{right}"

    def format(self, x) -> str:
        return format_element(x, self.format_key)


def reduced_bar(A: GradedAlgebra) -> BarComplex:
    """``B(k, A, k)``; keys are ``("1", word, "1")``."""
    return BarComplex(A, K, K)


def bar_word(*letters):
    """Key of ``[a_1|...|a_k]`` in the reduced bar construction."""
    return ("1", tuple(letters), "1")


def bar_d0(bar: BarComplex, key) -> dict:
    return bar.d0_key(key)


def bar_d1(bar: BarComplex, key) -> dict:
    return bar.d1_key(key)


def bar_coproduct(word) -> dict:
    """Deconcatenation ``[w] -> sum_i [w_<=i] ⊗ [w_>i]`` on letter tuples."""
    word = tuple(word)
    return {(word[:i], word[i:]): Fraction(1) for i in range(len(word) + 1)}


class HochschildComplex:
    """``CH(A) = A ⊗_{A^e} B(A, A, A)`` on keys ``(a, word)``."""

    def __init__(self, A: GradedAlgebra):
        self.A = A
        self.words = _Words(A)
        self._basis = lru_cache(maxsize=None)(self._compute_basis)
        self._dcache = {}

    def _compute_basis(self, p):
        A = self.A
        out = []
        top = p if A.top_degree is None else min(p, A.top_degree)
        for q in range(0, p + 1):
            if p - q > top:
                continue
            for w in self.words.of_degree(q):
                for a in A.basis(p - q):
                    out.append((a, w))
        out.sort(key=lambda key: len(key[1]))
        return tuple(out)

    def basis(self, p):
        return self._basis(p) if p >= 0 else ()

    def degree(self, key) -> int:
        a, w = key
        return self.A.degree(a) + word_degree(self.A, w)

    def d_key(self, key) -> dict:
        out = self._dcache.get(key)
        if out is None:
            out = self._compute_d(key)
            self._dcache[key] = out
        return out

    def _compute_d(self, key):
        A = self.A
        a, w = key
        out = {}
        for da, c in A.d_key(a).items():
            add_into(out, {(da, w): c})
        eps = A.degree(a)
        for i, x in enumerate(w):
            for dx, c in A.d_key(x).items():
                add_into(out, {(a, w[:i] + (dx,) + w[i + 1:]): c}, -_sign(eps))
            eps += A.degree(x) - 1
        k = len(w)
        if not k:
            return out
        for ax, c in A.mul_keys(a, w[0]).items():
            add_into(out, {(ax, w[1:]): c}, _sign(A.degree(a)))
        eps = A.degree(a) + A.degree(w[0]) - 1
        for i in range(1, k):
            prod = _reduced(A, A.mul_keys(w[i - 1], w[i]))
            for xy, c in prod.items():
                add_into(out, {(a, w[:i - 1] + (xy,) + w[i + 1:]): c}, _sign(eps))
            eps += A.degree(w[i]) - 1
        eps_k = A.degree(a) + word_degree(A, w[:-1])
        last = w[-1]
        wrap = _sign(A.degree(last) * eps_k)
        for xa, c in A.mul_keys(last, a).items():
            add_into(out, {(xa, w[:-1]): c}, -_sign(eps_k) * wrap)
        return out

    def d(self, x) -> dict:
        out = {}
        for k, c in x.items():
            add_into(out, self.d_key(k), c)
        return out

    def complex(self, hi, lo=0) -> ChainComplex:
        return complex_from_operator(self.basis, self.d_key, lo, hi)

    def graded_basis(self, hi) -> GradedBasis:
        return GradedBasis({p: self.basis(p) for p in range(0, hi + 1)})

    def format_key(self, key) -> str:
        a, w = key
        return f"{self.A.format_key(a)}{format_word(self.A, w)}"

    def format(self, x) -> str:
        return format_element(x, self.format_key)


def hochschild_complex(A: GradedAlgebra, N: int) -> ChainComplex:
    """Hochschild chains materialized through degree N (d into N + 1 included)."""
    return HochschildComplex(A).complex(N + 1)


def nabla(key) -> dict:
    """``a[w] -> sum_i a ⊗ [w_<=i] ⊗ [w_>i]`` as ``{(a, w1, w2): 1}``."""
    a, w = key
    return {(a, w[:i], w[i:]): Fraction(1) for i in range(len(w) + 1)}


def omega_inclusion(A, N: int, bar: BarComplex | None = None,
                    ch: HochschildComplex | None = None) -> LinearMapByDegree:
    """``[w] -> omega[w]`` from the reduced bar construction to CH(A), degree m,
    on source degrees 0..N."""
    bar = bar or reduced_bar(A)
    ch = ch or HochschildComplex(A)
    m = A.m
    src = GradedBasis({p: bar.basis(p) for p in range(0, N + 1)})
    tgt = GradedBasis({p: ch.basis(p) for p in range(m, N + m + 1)})
    return map_from_operator(src, tgt, m, lambda key: {(A.omega, key[1]): Fraction(1)},
                             range(0, N + 1))
