"""Graded vector spaces, degreewise linear maps, cochain complexes and homology.

Everything is cohomologically graded (``V^k = V_{-k}``) with differentials of
degree +1.  Matrices act on column vectors: the block of a degree-``k`` map at
source degree ``p`` has ``dim target[p + k]`` rows and ``dim source[p]``
columns.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from stringtop import linalg
from stringtop.linalg import ZERO


class TruncationError(ValueError):
    """A computation needs degrees beyond the materialized truncation."""


class NotAComplexError(ValueError):
    """d∘d is nonzero in some degree."""

    def __init__(self, degree):
        super().__init__(f"not a complex: d∘d != 0 starting in degree {degree}")
        self.degree = degree


def koszul_sign(moved_left: Sequence[int], moved_right: Sequence[int]) -> int:
    """Sign of swapping a block of degrees past another: (-1)^(sum*sum)."""
    return -1 if (sum(moved_left) * sum(moved_right)) % 2 else 1


def thread_count() -> int:
    try:
        return max(0, int(os.environ.get("STRINGTOP_THREADS", "0")))
    except ValueError:
        return 0


def map_degrees(fn, degrees):
    """Apply ``fn`` to each degree, fanning out when STRINGTOP_THREADS > 1."""
    degrees = list(degrees)
    n = thread_count()
    if n > 1 and len(degrees) > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(fn, degrees))
    return [fn(p) for p in degrees]


class GradedBasis:
    """Ordered, duplicate-free basis labels in each degree."""

    def __init__(self, degrees: Mapping[int, Iterable[Hashable]]):
        self._labels = {}
        self._index = {}
        for p, labels in degrees.items():
            labels = tuple(labels)
            index = {lab: i for i, lab in enumerate(labels)}
            if len(index) != len(labels):
                raise ValueError(f"duplicate basis label in degree {p}")
            if labels:
                self._labels[p] = labels
                self._index[p] = index

    def __getitem__(self, p) -> tuple:
        return self._labels.get(p, ())

    def dim(self, p) -> int:
        return len(self._labels.get(p, ()))

    def index(self, p, label) -> int:
        return self._index[p][label]

    def degrees(self) -> list[int]:
        return sorted(self._labels)

    def __eq__(self, other):
        return isinstance(other, GradedBasis) and self._labels == other._labels

    def __repr__(self):
        return f"GradedBasis({self._labels!r})"

    def vector(self, p, element: Mapping) -> list:
        """Coefficient vector of a sparse element ``{label: coeff}`` in degree p."""
        v = [ZERO] * self.dim(p)
        index = self._index.get(p, {})
        for lab, c in element.items():
            if c:
                try:
                    v[index[lab]] += c
                except KeyError:
                    raise KeyError(f"{lab!r} is not a basis label in degree {p}") from None
        return v

    def element(self, p, vector: Sequence) -> dict:
        return {lab: c for lab, c in zip(self[p], vector) if c}


class LinearMapByDegree:
    """A degree-``k`` linear map stored as one matrix per source degree."""

    def __init__(self, source: GradedBasis, target: GradedBasis, degree: int,
                 blocks: Mapping[int, list] | None = None):
        self.source = source
        self.target = target
        self.degree = degree
        self.blocks = {}
        for p, m in (blocks or {}).items():
            rows, cols = target.dim(p + degree), source.dim(p)
            if len(m) != rows or any(len(r) != cols for r in m):
                raise ValueError(
                    f"block at degree {p} has wrong shape; expected {rows}x{cols}")
            self.blocks[p] = m

    def block(self, p) -> list:
        m = self.blocks.get(p)
        if m is None:
            return linalg.zeros(self.target.dim(p + self.degree), self.source.dim(p))
        return m

    def apply(self, p, vector):
        return linalg.matvec(self.block(p), vector)

    def compose(self, first: "LinearMapByDegree") -> "LinearMapByDegree":
        """``self ∘ first``."""
        blocks = {}
        for p in first.blocks:
            q = p + first.degree
            if q in self.blocks:
                blocks[p] = linalg.matmul(self.blocks[q], first.blocks[p],
                                          first.source.dim(p))
        return LinearMapByDegree(first.source, self.target,
                                 first.degree + self.degree, blocks)

    def combine(self, other: "LinearMapByDegree", a=1, b=1) -> "LinearMapByDegree":
        """``a*self + b*other`` for maps with the same shape."""
        if other.degree != self.degree:
            raise ValueError("cannot add maps of different degrees")
        blocks = {}
        for p in set(self.blocks) | set(other.blocks):
            x, y = self.block(p), other.block(p)
            blocks[p] = [[a * u + b * v for u, v in zip(r, s)] for r, s in zip(x, y)]
        return LinearMapByDegree(self.source, self.target, self.degree, blocks)

    def is_zero(self) -> bool:
        return all(linalg.is_zero(m) for m in self.blocks.values())

    def rank(self, p) -> int:
        return linalg.rank(self.block(p), self.source.dim(p))


@dataclass
class ChainComplex:
    """Cochain complex materialized on degrees ``lo..hi``.

    ``differential`` has blocks for ``lo <= p < hi``.  If ``bounded_below`` the
    complex is zero below ``lo``; otherwise degree ``lo`` has no known incoming
    differential.
    """

    basis: GradedBasis
    differential: LinearMapByDegree
    lo: int
    hi: int
    bounded_below: bool = True

    def __post_init__(self):
        if self.differential.degree != 1:
            raise ValueError("differential must have degree +1")

    def d(self, p) -> list:
        if p < self.lo:
            if self.bounded_below:
                return linalg.zeros(self.basis.dim(p + 1), 0)
            raise TruncationError(f"insufficient truncation: no differential from degree {p}")
        if p >= self.hi:
            raise TruncationError(f"insufficient truncation: no differential from degree {p}")
        return self.differential.block(p)

    def check_d_squared(self, degrees=None):
        lo = self.lo if degrees is None else min(degrees)
        hi = self.hi - 1 if degrees is None else max(degrees)
        for p in range(max(lo, self.lo), min(hi, self.hi - 2) + 1):
            sq = linalg.matmul(self.d(p + 1), self.d(p), self.basis.dim(p))
            if not linalg.is_zero(sq):
                raise NotAComplexError(p)

    def homology_range(self) -> range:
        start = self.lo if self.bounded_below else self.lo + 1
        return range(start, self.hi)


@dataclass
class HomologyDegree:
    """Homology in one degree: Betti number, representative cocycles and a
    chain-level projection ``C^p -> H^p`` that kills coboundaries."""

    degree: int
    dim: int
    betti: int
    representatives: list
    boundaries: list = field(repr=False)
    cycles: list = field(repr=False)
    _projection: list | None = field(default=None, repr=False)

    @property
    def projection(self) -> list:
        if self._projection is None:
            self._projection = self._build_projection()
        return self._projection

    def _build_projection(self):
        n = self.dim
        if self.betti == 0:
            return []
        _, zpiv = linalg.rref(self.cycles, n)
        zpiv = set(zpiv)
        comp = []
        for j in range(n):
            if j not in zpiv:
                e = [ZERO] * n
                e[j] = linalg.ONE
                comp.append(e)
        cols = list(self.boundaries) + list(self.representatives) + comp
        inv = linalg.inverse(linalg.transpose(cols, n))
        start = len(self.boundaries)
        return inv[start:start + self.betti]

    def coordinates(self, vector) -> list:
        """Homology coordinates of a cocycle in terms of the representatives."""
        return linalg.matvec(self.projection, vector)


class HomologySummary(dict):
    """``degree -> HomologyDegree``; ``valid_up_to`` records the truncation."""

    def __init__(self, data, valid_up_to=None):
        super().__init__(data)
        self.valid_up_to = valid_up_to

    def betti(self) -> dict:
        return {p: h.betti for p, h in sorted(self.items())}

    def basis(self, prefix="h") -> GradedBasis:
        return GradedBasis({p: [f"{prefix}{p}_{i}" for i in range(h.betti)]
                            for p, h in self.items()})


def _homology_degree(complex: ChainComplex, p: int) -> HomologyDegree:
    n = complex.basis.dim(p)
    dout = complex.d(p)
    din = complex.d(p - 1)
    nin = complex.basis.dim(p - 1)
    if nin and n and dout:
        if not linalg.is_zero(linalg.matmul(dout, din, nin)):
            raise NotAComplexError(p - 1)
    boundaries = linalg.row_space(linalg.transpose(din, nin), n) if nin else []
    cycles = linalg.nullspace(dout, n) if dout else [
        [linalg.ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    keep = linalg.independent_rows(boundaries + cycles, n)
    nb = len(boundaries)
    reps = [cycles[i - nb] for i in keep if i >= nb]
    if len(reps) != len(cycles) - nb:
        raise NotAComplexError(p - 1)
    return HomologyDegree(p, n, len(reps), reps, boundaries, cycles)


def homology(complex: ChainComplex, degrees: Iterable[int] | None = None) -> HomologySummary:
    """Betti numbers and representatives over the requested degrees.

    Raises TruncationError if a degree lacks its incoming or outgoing
    differential, NotAComplexError if d∘d != 0.
    """
    avail = complex.homology_range()
    degrees = list(avail if degrees is None else degrees)
    for p in degrees:
        if p not in avail and not (p < complex.lo and complex.bounded_below):
            raise TruncationError(
                f"insufficient truncation: degree {p} outside {avail.start}..{avail.stop - 1}")
    results = map_degrees(lambda p: _homology_degree(complex, p), degrees)
    top = max(degrees) if degrees else None
    return HomologySummary({h.degree: h for h in results}, valid_up_to=top)


def hom_complex_differential(phi: LinearMapByDegree, source: ChainComplex,
                             target: ChainComplex) -> LinearMapByDegree:
    """D(phi) = d∘phi - (-1)^k phi∘d, a map of degree k+1."""
    if phi.source != source.basis or phi.target != target.basis:
        raise ValueError("basis mismatch between phi and the complexes")
    k = phi.degree
    sign = -1 if k % 2 else 1
    blocks = {}
    for p in range(source.lo, source.hi):
        q = p + k
        try:
            dq = target.d(q)
        except TruncationError:
            continue
        n = source.basis.dim(p)
        left = linalg.matmul(dq, phi.block(p), n)
        right = linalg.matmul(phi.block(p + 1), source.d(p), n)
        blocks[p] = [[a - sign * b for a, b in zip(r, s)] for r, s in zip(left, right)]
    return LinearMapByDegree(source.basis, target.basis, k + 1, blocks)


def dual_label(label):
    return f"{label}^#" if isinstance(label, str) else ("#", label)


def graded_dual(basis: GradedBasis, f: LinearMapByDegree | None = None):
    """Graded dual ``V^#`` with ``(V^#)^{-p} = (V^p)^#`` and the dual of ``f``.

    ``f: V -> W`` of degree k dualizes to ``W^# -> V^#`` of degree k; the block
    coming from source degree p is the transpose times (-1)^(k(p+1)).
    """
    dual_basis = GradedBasis({-p: [dual_label(l) for l in basis[p]] for p in basis.degrees()})
    if f is None:
        return dual_basis, None
    if f.source != basis:
        raise ValueError("map source does not match basis")
    k = f.degree
    tdual = GradedBasis({-p: [dual_label(l) for l in f.target[p]] for p in f.target.degrees()})
    blocks = {}
    for p, m in f.blocks.items():
        sign = -1 if (k * (p + 1)) % 2 else 1
        t = linalg.transpose(m, f.source.dim(p))
        blocks[-(p + k)] = [[sign * v for v in row] for row in t]
    return dual_basis, LinearMapByDegree(tdual, dual_basis, k, blocks)


def dual_complex(complex: ChainComplex) -> ChainComplex:
    """The dual cochain complex on degrees ``-hi..-lo``."""
    dual_basis, dmap = graded_dual(complex.basis, complex.differential)
    return ChainComplex(dual_basis, LinearMapByDegree(dual_basis, dual_basis, 1, dmap.blocks),
                        -complex.hi, -complex.lo, bounded_below=False)


def complex_from_operator(basis_fn, d_fn, lo, hi, bounded_below=True) -> ChainComplex:
    """Materialize a complex from ``basis_fn(p) -> labels`` and a sparse
    differential ``d_fn(label) -> {label: coeff}`` on degrees lo..hi."""
    basis = GradedBasis({p: basis_fn(p) for p in range(lo, hi + 1)})

    def block(p):
        cols = []
        for lab in basis[p]:
            cols.append(basis.vector(p + 1, d_fn(lab)))
        return linalg.transpose(cols, basis.dim(p + 1)) if cols else \
            linalg.zeros(basis.dim(p + 1), 0)

    degrees = list(range(lo, hi))
    blocks = dict(zip(degrees, map_degrees(block, degrees)))
    return ChainComplex(basis, LinearMapByDegree(basis, basis, 1, blocks), lo, hi,
                        bounded_below)


def map_from_operator(source: GradedBasis, target: GradedBasis, degree: int, fn,
                      degrees: Iterable[int]) -> LinearMapByDegree:
    """Materialize a degree-``degree`` map given on basis labels."""
    blocks = {}
    for p in degrees:
        q = p + degree
        cols = [target.vector(q, fn(lab)) for lab in source[p]]
        blocks[p] = linalg.transpose(cols, target.dim(q)) if cols else \
            linalg.zeros(target.dim(q), 0)
    return LinearMapByDegree(source, target, degree, blocks)


def induced_map(f: LinearMapByDegree, hs: HomologySummary, ht: HomologySummary,
                degrees: Iterable[int]) -> LinearMapByDegree:
    """Matrix of H(f) between the homology bases of two summaries."""
    blocks = {}
    for p in degrees:
        q = p + f.degree
        src, tgt = hs[p], ht[q]
        cols = []
        for rep in src.representatives:
            image = f.apply(p, rep)
            cols.append(tgt.coordinates(image) if tgt.betti else [])
        blocks[p] = linalg.transpose(cols, tgt.betti) if cols else linalg.zeros(tgt.betti, 0)
    return LinearMapByDegree(hs.basis(), ht.basis(), f.degree, blocks)


__all__ = [
    "Fraction", "GradedBasis", "LinearMapByDegree", "ChainComplex", "HomologyDegree",
    "HomologySummary", "TruncationError", "NotAComplexError", "koszul_sign", "homology",
    "hom_complex_differential", "graded_dual", "dual_complex", "complex_from_operator",
    "map_from_operator", "induced_map",
]
