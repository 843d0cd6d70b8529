"""Finite Poincaré duality cdgas: axiom checks, dual bases, the diagonal class."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from stringtop import linalg
from stringtop.algebras import FiniteCDGA, TensorAlgebra, add_into, format_element
from stringtop.graded import GradedBasis, LinearMapByDegree


class PDError(ValueError):
    """Internal inconsistency in a Poincaré duality algebra."""


class FinitePDAlgebra(FiniteCDGA):
    """A finite cdga with formal dimension ``m`` and fundamental class ``omega``.

    Construction only checks that the data is well formed; use
    :func:`check_poincare_duality` to verify the duality axioms.
    """

    def __init__(self, degrees, unit, products=None, differential=None, dimension=None,
                 fundamental_class=None, name="A"):
        super().__init__(degrees, unit, products, differential, name)
        if fundamental_class not in self.degrees:
            raise ValueError(f"fundamental class {fundamental_class!r} is not a basis label")
        self.m = int(dimension if dimension is not None else self.top_degree)
        self.omega = fundamental_class
        self._ops = {}

    def graded_basis(self) -> GradedBasis:
        return GradedBasis({p: self.basis(p) for p in range(0, self.top_degree + 1)})

    def pairing_matrix(self, r):
        """``P[i][j]`` = coefficient of omega in ``a_i * b_j`` (a in A^r, b in A^{m-r})."""
        left, right = self.basis(r), self.basis(self.m - r)
        return [[Fraction(self.mul_keys(a, b).get(self.omega, 0)) for b in right] for a in left]

    def tensor_square(self) -> TensorAlgebra:
        if "sq" not in self._ops:
            self._ops["sq"] = TensorAlgebra(self, self, name=f"{self.name}⊗{self.name}")
        return self._ops["sq"]


@dataclass
class PDVerdict:
    ok: bool
    axiom: str | None = None
    degree: int | None = None
    rank_defect: int | None = None
    message: str = ""

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "pass" if self.ok else f"fail: {self.message}"


def check_poincare_duality(A: FinitePDAlgebra) -> PDVerdict:
    """Verify axioms (i) and (ii); structural defects are reported separately."""
    defect = A.check_structure()
    if defect:
        return PDVerdict(False, "structure", message=defect)
    m = A.m
    if len(A.basis(0)) != 1:
        return PDVerdict(False, "(i)", 0, message="A^0 is not spanned by the unit")
    if A.degree(A.omega) != m:
        return PDVerdict(False, "(i)", A.degree(A.omega),
                         message=f"fundamental class {A.omega} has degree "
                                 f"{A.degree(A.omega)}, not the top degree {m}")
    for p in sorted(set(A.degrees.values())):
        if p > m or p < 0:
            return PDVerdict(False, "(i)", p, message=f"A^{p} is nonzero outside 0..{m}")
    if len(A.basis(m)) != 1:
        return PDVerdict(False, "(i)", m, message=f"A^{m} is not one-dimensional")
    for r in range(0, m + 1):
        rows, cols = len(A.basis(r)), len(A.basis(m - r))
        rk = linalg.rank(A.pairing_matrix(r), cols) if rows and cols else 0
        defect = max(rows, cols) - rk
        if defect:
            return PDVerdict(False, "(ii)", r, defect,
                             f"pairing A^{r} x A^{m - r} -> Q has rank defect {defect}")
    return PDVerdict(True)


def _require_pd(A):
    verdict = check_poincare_duality(A)
    if not verdict:
        raise PDError(f"not a Poincaré duality algebra: {verdict.message}")


def dual_basis(A: FinitePDAlgebra, basis=None) -> dict:
    """``label -> a'`` with ``a_i * a'_j = delta_ij * omega``.

    ``basis`` optionally replaces the canonical basis by ``{label: element}``
    with homogeneous elements spanning A (the canonical basis is used for
    the complementary side).
    """
    _require_pd(A)
    if basis is None:
        basis = {k: {k: Fraction(1)} for p in range(A.m + 1) for k in A.basis(p)}
    by_degree = {}
    for lab, elem in basis.items():
        by_degree.setdefault(A.element_degree(elem), []).append(lab)
    out = {}
    for r, labels in by_degree.items():
        right = A.basis(A.m - r)
        P = []
        for lab in labels:
            prod = {}
            for b in right:
                prod[b] = A.mul(basis[lab], {b: 1}).get(A.omega, Fraction(0))
            P.append([prod[b] for b in right])
        if len(P) != len(right):
            raise PDError(f"basis in degree {r} has the wrong size")
        C = linalg.transpose(linalg.inverse(P), len(right))
        for lab, row in zip(labels, C):
            out[lab] = {b: c for b, c in zip(right, row) if c}
    return out


def diagonal_class(A: FinitePDAlgebra) -> dict:
    """``D = sum_i (-1)^{|a_i|} a_i ⊗ a_i'`` as ``{(a, b): coeff}``.

    Checks that D is a cocycle and that (a⊗1)D = (1⊗a)D for each basis a.
    """
    if "D" in A._ops:
        return A._ops["D"]
    duals = dual_basis(A)
    D = {}
    for a, dual in duals.items():
        sign = -1 if A.degree(a) % 2 else 1
        for b, c in dual.items():
            add_into(D, {(a, b): c}, sign)
    AA = A.tensor_square()
    if AA.d(D):
        raise PDError("diagonal class is not a cocycle")
    for a in A.degrees:
        if AA.mul({(a, A.unit): 1}, D) != AA.mul({(A.unit, a): 1}, D):
            raise PDError(f"(a⊗1)D != (1⊗a)D for a = {a}")
    A._ops["D"] = D
    return D


def mu_D_element(A: FinitePDAlgebra, x) -> dict:
    """``(x⊗1)·D`` for an element ``x`` of A."""
    D = diagonal_class(A)
    AA = A.tensor_square()
    return AA.mul({(k, A.unit): c for k, c in x.items()}, D)


def mu_D(A: FinitePDAlgebra) -> LinearMapByDegree:
    """Multiplication by the diagonal class, ``A -> A⊗A`` of degree m."""
    AA = A.tensor_square()
    src = A.graded_basis()
    tgt = GradedBasis({p: AA.basis(p) for p in range(0, 2 * A.top_degree + 1)})
    blocks = {}
    for p in src.degrees():
        cols = [tgt.vector(p + A.m, mu_D_element(A, {a: 1})) for a in src[p]]
        blocks[p] = linalg.transpose(cols, tgt.dim(p + A.m))
    return LinearMapByDegree(src, tgt, A.m, blocks)


def euler_characteristic(A: FinitePDAlgebra) -> int:
    """Alternating sum of the Betti numbers of H(A)."""
    betti = A.homology(A.top_degree).betti()
    return sum(b if p % 2 == 0 else -b for p, b in betti.items())


def format_tensor(A, x) -> str:
    """Render an element of A⊗A such as ``1⊗x - x⊗1``."""
    return format_element(x, lambda k: f"{A.format_key(k[0])}⊗{A.format_key(k[1])}")


def standard_models():
    """The S², S³ and CP² algebras used throughout the examples."""
    s2 = FinitePDAlgebra({"1": 0, "x": 2}, "1", {}, None, 2, "x", "S2")
    s3 = FinitePDAlgebra({"1": 0, "x": 3}, "1", {}, None, 3, "x", "S3")
    cp2 = FinitePDAlgebra({"1": 0, "x": 2, "x2": 4}, "1", {("x", "x"): {"x2": 1}}, None, 4,
                          "x2", "CP2")
    return {"S2": s2, "S3": s3, "CP2": cp2}


__all__ = [
    "FinitePDAlgebra", "PDVerdict", "PDError", "check_poincare_duality", "dual_basis",
    "diagonal_class", "mu_D", "mu_D_element", "euler_characteristic", "format_tensor",
    "standard_models",
]
