"""Free graded-commutative dg algebras (Sullivan algebras) and extensions.

Monomials are exponent tuples over the ordered generators; odd generators
carry exponent 0 or 1.  Within a degree, monomials are listed in descending
lexicographic order of their exponent tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from stringtop import linalg
from stringtop.algebras import GradedAlgebra, add_into, clean, scale
from stringtop.graded import (
    HomologySummary, LinearMapByDegree, TruncationError, complex_from_operator,
    homology, induced_map, map_from_operator,
)
from stringtop.polyparse import evaluate, parse_polynomial

Monomial = tuple  # exponent vector


def mono_degree(m: Monomial, degrees: Sequence[int]) -> int:
    return sum(e * d for e, d in zip(m, degrees))


def mono_mul(m1: Monomial, m2: Monomial, odd: Sequence[bool]):
    """``(sign, product)`` of two canonical monomials; sign 0 if it vanishes."""
    parity = 0
    later_odd = 0  # odd generators of m1 at positions > j, scanning right to left
    n = len(m1)
    for j in range(n - 1, -1, -1):
        if odd[j]:
            if m2[j]:
                if m1[j]:
                    return 0, None
                parity += later_odd
            if m1[j]:
                later_odd += 1
    return (-1 if parity % 2 else 1), tuple(a + b for a, b in zip(m1, m2))


def enumerate_monomials(degrees: Sequence[int], odd: Sequence[bool], p: int) -> list:
    """All canonical monomials of total degree p, descending lex order."""
    n = len(degrees)

    @lru_cache(maxsize=None)
    def rec(i, rem):
        if i == n:
            return [()] if rem == 0 else []
        d = degrees[i]
        top = min(1, rem // d) if odd[i] else rem // d
        out = []
        for e in range(top, -1, -1):
            for rest in rec(i + 1, rem - e * d):
                out.append((e,) + rest)
        return out

    if p < 0:
        return []
    return rec(0, p)


def format_monomial(m: Monomial, names: Sequence[str]) -> str:
    parts = []
    for e, name in zip(m, names):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def derivation_on_monomial(alg, mono, gen_values, parity, gen_degrees, make):
    """theta(g1^e1 ... gn^en) for the derivation with theta(g_i) = gen_values[i].

    ``make(m)`` embeds a monomial as an element of ``alg``; ``parity`` is the
    derivation's degree mod 2.
    """
    out = {}
    n = len(mono)
    prefix_deg = 0
    for i, e in enumerate(mono):
        if not e:
            continue
        val = gen_values[i]
        if val:
            pre = mono[:i] + (e - 1,) + (0,) * (n - i - 1)
            suf = (0,) * (i + 1) + mono[i + 1:]
            sign = -1 if (parity and prefix_deg % 2) else 1
            term = alg.mul(alg.mul(make(pre), val), make(suf))
            add_into(out, term, sign * e)
        prefix_deg += e * gen_degrees[i]
    return out


class FreeCDGA(GradedAlgebra):
    """Sullivan-type algebra (∧V, d) on named generators of degree >= 1.

    ``differential`` maps generator names to polynomials given either as
    ``{monomial: coeff}`` dicts or as strings in the generator names.
    """

    def __init__(self, generators: Sequence[tuple[str, int]],
                 differential: Mapping[str, object] | None = None, name="∧V"):
        self.name = name
        self.generators = [(str(g), int(d)) for g, d in generators]
        self.names = [g for g, _ in self.generators]
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")
        self.gen_degrees = [d for _, d in self.generators]
        for g, d in self.generators:
            if d < 1:
                raise ValueError(f"generator {g} has degree {d}; degrees must be >= 1")
        self.odd = [d % 2 == 1 for d in self.gen_degrees]
        self.index = {g: i for i, g in enumerate(self.names)}
        self._zero = (0,) * len(self.names)
        self._basis = lru_cache(maxsize=None)(
            lambda p: tuple(enumerate_monomials(self.gen_degrees, self.odd, p)))
        self._dcache = {}
        diff = dict(differential or {})
        unknown = set(diff) - set(self.names)
        if unknown:
            raise ValueError(f"differential given for unknown generators {sorted(unknown)}")
        self.dgen = []
        for g, d in self.generators:
            val = diff.get(g, {})
            if isinstance(val, str):
                val = self.parse(val)
            val = clean(val)
            for m in val:
                if mono_degree(m, self.gen_degrees) != d + 1:
                    raise ValueError(f"d does not raise degree by 1 on {g}")
            self.dgen.append(val)

    # -- GradedAlgebra interface
    def basis(self, p):
        return self._basis(p) if p >= 0 else ()

    def degree(self, key):
        return mono_degree(key, self.gen_degrees)

    def unit_key(self):
        return self._zero

    def mul_keys(self, a, b):
        sign, m = mono_mul(a, b, self.odd)
        return {m: Fraction(sign)} if sign else {}

    def d_key(self, key):
        out = self._dcache.get(key)
        if out is None:
            out = derivation_on_monomial(self, key, self.dgen, 1, self.gen_degrees,
                                         self.monomial)
            self._dcache[key] = out
        return out

    def format_key(self, key):
        return format_monomial(key, self.names)

    # -- helpers
    def monomial(self, m) -> dict:
        return {tuple(m): Fraction(1)}

    def gen(self, name) -> dict:
        m = [0] * len(self.names)
        m[self.index[name]] = 1
        return {tuple(m): Fraction(1)}

    def parse(self, text: str) -> dict:
        atoms = {g: self.gen(g) for g in self.names}
        return evaluate(parse_polynomial(text), self, atoms)

    def d_of(self, name) -> dict:
        return self.dgen[self.index[name]]

    def __repr__(self):
        gens = ", ".join(f"{g}:{d}" for g, d in self.generators)
        diffs = ", ".join(f"d{g}={self.format(v)}" for g, v in zip(self.names, self.dgen) if v)
        return f"FreeCDGA({gens}; {diffs})"


class GroundField(GradedAlgebra):
    """Q concentrated in degree 0."""

    top_degree = 0
    name = "Q"

    def basis(self, p):
        return ("1",) if p == 0 else ()

    def degree(self, key):
        return 0

    def unit_key(self):
        return "1"

    def mul_keys(self, a, b):
        return {"1": Fraction(1)}

    def d_key(self, key):
        return {}

    def format_key(self, key):
        return "1"


class ExtendedCDGA(GradedAlgebra):
    """Relative Sullivan algebra ``B ⊗ ∧Z`` over a base cdga ``B``.

    Keys are ``(base key, monomial in Z)``; ``differential`` gives d(z) as an
    element of this algebra for each new generator (nilpotence is the
    caller's responsibility and is guaranteed by the constructions here).
    """

    def __init__(self, base: GradedAlgebra, generators: Sequence[tuple[str, int]],
                 differential: Mapping[str, Mapping] | None = None, name=None):
        self.base = base
        self.generators = [(str(g), int(d)) for g, d in generators]
        self.names = [g for g, _ in self.generators]
        self.gen_degrees = [d for _, d in self.generators]
        self.odd = [d % 2 == 1 for d in self.gen_degrees]
        self.index = {g: i for i, g in enumerate(self.names)}
        self.name = name or f"{base.name}⊗∧Z"
        for g, d in self.generators:
            if d < 1:
                raise ValueError(f"generator {g} has degree {d}; degrees must be >= 1")
        self._zero = (0,) * len(self.names)
        self._zbasis = lru_cache(maxsize=None)(
            lambda p: tuple(enumerate_monomials(self.gen_degrees, self.odd, p)))
        self._basis = lru_cache(maxsize=None)(self._compute_basis)
        self._dcache = {}
        diff = differential or {}
        self.dgen = []
        for g, d in self.generators:
            val = clean(diff.get(g, {}))
            for k in val:
                if self.degree(k) != d + 1:
                    raise ValueError(f"d does not raise degree by 1 on {g}")
            self.dgen.append(val)

    def _compute_basis(self, p):
        out = []
        top = p if self.base.top_degree is None else min(p, self.base.top_degree)
        for q in range(0, top + 1):
            for b in self.base.basis(q):
                for m in self._zbasis(p - q):
                    out.append((b, m))
        return tuple(out)

    def basis(self, p):
        return self._basis(p) if p >= 0 else ()

    def degree(self, key):
        return self.base.degree(key[0]) + mono_degree(key[1], self.gen_degrees)

    def unit_key(self):
        return (self.base.unit_key(), self._zero)

    def mul_keys(self, x, y):
        b1, m1 = x
        b2, m2 = y
        sign, m = mono_mul(m1, m2, self.odd)
        if not sign:
            return {}
        if (mono_degree(m1, self.gen_degrees) * self.base.degree(b2)) % 2:
            sign = -sign
        return {(b, m): sign * c for b, c in self.base.mul_keys(b1, b2).items()}

    def d_key(self, key):
        out = self._dcache.get(key)
        if out is None:
            b, m = key
            out = {}
            for db, c in self.base.d_key(b).items():
                out[(db, m)] = c
            if any(m):
                dm = derivation_on_monomial(self, m, self.dgen, 1, self.gen_degrees,
                                            self.monomial)
                sign = -1 if self.base.degree(b) % 2 else 1
                add_into(out, self.mul({(b, self._zero): 1}, dm), sign)
            self._dcache[key] = out
        return out

    def monomial(self, m) -> dict:
        return {(self.base.unit_key(), tuple(m)): Fraction(1)}

    def gen(self, name) -> dict:
        m = [0] * len(self.names)
        m[self.index[name]] = 1
        return self.monomial(m)

    def embed_base(self, x: Mapping) -> dict:
        return {(b, self._zero): c for b, c in x.items()}

    def format_key(self, key):
        b, m = key
        zs = format_monomial(m, self.names)
        bs = self.base.format_key(b)
        if zs == "1":
            return bs
        if bs == "1":
            return zs
        return f"{bs}*{zs}"

    def extend(self, generators, differential) -> "ExtendedCDGA":
        """Adjoin further generators; existing elements must be passed
        through :meth:`pad` to live in the result."""
        k = len(generators)
        diff = {g: self.pad(v, k) for g, v in zip(self.names, self.dgen)}
        diff.update(differential)
        return ExtendedCDGA(self.base, self.generators + list(generators), diff, self.name)

    def pad(self, x: Mapping, k: int) -> dict:
        z = (0,) * k
        return {(b, m + z): c for (b, m), c in x.items()}


# ---------------------------------------------------------------------------
# morphisms


class AlgebraMap:
    """A linear map between graded algebras given on basis keys."""

    def __init__(self, source: GradedAlgebra, target: GradedAlgebra,
                 key_fn: Callable, degree: int = 0):
        self.source = source
        self.target = target
        self.degree = degree
        self._key_fn = key_fn
        self._cache = {}

    def apply_key(self, key) -> dict:
        out = self._cache.get(key)
        if out is None:
            out = clean(self._key_fn(key))
            self._cache[key] = out
        return out

    def __call__(self, x: Mapping) -> dict:
        out = {}
        for k, c in x.items():
            add_into(out, self.apply_key(k), c)
        return out

    def check_chain_map(self, upto: int):
        """First basis key (degree <= upto) where d∘f != ±f∘d, else None."""
        return check_chain_map(self.source, self.target, self.apply_key, self.degree,
                               range(0, upto + 1))


class CDGAMorphism(AlgebraMap):
    """Multiplicative extension of values on generators.

    For an :class:`ExtendedCDGA` source, ``base_map`` gives the map on the
    base algebra (a key function).
    """

    def __init__(self, source, target: GradedAlgebra, values: Mapping[str, Mapping],
                 base_map: Callable | None = None):
        self.values = []
        for g, d in source.generators:
            v = values.get(g, {})
            if isinstance(v, str):
                v = parse_in(target, v)
            v = clean(v)
            for k in v:
                if target.degree(k) != d:
                    raise ValueError(f"morphism is not degree-preserving on {g}")
            self.values.append(v)
        self.base_map = base_map
        if isinstance(source, ExtendedCDGA) and base_map is None:
            raise ValueError("a map on the base algebra is required")
        super().__init__(source, target, self._on_key, 0)

    def _on_mono(self, m):
        out = self.target.one()
        for e, v in zip(m, self.values):
            for _ in range(e):
                out = self.target.mul(out, v)
        return out

    def _on_key(self, key):
        if isinstance(self.source, ExtendedCDGA):
            b, m = key
            return self.target.mul(self.base_map(b), self._on_mono(m))
        return self._on_mono(key)

    def check_on_generators(self):
        """First generator where phi(dg) != d(phi g), else None."""
        for i, (g, _) in enumerate(self.source.generators):
            lhs = self(self.source.dgen[i])
            rhs = self.target.d(self.values[i])
            if lhs != rhs:
                return g
        return None


def parse_in(algebra, text):
    """Parse a polynomial string in the names an algebra understands."""
    if hasattr(algebra, "parse"):
        return algebra.parse(text)
    raise TypeError(f"cannot parse polynomial strings in {algebra!r}")


def check_chain_map(source, target, fn, degree, degrees):
    sign = -1 if degree % 2 else 1
    for p in degrees:
        for key in source.basis(p):
            lhs = target.d(fn(key))
            rhs = {}
            for k, c in source.d_key(key).items():
                add_into(rhs, fn(k), c * sign)
            if lhs != rhs:
                return key
    return None


@dataclass
class HomologyMap:
    """A degreewise map together with its action on homology."""

    chain_map: LinearMapByDegree
    source_homology: HomologySummary
    target_homology: HomologySummary
    on_homology: LinearMapByDegree

    def rank(self, p) -> int:
        return self.on_homology.rank(p)

    def is_zero(self) -> bool:
        return self.on_homology.is_zero()

    def is_iso(self, p) -> bool:
        s = self.source_homology[p].betti
        t = self.target_homology[p + self.chain_map.degree].betti
        return s == t == self.rank(p)

    def is_injective(self, p) -> bool:
        return self.rank(p) == self.source_homology[p].betti

    def is_surjective(self, p) -> bool:
        return self.rank(p) == self.target_homology[p + self.chain_map.degree].betti


def operator_homology_map(source, target, fn, degree, degrees, source_lo=0,
                          target_lo=0) -> HomologyMap:
    """H(f) for a map ``fn`` on basis keys between two complex-like objects
    (anything with ``basis(p)`` and ``d_key``)."""
    degrees = list(degrees)
    top = max(degrees)
    cs = complex_from_operator(source.basis, source.d_key, source_lo, top + 1)
    ct = complex_from_operator(target.basis, target.d_key, target_lo, top + degree + 1)
    hs = homology(cs, degrees)
    ht = homology(ct, [p + degree for p in degrees])
    f = map_from_operator(cs.basis, ct.basis, degree, fn, degrees)
    return HomologyMap(f, hs, ht, induced_map(f, hs, ht, degrees))


# ---------------------------------------------------------------------------
# operations


def monomial_basis(algebra: FreeCDGA, degree: int) -> list:
    if degree < 0:
        raise ValueError("degree must be >= 0")
    return list(algebra.basis(degree))


def apply_derivation(algebra: FreeCDGA, values_on_generators: Mapping[str, object],
                     parity: int, poly: Mapping) -> dict:
    """Extend generator values to a derivation of the given parity and apply it.

    The values must all shift degree by the same amount.
    """
    vals = []
    shift = None
    for g, d in algebra.generators:
        v = values_on_generators.get(g, {})
        if isinstance(v, str):
            v = algebra.parse(v)
        v = clean(v)
        for k in v:
            s = algebra.degree(k) - d
            if shift is None:
                shift = s
            elif s != shift:
                raise ValueError("derivation values do not shift degree uniformly")
        vals.append(v)
    if shift is not None and shift % 2 != parity % 2:
        raise ValueError("parity does not match the degree of the derivation")
    algebra.element_degree(poly)
    out = {}
    for m, c in poly.items():
        add_into(out, derivation_on_monomial(algebra, m, vals, parity % 2,
                                             algebra.gen_degrees, algebra.monomial), c)
    return out


@dataclass
class CDGAVerdict:
    ok: bool
    generator: str | None = None
    value: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def check_cdga(algebra: FreeCDGA, max_degree: int) -> CDGAVerdict:
    """d^2 = 0 on every generator g with |g| + 2 <= max_degree + 1."""
    for i, (g, d) in enumerate(algebra.generators):
        if d + 1 > max_degree:
            continue
        dd = algebra.d(algebra.dgen[i])
        if dd:
            return CDGAVerdict(False, g, dd)
    return CDGAVerdict(True)


def loop_space_model(model: FreeCDGA) -> FreeCDGA:
    """Free loop space model ∧(V ⊕ sV) with D(sv) = -S(dv)."""
    for g, d in model.generators:
        if d < 2:
            raise ValueError(f"generator {g} has degree {d}; loop models need degree >= 2")
    n = len(model.generators)
    snames = []
    taken = set(model.names)
    for g in model.names:
        s = "s" + g
        while s in taken:
            s = "s" + s
        taken.add(s)
        snames.append(s)
    gens = model.generators + [(s, d - 1) for s, (_, d) in zip(snames, model.generators)]
    shell = FreeCDGA(gens, {}, name=f"L({model.name})")
    pad = (0,) * n
    s_values = []
    for i in range(n):
        m = [0] * (2 * n)
        m[n + i] = 1
        s_values.append({tuple(m): Fraction(1)})
    s_values += [{}] * n
    diff = {}
    for i, g in enumerate(model.names):
        dv = {m + pad: c for m, c in model.dgen[i].items()}
        diff[g] = dv
        sdv = {}
        for m, c in dv.items():
            add_into(sdv, derivation_on_monomial(shell, m, s_values, 1, shell.gen_degrees,
                                                 shell.monomial), c)
        diff[snames[i]] = scale(sdv, -1)
    return FreeCDGA(gens, diff, name=f"L({model.name})")


@dataclass
class RelativeModel:
    """``source ⊗ ∧Z`` with a quasi-isomorphism (up to the truncation) onto the target."""

    algebra: ExtendedCDGA
    witness: CDGAMorphism
    new_generators: list
    max_degree: int

    def verify(self) -> bool:
        """H(witness) is iso through max_degree and injective one degree higher."""
        hm = operator_homology_map(self.algebra, self.witness.target, self.witness.apply_key,
                                   0, range(0, self.max_degree + 2))
        return (all(hm.is_iso(p) for p in range(0, self.max_degree + 1))
                and hm.is_injective(self.max_degree + 1))


def _witness(alg, phi, values):
    vals = {g: v for (g, _), v in zip(alg.generators, values)}
    return CDGAMorphism(alg, phi.target, vals, base_map=phi.apply_key)


def relative_sullivan_model(phi: AlgebraMap, max_degree: int) -> RelativeModel:
    """Adjoin generators degree by degree until ``source ⊗ ∧Z -> target`` is a
    cohomology isomorphism through ``max_degree`` (injective one degree up).

    Per degree n: closed generators first, mapped onto target classes missing
    from the image of H^n; then generators of degree n killing the kernel in
    H^{n+1}, each sent to a primitive of the image of its boundary.
    """
    source, target = phi.source, phi.target
    for alg, label in ((source, "source"), (target, "target")):
        h0 = alg.homology(0)[0].betti
        if h0 != 1:
            raise ValueError(f"{label} cohomology is not connected (dim H^0 = {h0})")
    alg = ExtendedCDGA(source, [], {}, name=f"{source.name}⊗∧Z")
    values = []
    taken = set(getattr(source, "names", ()))
    counters = {}

    def fresh(deg):
        while True:
            i = counters.get(deg, 0)
            counters[deg] = i + 1
            name = f"z{deg}_{i}"
            if name not in taken:
                taken.add(name)
                return name

    new = []
    for n in range(1, max_degree + 1):
        witness = _witness(alg, phi, values)
        hm = operator_homology_map(alg, target, witness.apply_key, 0, [n])
        tgt_h = hm.target_homology[n]
        if tgt_h.betti:
            block = hm.on_homology.block(n)
            cols = linalg.transpose(block, hm.source_homology[n].betti) if block else []
            units = [[linalg.ONE if i == j else linalg.ZERO for j in range(tgt_h.betti)]
                     for i in range(tgt_h.betti)]
            keep = linalg.independent_rows(cols + units, tgt_h.betti)
            missing = [i - len(cols) for i in keep if i >= len(cols)]
            if missing:
                gens, diff = [], {}
                for i in missing:
                    name = fresh(n)
                    gens.append((name, n))
                    diff[name] = {}
                    values.append(hm.chain_map.target.element(n, tgt_h.representatives[i]))
                    new.append(name)
                alg = alg.extend(gens, diff)
        for _ in range(64):
            witness = _witness(alg, phi, values)
            hm = operator_homology_map(alg, target, witness.apply_key, 0, [n + 1])
            src_h = hm.source_homology[n + 1]
            if not src_h.betti:
                break
            kernel = linalg.nullspace(hm.on_homology.block(n + 1), src_h.betti)
            if not kernel:
                break
            sbasis = hm.chain_map.source
            ct = complex_from_operator(target.basis, target.d_key, n, n + 1,
                                       bounded_below=False)
            dmat = ct.d(n)
            gens, diff = [], {}
            for kv in kernel:
                vec = [sum((c * r[j] for c, r in zip(kv, src_h.representatives)), linalg.ZERO)
                       for j in range(len(sbasis[n + 1]))]
                lead = next((v for v in vec if v), 1)
                kv = [c / lead for c in kv]
                vec =[sum((c * r[j] for c, r in zip(kv, src_h.representatives)), linalg.ZERO)
                       for j in range(len(sbasis[n + 1]))]
                cocycle = sbasis.element(n + 1, vec)
                image = ct.basis.vector(n + 1, witness(cocycle))
                t = linalg.solve(dmat, image, ct.basis.dim(n))
                if t is None:
                    raise TruncationError("insufficient truncation: kernel class is not "
                                          "exact in the target")
                name = fresh(n)
                gens.append((name, n))
                diff[name] = cocycle
                values.append(ct.basis.element(n, t))
                new.append(name)
            alg = alg.extend(gens, {g: alg.pad(v, len(gens)) for g, v in diff.items()})
        else:
            raise RuntimeError(f"relative model did not stabilize in degree {n + 1}")
    return RelativeModel(alg, _witness(alg, phi, values), new, max_degree)


def morphism_induced_map(phi: AlgebraMap, degrees) -> HomologyMap:
    """H(phi) on the homology bases of source and target."""
    degrees = list(degrees)
    bad = phi.check_chain_map(max(degrees) + 1) if degrees else None
    if bad is not None:
        raise ValueError(f"not a chain map at {phi.source.format_key(bad)}")
    return operator_homology_map(phi.source, phi.target, phi.apply_key, phi.degree, degrees)
