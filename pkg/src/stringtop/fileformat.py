"""Reading and writing algebra presentation files.

The format is INI-style (sections of ``key = value`` lines)::

    [algebra]
    kind = sullivan          ; sullivan | finite-pd | bg
    name = S2
    max_degree = 8           ; optional default truncation

    [generators]             ; sullivan: name = degree, in order
    x = 2
    y = 3

    [differential]           ; name = polynomial
    y = x^2

A ``finite-pd`` file has ``unit``, ``fundamental_class`` and ``dimension``
in ``[algebra]``, a ``[basis]`` section (label = degree), ``[products]``
with keys ``a * b`` and an optional ``[differential]``.  It may also carry
a Sullivan model in ``[model.generators]`` / ``[model.differential]`` and
the quasi-isomorphism onto the algebra in ``[model.map]``.  A ``bg`` file
has ``rank`` and ``degrees`` (comma separated) in ``[algebra]``.
Comments start with ``#`` or ``;``.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field

from stringtop.algebras import FiniteCDGA
from stringtop.cdga import FreeCDGA, check_cdga
from stringtop.pd import FinitePDAlgebra
from stringtop.polyparse import PolyParseError
from stringtop.stringops import BGPresentation

KINDS = ("sullivan", "finite-pd", "bg")


class AlgebraFileError(ValueError):
    """Parse or validation error, with a position when one is known."""

    def __init__(self, message, line=None, column=None, path=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
        prefix = ": ".join(x for x in (str(path) if path else "", where) if x)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.line, self.column, self.message = line, column, message


@dataclass
class AlgebraFile:
    kind: str
    name: str
    max_degree: int | None = None
    generators: list = field(default_factory=list)
    differential: dict = field(default_factory=dict)
    basis: dict = field(default_factory=dict)
    products: dict = field(default_factory=dict)
    unit: str | None = None
    fundamental_class: str | None = None
    dimension: int | None = None
    degrees: tuple = ()
    model_generators: list = field(default_factory=list)
    model_differential: dict = field(default_factory=dict)
    model_map: dict = field(default_factory=dict)
    algebra: object = field(default=None, compare=False, repr=False)
    model: FreeCDGA | None = field(default=None, compare=False, repr=False)

    def model_values(self) -> dict:
        return {g: self.algebra.parse(v) for g, v in self.model_map.items()}


class _Locator:
    """Map (section, key) to line numbers and value columns in the raw text."""

    _section = re.compile(r"^\s*\[([^\]]+)\]")

    def __init__(self, text):
        self.positions = {}
        self.sections = {}
        section = None
        for lineno, line in enumerate(text.splitlines(), 1):
            m = self._section.match(line)
            if m:
                section = m.group(1).strip()
                self.sections[section] = lineno
                continue
            if section is None or "=" not in line or line.lstrip()[:1] in "#;":
                continue
            key, _, value = line.partition("=")
            col = len(key) + 2 + (len(value) - len(value.lstrip()))
            self.positions[(section, key.strip())] = (lineno, col)

    def at(self, section, key):
        return self.positions.get((section, key), (self.sections.get(section), None))


def _read(text, path):
    cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=("#", ";"), interpolation=None,
                                   strict=True, empty_lines_in_values=False)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise AlgebraFileError("expected a [section] header", e.lineno, 1, path) from None
    except configparser.DuplicateOptionError as e:
        raise AlgebraFileError(f"duplicate key {e.option!r}", e.lineno, 1, path) from None
    except configparser.DuplicateSectionError as e:
        raise AlgebraFileError(f"duplicate section {e.section!r}", e.lineno, 1, path) from None
    except configparser.ParsingError as e:
        lineno = e.errors[0][0] if e.errors else None
        raise AlgebraFileError("malformed line (expected key = value)", lineno, 1, path) from None
    return cp


def _int(value, what, pos, path):
    try:
        return int(value)
    except ValueError:
        raise AlgebraFileError(f"{what} must be an integer, got {value!r}", *pos, path) from None


def parse_algebra_text(text: str, path=None) -> AlgebraFile:
    loc = _Locator(text)
    cp = _read(text, path)
    if not cp.has_section("algebra"):
        raise AlgebraFileError("missing [algebra] section", path=path)
    head = cp["algebra"]
    kind = head.get("kind", "").strip()
    if kind not in KINDS:
        raise AlgebraFileError(f"kind must be one of {', '.join(KINDS)}",
                               *loc.at("algebra", "kind"), path)
    af = AlgebraFile(kind=kind, name=head.get("name", "").strip() or kind)
    if "max_degree" in head:
        af.max_degree = _int(head["max_degree"], "max_degree", loc.at("algebra", "max_degree"),
                             path)

    def section(name):
        return list(cp[name].items()) if cp.has_section(name) else []

    def poly(alg, sect, key, value):
        try:
            return alg.parse(value)
        except PolyParseError as e:
            line, col = loc.at(sect, key)
            raise AlgebraFileError(e.message, line, (col or 1) + e.column - 1, path) from None
        except KeyError as e:
            raise AlgebraFileError(f"unknown name {e.args[0]!r}", *loc.at(sect, key),
                                   path) from None

    def free(gsect, dsect):
        gens = [(g, _int(d, f"degree of {g}", loc.at(gsect, g), path))
                for g, d in section(gsect)]
        for g, _ in gens:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", g):
                raise AlgebraFileError(f"invalid generator name {g!r}", *loc.at(gsect, g), path)
        try:
            shell = FreeCDGA(gens, {})
        except ValueError as e:
            raise AlgebraFileError(str(e), loc.sections.get(gsect), None, path) from None
        diff = {}
        for g, value in section(dsect):
            if g not in shell.index:
                raise AlgebraFileError(f"differential given for unknown generator {g!r}",
                                       *loc.at(dsect, g), path)
            diff[g] = poly(shell, dsect, g, value)
        try:
            alg = FreeCDGA(gens, diff, name=af.name)
        except ValueError as e:
            g = next((g for g in diff if f" on {g}" in str(e)), None)
            raise AlgebraFileError(str(e), *(loc.at(dsect, g) if g else (None, None)),
                                   path) from None
        verdict = check_cdga(alg, max(alg.gen_degrees, default=0) + 1)
        if not verdict:
            raise AlgebraFileError(f"d^2 != 0 on {verdict.generator}",
                                   *loc.at(dsect, verdict.generator), path)
        return gens, {g: alg.format(v) for g, v in alg_diffs(alg).items()}, alg

    if kind == "sullivan":
        af.generators, af.differential, af.algebra = free("generators", "differential")
    elif kind == "bg":
        pos = loc.at("algebra", "degrees")
        raw = head.get("degrees", "")
        degs = tuple(_int(x.strip(), "degree", pos, path) for x in raw.split(",") if x.strip())
        if "rank" in head:
            rank = _int(head["rank"], "rank", loc.at("algebra", "rank"), path)
            if rank != len(degs):
                raise AlgebraFileError(f"rank {rank} does not match {len(degs)} degrees",
                                       *loc.at("algebra", "rank"), path)
        try:
            af.algebra = BGPresentation(degs)
        except ValueError as e:
            raise AlgebraFileError(str(e), *pos, path) from None
        af.degrees = af.algebra.degrees
    else:
        basis = {}
        for lab, d in section("basis"):
            basis[lab] = _int(d, f"degree of {lab}", loc.at("basis", lab), path)
        if not basis:
            raise AlgebraFileError("empty [basis] section", loc.sections.get("basis"), None, path)
        for key in ("unit", "fundamental_class", "dimension"):
            if key not in head:
                raise AlgebraFileError(f"missing {key} in [algebra]", loc.sections["algebra"],
                                       None, path)
        unit = head["unit"].strip()
        omega = head["fundamental_class"].strip()
        dim = _int(head["dimension"], "dimension", loc.at("algebra", "dimension"), path)
        for key, lab in (("unit", unit), ("fundamental_class", omega)):
            if lab not in basis:
                raise AlgebraFileError(f"{lab!r} is not a basis label", *loc.at("algebra", key),
                                       path)
        try:
            shell = FiniteCDGA(basis, unit)
        except ValueError as e:
            raise AlgebraFileError(str(e), *loc.at("algebra", "unit"), path) from None
        products = {}
        for key, value in section("products"):
            parts = [p.strip() for p in key.split("*")]
            if len(parts) != 2 or not all(parts):
                raise AlgebraFileError("product keys look like 'a * b'", *loc.at("products", key),
                                       path)
            a, b = parts
            for lab in parts:
                if lab not in basis:
                    raise AlgebraFileError(f"unknown basis label {lab!r}",
                                           *loc.at("products", key), path)
            val = poly(shell, "products", key, value)
            for k in val:
                if basis[k] != basis[a] + basis[b]:
                    raise AlgebraFileError(f"product {a}*{b} has a term {k} of the wrong degree",
                                           *loc.at("products", key), path)
            products[(a, b)] = val
        diff = {}
        for lab, value in section("differential"):
            if lab not in basis:
                raise AlgebraFileError(f"unknown basis label {lab!r}",
                                       *loc.at("differential", lab), path)
            val = poly(shell, "differential", lab, value)
            for k in val:
                if basis[k] != basis[lab] + 1:
                    raise AlgebraFileError(f"d does not raise degree by 1 on {lab}",
                                           *loc.at("differential", lab), path)
            if val:
                diff[lab] = val
        af.algebra = FinitePDAlgebra(basis, unit, products, diff, dim, omega, af.name)
        af.basis, af.unit, af.fundamental_class, af.dimension = basis, unit, omega, dim
        af.products = {k: af.algebra.format(v) for k, v in products.items()}
        af.differential = {k: af.algebra.format(v) for k, v in diff.items()}
        if cp.has_section("model.generators"):
            af.model_generators, af.model_differential, af.model = free(
                "model.generators", "model.differential")
            for g, value in section("model.map"):
                if g not in af.model.index:
                    raise AlgebraFileError(f"unknown model generator {g!r}",
                                           *loc.at("model.map", g), path)
                val = poly(af.algebra, "model.map", g, value)
                for k in val:
                    if basis[k] != af.model.gen_degrees[af.model.index[g]]:
                        raise AlgebraFileError(f"map is not degree-preserving on {g}",
                                               *loc.at("model.map", g), path)
                af.model_map[g] = af.algebra.format(val)
    known = {"algebra", "generators", "differential", "basis", "products", "model.generators",
             "model.differential", "model.map"}
    for sect in cp.sections():
        if sect not in known:
            raise AlgebraFileError(f"unknown section [{sect}]", loc.sections.get(sect), 1, path)
    return af


def alg_diffs(alg: FreeCDGA) -> dict:
    return {g: v for g, v in zip(alg.names, alg.dgen) if v}


def parse_algebra(path) -> AlgebraFile:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_algebra_text(text, path)


def dump_algebra(af: AlgebraFile) -> str:
    """Serialize to the file format; ``parse_algebra_text`` inverts this."""
    lines = ["[algebra]", f"kind = {af.kind}", f"name = {af.name}"]
    if af.max_degree is not None:
        lines.append(f"max_degree = {af.max_degree}")
    if af.kind == "bg":
        lines.append(f"rank = {len(af.degrees)}")
        lines.append("degrees = " + ", ".join(str(d) for d in af.degrees))
    if af.kind == "finite-pd":
        lines += [f"unit = {af.unit}", f"fundamental_class = {af.fundamental_class}",
                  f"dimension = {af.dimension}", "", "[basis]"]
        lines += [f"{lab} = {d}" for lab, d in af.basis.items()]
        lines += ["", "[products]"]
        lines += [f"{a} * {b} = {v}" for (a, b), v in af.products.items()]
        if af.differential:
            lines += ["", "[differential]"]
            lines += [f"{k} = {v}" for k, v in af.differential.items()]
        if af.model_generators:
            lines += ["", "[model.generators]"]
            lines += [f"{g} = {d}" for g, d in af.model_generators]
            if af.model_differential:
                lines += ["", "[model.differential]"]
                lines += [f"{g} = {v}" for g, v in af.model_differential.items()]
            if af.model_map:
                lines += ["", "[model.map]"]
                lines += [f"{g} = {v}" for g, v in af.model_map.items()]
    if af.kind == "sullivan":
        lines += ["", "[generators]"]
        lines += [f"{g} = {d}" for g, d in af.generators]
        if af.differential:
            lines += ["", "[differential]"]
            lines += [f"{g} = {v}" for g, v in af.differential.items()]
    return "\n".join(lines) + "\n"
