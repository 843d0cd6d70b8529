import glob
import os

import pytest

from stringtop import FIXTURES, fixture_path
from stringtop.cdga import FreeCDGA, check_cdga
from stringtop.fileformat import (
    AlgebraFileError, dump_algebra, parse_algebra, parse_algebra_text,
)
from stringtop.pd import FinitePDAlgebra, check_poincare_duality
from stringtop.stringops import BGPresentation

ALL_FIXTURES = sorted(glob.glob(os.path.join(FIXTURES, "*.alg")))


def test_fixture_set_is_complete():
    names = {os.path.basename(p)[:-4] for p in ALL_FIXTURES}
    assert {"s2", "s3", "cp2", "cp2-bad", "bs1", "bsu2", "bg24", "s2-sullivan",
            "s3-sullivan"} <= names


@pytest.mark.parametrize("path", ALL_FIXTURES, ids=os.path.basename)
def test_fixture_parses_and_validates(path):
    af = parse_algebra(path)
    if af.kind == "sullivan":
        assert isinstance(af.algebra, FreeCDGA)
        assert check_cdga(af.algebra, 20)
    elif af.kind == "finite-pd":
        assert isinstance(af.algebra, FinitePDAlgebra)
        expect_ok = not path.endswith("-bad.alg")
        assert bool(check_poincare_duality(af.algebra)) == expect_ok
    else:
        assert isinstance(af.algebra, BGPresentation)


@pytest.mark.parametrize("path", ALL_FIXTURES, ids=os.path.basename)
def test_round_trip(path):
    af = parse_algebra(path)
    text = dump_algebra(af)
    again = parse_algebra_text(text)
    assert again == af
    assert dump_algebra(again) == text


def test_s3_finite_pd():
    af = parse_algebra(fixture_path("s3"))
    A = af.algebra
    assert af.kind == "finite-pd" and A.m == 3 and A.omega == "x"
    assert A.mul_keys("x", "x") == {}


def test_s2_sullivan():
    af = parse_algebra(fixture_path("s2-sullivan"))
    assert af.algebra.generators == [("x", 2), ("y", 3)]
    assert af.differential == {"y": "x^2"}


def test_normalizes_polynomials():
    text = """
[algebra]
kind = sullivan
name = T
[generators]
x = 2
y = 5
[differential]
y = 2 x x x - x^3 + 0*x^3
"""
    af = parse_algebra_text(text)
    assert af.differential == {"y": "x^3"}


def test_bad_degree_is_reported_with_position():
    text = """[algebra]
kind = sullivan
name = T
[generators]
x = 2
y = 3
[differential]
y = x
"""
    with pytest.raises(AlgebraFileError) as err:
        parse_algebra_text(text)
    assert "d does not raise degree by 1 on y" in str(err.value)
    assert err.value.line == 8 and err.value.column is not None


def test_unknown_kind():
    with pytest.raises(AlgebraFileError, match="kind"):
        parse_algebra_text("[algebra]\nkind = torus\nname = T\n")


def test_syntax_error_has_line():
    with pytest.raises(AlgebraFileError) as err:
        parse_algebra_text("[algebra]\nkind = sullivan\nthis line is broken\n")
    assert err.value.line == 3


def test_bad_polynomial_has_column():
    text = "[algebra]\nkind = sullivan\nname = T\n[generators]\nx = 2\ny = 5\n[differential]\ny = x^^3\n"
    with pytest.raises(AlgebraFileError) as err:
        parse_algebra_text(text)
    assert err.value.line == 8 and err.value.column is not None


def test_unknown_generator_in_polynomial():
    text = "[algebra]\nkind = sullivan\nname = T\n[generators]\nx = 2\ny = 5\n[differential]\ny = z^3\n"
    with pytest.raises(AlgebraFileError, match="z"):
        parse_algebra_text(text)
