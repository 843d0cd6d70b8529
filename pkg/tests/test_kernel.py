from fractions import Fraction

from hypothesis import given, settings, strategies as st

from stringtop import _kernel_py, kernel, linalg

matrices = st.integers(1, 6).flatmap(
    lambda ncols: st.tuples(
        st.just(ncols),
        st.lists(st.lists(st.integers(-5, 5), min_size=ncols, max_size=ncols), max_size=7),
    )
)


def _fraction_rank(rows, ncols):
    """Textbook elimination over Fractions, used as an independent check."""
    m = [[Fraction(v) for v in r] for r in rows]
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_backends_agree(data):
    ncols, rows = data
    for impl in kernel.BACKENDS.values():
        assert impl.rref_int(rows, ncols) == _kernel_py.rref_int(rows, ncols)
        assert impl.independent_rows(rows, ncols) == _kernel_py.independent_rows(rows, ncols)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_rank_matches_fraction_elimination(data):
    ncols, rows = data
    _, pivots = _kernel_py.rref_int(rows, ncols)
    assert len(pivots) == _fraction_rank(rows, ncols)


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_nullspace_is_annihilated(data):
    ncols, rows = data
    rows = [[Fraction(v, 2) for v in r] for r in rows]
    null = linalg.nullspace(rows, ncols)
    assert len(null) + linalg.rank(rows, ncols) == ncols
    for v in null:
        assert all(x == 0 for x in linalg.matvec(rows, v))


def test_use_backend_round_trip():
    previous = kernel.use_backend("python")
    assert kernel.BACKEND == "python"
    kernel.use_backend(previous)
    assert kernel.BACKEND == previous
