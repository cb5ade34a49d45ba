import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssqm.errors import CompositionError, DegenerateMatrixError, DimensionError, NotSemiUnitaryError
from ssqm.linalg import (
    SemiUnitaryMatrix,
    adjoint,
    compose,
    eig2,
    gram_schmidt,
    random_semi_unitary,
    range_deficit,
    validate_semi_unitary,
)

shapes = st.integers(1, 12).flatmap(lambda c: st.tuples(st.integers(c, 16), st.just(c)))
seeds = st.integers(0, 2**32 - 1)


def test_validate_column_pair():
    a, b = math.sqrt(0.9), math.sqrt(0.1)
    report = validate_semi_unitary([[a], [b]], 1e-12)
    assert report.passed and report.deviation <= 1e-15
    assert (report.rows, report.cols) == (2, 1)


def test_validate_identity_at_zero_tolerance():
    report = validate_semi_unitary(np.eye(3), 0.0)
    assert report.passed
    assert report.deviation == 0.0


def test_wide_matrix_fails_without_raising():
    report = validate_semi_unitary([[1.0, 0.0]])
    assert not report
    assert report.rows < report.cols


def test_non_isometry_reports_deviation():
    report = validate_semi_unitary([[1.0], [1.0]])
    assert not report.passed
    assert report.deviation == pytest.approx(1.0)


def test_construction_rejects_non_isometry():
    with pytest.raises(NotSemiUnitaryError) as info:
        SemiUnitaryMatrix(np.array([[2.0]]))
    assert info.value.deviation == pytest.approx(3.0)


def test_construction_rejects_nonfinite():
    with pytest.raises(ValueError):
        SemiUnitaryMatrix(np.array([[np.nan]]))


def test_matrix_is_read_only():
    m = random_semi_unitary(3, 2, 0)
    with pytest.raises(ValueError):
        m.matrix[0, 0] = 5.0


def test_compose_decay_columns():
    a, b = 0.6, 0.8
    u10 = SemiUnitaryMatrix(np.array([[a], [b]]))
    u21 = SemiUnitaryMatrix(np.array([[a, 0], [b, 0], [0, 1]]))
    out = compose(u21, u10)
    np.testing.assert_allclose(out.matrix[:, 0], [a * a, a * b, b], atol=1e-15)


def test_compose_identity_is_noop():
    m = random_semi_unitary(2, 2, 3)
    assert compose(SemiUnitaryMatrix(np.eye(2)), m) == m


def test_compose_mismatch_names_shapes():
    with pytest.raises(CompositionError) as info:
        compose(random_semi_unitary(4, 3, 1), random_semi_unitary(5, 2, 2))
    assert "4x3" in str(info.value) and "5x2" in str(info.value)
    assert info.value.left_shape == (4, 3) and info.value.right_shape == (5, 2)


def test_iterated_block_steps_first_component():
    a, b = 0.6 + 0.0j, 0.8j
    total = SemiUnitaryMatrix(np.array([[a], [b]]))
    for n in range(2, 8):
        block = np.zeros((n + 1, n), dtype=complex)
        block[0, 0], block[1, 0] = a, b
        block[2:, 1:] = np.eye(n - 1)
        total = compose(SemiUnitaryMatrix(block), total)
    assert abs(total.matrix[0, 0] - a**7) < 1e-15


def test_random_scalar_is_unit_modulus():
    z = random_semi_unitary(1, 1, 11).matrix[0, 0]
    assert abs(abs(z) - 1.0) < 1e-15


def test_random_is_deterministic():
    assert np.array_equal(random_semi_unitary(3, 2, 7).matrix, random_semi_unitary(3, 2, 7).matrix)
    assert not np.array_equal(random_semi_unitary(3, 2, 7).matrix, random_semi_unitary(3, 2, 8).matrix)


def test_random_rejects_wide():
    with pytest.raises(DimensionError):
        random_semi_unitary(2, 3, 0)


def test_gram_schmidt_on_nearly_dependent_columns():
    cols = np.array([[1.0, 1.0], [1e-9, 0.0], [0.0, 1e-9]], dtype=complex)
    q = gram_schmidt(cols)
    assert validate_semi_unitary(q, 1e-14).passed


def test_range_deficit_counts_missing_dimensions():
    assert range_deficit(np.eye(4)[:, :1]) == pytest.approx(3.0)


def test_eig2_symmetric_real():
    pair = eig2([[0.9, 0.1], [0.1, 0.8]])
    # independent route: roots of the characteristic polynomial
    expected = sorted(np.roots([1.0, -1.7, 0.9 * 0.8 - 0.01]).real, reverse=True)
    assert pair.lambda1 == pytest.approx(expected[0], abs=1e-14)
    assert pair.lambda2 == pytest.approx(expected[1], abs=1e-14)
    assert pair.lambda1.real == pytest.approx((1.7 + math.sqrt(0.05)) / 2, abs=1e-14)
    assert pair.lambda1.real == pytest.approx(0.96180, abs=1e-5)


def test_eig2_unitary_phases():
    a, b = 0.5 * cmath.exp(0.3j), math.sqrt(0.75) * cmath.exp(-1.1j)
    u = np.array([[a, -b.conjugate()], [b, a.conjugate()]])
    pair = eig2(u)
    theta = math.acos(abs(a) * math.cos(cmath.phase(a)))
    assert pair.lambda1 == pytest.approx(cmath.exp(1j * theta), abs=1e-12)
    assert pair.lambda2 == pytest.approx(cmath.exp(-1j * theta), abs=1e-12)


def test_eig2_identity_returns_axes():
    pair = eig2(np.eye(2))
    assert pair.eigenvalues == (1, 1)
    np.testing.assert_array_equal(pair.vectors, np.eye(2))


def test_eig2_defective_raises_with_eigenvalue():
    with pytest.raises(DegenerateMatrixError) as info:
        eig2([[2.0, 1.0], [0.0, 2.0]])
    assert info.value.eigenvalue == pytest.approx(2.0)


def test_eig2_rejects_wrong_shape():
    with pytest.raises(DimensionError):
        eig2(np.eye(3))


def test_eig2_tie_broken_by_phase():
    pair = eig2([[0.0, 1.0], [2.0, 0.0]])
    assert pair.lambda1.real < 0 < pair.lambda2.real


def test_eig2_phase_convention():
    pair = eig2([[0.0, 1.0j], [1.0, 0.0]])
    for v in (pair.vec1, pair.vec2):
        lead = v[np.flatnonzero(np.abs(v) > 0)[0]]
        assert lead.imag == 0 and lead.real > 0
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(shape=shapes, seed=seeds)
def test_random_output_validates(shape, seed):
    m = random_semi_unitary(*shape, seed)
    assert validate_semi_unitary(m, 1e-12).passed
    # MM+ is a projector of rank cols
    assert abs(range_deficit(m) - (m.rows - m.cols)) < 1e-10
    proj = m.matrix @ adjoint(m.matrix)
    assert abs(np.trace(np.eye(m.rows) - proj) - (m.rows - m.cols)) < 1e-10


@settings(max_examples=100, deadline=None)
@given(shape=shapes, seed=seeds)
def test_inner_products_preserved(shape, seed):
    m = random_semi_unitary(*shape, seed)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=m.cols) + 1j * rng.normal(size=m.cols)
    y = rng.normal(size=m.cols) + 1j * rng.normal(size=m.cols)
    lhs = np.vdot(m.matrix @ x, m.matrix @ y)
    assert abs(lhs - np.vdot(x, y)) <= 1e-12 * max(1.0, np.linalg.norm(x) * np.linalg.norm(y))


@settings(max_examples=100, deadline=None)
@given(dims=st.lists(st.integers(1, 8), min_size=4, max_size=4).map(sorted), seed=seeds)
def test_compose_associative(dims, seed):
    d0, d1, d2, d3 = dims
    m1 = random_semi_unitary(d1, d0, seed)
    m2 = random_semi_unitary(d2, d1, seed + 1)
    m3 = random_semi_unitary(d3, d2, seed + 2)
    left = compose(compose(m3, m2), m1).matrix
    right = compose(m3, compose(m2, m1)).matrix
    assert np.max(np.abs(left - right)) <= 1e-12


complex_entries = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=300, deadline=None)
@given(st.lists(complex_entries, min_size=4, max_size=4))
def test_eig2_invariants(entries):
    m = np.array(entries, dtype=complex).reshape(2, 2)
    try:
        pair = eig2(m)
    except DegenerateMatrixError:
        return
    scale = max(1.0, np.max(np.abs(m)))
    assert abs(pair.lambda1 + pair.lambda2 - np.trace(m)) <= 1e-12 * scale
    assert abs(pair.lambda1 * pair.lambda2 - np.linalg.det(m)) <= 1e-12 * scale**2
    r1, r2 = abs(pair.lambda1), abs(pair.lambda2)
    if abs(r1 - r2) <= 1e-12 * max(r1, r2):
        # modulus tie: descending phase in (-pi, pi]
        phase = [cmath.phase(z) if cmath.phase(z) > -math.pi else math.pi for z in pair.eigenvalues]
        assert phase[0] >= phase[1]
    else:
        assert r1 > r2
    norm = np.linalg.norm(m, 2)
    for lam, v in ((pair.lambda1, pair.vec1), (pair.lambda2, pair.vec2)):
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-14)
        assert np.linalg.norm(m @ v - lam * v) <= 1e-12 * max(norm, 1e-300) + 1e-300
