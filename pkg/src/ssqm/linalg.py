"""Dense complex matrices with orthonormal columns.

Every step of the dynamics is a semi-unitary matrix: an r' x r complex
matrix ``M`` with ``M^+ M = I_r``.  Such a matrix exists only when
``r' >= r``; when ``r' > r`` the product ``M M^+`` is a projector of rank
``r`` and therefore never the identity.

Matrices are plain numpy ``complex128`` arrays in C (row-major) order.  The
adjoint is always formed explicitly as ``m.conj().T``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CompositionError,
    DegenerateMatrixError,
    DimensionError,
    NotSemiUnitaryError,
    ParameterError,
)

DEFAULT_TOLERANCE = 1e-12

_EPS = np.finfo(float).eps


def as_complex_matrix(data) -> np.ndarray:
    """Return ``data`` as a read-only, finite, 2-D complex128 array."""
    arr = np.array(data, dtype=np.complex128, order="C", copy=True)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("matrix has non-finite entries")
    arr.setflags(write=False)
    return arr


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def identity_deviation(m: np.ndarray) -> float:
    """Max-norm of ``M^+ M - I``."""
    gram = adjoint(m) @ m
    gram[np.diag_indices_from(gram)] -= 1.0
    return float(np.max(np.abs(gram))) if gram.size else 0.0


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    deviation: float
    rows: int
    cols: int
    tolerance: float

    def __bool__(self):
        return self.passed


def validate_semi_unitary(m, tol: float = DEFAULT_TOLERANCE) -> ValidationReport:
    """Check that ``m`` has orthonormal columns.

    A wide matrix (rows < cols) never passes.  Failure is reported, not
    raised, so callers can inspect ``deviation``.
    """
    if isinstance(m, SemiUnitaryMatrix):
        m = m.matrix
    arr = as_complex_matrix(m)
    rows, cols = arr.shape
    deviation = identity_deviation(arr)
    passed = rows >= cols and deviation <= tol
    return ValidationReport(passed, deviation, rows, cols, tol)


@dataclass(frozen=True)
class SemiUnitaryMatrix:
    """A validated r' x r matrix with ``M^+ M = I_r`` up to ``tolerance``."""

    matrix: np.ndarray
    tolerance: float = DEFAULT_TOLERANCE
    deviation: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.tolerance < 0:
            raise ParameterError("tolerance must be nonnegative")
        arr = as_complex_matrix(self.matrix)
        if arr.shape[0] < arr.shape[1]:
            raise DimensionError(
                f"no semi-unitary {arr.shape[0]}x{arr.shape[1]} matrix exists (rows < cols)"
            )
        deviation = identity_deviation(arr)
        if deviation > self.tolerance:
            raise NotSemiUnitaryError(deviation, self.tolerance, arr.shape)
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "deviation", deviation)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def H(self) -> np.ndarray:
        return adjoint(self.matrix)

    def __matmul__(self, other):
        if isinstance(other, SemiUnitaryMatrix):
            return compose(self, other)
        return self.matrix @ other

    def __eq__(self, other):
        if not isinstance(other, SemiUnitaryMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.shape, self.matrix.tobytes()))


def compose(m2: SemiUnitaryMatrix, m1: SemiUnitaryMatrix) -> SemiUnitaryMatrix:
    """Return ``m2 @ m1``; apply ``m1`` first.

    The tolerance of the product is the sum of the two tolerances plus a
    rounding allowance proportional to the inner dimension.
    """
    if m2.cols != m1.rows:
        raise CompositionError(m2.shape, m1.shape)
    product = m2.matrix @ m1.matrix
    slack = 16 * _EPS * max(m1.rows, 1)
    return SemiUnitaryMatrix(product, m2.tolerance + m1.tolerance + slack)


def range_deficit(m) -> float:
    """``trace(I - M M^+)``, which equals ``rows - cols`` for a semi-unitary M."""
    if isinstance(m, SemiUnitaryMatrix):
        m = m.matrix
    # trace(M M^+) is the squared Frobenius norm
    return float(m.shape[0] - np.sum(np.abs(m) ** 2))


def gram_schmidt(columns: np.ndarray) -> np.ndarray:
    """Orthonormalize the columns of ``columns`` (classical Gram-Schmidt, two passes)."""
    a = np.asarray(columns, dtype=np.complex128)
    rows, cols = a.shape
    q = np.zeros((rows, cols), dtype=np.complex128)
    for j in range(cols):
        v = a[:, j].copy()
        for _ in range(2):
            basis = q[:, :j]
            v -= basis @ (np.conj(basis).T @ v)
            norm = np.linalg.norm(v)
            if norm == 0.0:
                raise DimensionError("columns are linearly dependent")
            v /= norm
        q[:, j] = v
    return q


def random_semi_unitary(rows: int, cols: int, seed: int) -> SemiUnitaryMatrix:
    """Seeded random semi-unitary matrix built from Gaussian complex columns."""
    if cols < 1 or rows < cols:
        raise DimensionError(f"need rows >= cols >= 1, got {rows}x{cols}")
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return SemiUnitaryMatrix(gram_schmidt(raw))


@dataclass(frozen=True)
class Eigenpair2:
    """Eigenvalues and unit eigenvectors of a 2x2 matrix, largest modulus first."""

    lambda1: complex
    lambda2: complex
    vec1: np.ndarray
    vec2: np.ndarray

    @property
    def eigenvalues(self) -> tuple[complex, complex]:
        return self.lambda1, self.lambda2

    @property
    def vectors(self) -> np.ndarray:
        """Eigenvectors as columns."""
        return np.column_stack([self.vec1, self.vec2])


def _phase(z: complex) -> float:
    phi = math.atan2(z.imag, z.real)
    return math.pi if phi <= -math.pi else phi


def _normalize_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    for c in v:
        if abs(c) > 1e-15:
            v = v * (abs(c) / c)
            break
    v.setflags(write=False)
    return v


def _eigenvector(p, q, r, s, lam) -> np.ndarray:
    # both candidates solve (M - lam) v = 0; take the better conditioned one
    va = np.array([q, lam - p], dtype=np.complex128)
    vb = np.array([lam - s, r], dtype=np.complex128)
    v = va if np.linalg.norm(va) >= np.linalg.norm(vb) else vb
    return _normalize_phase(v)


def eig2(m) -> Eigenpair2:
    """Closed-form eigen-decomposition of a 2x2 complex matrix.

    Eigenvalues are ``(tr +- sqrt((p - s)^2 + 4 q r)) / 2`` for
    ``M = [[p, q], [r, s]]``, ordered by descending modulus with ties broken
    by descending phase in (-pi, pi].  Each eigenvector has unit norm and its
    first nonzero component real and positive.

    Raises DegenerateMatrixError for a defective matrix.  A scalar multiple
    of the identity is not defective and returns the coordinate axes.
    """
    if isinstance(m, SemiUnitaryMatrix):
        m = m.matrix
    arr = as_complex_matrix(m)
    if arr.shape != (2, 2):
        raise DimensionError(f"eig2 needs a 2x2 matrix, got {arr.shape[0]}x{arr.shape[1]}")
    p, q, r, s = (complex(x) for x in arr.ravel())
    scale = max(float(np.max(np.abs(arr))), np.finfo(float).tiny)
    tol = 64 * _EPS * scale

    tr = p + s
    det = p * s - q * r
    root = cmath.sqrt((p - s) ** 2 + 4 * q * r)

    if abs(root) <= tol:
        lam = tr / 2
        if abs(q) <= tol and abs(r) <= tol and abs(p - s) <= tol:
            e1 = np.array([1.0, 0.0], dtype=np.complex128)
            e2 = np.array([0.0, 1.0], dtype=np.complex128)
            e1.setflags(write=False)
            e2.setflags(write=False)
            return Eigenpair2(lam, lam, e1, e2)
        raise DegenerateMatrixError(lam)

    # larger-magnitude root first, the other from det to avoid cancellation
    if (tr.conjugate() * root).real < 0:
        root = -root
    big = (tr + root) / 2
    small = det / big if big != 0 else (tr - root) / 2
    lams = [big, small]

    m_big, m_small = abs(big), abs(small)
    if abs(m_big - m_small) <= 1e-12 * max(m_big, m_small):
        lams.sort(key=_phase, reverse=True)
    else:
        lams.sort(key=abs, reverse=True)
    l1, l2 = lams
    return Eigenpair2(l1, l2, _eigenvector(p, q, r, s, l1), _eigenvector(p, q, r, s, l2))
