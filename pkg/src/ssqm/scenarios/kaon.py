"""Kaon-type decay: two mixing channels X, Y leaking into decay channels Z_k.

Each step maps ``X -> alpha X + beta Y + gamma Z_{n+1}`` and
``Y -> u X + v Y + w Z_{n+1}`` and carries earlier ``Z_k`` forward.  The
X/Y block evolves by ``M = [[alpha, u], [beta, v]]``, whose eigenvalues
give two decaying eigenmodes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ..dynamics import StepOperator
from ..errors import DegeneracyError, DegenerateMatrixError, ParameterError
from ..linalg import SemiUnitaryMatrix, eig2, random_semi_unitary
from ..signal import HeisenbergNet, Labstate, one_signal_state

PARAM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class KaonParams:
    alpha: complex
    beta: complex
    gamma: complex
    u: complex
    v: complex
    w: complex

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "u", "v", "w"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        x_norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2 + abs(self.gamma) ** 2
        y_norm = abs(self.u) ** 2 + abs(self.v) ** 2 + abs(self.w) ** 2
        overlap = self.constraint_residual
        problems = []
        if abs(x_norm - 1.0) > PARAM_TOLERANCE:
            problems.append(f"|alpha|^2 + |beta|^2 + |gamma|^2 = {x_norm!r}")
        if abs(y_norm - 1.0) > PARAM_TOLERANCE:
            problems.append(f"|u|^2 + |v|^2 + |w|^2 = {y_norm!r}")
        if overlap > PARAM_TOLERANCE:
            problems.append(f"|alpha* u + beta* v + gamma* w| = {overlap!r}")
        if problems:
            raise ParameterError("Kaon transition amplitudes are not semi-unitary: " + "; ".join(problems))

    @property
    def constraint_residual(self) -> float:
        return abs(
            self.alpha.conjugate() * self.u
            + self.beta.conjugate() * self.v
            + self.gamma.conjugate() * self.w
        )

    @property
    def head(self) -> np.ndarray:
        return np.array(
            [[self.alpha, self.u], [self.beta, self.v], [self.gamma, self.w]], dtype=np.complex128
        )

    @property
    def mixing_matrix(self) -> np.ndarray:
        """``M = [[alpha, u], [beta, v]]``, the X/Y block of every step."""
        return self.head[:2]


def kaon_params_sample(seed: int) -> KaonParams:
    """First two columns of a seeded random 3x3 unitary."""
    cols = random_semi_unitary(3, 2, seed).matrix
    (alpha, beta, gamma), (u, v, w) = cols[:, 0], cols[:, 1]
    return KaonParams(alpha, beta, gamma, u, v, w)


def kaon_labels(n: int) -> tuple[str, ...]:
    """``X, Y, Z_n, ..., Z_1`` at time ``n``."""
    return ("X", "Y") + tuple(f"Z{k}" for k in range(n, 0, -1))


def kaon_net(n: int) -> HeisenbergNet:
    return HeisenbergNet(n, kaon_labels(n))


def kaon_initial_state(psi0: Sequence[complex] = (1.0, 0.0)) -> Labstate:
    """``psi0[0] A+_X + psi0[1] A+_Y`` on the rank-2 net; ``(1, 0)`` is a pure K0."""
    return one_signal_state(kaon_net(0), psi0)


def kaon_step_matrix(n: int, p: KaonParams) -> StepOperator:
    """Step from time ``n`` to ``n + 1``; 3x2 at ``n = 0``, then a trailing ``I_n`` block."""
    if n < 0:
        raise ParameterError(f"n must be nonnegative, got {n}")
    head = SemiUnitaryMatrix(p.head, PARAM_TOLERANCE)
    return StepOperator(head, kaon_labels(n), kaon_labels(n + 1), passthrough=n)


def kaon_schedule(p: KaonParams) -> Iterator[StepOperator]:
    head = SemiUnitaryMatrix(p.head, PARAM_TOLERANCE)
    labels = kaon_labels(0)
    n = 0
    while True:
        target = ("X", "Y", f"Z{n + 1}") + labels[2:]
        yield StepOperator(head, labels, target, passthrough=n)
        labels = target
        n += 1


@dataclass(frozen=True)
class EigenmodeDecomposition:
    """``psi0 = mu1 * mode1 + mu2 * mode2`` with ``M mode_i = lambda_i mode_i``.

    Mode components are ``mode_i = (a_i, b_i)``.
    """

    lambda1: complex
    lambda2: complex
    mode1: np.ndarray
    mode2: np.ndarray
    mu1: complex
    mu2: complex

    @property
    def r1(self) -> float:
        return abs(self.lambda1)

    @property
    def r2(self) -> float:
        return abs(self.lambda2)

    @property
    def theta1(self) -> float:
        return cmath.phase(self.lambda1)

    @property
    def theta2(self) -> float:
        return cmath.phase(self.lambda2)

    def reconstruct(self) -> np.ndarray:
        return self.mu1 * self.mode1 + self.mu2 * self.mode2

    def amplitudes(self, n: int) -> np.ndarray:
        """``(x_n, y_n) = mu1 lambda1^n mode1 + mu2 lambda2^n mode2``."""
        return self.mu1 * self.lambda1**n * self.mode1 + self.mu2 * self.lambda2**n * self.mode2


def decompose(lambda1, lambda2, mode1, mode2, psi0) -> EigenmodeDecomposition:
    """Solve ``psi0 = mu1 mode1 + mu2 mode2`` for given eigenmodes."""
    m1 = np.asarray(mode1, dtype=np.complex128)
    m2 = np.asarray(mode2, dtype=np.complex128)
    psi = np.asarray(psi0, dtype=np.complex128)
    det = m1[0] * m2[1] - m2[0] * m1[1]
    if abs(det) <= 1e-14:
        raise DegeneracyError("eigenmodes are linearly dependent")
    mu1 = (psi[0] * m2[1] - m2[0] * psi[1]) / det
    mu2 = (m1[0] * psi[1] - psi[0] * m1[1]) / det
    return EigenmodeDecomposition(complex(lambda1), complex(lambda2), m1, m2, complex(mu1), complex(mu2))


def kaon_eigenmodes(p: KaonParams, psi0: Sequence[complex] = (1.0, 0.0)) -> EigenmodeDecomposition:
    """Eigenmodes of the X/Y block and the coefficients of ``psi0`` in them.

    Raises DegeneracyError when the two eigenmode values coincide.
    """
    psi = np.asarray(psi0, dtype=np.complex128)
    if psi.shape != (2,):
        raise ParameterError("psi0 must have two components")
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
        raise ParameterError("psi0 must be normalized")
    try:
        pair = eig2(p.mixing_matrix)
    except DegenerateMatrixError as exc:
        raise DegeneracyError(f"repeated eigenmode value {exc.eigenvalue}") from exc
    if pair.lambda1 == pair.lambda2:
        raise DegeneracyError(f"repeated eigenmode value {pair.lambda1}")
    return decompose(pair.lambda1, pair.lambda2, pair.vec1, pair.vec2, psi)


def _channel_prob(d: EigenmodeDecomposition, c1: complex, c2: complex, n: int) -> float:
    r1n, r2n = d.r1**n, d.r2**n
    cross = d.mu1.conjugate() * d.mu2 * c1.conjugate() * c2 * cmath.exp(-1j * n * (d.theta1 - d.theta2))
    return (
        abs(d.mu1) ** 2 * abs(c1) ** 2 * r1n**2
        + abs(d.mu2) ** 2 * abs(c2) ** 2 * r2n**2
        + 2 * r1n * r2n * cross.real
    )


def kaon_survival_closed(d: EigenmodeDecomposition, n: int) -> tuple[float, float]:
    """``(Pr(X, n), Pr(Y, n))`` from the two-eigenmode interference formula."""
    if n < 0:
        raise ParameterError("n must be nonnegative")
    pr_x = _channel_prob(d, complex(d.mode1[0]), complex(d.mode2[0]), n)
    pr_y = _channel_prob(d, complex(d.mode1[1]), complex(d.mode2[1]), n)
    return pr_x, pr_y


def is_regenerating(series: Sequence[float], atol: float = 1e-15) -> bool:
    """True if the series rises and later falls (a rise-peak-decay profile)."""
    rose = False
    for prev, cur in zip(series, series[1:]):
        if cur > prev + atol:
            rose = True
        elif rose and cur < prev - atol:
            return True
    return False


@dataclass(frozen=True)
class IntensityParams:
    """Two decay rates (1/s) and the mass-difference angular frequency (rad/s)."""

    Gamma1: float
    Gamma2: float
    delta_m_term: float

    def __post_init__(self):
        if self.Gamma1 < 0 or self.Gamma2 < 0:
            raise ParameterError("decay rates must be nonnegative")


def intensity_reference(ip: IntensityParams, t: float) -> tuple[float, float]:
    """``(I(K0), I(K0bar))`` at time ``t`` for a pure K0 start."""
    if t < 0:
        raise ParameterError("t must be nonnegative")
    e1 = math.exp(-ip.Gamma1 * t)
    e2 = math.exp(-ip.Gamma2 * t)
    cross = 2 * math.exp(-(ip.Gamma1 + ip.Gamma2) * t / 2) * math.cos(ip.delta_m_term * t)
    return 0.25 * (e1 + e2 + cross), 0.25 * (e1 + e2 - cross)


def intensity_decomposition(ip: IntensityParams, tau: float) -> EigenmodeDecomposition:
    """Eigenmode data whose closed form reproduces the intensity functions at ``t = n tau``.

    Uses ``r_i = exp(-Gamma_i tau / 2)``, ``theta1 - theta2 = delta_m_term * tau``
    and the symmetric modes ``(1, +-1)/sqrt(2)`` of a pure K0 start.
    """
    if not tau > 0:
        raise ParameterError("tau must be positive")
    lam1 = cmath.rect(math.exp(-ip.Gamma1 * tau / 2), ip.delta_m_term * tau / 2)
    lam2 = cmath.rect(math.exp(-ip.Gamma2 * tau / 2), -ip.delta_m_term * tau / 2)
    s = 1 / math.sqrt(2)
    return decompose(lam1, lam2, (s, s), (s, -s), (1.0, 0.0))
