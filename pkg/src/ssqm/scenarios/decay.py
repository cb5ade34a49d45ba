"""Single-channel decay X -> Y and the exponential / Zeno regimes.

After ``n`` steps the net holds channels ``X, Y_n, ..., Y_1`` where ``Y_k``
records a decay during step ``k``; its amplitude is ``beta * alpha**(k-1)``
and the survival amplitude is ``alpha**n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ..dynamics import StepOperator
from ..errors import ParameterError, RegimeError
from ..linalg import SemiUnitaryMatrix
from ..signal import HeisenbergNet, Labstate, prepared_state

PARAM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DecayParams:
    alpha: complex
    beta: complex
    tau: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        total = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(total - 1.0) > PARAM_TOLERANCE:
            raise ParameterError(f"|alpha|^2 + |beta|^2 = {total!r}, expected 1")
        if not self.tau > 0:
            raise ParameterError(f"tau must be positive, got {self.tau!r}")

    @classmethod
    def from_gamma(cls, Gamma: float, tau: float) -> "DecayParams":
        """Exponential regime: ``|alpha|^2 = exp(-Gamma tau)``, alpha and beta real."""
        a = alpha_from_gamma(Gamma, tau)
        return cls(a, math.sqrt(-math.expm1(-Gamma * tau)), tau)

    @classmethod
    def zeno(cls, gamma: float, tau: float) -> "DecayParams":
        """Quadratic regime: ``|alpha|^2 = 1 - gamma tau^2``."""
        deficit = gamma * tau**2
        if gamma <= 0:
            raise ParameterError("gamma must be positive")
        if deficit >= 1:
            raise RegimeError(f"gamma * tau^2 = {deficit!r} >= 1; survival amplitude not normalizable")
        return cls(math.sqrt(1.0 - deficit), math.sqrt(deficit), tau)


def alpha_from_gamma(Gamma: float, tau: float) -> float:
    """``|alpha| = sqrt(exp(-Gamma tau))``."""
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau!r}")
    if Gamma < 0:
        raise ParameterError(f"Gamma must be nonnegative, got {Gamma!r}")
    return math.exp(-Gamma * tau / 2)


def gamma_from_alpha(alpha_abs: float, tau: float) -> float:
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau!r}")
    return -math.log(alpha_abs**2) / tau


def decay_labels(n: int) -> tuple[str, ...]:
    """Channel labels of the net at time ``n``: ``X, Y_n, ..., Y_1``."""
    return ("X",) + tuple(f"Y{k}" for k in range(n, 0, -1))


def decay_net(n: int) -> HeisenbergNet:
    return HeisenbergNet(n, decay_labels(n))


def decay_initial_state() -> Labstate:
    return prepared_state(decay_net(0), "X")


def _head(p: DecayParams) -> SemiUnitaryMatrix:
    return SemiUnitaryMatrix(np.array([[p.alpha], [p.beta]]), PARAM_TOLERANCE)


def decay_step_matrix(n: int, p: DecayParams) -> StepOperator:
    """Step from time ``n - 1`` to ``n``: ``[[alpha, 0], [beta, 0], [0, I_{n-1}]]``."""
    if n < 1:
        raise ParameterError(f"decay steps start at n = 1, got {n}")
    return StepOperator(_head(p), decay_labels(n - 1), decay_labels(n), passthrough=n - 1)


def decay_schedule(p: DecayParams) -> Iterator[StepOperator]:
    """Steps 1, 2, ... built on demand; labels are extended incrementally."""
    head = _head(p)
    labels = decay_labels(0)
    n = 0
    while True:
        n += 1
        target = ("X", f"Y{n}") + labels[1:]
        yield StepOperator(head, labels, target, passthrough=n - 1)
        labels = target


def decay_amplitudes_closed(p: DecayParams, n: int) -> np.ndarray:
    """``(alpha^n, beta alpha^(n-1), ..., beta alpha, beta)``."""
    if n < 0:
        raise ParameterError("n must be nonnegative")
    powers = p.alpha ** np.arange(n - 1, -1, -1, dtype=float) if n else np.zeros(0)
    return np.concatenate(([p.alpha**n], p.beta * powers)).astype(np.complex128)


def decay_survival_closed(p: DecayParams, n: int) -> float:
    """``Pr(X, n | X, 0) = |alpha|^(2n)``."""
    if n < 0:
        raise ParameterError("n must be nonnegative")
    return abs(p.alpha) ** (2 * n)


def pqr(p: DecayParams, m: int, n: int) -> tuple[float, float, float]:
    """Discrete P, Q, R: decayed by ``n``, survived to ``n``, survived to ``m`` then decayed by ``n``."""
    if not 0 <= m < n:
        raise ParameterError(f"need 0 <= m < n, got m={m}, n={n}")
    q_n = decay_survival_closed(p, n)
    r_mn = decay_survival_closed(p, m) * (1.0 - decay_survival_closed(p, n - m))
    return 1.0 - q_n, q_n, r_mn


def zeno_survival(gamma: float, t: float, n: int) -> float:
    tau = t / n
    deficit = gamma * tau**2
    if deficit >= 1:
        raise RegimeError(
            f"gamma (t/n)^2 = {deficit!r} >= 1 at n = {n}; survival amplitude not normalizable"
        )
    return (1.0 - deficit) ** n


def zeno_sweep(gamma: float, t: float, n_list) -> list[tuple[int, float]]:
    """Survival ``(1 - gamma (t/n)^2)^n`` at fixed ``t`` for each mesh size ``n``."""
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    return [(int(n), zeno_survival(gamma, t, int(n))) for n in n_list]


def exponential_sweep(Gamma: float, t: float, n_list) -> list[tuple[int, float]]:
    """Survival ``(exp(-Gamma t/n))^n`` for each mesh size; mesh-independent up to rounding."""
    return [(int(n), alpha_from_gamma(Gamma, t / n) ** (2 * int(n))) for n in n_list]
