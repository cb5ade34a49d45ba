"""Two-state oscillation X <-> Y with a constant 2x2 unitary step.

The step is ``U = [[a, -b*], [b, a*]]``.  Writing
``U = V diag(e^{i theta}, e^{-i theta}) V^+`` with ``V = [[u, -v*], [v, u*]]``
gives closed forms for every power of ``U``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ..dynamics import StepOperator
from ..errors import DegenerateOscillationError, ParameterError
from ..linalg import SemiUnitaryMatrix
from ..signal import HeisenbergNet, Labstate, prepared_state

PARAM_TOLERANCE = 1e-12
LABELS = ("X", "Y")


def uv_theta_from_ab(a: complex, b: complex) -> tuple[complex, complex, float]:
    """Solve ``|u|^2 e^{i th} + |v|^2 e^{-i th} = a`` and ``u* v (e^{i th} - e^{-i th}) = b``.

    ``theta`` lies in (0, pi) with ``cos theta = Re a``; ``u`` is real and
    nonnegative.  Raises DegenerateOscillationError when ``|Re a| = 1``.
    """
    a, b = complex(a), complex(b)
    total = abs(a) ** 2 + abs(b) ** 2
    if abs(total - 1.0) > PARAM_TOLERANCE:
        raise ParameterError(f"|a|^2 + |b|^2 = {total!r}, expected 1")
    if abs(a.real) >= 1.0:
        raise DegenerateOscillationError(f"|Re a| = 1 (a = {a}); the step has a repeated eigenvalue")
    # sin(theta) from the unit-norm constraint keeps full precision when Re a ~ +-1
    sin_theta = math.sqrt(a.imag**2 + abs(b) ** 2)
    theta = math.atan2(sin_theta, a.real)
    u_sq = min(max(0.5 * (1.0 + a.imag / sin_theta), 0.0), 1.0)
    u = math.sqrt(u_sq)
    if u > 0.0:
        v = b / (2j * sin_theta * u)
    else:
        v = 1.0 + 0j
    return complex(u), complex(v), theta


@dataclass(frozen=True)
class OscillationParams:
    """Step amplitudes ``(a, b)`` with the derived ``(u, v, theta)``.

    When ``|Re a| = 1`` the derived fields are ``None`` and ``degenerate`` is
    true; the step matrix is still usable but no closed form applies.
    """

    a: complex
    b: complex
    u: complex | None = field(init=False, default=None)
    v: complex | None = field(init=False, default=None)
    theta: float | None = field(init=False, default=None)

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        total = abs(a) ** 2 + abs(b) ** 2
        if abs(total - 1.0) > PARAM_TOLERANCE:
            raise ParameterError(f"|a|^2 + |b|^2 = {total!r}, expected 1")
        if abs(a.real) < 1.0:
            u, v, theta = uv_theta_from_ab(a, b)
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)
            object.__setattr__(self, "theta", theta)

    @property
    def degenerate(self) -> bool:
        return self.theta is None

    def require_closed_form(self) -> tuple[complex, complex, float]:
        if self.degenerate:
            raise DegenerateOscillationError(f"|Re a| = 1 (a = {self.a}); no mixing angle")
        return self.u, self.v, self.theta


def step_unitary(a: complex, b: complex) -> np.ndarray:
    a, b = complex(a), complex(b)
    return np.array([[a, -b.conjugate()], [b, a.conjugate()]], dtype=np.complex128)


def v_matrix(u: complex, v: complex) -> np.ndarray:
    u, v = complex(u), complex(v)
    return np.array([[u, -v.conjugate()], [v, u.conjugate()]], dtype=np.complex128)


def reconstruct_step(u: complex, v: complex, theta: float, n: int = 1) -> np.ndarray:
    """``V diag(e^{i n theta}, e^{-i n theta}) V^+``."""
    vm = v_matrix(u, v)
    phase = np.diag([cmath.exp(1j * n * theta), cmath.exp(-1j * n * theta)])
    return vm @ phase @ np.conj(vm).T


def step_power_closed(u: complex, v: complex, theta: float, n: int) -> np.ndarray:
    """Entrywise closed form of ``U^n``."""
    uu, vv = abs(u) ** 2, abs(v) ** 2
    ep, em = cmath.exp(1j * n * theta), cmath.exp(-1j * n * theta)
    off = ep - em
    return np.array(
        [[uu * ep + vv * em, u * complex(v).conjugate() * off],
         [complex(u).conjugate() * v * off, uu * em + vv * ep]],
        dtype=np.complex128,
    )


def ammonium_net(n: int = 0) -> HeisenbergNet:
    return HeisenbergNet(n, LABELS)


def ammonium_initial_state(label: str = "X") -> Labstate:
    return prepared_state(ammonium_net(0), label)


def ammonium_step_matrix(p: OscillationParams) -> StepOperator:
    head = SemiUnitaryMatrix(step_unitary(p.a, p.b), PARAM_TOLERANCE)
    return StepOperator(head, LABELS, LABELS)


def ammonium_schedule(p: OscillationParams) -> Iterator[StepOperator]:
    return itertools.repeat(ammonium_step_matrix(p))


def ammonium_probs_closed(u: complex, v: complex, theta: float, n: int) -> tuple[float, float]:
    """``(Pr(X,n|X,0), Pr(Y,n|X,0))``.

    ``Pr(Y) = 4|u|^2|v|^2 sin^2(n theta)``; ``Pr(X)`` is its complement, which
    equals ``|u|^4 + |v|^4 + 2|u|^2|v|^2 cos(2 n theta)`` when ``|u|^2 + |v|^2 = 1``.
    """
    uu, vv = abs(u) ** 2, abs(v) ** 2
    if abs(uu + vv - 1.0) > PARAM_TOLERANCE:
        raise ParameterError(f"|u|^2 + |v|^2 = {uu + vv!r}, expected 1")
    p_yx = 4.0 * uu * vv * math.sin(n * theta) ** 2
    return 1.0 - p_yx, p_yx


def ammonium_survival_expanded(u: complex, v: complex, theta: float, n: int) -> float:
    """Leading small-angle form ``1 - 4|u|^2|v|^2 n^2 theta^2``."""
    return 1.0 - 4.0 * abs(u) ** 2 * abs(v) ** 2 * (n * theta) ** 2


def sqm_reference_probs(e: float, g: float, f: complex, t: float) -> tuple[float, float]:
    """Continuous-time probabilities for ``H = [[e, f], [f*, g]]`` from X, with hbar = 1.

    Built from the eigenfrequencies ``omega+- = (e + g +- sqrt(4|f|^2 + (e-g)^2)) / 2``
    and the X-components of the corresponding eigenvectors.
    """
    e, g, f = float(e), float(g), complex(f)
    if f == 0:
        return 1.0, 0.0
    root = math.sqrt(4 * abs(f) ** 2 + (e - g) ** 2)
    omegas = (0.5 * (e + g + root), 0.5 * (e + g - root))
    amp_x = 0j
    for w in omegas:
        vec = np.array([f, w - e], dtype=np.complex128)
        weight = abs(vec[0]) ** 2 / np.vdot(vec, vec).real
        amp_x += weight * cmath.exp(-1j * w * t)
    amp_y = 0j
    for w in omegas:
        vec = np.array([f, w - e], dtype=np.complex128)
        amp_y += vec[1] * vec[0].conjugate() / np.vdot(vec, vec).real * cmath.exp(-1j * w * t)
    return abs(amp_x) ** 2, abs(amp_y) ** 2


def oscillation_from_hamiltonian(e: float, g: float, f: complex, tau: float) -> OscillationParams:
    """Step amplitudes matching ``exp(-i H tau)`` up to a global phase.

    Then ``2 theta = (omega+ - omega-) tau``, so ``2 n theta = (omega+ - omega-) t``.
    """
    f = complex(f)
    root = math.sqrt(4 * abs(f) ** 2 + (e - g) ** 2)
    if root == 0:
        raise DegenerateOscillationError("H is proportional to the identity")
    half = 0.5 * root * tau
    s = math.sin(half)
    a = complex(math.cos(half), -(e - g) / root * s)
    b = -2j * f.conjugate() / root * s
    return OscillationParams(a, b)
