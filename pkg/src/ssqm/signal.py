"""Heisenberg nets, signal operators and sparse labstates.

A net of rank ``r`` is a register of ``r`` detector qubits.  Basis signal
states are packed into ints: bit ``i`` is set iff detector ``i`` fired, so
slot 0 is the least significant bit.  A labstate is a sparse map from these
keys to complex amplitudes.

The dense oracle at the bottom of the module materializes the full
``2**r``-dimensional space with explicit Kronecker products and is kept
structurally separate from the sparse path so the two can check each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import NetError, OracleSizeError, SectorError, SlotError
from .linalg import SemiUnitaryMatrix

PRUNE_BELOW = 1e-15
NORM_TOLERANCE = 1e-10
ORACLE_RANK_CAP = 14


@dataclass(frozen=True)
class HeisenbergNet:
    """The detector slots available at time step ``time_index``."""

    time_index: int
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        if self.time_index < 0:
            raise NetError(f"time index must be nonnegative, got {self.time_index}")
        if len(set(labels)) != len(labels):
            dupes = sorted({x for x in labels if labels.count(x) > 1})
            raise NetError(f"duplicate slot labels {dupes}")
        object.__setattr__(self, "labels", labels)

    @property
    def rank(self) -> int:
        return len(self.labels)

    @property
    def dimension(self) -> int:
        return 1 << self.rank

    def slot(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise SlotError(f"no slot labelled {label!r} in net at time {self.time_index}") from None


def signal_class(key: int) -> int:
    """Number of fired detectors in a basis key."""
    return key.bit_count()


def key_to_bits(key: int, rank: int) -> tuple[int, ...]:
    return tuple((key >> i) & 1 for i in range(rank))


def bits_to_key(bits: Sequence[int]) -> int:
    key = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise NetError(f"bit {i} is {b!r}, expected 0 or 1")
        key |= b << i
    return key


def signal_class_keys(rank: int, k: int) -> list[int]:
    """All basis keys of a rank-``rank`` net with exactly ``k`` signals."""
    return [sum(1 << i for i in combo) for combo in itertools.combinations(range(rank), k)]


def _prune(amplitudes: Mapping[int, complex]) -> dict[int, complex]:
    return {int(k): complex(a) for k, a in amplitudes.items() if abs(a) >= PRUNE_BELOW}


@dataclass(frozen=True)
class Labstate:
    """Sparse amplitudes over the basis signal states of ``net``.

    Intermediate results of signal operators need not be normalized; check
    ``is_normalized`` before treating one as a physical labstate.
    """

    net: HeisenbergNet
    amplitudes: Mapping[int, complex]

    def __post_init__(self):
        limit = self.net.dimension
        for key in self.amplitudes:
            if not isinstance(key, (int, np.integer)) or key < 0 or key >= limit:
                raise NetError(f"basis key {key!r} does not fit a rank-{self.net.rank} net")
        object.__setattr__(self, "amplitudes", MappingProxyType(_prune(self.amplitudes)))

    @property
    def norm_squared(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_squared - 1.0) <= NORM_TOLERANCE

    @property
    def is_zero(self) -> bool:
        return not self.amplitudes

    def amplitude(self, key: int) -> complex:
        return self.amplitudes.get(key, 0j)

    def with_net(self, net: HeisenbergNet) -> "Labstate":
        if net.rank != self.net.rank:
            raise NetError(f"cannot move a rank-{self.net.rank} labstate onto a rank-{net.rank} net")
        return Labstate(net, self.amplitudes)

    def __add__(self, other: "Labstate") -> "Labstate":
        if not isinstance(other, Labstate):
            return NotImplemented
        _check_rank(self, other)
        out = dict(self.amplitudes)
        for k, a in other.amplitudes.items():
            out[k] = out.get(k, 0j) + a
        return Labstate(self.net, out)

    def __sub__(self, other: "Labstate") -> "Labstate":
        return self + (-1) * other

    def __rmul__(self, scalar: complex) -> "Labstate":
        return Labstate(self.net, {k: scalar * a for k, a in self.amplitudes.items()})

    def allclose(self, other: "Labstate", atol: float = 1e-12) -> bool:
        _check_rank(self, other)
        keys = set(self.amplitudes) | set(other.amplitudes)
        return all(abs(self.amplitude(k) - other.amplitude(k)) <= atol for k in keys)


def _check_rank(s1: Labstate, s2: Labstate):
    if s1.net.rank != s2.net.rank:
        raise NetError(f"rank mismatch: {s1.net.rank} vs {s2.net.rank}")


def _check_slot(i: int, s: Labstate):
    if not 0 <= i < s.net.rank:
        raise SlotError(f"slot {i} outside rank-{s.net.rank} net")


def void_state(net: HeisenbergNet) -> Labstate:
    return Labstate(net, {0: 1.0 + 0j})


def apply_create(i: int, s: Labstate) -> Labstate:
    """Signal operator on slot ``i``: sets bit ``i``; keys already carrying it vanish."""
    _check_slot(i, s)
    mask = 1 << i
    return Labstate(s.net, {k | mask: a for k, a in s.amplitudes.items() if not k & mask})


def apply_annihilate(i: int, s: Labstate) -> Labstate:
    """Adjoint of :func:`apply_create`."""
    _check_slot(i, s)
    mask = 1 << i
    return Labstate(s.net, {k ^ mask: a for k, a in s.amplitudes.items() if k & mask})


def inner_product(s1: Labstate, s2: Labstate) -> complex:
    """``(s1, s2)``, conjugate-linear in ``s1``."""
    _check_rank(s1, s2)
    small, large = (s1, s2) if len(s1.amplitudes) <= len(s2.amplitudes) else (s2, s1)
    total = 0j
    for k in small.amplitudes:
        if k in large.amplitudes:
            total += s1.amplitudes[k].conjugate() * s2.amplitudes[k]
    return total


def prepared_state(net: HeisenbergNet, weights: Mapping[str, complex] | str) -> Labstate:
    """One-signal labstate ``sum_label w * A+_label |void)``.

    ``weights`` may be a single label, meaning amplitude 1 on that slot.
    """
    if isinstance(weights, str):
        weights = {weights: 1.0}
    return Labstate(net, {1 << net.slot(label): complex(w) for label, w in weights.items()})


def one_signal_state(net: HeisenbergNet, vector) -> Labstate:
    """Labstate whose slot-``j`` one-signal amplitude is ``vector[j]``."""
    vec = np.asarray(vector, dtype=np.complex128).ravel()
    if vec.size != net.rank:
        raise NetError(f"vector of length {vec.size} does not fit a rank-{net.rank} net")
    return Labstate(net, {1 << j: a for j, a in enumerate(vec)})


def one_signal_amplitudes(s: Labstate) -> np.ndarray:
    """Amplitude vector of a labstate confined to the one-signal class."""
    vec = np.zeros(s.net.rank, dtype=np.complex128)
    for key, a in s.amplitudes.items():
        if signal_class(key) != 1:
            raise SectorError(
                f"basis state {key_to_bits(key, s.net.rank)} is in signal class "
                f"{signal_class(key)}, not 1"
            )
        vec[key.bit_length() - 1] = a
    return vec


def evolve_one_signal(step, s: Labstate, target_net: HeisenbergNet) -> Labstate:
    """Sparse path: push the one-signal amplitudes of ``s`` through ``step``."""
    m = step.matrix if isinstance(step, SemiUnitaryMatrix) else np.asarray(step)
    if m.shape != (target_net.rank, s.net.rank):
        raise NetError(
            f"step of shape {m.shape} cannot map rank {s.net.rank} to rank {target_net.rank}"
        )
    return one_signal_state(target_net, m @ one_signal_amplitudes(s))


# -- dense oracle ------------------------------------------------------------


def _check_oracle_rank(rank: int, cap: int):
    if rank > cap:
        raise OracleSizeError(f"rank {rank} exceeds dense oracle cap {cap}")


def dense_oracle_embed(s: Labstate, cap: int = ORACLE_RANK_CAP) -> np.ndarray:
    """Dense vector of length ``2**rank``; index = packed basis key."""
    _check_oracle_rank(s.net.rank, cap)
    vec = np.zeros(s.net.dimension, dtype=np.complex128)
    for k, a in s.amplitudes.items():
        vec[k] = a
    return vec


def labstate_from_dense(net: HeisenbergNet, vector) -> Labstate:
    vec = np.asarray(vector, dtype=np.complex128).ravel()
    if vec.size != net.dimension:
        raise NetError(f"dense vector of length {vec.size} does not match dimension {net.dimension}")
    (nonzero,) = np.nonzero(vec)
    return Labstate(net, {int(k): vec[k] for k in nonzero})


_RAISE = sp.csr_matrix(np.array([[0, 0], [1, 0]], dtype=np.complex128))


@lru_cache(maxsize=256)
def raising_operator(i: int, rank: int) -> sp.csr_matrix:
    """``A+_i`` on the full ``2**rank`` space as ``I (x) sigma+ (x) I``.

    Slot 0 is the least significant bit, hence the rightmost Kronecker factor.
    """
    if not 0 <= i < rank:
        raise SlotError(f"slot {i} outside rank-{rank} net")
    high = sp.identity(1 << (rank - 1 - i), dtype=np.complex128, format="csr")
    low = sp.identity(1 << i, dtype=np.complex128, format="csr")
    return sp.kron(high, sp.kron(_RAISE, low, format="csr"), format="csr")


def _dense_void(rank: int) -> np.ndarray:
    v = np.zeros(1 << rank, dtype=np.complex128)
    v[0] = 1.0
    return v


def oracle_evolve_one_signal(
    step, s: Labstate, target_net: HeisenbergNet, cap: int = ORACLE_RANK_CAP
) -> Labstate:
    """Dense reference for :func:`evolve_one_signal`.

    Reads the input amplitudes as overlaps with ``A+_j |void)``, then builds
    the output as ``sum_k (step c)_k A'+_k |void')`` in the target space.
    """
    m = step.matrix if isinstance(step, SemiUnitaryMatrix) else np.asarray(step)
    r, r_out = s.net.rank, target_net.rank
    _check_oracle_rank(max(r, r_out), cap)
    if m.shape != (r_out, r):
        raise NetError(f"step of shape {m.shape} cannot map rank {r} to rank {r_out}")

    psi = dense_oracle_embed(s, cap)
    void = _dense_void(r)
    basis = [raising_operator(j, r) @ void for j in range(r)]
    coeffs = np.array([np.vdot(e, psi) for e in basis], dtype=np.complex128)
    outside = psi - sum((c * e for c, e in zip(coeffs, basis)), np.zeros_like(psi))
    if np.linalg.norm(outside) > PRUNE_BELOW * max(1, r):
        raise SectorError("labstate has support outside the one-signal class")

    out_coeffs = m @ coeffs
    void_out = _dense_void(r_out)
    psi_out = np.zeros(1 << r_out, dtype=np.complex128)
    for k in range(r_out):
        psi_out += out_coeffs[k] * (raising_operator(k, r_out) @ void_out)
    return labstate_from_dense(target_net, psi_out)
