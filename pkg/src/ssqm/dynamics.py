"""Stepwise semi-unitary evolution of one-signal amplitude vectors.

A step from time ``n`` to ``n + 1`` is block diagonal: a semi-unitary
``head`` acts on the leading channels and the trailing ``passthrough``
channels are carried forward unchanged (null tests).  Only the head is
ever stored, so a step costs O(rank) regardless of how large the net has
grown.

Trajectories keep, for every step, the amplitudes of the tracked channels
and only the head outputs of the full vector.  Any channel's amplitude at
any step can still be recovered, because a passthrough channel keeps the
amplitude it had when it last left a head block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ChannelLookupError, DimensionError, ParameterError, ScheduleError
from .errors import NumericIntegrityError
from .linalg import SemiUnitaryMatrix
from .signal import Labstate, one_signal_amplitudes

STEP_TOLERANCE = 1e-12
CONSERVATION_THRESHOLD = 1e-8


@dataclass(frozen=True, eq=False)
class StepOperator:
    """One time step on the one-signal sector.

    The full matrix is ``[[head, 0], [0, I_passthrough]]``; its columns are
    indexed by ``source_labels`` and rows by ``target_labels``.
    """

    head: SemiUnitaryMatrix
    source_labels: tuple[str, ...]
    target_labels: tuple[str, ...]
    passthrough: int = 0

    def __post_init__(self):
        src, tgt = tuple(self.source_labels), tuple(self.target_labels)
        object.__setattr__(self, "source_labels", src)
        object.__setattr__(self, "target_labels", tgt)
        rows, cols = self.head.shape
        if self.passthrough < 0:
            raise DimensionError("passthrough count must be nonnegative")
        if cols + self.passthrough != len(src):
            raise DimensionError(
                f"step has {cols + self.passthrough} columns but {len(src)} source labels"
            )
        if rows + self.passthrough != len(tgt):
            raise DimensionError(
                f"step has {rows + self.passthrough} rows but {len(tgt)} target labels"
            )
        if self.passthrough and src[cols:] != tgt[rows:]:
            raise DimensionError("passthrough channels must keep their labels")

    @property
    def source_rank(self) -> int:
        return len(self.source_labels)

    @property
    def target_rank(self) -> int:
        return len(self.target_labels)

    @property
    def head_rows(self) -> int:
        return self.head.rows

    @property
    def head_cols(self) -> int:
        return self.head.cols

    @cached_property
    def matrix(self) -> SemiUnitaryMatrix:
        """The full ``target_rank x source_rank`` step matrix."""
        rows, cols = self.head.shape
        p = self.passthrough
        full = np.zeros((rows + p, cols + p), dtype=np.complex128)
        full[:rows, :cols] = self.head.matrix
        full[rows:, cols:] = np.eye(p)
        return SemiUnitaryMatrix(full, self.head.tolerance)

    def apply(self, vector: np.ndarray) -> np.ndarray:
        k = self.head.cols
        if not self.passthrough:
            return self.head.matrix @ vector
        return np.concatenate((self.head.matrix @ vector[:k], vector[k:]))


def step(state, op: StepOperator) -> np.ndarray:
    """Apply one step operator to an amplitude vector."""
    vec = np.asarray(state, dtype=np.complex128).ravel()
    if vec.size != op.source_rank:
        raise DimensionError(
            f"state of length {vec.size} does not fit a step from rank {op.source_rank}"
        )
    return op.apply(vec)


@dataclass(frozen=True)
class StepRecord:
    """What is stored about time ``n``.

    ``labels``/``amplitudes`` cover only the head outputs of the step that
    produced this time (all channels at time 0); ``consumed`` is the number
    of leading channels of the previous time that the head read.
    """

    n: int
    t: float
    labels: tuple[str, ...]
    amplitudes: np.ndarray
    consumed: int
    rank: int
    norm_squared: float


@dataclass
class Trajectory:
    tau: float
    tracked: tuple[str, ...]
    records: list[StepRecord]
    tracked_amplitudes: np.ndarray
    decayed: np.ndarray
    residuals: np.ndarray
    final_labels: tuple[str, ...]
    final_amplitudes: np.ndarray
    full_states: list[tuple[tuple[str, ...], np.ndarray]] | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.records)

    @property
    def n_steps(self) -> int:
        return len(self.records) - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.records)) * self.tau

    @property
    def tracked_probabilities(self) -> np.ndarray:
        """``|amplitude|^2`` of each tracked channel, one row per step."""
        return np.abs(self.tracked_amplitudes) ** 2

    def _check_step(self, n: int):
        if not 0 <= n < len(self.records):
            raise ChannelLookupError(f"step {n} outside trajectory of {self.n_steps} steps")

    def amplitude(self, label: str, n: int) -> complex:
        self._check_step(n)
        if label in self.tracked:
            return complex(self.tracked_amplitudes[n, self.tracked.index(label)])
        # walk back through passthrough blocks; 'lo' is the smallest position
        # the label may occupy at step m and still survive to step n
        lo = 0
        for m in range(n, -1, -1):
            rec = self.records[m]
            if label in rec.labels:
                j = rec.labels.index(label)
                if j >= lo:
                    return complex(rec.amplitudes[j])
                break
            if m == 0:
                break
            lo = max(lo, len(rec.labels)) - len(rec.labels) + rec.consumed
        raise ChannelLookupError(f"no channel {label!r} at step {n}")

    def probability(self, label: str, n: int) -> float:
        return abs(self.amplitude(label, n)) ** 2

    def probabilities(self, n: int) -> dict[str, float]:
        """Tracked channel probabilities at step ``n`` plus the cumulative ``decayed`` entry."""
        self._check_step(n)
        out = {lab: float(p) for lab, p in zip(self.tracked, self.tracked_probabilities[n])}
        out["decayed"] = float(self.decayed[n])
        return out

    def labels_at(self, n: int) -> tuple[str, ...]:
        self._check_step(n)
        if n == self.n_steps:
            return self.final_labels
        if self.full_states is None:
            raise ChannelLookupError("full per-step states were not recorded (verbose=False)")
        return self.full_states[n][0]

    def state_at(self, n: int) -> np.ndarray:
        """Full amplitude vector at step ``n``; intermediate steps need ``verbose=True``."""
        self._check_step(n)
        if n == self.n_steps:
            return self.final_amplitudes
        if self.full_states is None:
            raise ChannelLookupError("full per-step states were not recorded (verbose=False)")
        return self.full_states[n][1]


def channel_probability(traj: Trajectory, label: str, n: int) -> float:
    return traj.probability(label, n)


def _tracked_values(vec, labels, tracked) -> np.ndarray:
    out = np.zeros(len(tracked), dtype=np.complex128)
    for i, lab in enumerate(tracked):
        try:
            out[i] = vec[labels.index(lab)]
        except ValueError:
            pass
    return out


def evolve(
    initial: Labstate,
    schedule: Iterable[StepOperator],
    n_steps: int,
    tau: float,
    tracked: Sequence[str] | None = None,
    verbose: bool = False,
    threshold: float = CONSERVATION_THRESHOLD,
) -> Trajectory:
    """Run ``n_steps`` steps of ``schedule`` from ``initial``.

    ``tracked`` defaults to the initial net's channels; every other channel
    counts toward the cumulative ``decayed`` probability.  Raises
    ScheduleError if a step does not fit the current net and
    NumericIntegrityError if total probability drifts by more than
    ``threshold``.
    """
    if n_steps < 0:
        raise ParameterError("n_steps must be nonnegative")
    if tau <= 0:
        raise ParameterError("tau must be positive")
    vec = one_signal_amplitudes(initial)
    labels = initial.net.labels
    tracked = tuple(labels if tracked is None else tracked)

    norm2 = float(np.vdot(vec, vec).real)
    if abs(norm2 - 1.0) > threshold:
        raise NumericIntegrityError(0, norm2 - 1.0, threshold)

    records = [StepRecord(0, 0.0, labels, vec.copy(), 0, len(labels), norm2)]
    amps = [_tracked_values(vec, labels, tracked)]
    norms = [norm2]
    full = [(labels, vec.copy())] if verbose else None

    ops = iter(schedule)
    for n in range(1, n_steps + 1):
        try:
            op = next(ops)
        except StopIteration:
            raise ScheduleError(n, "schedule exhausted") from None
        if op.source_rank != vec.size:
            raise ScheduleError(
                n, f"step expects rank {op.source_rank} but the net has rank {vec.size}"
            )
        if op.source_labels != labels:
            raise ScheduleError(n, "step source labels do not match the current net")
        vec = op.apply(vec)
        labels = op.target_labels
        norm2 = float(np.vdot(vec, vec).real)
        if abs(norm2 - 1.0) > threshold:
            raise NumericIntegrityError(n, norm2 - 1.0, threshold)
        h = op.head_rows
        records.append(StepRecord(n, n * tau, labels[:h], vec[:h].copy(), op.head_cols, vec.size, norm2))
        amps.append(_tracked_values(vec, labels, tracked))
        norms.append(norm2)
        if verbose:
            full.append((labels, vec.copy()))

    tracked_amps = np.array(amps, dtype=np.complex128).reshape(len(records), len(tracked))
    norms = np.array(norms)
    decayed = norms - np.sum(np.abs(tracked_amps) ** 2, axis=1)
    return Trajectory(
        tau=tau,
        tracked=tracked,
        records=records,
        tracked_amplitudes=tracked_amps,
        decayed=decayed,
        residuals=norms - 1.0,
        final_labels=labels,
        final_amplitudes=vec,
        full_states=full,
    )
