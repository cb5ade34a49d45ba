import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssqm.dynamics import StepOperator, channel_probability, evolve, step
from ssqm.errors import ChannelLookupError, DimensionError, NumericIntegrityError, ScheduleError
from ssqm.linalg import SemiUnitaryMatrix, compose
from ssqm.scenarios.decay import DecayParams, decay_initial_state, decay_schedule
from ssqm.scenarios.kaon import kaon_initial_state, kaon_params_sample, kaon_schedule
from ssqm.signal import HeisenbergNet, one_signal_amplitudes, oracle_evolve_one_signal, prepared_state

A, B = math.sqrt(0.9), math.sqrt(0.1)
P = DecayParams(A, B)


def col(a, b):
    return SemiUnitaryMatrix(np.array([[a], [b]], dtype=complex))


def test_step_column():
    op = StepOperator(col(A, B), ("X",), ("X", "Y1"))
    np.testing.assert_allclose(step([1.0], op), [A, B])


def test_step_identity():
    op = StepOperator(SemiUnitaryMatrix(np.eye(3)), ("a", "b", "c"), ("a", "b", "c"))
    v = np.array([0.6, 0.0, 0.8j])
    np.testing.assert_array_equal(step(v, op), v)


def test_step_length_mismatch():
    op = StepOperator(col(A, B), ("X",), ("X", "Y1"))
    with pytest.raises(DimensionError):
        step([1.0, 0.0], op)


def test_four_decay_steps_column_form():
    vec = np.array([1.0 + 0j])
    for op in itertools.islice(decay_schedule(P), 4):
        vec = step(vec, op)
    np.testing.assert_allclose(vec, [A**4, B * A**3, B * A**2, B * A, B], atol=1e-15)


def test_operator_label_checks():
    with pytest.raises(DimensionError):
        StepOperator(col(A, B), ("X",), ("X",))
    with pytest.raises(DimensionError):
        StepOperator(col(A, B), ("X", "Y1"), ("X", "Y2", "Q"), passthrough=1)


def test_full_matrix_is_block_diagonal():
    op = list(itertools.islice(decay_schedule(P), 3))[-1]
    m = op.matrix.matrix
    assert m.shape == (4, 3)
    np.testing.assert_array_equal(m[2:, 1:], np.eye(2))
    assert m[0, 0] == A and m[1, 0] == B


def test_zero_steps():
    traj = evolve(decay_initial_state(), decay_schedule(P), 0, 1.0)
    assert len(traj) == 1
    assert traj.probabilities(0) == {"X": 1.0, "decayed": 0.0}


def test_three_decay_steps():
    traj = evolve(decay_initial_state(), decay_schedule(P), 3, 0.5)
    assert channel_probability(traj, "X", 3) == pytest.approx(0.729, abs=1e-15)
    assert traj.times[-1] == 1.5
    assert np.all(np.abs(traj.residuals) < 1e-15)


def test_y1_probability_at_two():
    traj = evolve(decay_initial_state(), decay_schedule(P), 2, 1.0)
    assert channel_probability(traj, "Y1", 2) == pytest.approx(0.1, abs=1e-15)
    assert channel_probability(traj, "Y2", 2) == pytest.approx(0.09, abs=1e-15)


def test_walk_back_matches_full_record():
    traj_fast = evolve(decay_initial_state(), decay_schedule(P), 12, 1.0)
    traj_full = evolve(decay_initial_state(), decay_schedule(P), 12, 1.0, verbose=True)
    for n in range(13):
        labels = traj_full.labels_at(n)
        state = traj_full.state_at(n)
        for i, lab in enumerate(labels):
            assert traj_fast.amplitude(lab, n) == state[i]


def test_lookup_errors():
    traj = evolve(decay_initial_state(), decay_schedule(P), 2, 1.0)
    with pytest.raises(ChannelLookupError):
        channel_probability(traj, "Y3", 2)
    with pytest.raises(ChannelLookupError):
        channel_probability(traj, "Y2", 1)
    with pytest.raises(ChannelLookupError):
        channel_probability(traj, "X", 3)
    with pytest.raises(ChannelLookupError):
        traj.state_at(1)


def test_exhausted_schedule():
    ops = list(itertools.islice(decay_schedule(P), 2))
    with pytest.raises(ScheduleError) as info:
        evolve(decay_initial_state(), ops, 3, 1.0)
    assert info.value.step == 3


def test_rank_mismatch_names_step():
    ops = list(itertools.islice(decay_schedule(P), 3))
    ops[2] = ops[0]
    with pytest.raises(ScheduleError) as info:
        evolve(decay_initial_state(), ops, 3, 1.0)
    assert info.value.step == 3


def test_conservation_breach():
    ops = list(itertools.islice(decay_schedule(P), 3))
    loose = SemiUnitaryMatrix(np.array([[0.9], [0.9]]), tolerance=1.0)
    ops[1] = StepOperator(loose, ops[1].source_labels, ops[1].target_labels, passthrough=1)
    with pytest.raises(NumericIntegrityError) as info:
        evolve(decay_initial_state(), ops, 3, 1.0)
    assert info.value.step == 2


def test_decayed_tracks_everything_else():
    p = kaon_params_sample(3)
    traj = evolve(kaon_initial_state(), kaon_schedule(p), 20, 1.0)
    totals = traj.tracked_probabilities.sum(axis=1) + traj.decayed
    np.testing.assert_allclose(totals, 1.0, atol=1e-12)
    assert np.all(np.diff(traj.decayed) >= -1e-15)


def test_stepwise_equals_composed():
    ops = list(itertools.islice(decay_schedule(P), 25))
    traj = evolve(decay_initial_state(), ops, 25, 1.0)
    total = ops[0].matrix
    for op in ops[1:]:
        total = compose(op.matrix, total)
    np.testing.assert_allclose(traj.final_amplitudes, total.matrix[:, 0], atol=1e-10)


def test_oracle_agreement_each_step():
    p = kaon_params_sample(8)
    ops = list(itertools.islice(kaon_schedule(p), 10))
    traj = evolve(kaon_initial_state(), ops, 10, 1.0, verbose=True)
    s = kaon_initial_state()
    for n, op in enumerate(ops, start=1):
        s = oracle_evolve_one_signal(op.matrix, s, HeisenbergNet(n, op.target_labels))
        assert np.max(np.abs(one_signal_amplitudes(s) - traj.state_at(n))) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(0, 300))
def test_norm_conserved(seed, n):
    traj = evolve(kaon_initial_state(), kaon_schedule(kaon_params_sample(seed)), n, 1e-3)
    assert np.max(np.abs(traj.residuals)) <= 1e-10
    assert traj.final_amplitudes.size == n + 2


@settings(max_examples=30, deadline=None)
@given(phase=st.floats(-math.pi, math.pi), s=st.floats(0.01, 0.99), n=st.integers(1, 60))
def test_prepared_mixture_conserved(phase, s, n):
    a = math.sqrt(1 - s) * complex(math.cos(phase), math.sin(phase))
    p = DecayParams(a, math.sqrt(s))
    init = prepared_state(HeisenbergNet(0, ("X",)), "X")
    traj = evolve(init, decay_schedule(p), n, 1.0)
    assert abs(traj.probability("X", n) - (1 - s) ** n) <= 1e-12
