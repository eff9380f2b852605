import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefbo.duels import Duel, DuelDataset, stack_inputs


def test_duel_validation():
    with pytest.raises(ValueError):
        Duel(np.zeros(2), np.zeros(3))
    with pytest.raises(ValueError):
        Duel(np.array([np.nan, 0.0]), np.zeros(2))
    with pytest.raises(ValueError):
        Duel(np.zeros((2, 1)), np.zeros((2, 1)))
    d = Duel([0.0, 1.0], [2.0, 3.0])       # lists are coerced
    assert d.winner.dtype == float


def test_dataset_append_is_persistent():
    base = DuelDataset(2)
    grown = base.append(Duel(np.zeros(2), np.ones(2)))
    assert len(base) == 0 and len(grown) == 1
    with pytest.raises(ValueError):
        DuelDataset(2, (Duel(np.zeros(3), np.ones(3)),))


def test_winners_losers_row_order():
    duels = [Duel(np.array([float(i), 0.0]), np.array([0.0, float(i)]))
             for i in range(4)]
    data = DuelDataset(2, tuple(duels))
    assert np.array_equal(data.winners[:, 0], np.arange(4.0))
    assert np.array_equal(data.losers[:, 1], np.arange(4.0))
    assert data.winners.shape == data.losers.shape == (4, 2)


def test_empty_dataset_shapes():
    data = DuelDataset(3)
    assert data.winners.shape == (0, 3)
    assert stack_inputs([], data).shape == (0, 3)


def test_stack_inputs_order():
    data = DuelDataset(1, (Duel([1.0], [2.0]), Duel([3.0], [4.0])))
    tes = np.array([[9.0], [8.0]])
    stacked = stack_inputs(tes, data)
    assert np.array_equal(stacked.ravel(), [9.0, 8.0, 1.0, 3.0, 2.0, 4.0])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)),
                min_size=0, max_size=6))
def test_json_round_trip(pairs):
    data = DuelDataset(1)
    for w, l in pairs:
        data = data.append(Duel(np.array([w]), np.array([l])))
    restored = DuelDataset.from_json(data.to_json())
    assert restored.dimension == data.dimension
    assert len(restored) == len(data)
    for a, b in zip(restored.duels, data.duels):
        assert np.array_equal(a.winner, b.winner)
        assert np.array_equal(a.loser, b.loser)
