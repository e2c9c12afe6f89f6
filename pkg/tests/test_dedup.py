import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lanevote.dedup import DedupConfig, attention_matrix, set_dice, soft_iou, suppress
from lanevote.errors import DimensionMismatchError, LaneVoteError
from lanevote.grouping import GroupResult
from lanevote.sampling import Candidate


def group(mask, c):
    return GroupResult(Candidate(0.0, 0.0, c), np.asarray(mask, dtype=float))


def test_soft_iou_examples():
    x = np.array([0.2, 0.7, 0.0])
    assert soft_iou(x, x) == 1.0
    assert soft_iou([1, 0], [0, 1]) == 0.0
    assert soft_iou([0.5, 0.5], [1, 0]) == pytest.approx(1 / 1.5, abs=1e-15)
    assert soft_iou([0, 0], [0, 0]) == 0.0
    with pytest.raises(DimensionMismatchError):
        soft_iou([1, 0], [1, 0, 0])


def test_set_dice_examples():
    m = np.zeros(30)
    m[:10] = 1
    assert set_dice(m, m) == 1.0
    y = np.zeros(30)
    y[5:15] = 1
    assert set_dice(m, y) == 0.5
    with pytest.raises(LaneVoteError):
        set_dice([0.5, 1], [1, 1])


fields = st.integers(1, 40).flatmap(
    lambda n: st.tuples(*[st.lists(st.floats(0, 1), min_size=n, max_size=n)] * 2))


@settings(max_examples=300, deadline=None)
@given(fields)
def test_soft_iou_bounded_symmetric(pair):
    x, y = map(np.array, pair)
    v = soft_iou(x, y)
    assert 0.0 <= v <= 1.0 + 1e-15
    assert v == soft_iou(y, x)
    if x.any():
        assert soft_iou(x, x) == pytest.approx(1.0, abs=1e-15)


def test_set_dice_matches_soft_iou_small_sample():
    # the exhaustive 3x3 sweep lives in the acceptance suite
    for a, b in itertools.product(range(0, 512, 37), repeat=2):
        x = np.array([(a >> i) & 1 for i in range(9)], dtype=float)
        y = np.array([(b >> i) & 1 for i in range(9)], dtype=float)
        assert set_dice(x, y) == soft_iou(x, y)


def test_attention_matrix_examples():
    a = np.zeros((4, 4))
    a[0] = 1
    assert attention_matrix([group(a, 1.0)]).tolist() == [[1.0]]
    att = attention_matrix([group(a, 0.9), group(np.eye(4), 0.5), group(a, 0.3)])
    assert att[0, 2] == att[2, 0] == 1.0
    assert np.array_equal(att, att.T)
    with pytest.raises(DimensionMismatchError):
        attention_matrix([group(a, 1), group(np.zeros((3, 3)), 1)])


def test_suppress_examples():
    A, B = np.array([1, 1, 0, 0.0]), np.array([0, 0, 1, 1.0])
    g = [group(A, 0.9), group(A, 0.8), group(B, 0.7)]
    assert suppress(g, DedupConfig(0.5)) == [g[0], g[2]]
    assert suppress(g, DedupConfig(1.0)) == g
    distinct = [group(np.eye(4)[i], c) for i, c in enumerate([0.2, 0.9, 0.5, 0.4])]
    kept = suppress(distinct, DedupConfig(0.01))
    assert [k.seed.centerness for k in kept] == [0.9, 0.5, 0.4, 0.2]


def test_suppress_keeps_at_equality():
    x, y = np.array([0.5, 0.5]), np.array([1.0, 0.0])
    thr = soft_iou(x, y)
    g = [group(x, 0.9), group(y, 0.8)]
    assert len(suppress(g, DedupConfig(thr))) == 2
    assert len(suppress(g, DedupConfig(np.nextafter(thr, 0)))) == 1


def test_config_bounds():
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            DedupConfig(bad)


group_sets = st.lists(st.tuples(st.lists(st.sampled_from([0.0, 0.3, 1.0]), min_size=6, max_size=6),
                                st.floats(0, 1)), min_size=1, max_size=8)


@settings(max_examples=200, deadline=None)
@given(group_sets, st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_suppress_properties(entries, t1, t2):
    g = [group(m, c) for m, c in entries]
    lo, hi = sorted((t1, t2))
    once = suppress(g, DedupConfig(hi))
    assert suppress(once, DedupConfig(hi)) == once
    assert len(suppress(g, DedupConfig(lo))) <= len(once)
    top = max(range(len(g)), key=lambda i: (g[i].seed.centerness, -i))
    assert once[0] is g[top]
