import numpy as np
import pytest
from hypothesis import given, strategies as st

from fedsim.aggregation import (
    AggregationRule,
    aggregate,
    bcrs_aggregate,
    fedavg_aggregate,
    opwa_aggregate,
)
from fedsim.compression import topk_sparsify
from fedsim.errors import DimensionError, ParameterError
from fedsim.opwa import compute_overlap, generate_mask
from fedsim.params import SparseUpdate, densify


def dense_oracle(w, updates, coeffs, rate=1.0, mask=None):
    total = np.zeros_like(w)
    for u, c in zip(updates, coeffs):
        d = densify(u)
        if mask is not None:
            d = d * np.array([mask[i] for i in range(len(w))])
        total = total + c * d
    return w - rate * total


def random_updates(seed, n_clients=4, dim=30, cr=0.2):
    rng = np.random.default_rng(seed)
    return [topk_sparsify(rng.normal(size=dim), cr) for _ in range(n_clients)]


def test_fedavg_examples():
    ups = [SparseUpdate.from_dense([2.0, 0.0]), SparseUpdate.from_dense([0.0, 2.0])]
    assert fedavg_aggregate([1.0, 1.0], ups, [0.5, 0.5]).tolist() == [0.0, 0.0]

    w = np.array([0.3, -1.2, 4.0])
    local = np.array([1.0, 0.5, 2.0])
    out = fedavg_aggregate(w, [SparseUpdate.from_dense(w - local)], [1.0])
    np.testing.assert_allclose(out, local, rtol=0, atol=1e-15)


def test_fedavg_disjoint_supports():
    ups = [SparseUpdate([0, 2], [1.0, 2.0], 5), SparseUpdate([1, 4], [3.0, -1.0], 5)]
    w = np.arange(5.0)
    np.testing.assert_allclose(fedavg_aggregate(w, ups, [0.25, 0.75]), dense_oracle(w, ups, [0.25, 0.75]))
    assert fedavg_aggregate(w, ups, [0.25, 0.75])[3] == 3.0


def test_bcrs_examples():
    ups = random_updates(0)
    w = np.random.default_rng(9).normal(size=30)
    f = [0.1, 0.2, 0.3, 0.4]
    assert np.array_equal(bcrs_aggregate(w, ups, f), fedavg_aggregate(w, ups, f))
    assert np.array_equal(bcrs_aggregate(w, ups, [0.0] * 4), w)
    p = [0.3, 0.25, 0.3, 0.1]
    np.testing.assert_allclose(bcrs_aggregate(w, ups, p, 0.7), dense_oracle(w, ups, p, 0.7), atol=1e-14)


def test_opwa_hand_example():
    u1 = SparseUpdate([0, 1], [1.0, 1.0], 2)
    u2 = SparseUpdate([1], [1.0], 2)
    counts = compute_overlap([u1, u2])
    assert counts == {0: 1, 1: 2}
    mask = generate_mask(counts, 1, 2.0)
    assert opwa_aggregate(np.zeros(2), [u1, u2], [0.5, 0.5], mask).tolist() == [-1.0, -1.0]


def test_opwa_reduces_to_bcrs():
    ups = random_updates(1)
    w = np.ones(30)
    p = [0.3, 0.2, 0.3, 0.25]
    ident = generate_mask(compute_overlap(ups), 1, 1.0)
    assert np.array_equal(opwa_aggregate(w, ups, p, ident), bcrs_aggregate(w, ups, p))
    full = [SparseUpdate.from_dense(np.full(30, i + 1.0)) for i in range(3)]
    mask = generate_mask(compute_overlap(full), 1, 5.0)
    assert np.array_equal(opwa_aggregate(w, full, p[:3], mask), bcrs_aggregate(w, full, p[:3]))


@given(st.integers(0, 10_000), st.floats(1, 8), st.floats(0.1, 2))
def test_opwa_matches_dense_oracle(seed, gamma, rate):
    ups = random_updates(seed)
    w = np.random.default_rng(seed + 1).normal(size=30)
    p = [0.3, 0.2, 0.1, 0.25]
    mask = generate_mask(compute_overlap(ups), 1, gamma)
    got = opwa_aggregate(w, ups, p, mask, rate)
    np.testing.assert_allclose(got, dense_oracle(w, ups, p, rate, mask), rtol=1e-12, atol=1e-12)
    untouched = set(range(30)) - set(compute_overlap(ups))
    for i in untouched:
        assert got[i] == w[i]


@given(st.integers(0, 10_000), st.floats(-3, 3))
def test_linearity_in_coefficients(seed, scale):
    ups = random_updates(seed, n_clients=3)
    w = np.zeros(30)
    c = np.array([0.2, 0.5, 0.3])
    step = fedavg_aggregate(w, ups, c) - w
    scaled = fedavg_aggregate(w, ups, c * scale) - w
    np.testing.assert_allclose(scaled, scale * step, atol=1e-12)


def test_dense_fedavg_equals_weighted_model_average():
    rng = np.random.default_rng(4)
    w = rng.normal(size=12)
    locals_ = [rng.normal(size=12) for _ in range(3)]
    f = [0.5, 0.3, 0.2]
    ups = [topk_sparsify(w - loc, 1.0) for loc in locals_]
    expected = sum(fi * loc for fi, loc in zip(f, locals_))
    np.testing.assert_allclose(fedavg_aggregate(w, ups, f), expected, atol=1e-14)


def test_dim_mismatch_and_rules():
    with pytest.raises(DimensionError):
        fedavg_aggregate(np.zeros(3), [SparseUpdate([0], [1.0], 4)], [1.0])
    with pytest.raises(DimensionError):
        fedavg_aggregate(np.zeros(3), [SparseUpdate([0], [1.0], 3)], [1.0, 0.0])
    with pytest.raises(ParameterError):
        AggregationRule("median")
    with pytest.raises(ParameterError):
        AggregationRule("bcrs", 0.0)
    with pytest.raises(ParameterError):
        aggregate(AggregationRule("opwa"), np.zeros(2), [], [])
