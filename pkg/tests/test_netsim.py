import numpy as np
import pytest
from hypothesis import given, strategies as st

from fedsim.errors import ParameterError
from fedsim.netsim import ClientProfile, TimeLedger, comm_time, record_round, sample_profiles


def test_zero_std_gives_mean_bandwidth():
    ps = sample_profiles(5, 1e6, 0.0, 0.05, 0.2, [1] * 5, 0)
    assert all(p.bandwidth == 1e6 for p in ps)


def test_default_latency_range():
    ps = sample_profiles(2000, 1e6, 0.2e6, 0.05, 0.2, [1] * 2000, 7)
    lats = np.array([p.latency for p in ps])
    assert lats.min() > 0.05 and lats.max() <= 0.2


def test_bandwidth_mean_statistical():
    n = 10_000
    ps = sample_profiles(n, 1e6, 0.2e6, 0.05, 0.2, [1] * n, 11)
    mean = np.mean([p.bandwidth for p in ps])
    assert abs(mean - 1e6) < 3 * 0.2e6 / np.sqrt(n)


def test_heavy_tail_bandwidth_stays_positive():
    ps = sample_profiles(500, 1.0, 5.0, 0.05, 0.2, [1] * 500, 2)
    assert all(p.bandwidth > 0 for p in ps)


def test_sampling_is_seeded():
    a = sample_profiles(20, 1e6, 0.2e6, 0.05, 0.2, range(1, 21), 5)
    b = sample_profiles(20, 1e6, 0.2e6, 0.05, 0.2, range(1, 21), 5)
    assert a == b


@pytest.mark.parametrize(
    "args",
    [(0, 1e6, 0.1, 0.05, 0.2), (3, -1.0, 0.1, 0.05, 0.2), (3, 1e6, -1, 0.05, 0.2), (3, 1e6, 0.1, 0.2, 0.05)],
)
def test_invalid_ranges(args):
    with pytest.raises(ParameterError):
        sample_profiles(*args, [1] * max(args[0], 0), 0)


@pytest.mark.parametrize(
    "lat, bw, payload, expected",
    [(0.05, 1e6, 1e6, 1.05), (0.05, 1e6, 0, 0.05), (0.1, 2e6, 4e5, 0.3)],
)
def test_comm_time(lat, bw, payload, expected):
    assert comm_time(ClientProfile(bw, lat), payload) == pytest.approx(expected, abs=1e-12)


@given(
    st.floats(1e3, 1e9), st.floats(1e-3, 1.0), st.just(0.0) | st.floats(1, 1e8), st.floats(1.01, 10)
)
def test_comm_time_monotone(bw, lat, payload, factor):
    base = comm_time(ClientProfile(bw, lat), payload)
    assert comm_time(ClientProfile(bw, lat), payload * factor + 1) > base
    assert comm_time(ClientProfile(bw, lat * factor), payload) > base
    if payload > 0:
        assert comm_time(ClientProfile(bw * factor, lat), payload) < base


def test_record_round_examples():
    led = record_round(TimeLedger(), [1, 2, 3], [10, 20, 30])
    assert (led.last.actual, led.last.max, led.last.min) == (3, 30, 1)
    single = record_round(TimeLedger(), [5], [5])
    assert (single.last.actual, single.last.max, single.last.min) == (5, 5, 5)
    two = record_round(record_round(TimeLedger(), [3], [3]), [4], [4])
    assert two.cum_actual == 7


def test_record_round_empty():
    with pytest.raises(ParameterError):
        record_round(TimeLedger(), [], [1.0])


@given(st.lists(st.lists(st.floats(0.01, 100), min_size=1, max_size=6), min_size=1, max_size=20))
def test_ledger_cumulative_is_running_sum(rounds):
    led = TimeLedger()
    prev = 0.0
    for times in rounds:
        led = record_round(led, times, [t * 2 for t in times])
        assert led.last.min <= led.last.actual
        assert led.cum_actual >= prev
        prev = led.cum_actual
    running = 0.0
    for r in led.rounds:
        running += r.actual
    assert led.cum_actual == running
