import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonscope.errors import EnumerationLimitError, ValidationError
from photonscope.fock import (
    FockConfiguration,
    ModeLayout,
    composition_array,
    configuration_count,
    enumerate_configurations,
    factorial_products,
    mode_index_array,
)


def test_layout_mode_partition():
    for n in (2, 3, 4, 5):
        layout = ModeLayout(n)
        assert layout.n_modes == 4 * n - 2
        assert layout.n_detector_modes == 2 * n
        assert layout.n_loss_modes == 2 * n - 2
        a = [layout.a_index(j) for j in range(1, n + 1)]
        b = [layout.b_index(j) for j in range(1, n + 1)]
        c = [layout.c_index(j) for j in range(2, n + 1)]
        d = [layout.d_index(j) for j in range(2, n + 1)]
        assert sorted(a + b + c + d) == list(range(4 * n - 2))


def test_layout_rejects_small_n():
    with pytest.raises(ValidationError):
        ModeLayout(1)


def test_configuration_validation():
    with pytest.raises(ValidationError):
        FockConfiguration((1, -1, 0))
    cfg = FockConfiguration((2, 0, 1))
    assert cfg.total == 3
    assert len(cfg) == 3


def test_enumeration_order_and_count():
    configs = enumerate_configurations(2, 3)
    counts = [c.counts for c in configs]
    # lexicographically increasing, all distinct, correct total
    assert counts == sorted(counts)
    assert len(set(counts)) == len(counts)
    assert len(counts) == configuration_count(2, 3) == math.comb(4, 2)
    assert all(sum(c) == 2 for c in counts)
    assert counts[0] == (0, 0, 2)
    assert counts[-1] == (2, 0, 0)


def test_enumeration_limit():
    with pytest.raises(EnumerationLimitError):
        enumerate_configurations(30, 40)


def test_cached_arrays_consistent():
    comp = composition_array(3, 4)
    idx = mode_index_array(3, 4)
    fact = factorial_products(3, 4)
    assert comp.shape == (configuration_count(3, 4), 4)
    assert idx.shape == (comp.shape[0], 3)
    # index rows are the multiset expansion of the composition rows
    for row, modes, f in zip(comp, idx, fact):
        expanded = [j for j, c in enumerate(row) for _ in range(c)]
        assert list(modes) == expanded
        assert f == math.prod(math.factorial(int(c)) for c in row)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(0, 5), m=st.integers(1, 6))
def test_enumeration_properties(n, m):
    configs = enumerate_configurations(n, m)
    counts = [c.counts for c in configs]
    assert len(counts) == math.comb(n + m - 1, m - 1)
    assert len(set(counts)) == len(counts)
    assert all(sum(c) == n and len(c) == m for c in counts)
