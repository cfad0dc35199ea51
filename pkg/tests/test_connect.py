"""Helper-increment procedure: pinned trace, invariants, failure modes."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrrc.connect import (
    InternalContradiction,
    connect_run,
    connect_state_to_dict,
    initial_perm,
)
from lrrc.mfhs import HNotMember, h_enumerate, majorizes, params_new, score_vectors

P641 = params_new(6, 4, 3, 1)
P321 = params_new(6, 3, 2, 1)


def test_initial_perm_orders_by_value_then_helpers_then_index():
    h = (0, 2, 3, 0, 1, 1)
    perm = initial_perm(P641, h, helpers=(1, 2, 3), failed=5)
    assert perm.order == (3, 2, 5, 6, 1, 4)
    # helpers win ties against equal-valued outsiders
    h2 = (1, 1, 0, 0, 1, 1)
    perm2 = initial_perm(P641, h2, helpers=(5, 6, 4), failed=1)
    assert perm2.order == (5, 6, 1, 2, 4, 3)


def test_initial_perm_rejects_inadmissible_h():
    with pytest.raises(HNotMember):
        initial_perm(P641, (3, 3, 3, 3, 3, 3), helpers=(3, 4, 5), failed=1)


def test_worked_trace():
    h = (3, 2, 2, 0, 0, 0)
    result = connect_run(P641, h, helpers=(3, 4, 5), failed=1)
    perms = [s.perm.order for s in result.trace]
    assert perms[0] == (1, 3, 2, 4, 5, 6)
    assert perms[1:] == [
        (3, 2, 1, 4, 5, 6),
        (3, 2, 4, 5, 1, 6),
        (3, 2, 4, 5, 6, 1),
    ]
    assert result.h_prime == (0, 2, 3, 1, 1, 0)
    assert result.incremented == (4, 5, 3)
    # the failed node ends drained and every intermediate state certifies
    for state in result.trace:
        sv = score_vectors(P641, state.perm)
        assert majorizes(sv.c, state.h)
    assert result.trace[-1].h[0] == 0


def test_zero_demand_is_a_no_op():
    h = (0, 2, 3, 0, 1, 1)
    result = connect_run(P641, h, helpers=(1, 2, 5), failed=4)
    assert result.h_prime == h
    assert result.incremented == ()
    assert len(result.trace) == 1


def test_helper_validation():
    h = (1, 1, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        connect_run(P641, h, helpers=(1, 3, 4), failed=1)  # helper in own family
    with pytest.raises(ValueError):
        connect_run(P641, h, helpers=(3, 4), failed=1)  # wrong count
    with pytest.raises(ValueError):
        connect_run(P641, h, helpers=(3, 3, 4), failed=1)  # duplicate


def test_sum_preserved_and_failed_drained():
    hs = h_enumerate(P641)
    for h in list(hs)[:200]:
        for failed in (1, 4):
            helpers = (3, 5, 6) if failed == 1 else (1, 2, 5)
            result = connect_run(P641, h, helpers, failed)
            assert sum(result.h_prime) == sum(h)
            assert result.h_prime[failed - 1] == 0
            assert len(result.incremented) == h[failed - 1]
            assert result.h_prime in hs
            # increments land on chosen helpers only
            for node in result.incremented:
                assert node in helpers


def test_increments_respect_degree_cap():
    hs = h_enumerate(P321)
    for h in hs:
        result = connect_run(P321, h, helpers=(4, 5), failed=1)
        assert all(0 <= v <= P321.d for v in result.h_prime)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_random_runs_keep_certificates(data):
    params = data.draw(st.sampled_from([P641, P321]))
    hs = h_enumerate(params)
    h = data.draw(st.sampled_from(hs.members))
    failed = data.draw(st.integers(1, params.n))
    from lrrc.mfhs import helper_universe

    universe = sorted(helper_universe(params, failed))
    helpers = tuple(sorted(data.draw(
        st.permutations(universe).map(lambda p: p[: params.d])
    )))
    result = connect_run(params, h, helpers, failed)
    for state in result.trace:
        sv = score_vectors(params, state.perm)
        assert majorizes(sv.c, state.h)
        vals = [state.h[node - 1] for node in state.perm.order]
        assert all(vals[j] >= vals[j + 1] for j in range(params.n - 1))
    assert result.h_prime in hs


def test_state_serialization_shape():
    h = (3, 2, 2, 0, 0, 0)
    result = connect_run(P641, h, helpers=(3, 4, 5), failed=1)
    doc = connect_state_to_dict(result.trace[0])
    assert doc["t"] == 0
    assert doc["perm"] == [1, 3, 2, 4, 5, 6]
    assert doc["h"] == [3, 2, 2, 0, 0, 0]
    assert sorted(doc["pool"]) == [3, 4, 5]
    assert doc["failed"] == 1


def test_full_sweep_small_params_no_contradiction():
    """Every (h, failed, helper set) at the smaller point must succeed."""
    hs = h_enumerate(P321)
    from lrrc.mfhs import helper_universe

    runs = 0
    for h in hs:
        for failed in range(1, 7):
            universe = sorted(helper_universe(P321, failed))
            for helpers in itertools.combinations(universe, P321.d):
                connect_run(P321, h, helpers, failed)
                runs += 1
    assert runs == len(hs) * 6 * 3  # 159 * 18 = 2862


def test_internal_contradiction_is_exported():
    assert issubclass(InternalContradiction, Exception)
