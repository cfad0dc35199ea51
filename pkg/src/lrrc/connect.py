"""Helper-increment rebalancing behind exact repair witnesses.

Given an admissible selection vector h, a failed node, and d permitted
helpers, the procedure moves the failed node's h units onto helpers one
at a time, always picking the currently lowest-valued helper (earliest
position on ties) and re-sorting after each step.  The output vector h'
is again admissible, zeroes the failed coordinate, and raises exactly
the helpers a repair witness needs.

Every ordering fact the correctness argument leans on is asserted at
runtime instead of assumed: only the failed node may drift to a later
position, the incremented helper crosses nobody, sortedness holds after
every step, and the capped score of each intermediate order keeps
majorizing the intermediate h.  Any violation raises
InternalContradiction; a run that trips it on valid input is a finding
about the procedure, not a recoverable condition.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .mfhs import (
    HNotMember,
    Params,
    Perm,
    h_membership,
    helper_universe,
    majorizes,
    score_vectors,
)


class ConnectError(Exception):
    pass


class EmptyHelperPool(ConnectError):
    """step_select was called with no helpers left."""


class InternalContradiction(ConnectError):
    """A runtime assertion about the procedure's own bookkeeping failed."""


@dataclass(frozen=True)
class ConnectState:
    """Snapshot after iteration t.

    h is the current selection vector, pool the helpers not yet
    incremented, perm the current nonincreasing order, classes[g] the
    nodes currently carrying value g (ascending index).
    """

    t: int
    h: tuple[int, ...]
    pool: frozenset[int]
    perm: Perm
    failed: int
    classes: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class ConnectResult:
    h_prime: tuple[int, ...]
    incremented: tuple[int, ...]
    trace: tuple[ConnectState, ...]


def _classes_of(h: Sequence[int], d: int) -> tuple[tuple[int, ...], ...]:
    out: list[list[int]] = [[] for _ in range(d + 1)]
    for node, value in enumerate(h, start=1):
        out[value].append(node)
    return tuple(tuple(nodes) for nodes in out)


def _validate_helpers(params: Params, helpers: Sequence[int], failed: int) -> frozenset[int]:
    hs = frozenset(helpers)
    if len(hs) != len(tuple(helpers)):
        raise ValueError(f"duplicate helpers in {tuple(helpers)}")
    universe = helper_universe(params, failed)
    if not hs <= universe:
        raise ValueError(f"helpers {sorted(hs)} stray outside {sorted(universe)}")
    if len(hs) != params.d:
        raise ValueError(f"need exactly d = {params.d} helpers, got {len(hs)}")
    return hs


def initial_perm(params: Params, h: Sequence[int], helpers: Sequence[int], failed: int) -> Perm:
    """Starting order: h descending, helpers first inside every tied
    class, remaining ties by ascending node index."""
    if not h_membership(params, h).member:
        raise HNotMember(f"{tuple(h)} is not admissible for {params}")
    hs = _validate_helpers(params, helpers, failed)
    order = sorted(
        range(1, params.n + 1),
        key=lambda node: (-h[node - 1], 0 if node in hs else 1, node),
    )
    return Perm(tuple(order))


def step_select(state: ConnectState) -> int:
    """Next helper to increment: lowest value, then earliest position."""
    if not state.pool:
        raise EmptyHelperPool(f"iteration {state.t}: no helpers remain")
    return min(state.pool, key=lambda x: (state.h[x - 1], state.perm.position(x)))


def step_resort(state: ConnectState, x: int) -> Perm:
    """Re-sort after x gained a unit and the failed node lost one.

    state carries the updated h next to the not-yet-updated perm.  The
    sort key is descending h with the previous position breaking ties,
    except that the failed node sinks to the end of its new class (it
    is the one node allowed to move later).  Asserted: the result is
    nonincreasing, every pair not involving the failed node or x keeps
    its relative order, and x crosses no node at all besides possibly
    the failed one.
    """
    old_order = state.perm.order
    failed = state.failed
    n = len(old_order)
    sentinel = n + 1

    def key(node: int) -> tuple[int, int]:
        tie = sentinel if node == failed else state.perm.position(node)
        return (-state.h[node - 1], tie)

    new_order = tuple(sorted(old_order, key=key))

    values = [state.h[node - 1] for node in new_order]
    if any(values[j] < values[j + 1] for j in range(n - 1)):
        raise InternalContradiction(f"re-sorted order {new_order} is not nonincreasing")

    kept_old = [node for node in old_order if node not in (failed, x)]
    kept_new = [node for node in new_order if node not in (failed, x)]
    if kept_old != kept_new:
        raise InternalContradiction(
            f"re-sort disturbed bystanders: {kept_old} became {kept_new}"
        )

    old_pos = {node: i for i, node in enumerate(old_order)}
    new_pos = {node: i for i, node in enumerate(new_order)}
    crossed = [
        node
        for node in old_order
        if node not in (failed, x)
        and (old_pos[node] < old_pos[x]) != (new_pos[node] < new_pos[x])
    ]
    if crossed:
        raise InternalContradiction(f"incremented helper {x} crossed {crossed}")

    return Perm(new_order)


def _check_state(params: Params, state: ConnectState) -> None:
    values = [state.h[node - 1] for node in state.perm.order]
    if any(values[j] < values[j + 1] for j in range(params.n - 1)):
        raise InternalContradiction(
            f"iteration {state.t}: h {state.h} not sorted along {state.perm.order}"
        )
    capped = score_vectors(params, state.perm).c
    if not majorizes(capped, state.h):
        raise InternalContradiction(
            f"iteration {state.t}: capped score {capped} fails to majorize {state.h}"
        )


def connect_run(params: Params, h: Sequence[int], helpers: Sequence[int], failed: int) -> ConnectResult:
    """Run the full procedure and return (h', increment order, trace).

    h' agrees with h everywhere except that the failed coordinate drops
    to zero and h_failed helpers each gain exactly one unit.  The trace
    holds one state per iteration, t = 0 included.  h' is re-checked
    for admissibility; failure there is an InternalContradiction.
    """
    h = tuple(h)
    perm = initial_perm(params, h, helpers, failed)
    pool = set(_validate_helpers(params, helpers, failed))

    current = list(h)
    state = ConnectState(
        t=0,
        h=h,
        pool=frozenset(pool),
        perm=perm,
        failed=failed,
        classes=_classes_of(h, params.d),
    )
    _check_state(params, state)
    trace = [state]
    incremented: list[int] = []

    for t in range(1, h[failed - 1] + 1):
        x = step_select(state)
        current[x - 1] += 1
        current[failed - 1] -= 1
        pool.discard(x)
        interim = ConnectState(
            t=t,
            h=tuple(current),
            pool=frozenset(pool),
            perm=state.perm,
            failed=failed,
            classes=_classes_of(current, params.d),
        )
        state = replace(interim, perm=step_resort(interim, x))
        _check_state(params, state)
        trace.append(state)
        incremented.append(x)

    h_prime = tuple(current)
    if not h_membership(params, h_prime).member:
        raise InternalContradiction(f"output vector {h_prime} left the admissible set")
    return ConnectResult(h_prime=h_prime, incremented=tuple(incremented), trace=tuple(trace))


def connect_state_to_dict(state: ConnectState) -> dict:
    return {
        "t": state.t,
        "h": list(state.h),
        "pool": sorted(state.pool),
        "perm": list(state.perm.order),
        "failed": state.failed,
    }
