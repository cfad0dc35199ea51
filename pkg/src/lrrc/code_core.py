"""Code state, randomized construction and repair, rank verification.

A code is n coding matrices Q_1..Q_n, each M x d over a prime field.
Node i stores the d packets X^T Q_i of a file X (M x W).  The central
check, invariant_check, demands that for every admissible selection
vector h the stacked selection [Q_1 E_{h_1} | ... | Q_n E_{h_n}] keeps
full column rank, where E_x takes the first x columns.  Reconstruction
from any k nodes follows from that check, and repairs are accepted only
when the repaired state passes it again, so the property survives any
failure sequence and any helper choices.

Construction and repair draw coefficients uniformly at random (Philox
counter-based generator, fully seeded) and retry on rejection.  At the
mandated field size a single attempt fails only with polynomially small
probability, so retries are rare and bounded.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field, replace
from typing import Sequence

import numpy as np

from .galois import (
    FieldConfig,
    FieldMatrix,
    field_new,
    identity,
    mat_hstack,
    mat_mul,
    mat_solve,
    mat_transpose,
    matrix_from_dict,
    matrix_to_dict,
    rank_of_rows,
)
from .mfhs import (
    HNotMember,
    HSet,
    Params,
    h_enumerate,
    helper_universe,
    params_from_dict,
    params_to_dict,
)
from .connect import connect_run

logger = logging.getLogger(__name__)

DEFAULT_MAX_ATTEMPTS = 16


class CodeError(Exception):
    pass


class ConstructionFailed(CodeError):
    """No sampled code passed verification within the attempt budget."""

    def __init__(self, attempts: int) -> None:
        super().__init__(f"construction rejected {attempts} times")
        self.attempts = attempts


class RepairFailed(CodeError):
    """No sampled repair passed verification within the attempt budget."""

    def __init__(self, attempts: int) -> None:
        super().__init__(f"repair rejected {attempts} times")
        self.attempts = attempts


class InvalidHelpers(CodeError):
    """Helper set is not d distinct nodes from the failed node's universe."""


class RankDeficient(CodeError):
    """Decoding had no unique exact solution."""


@dataclass(frozen=True)
class CodeState:
    """One code: parameters, field, packet width W, and the Q matrices.

    attempts records how many samples the producing call consumed;
    field_below_bound flags a field smaller than the sufficient bound.
    Both are provenance, not code content, and stay out of the JSON
    form.
    """

    params: Params
    field: FieldConfig
    packet_width: int
    Q: tuple[FieldMatrix, ...]
    attempts: int = 1
    field_below_bound: bool = dc_field(default=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.Q) != self.params.n:
            raise CodeError(f"expected {self.params.n} coding matrices, got {len(self.Q)}")
        for i, qm in enumerate(self.Q, start=1):
            if (qm.rows, qm.cols) != (self.params.M, self.params.d):
                raise CodeError(
                    f"Q_{i} is {qm.rows}x{qm.cols}, expected {self.params.M}x{self.params.d}"
                )
            if qm.field != self.field:
                raise CodeError(f"Q_{i} lives in GF({qm.field.q}), state says GF({self.field.q})")
        if self.packet_width < 1:
            raise CodeError("packet width must be positive")


@dataclass(frozen=True)
class RepairPlan:
    """How a newcomer rebuilds a failed node.

    combine[j] is the d x 1 coefficient vector applied to helper
    helpers[j]'s matrix; mix is the d x d matrix applied on the right.
    The replacement is [Q_{x_1} b_1 | ... | Q_{x_d} b_d] @ mix.
    """

    failed: int
    helpers: tuple[int, ...]
    combine: tuple[FieldMatrix, ...]
    mix: FieldMatrix


def required_field_size(params: Params, hset: HSet) -> int:
    """Sufficient field size: n * d * M * |H| + 1.

    Any prime at or above this makes random construction succeed with
    positive probability margin.  Smaller primes are accepted with a
    recorded warning; the bound is sufficient, never necessary.
    """
    return params.n * params.d * params.M * len(hset) + 1


def _selection_rows(state: CodeState, h: Sequence[int]) -> list[list[int]]:
    m = state.params.M
    d = state.params.d
    rows: list[list[int]] = [[] for _ in range(m)]
    for node_index, take in enumerate(h):
        if take:
            entries = state.Q[node_index].entries
            for r in range(m):
                base = r * d
                rows[r].extend(entries[base:base + take])
    return rows


def invariant_check(state: CodeState, hset: HSet) -> bool:
    """True iff every admissible selection keeps full column rank.

    Visits vectors with the largest totals first and stops at the first
    failure.
    """
    q = state.field.q
    for h in hset.by_total_desc:
        want = sum(h)
        if want == 0:
            continue
        if rank_of_rows(_selection_rows(state, h), q) != want:
            return False
    return True


def reconstruct_check(state: CodeState) -> bool:
    """True iff every k-subset of nodes spans the whole file."""
    import itertools

    params = state.params
    q = state.field.q
    for subset in itertools.combinations(range(params.n), params.k):
        rows = [
            [e for j in subset for e in state.Q[j].row(r)]
            for r in range(params.M)
        ]
        if rank_of_rows(rows, q) != params.M:
            return False
    return True


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def construct(
    params: Params,
    field: FieldConfig,
    hset: HSet,
    rng_seed: int,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    packet_width: int = 1,
) -> CodeState:
    """Sample uniform coding matrices until verification accepts.

    The sampling order is fixed (node 1 first, each matrix row-major),
    so one seed always yields one code.  Raises ConstructionFailed when
    max_attempts samples were all rejected.
    """
    bound = required_field_size(params, hset)
    below = field.q < bound
    if below:
        logger.warning(
            "field size %d is below the sufficient bound %d; construction may retry more",
            field.q,
            bound,
        )
    rng = _generator(rng_seed)
    q = field.q
    for attempt in range(1, max_attempts + 1):
        draws = rng.integers(0, q, size=(params.n, params.M, params.d), dtype=np.int64)
        matrices = tuple(
            FieldMatrix(
                params.M,
                params.d,
                tuple(int(v) for v in node_draw.reshape(-1)),
                field,
            )
            for node_draw in draws
        )
        state = CodeState(
            params=params,
            field=field,
            packet_width=packet_width,
            Q=matrices,
            attempts=attempt,
            field_below_bound=below,
        )
        if invariant_check(state, hset):
            return state
    raise ConstructionFailed(max_attempts)


def _validate_helpers(params: Params, failed: int, helpers: Sequence[int]) -> tuple[int, ...]:
    if not (1 <= failed <= params.n):
        raise InvalidHelpers(f"failed node {failed} outside 1..{params.n}")
    ordered = tuple(sorted(helpers))
    if len(set(ordered)) != len(ordered):
        raise InvalidHelpers(f"duplicate helpers in {helpers}")
    if len(ordered) != params.d:
        raise InvalidHelpers(f"need exactly d = {params.d} helpers, got {len(ordered)}")
    universe = helper_universe(params, failed)
    stray = [x for x in ordered if x not in universe]
    if stray:
        raise InvalidHelpers(
            f"helpers {stray} are not eligible for node {failed} (universe {sorted(universe)})"
        )
    return ordered


def apply_repair_plan(state: CodeState, plan: RepairPlan) -> CodeState:
    """Replace the failed node's matrix as the plan dictates.

    Performs no verification; callers decide whether to keep the
    result.
    """
    columns = [
        mat_mul(state.Q[x - 1], b) for x, b in zip(plan.helpers, plan.combine)
    ]
    replacement = mat_mul(mat_hstack(columns), plan.mix)
    new_q = list(state.Q)
    new_q[plan.failed - 1] = replacement
    return replace(state, Q=tuple(new_q))


def repair_random(
    state: CodeState,
    failed: int,
    helpers: Sequence[int],
    rng_seed: int,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> CodeState:
    """Regenerate one node from d helpers, one packet each.

    Coefficients are sampled uniformly; a candidate replacement is kept
    only if the whole state passes invariant_check again.  The returned
    state's attempts field counts the samples used.  States whose
    candidate was rejected are never returned or mutated.
    """
    params = state.params
    ordered = _validate_helpers(params, failed, helpers)
    hset = h_enumerate(params)
    rng = _generator(rng_seed)
    q = state.field.q
    d = params.d
    for attempt in range(1, max_attempts + 1):
        bs = rng.integers(0, q, size=(d, d), dtype=np.int64)
        zs = rng.integers(0, q, size=(d, d), dtype=np.int64)
        plan = RepairPlan(
            failed=failed,
            helpers=ordered,
            combine=tuple(
                FieldMatrix(d, 1, tuple(int(v) for v in bs[:, j]), state.field)
                for j in range(d)
            ),
            mix=FieldMatrix(d, d, tuple(int(v) for v in zs.reshape(-1)), state.field),
        )
        candidate = replace(apply_repair_plan(state, plan), attempts=attempt)
        if invariant_check(candidate, hset):
            return candidate
    raise RepairFailed(max_attempts)


def witness_repair_check(
    state: CodeState,
    failed: int,
    helpers: Sequence[int],
    h: Sequence[int],
    hset: HSet,
) -> bool:
    """Deterministic single-h repair witness.

    Runs the helper-increment procedure on h, then builds the plan it
    prescribes: the j-th incremented helper s_j contributes its column
    number h'_{s_j} (the one fresh column beyond the h_{s_j} already
    counted), the remaining helpers pad the unused trailing slots, and
    the mix matrix is the identity.  Returns whether the replaced
    state's selection under the original h keeps full column rank.
    """
    params = state.params
    h = tuple(h)
    if h not in hset:
        raise HNotMember(f"{h} is not admissible")
    ordered = _validate_helpers(params, failed, helpers)
    result = connect_run(params, h, ordered, failed)

    def unit(col: int) -> FieldMatrix:
        entries = [0] * params.d
        entries[col - 1] = 1
        return FieldMatrix(params.d, 1, tuple(entries), state.field)

    leftovers = [x for x in ordered if x not in set(result.incremented)]
    plan_helpers = tuple(result.incremented) + tuple(leftovers)
    combine = tuple(
        unit(result.h_prime[x - 1]) for x in result.incremented
    ) + tuple(unit(1) for _ in leftovers)
    plan = RepairPlan(
        failed=failed,
        helpers=plan_helpers,
        combine=combine,
        mix=identity(params.d, state.field),
    )
    candidate = apply_repair_plan(state, plan)
    want = sum(h)
    if want == 0:
        return True
    return rank_of_rows(_selection_rows(candidate, h), state.field.q) == want


def encode(state: CodeState, file: FieldMatrix) -> tuple[FieldMatrix, ...]:
    """Per-node stored packets: node i holds X^T Q_i, a W x d matrix
    read as d packets of W symbols."""
    if file.field != state.field:
        raise CodeError(f"file lives in GF({file.field.q}), code in GF({state.field.q})")
    if (file.rows, file.cols) != (state.params.M, state.packet_width):
        raise CodeError(
            f"file is {file.rows}x{file.cols}, code expects "
            f"{state.params.M}x{state.packet_width}"
        )
    xt = mat_transpose(file)
    return tuple(mat_mul(xt, qm) for qm in state.Q)


def decode(state: CodeState, nodes: Sequence[int], packets: Sequence[FieldMatrix]) -> FieldMatrix:
    """Recover the file X from the stored packets of >= k nodes.

    Solves X^T [Q_i ...] = [P_i ...] exactly; raises RankDeficient when
    the chosen nodes do not pin X down uniquely.
    """
    if len(nodes) != len(packets):
        raise CodeError(f"{len(nodes)} nodes but {len(packets)} packet blocks")
    if len(set(nodes)) != len(nodes):
        raise CodeError(f"duplicate nodes in {nodes}")
    if len(nodes) < state.params.k:
        raise RankDeficient(f"{len(nodes)} nodes cannot determine the file, need k = {state.params.k}")
    stacked_q = mat_hstack([state.Q[i - 1] for i in nodes])
    stacked_p = mat_hstack(list(packets))
    solution = mat_solve(mat_transpose(stacked_q), mat_transpose(stacked_p))
    if solution is None:
        raise RankDeficient(f"nodes {tuple(nodes)} do not span the file")
    return solution


def state_to_dict(state: CodeState) -> dict:
    """JSON form: {"params": {...}, "q": q, "W": w, "Q": [matrix, ...]}."""
    return {
        "params": params_to_dict(state.params),
        "q": state.field.q,
        "W": state.packet_width,
        "Q": [matrix_to_dict(qm) for qm in state.Q],
    }


def state_from_dict(d: dict) -> CodeState:
    params = params_from_dict(d["params"])
    field = field_new(int(d["q"]))
    matrices = tuple(matrix_from_dict(md) for md in d["Q"])
    return CodeState(
        params=params,
        field=field,
        packet_width=int(d["W"]),
        Q=matrices,
    )
