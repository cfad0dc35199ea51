"""Families, permutation scores, and the admissible selection set H.

Storage nodes 1..n are split into consecutive families of size
f = n - d - r (nodes 1..f, f+1..2f, and so on).  A newcomer replacing
node i may download only from nodes outside i's own family, so the
helper universe of every node has exactly d + r members.

A collector reading nodes in order pi gains information at a rate
described by the score vector b(pi): position i contributes
(d - z_i)+ packets, where z_i counts earlier nodes lying outside the
family of pi(i).  The supported file size M is the worst k-prefix total
of b over all n! orders.  The capped score c(pi) truncates b(pi) so it
totals exactly M.

H is the set of integer vectors h with 0 <= h_i <= d such that some
order sorting h nonincreasingly has a capped score weakly majorizing h.
Members of H index every rank condition a code has to satisfy, so the
whole verification story in this package runs through this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, cached_property
from typing import Iterator, NamedTuple, Sequence

H_ENUMERATION_LIMIT = 10_000_000


class ModelError(Exception):
    """Base class for parameter and score errors."""


class OutOfScope(ModelError):
    """Parameters violate the supported regime."""


class LengthMismatch(ModelError):
    """Vectors of different lengths were compared."""


class TooLarge(ModelError):
    """Enumeration would exceed the candidate budget."""


class PreconditionViolated(ModelError):
    """A caller-side precondition does not hold."""


class HNotMember(ModelError):
    """A selection vector was expected to belong to H but does not."""


@dataclass(frozen=True)
class Params:
    """Code parameters at the minimum-bandwidth point.

    n nodes, any k of which recover the file; repairs contact d helpers
    and tolerate r unavailable candidates.  Derived: file size M in
    packets, per-node storage alpha = d, per-helper transfer beta = 1.
    """

    n: int
    k: int
    d: int
    r: int
    M: int
    alpha: int
    beta: int

    @property
    def family_size(self) -> int:
        return self.n - self.d - self.r

    @property
    def num_families(self) -> int:
        return self.n // self.family_size


@dataclass(frozen=True)
class FamilyLayout:
    """family_of[i-1] is the 1-based family id of node i."""

    family_of: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]


class MembershipResult(NamedTuple):
    member: bool
    witness: "Perm | None"


@dataclass(frozen=True)
class Perm:
    """A permutation of nodes 1..n; order[i-1] is the node at position i."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.order)
        if sorted(self.order) != list(range(1, n + 1)):
            raise PreconditionViolated(f"{self.order} is not a permutation of 1..{n}")

    @cached_property
    def pos(self) -> dict[int, int]:
        """Inverse map: pos[node] is the 1-based position of node."""
        return {node: i + 1 for i, node in enumerate(self.order)}

    def position(self, node: int) -> int:
        return self.pos[node]


@dataclass(frozen=True)
class ScoreVector:
    """Raw and capped scores of one node order."""

    b: tuple[int, ...]
    c: tuple[int, ...]


def params_new(n: int, k: int, d: int, r: int) -> Params:
    """Validate (n, k, d, r) and derive M, alpha, beta.

    Scope: family size f = n - d - r at least 2 and dividing n.
    """
    for name, v in (("n", n), ("k", k), ("d", d), ("r", r)):
        if not isinstance(v, int):
            raise OutOfScope(f"{name} must be an integer, got {v!r}")
    if not (1 <= k <= n):
        raise OutOfScope(f"need 1 <= k <= n, got k={k}, n={n}")
    if d < 1:
        raise OutOfScope(f"need d >= 1, got d={d}")
    if r < 0:
        raise OutOfScope(f"need r >= 0, got r={r}")
    f = n - d - r
    if f < 2:
        raise OutOfScope(f"family size n-d-r = {f} is below 2")
    if n % f != 0:
        raise OutOfScope(f"family size {f} does not divide n = {n}")
    M = _min_prefix_total(n, k, d, f)
    assert M >= d, "the first reader position always contributes d packets"
    return Params(n=n, k=k, d=d, r=r, M=M, alpha=d, beta=1)


@lru_cache(maxsize=None)
def family_layout(params: Params) -> FamilyLayout:
    f = params.family_size
    family_of = tuple((i // f) + 1 for i in range(params.n))
    members = tuple(
        tuple(range(g * f + 1, (g + 1) * f + 1)) for g in range(params.num_families)
    )
    return FamilyLayout(family_of=family_of, members=members)


def helper_universe(params: Params, node: int) -> frozenset[int]:
    """All nodes outside node's family; exactly d + r of them."""
    if not (1 <= node <= params.n):
        raise OutOfScope(f"node {node} outside 1..{params.n}")
    layout = family_layout(params)
    g = layout.family_of[node - 1]
    return frozenset(i for i in range(1, params.n + 1) if layout.family_of[i - 1] != g)


def _prefix_scores(family_seq: Sequence[int], d: int, upto: int) -> list[int]:
    """b values for the first `upto` positions of a family-id sequence."""
    seen: dict[int, int] = {}
    out = []
    for i in range(upto):
        g = family_seq[i]
        same = seen.get(g, 0)
        z = i - same
        out.append(d - z if z < d else 0)
        seen[g] = same + 1
    return out


def _min_prefix_total(n: int, k: int, d: int, f: int) -> int:
    """Worst k-prefix score total over all node orders.

    Scores depend only on the family-id sequence, and families are
    interchangeable, so beyond n = 8 the search runs over canonical
    family sequences instead of raw permutations.
    """
    if n <= 8:
        family_of = tuple((i // f) + 1 for i in range(n))
        best = None
        for perm in itertools.permutations(range(1, n + 1)):
            seq = [family_of[node - 1] for node in perm[:k]]
            total = sum(_prefix_scores(seq, d, k))
            if best is None or total < best:
                best = total
        assert best is not None
        return best

    @lru_cache(maxsize=None)
    def best_from(i: int, remaining: tuple[int, ...]) -> int:
        if i == k:
            return 0
        out = None
        tried: set[int] = set()
        for idx, rem in enumerate(remaining):
            if rem == 0 or rem in tried:
                continue
            tried.add(rem)
            z = i - (f - rem)
            contrib = d - z if z < d else 0
            nxt = tuple(sorted(remaining[:idx] + remaining[idx + 1:] + (rem - 1,), reverse=True))
            total = contrib + best_from(i + 1, nxt)
            out = total if out is None or total < out else out
        assert out is not None
        return out

    return best_from(0, (f,) * (n // f))


def file_size(params: Params) -> int:
    """Recompute the supported file size M from scratch."""
    return _min_prefix_total(params.n, params.k, params.d, params.family_size)


def _truncate(b: Sequence[int], m_target: int) -> tuple[int, ...]:
    c = []
    running = 0
    for value in b:
        if running >= m_target:
            c.append(0)
            continue
        take = min(value, m_target - running)
        c.append(take)
        running += take
    assert running == m_target, "every order's full score total reaches M"
    return tuple(c)


def score_vectors(params: Params, perm: Perm) -> ScoreVector:
    """Raw score b and capped score c of one node order."""
    if len(perm.order) != params.n:
        raise LengthMismatch(f"order over {len(perm.order)} nodes, params say {params.n}")
    layout = family_layout(params)
    seq = [layout.family_of[node - 1] for node in perm.order]
    b = _prefix_scores(seq, params.d, params.n)
    return ScoreVector(b=tuple(b), c=_truncate(b, params.M))


def majorizes(a: Sequence[int], b: Sequence[int]) -> bool:
    """Weak majorization: every m-largest prefix of a covers b's."""
    if len(a) != len(b):
        raise LengthMismatch(f"lengths {len(a)} vs {len(b)}")
    sum_a = 0
    sum_b = 0
    for x, y in zip(sorted(a, reverse=True), sorted(b, reverse=True)):
        sum_a += x
        sum_b += y
        if sum_a < sum_b:
            return False
    return True


def _sorting_perms(params: Params, h: Sequence[int]) -> Iterator[Perm]:
    """All node orders along which h is nonincreasing, canonical first.

    Nodes are grouped by h value (descending); within a group every
    arrangement is a valid tie-break, and the ascending-index
    arrangement comes first.
    """
    groups: dict[int, list[int]] = {}
    for node in range(1, params.n + 1):
        groups.setdefault(h[node - 1], []).append(node)
    ordered_groups = [groups[v] for v in sorted(groups, reverse=True)]
    for arrangement in itertools.product(*(itertools.permutations(g) for g in ordered_groups)):
        yield Perm(tuple(itertools.chain.from_iterable(arrangement)))


def canonical_sorting_perm(params: Params, h: Sequence[int]) -> Perm:
    """Nodes by descending h value, ties by ascending node index."""
    order = sorted(range(1, params.n + 1), key=lambda node: (-h[node - 1], node))
    return Perm(tuple(order))


def h_membership(params: Params, h: Sequence[int], exhaustive: bool | None = None) -> MembershipResult:
    """Decide h in H, returning a witness order when it is.

    With family size 2 a single canonical sorting order decides
    membership (adjacent tied nodes can always be swapped without
    losing majorization), so the default mode checks just that one.
    Pass exhaustive=True to scan every sorting order instead; for
    family sizes above 2 the exhaustive scan is always used.
    """
    if len(h) != params.n:
        raise LengthMismatch(f"h over {len(h)} nodes, params say {params.n}")
    if any(v < 0 or v > params.d for v in h):
        return MembershipResult(False, None)
    if exhaustive is None:
        exhaustive = params.family_size != 2
    if not exhaustive:
        perm = canonical_sorting_perm(params, h)
        if majorizes(score_vectors(params, perm).c, h):
            return MembershipResult(True, perm)
        return MembershipResult(False, None)
    for perm in _sorting_perms(params, h):
        if majorizes(score_vectors(params, perm).c, h):
            return MembershipResult(True, perm)
    return MembershipResult(False, None)


@dataclass(frozen=True)
class HSet:
    """All members of H for one parameter set, in lexicographic order."""

    params: Params
    members: tuple[tuple[int, ...], ...]
    witnesses: tuple[tuple[int, ...], ...]

    @cached_property
    def _index(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.members)

    @cached_property
    def by_total_desc(self) -> tuple[tuple[int, ...], ...]:
        """Members ordered by descending coordinate total.

        Verification sweeps visit large selections first; those are the
        tightest rank conditions, so failures surface early.
        """
        return tuple(sorted(self.members, key=lambda h: (-sum(h), h)))

    def __contains__(self, h: object) -> bool:
        return tuple(h) in self._index  # type: ignore[arg-type]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.members)

    def witness_for(self, h: Sequence[int]) -> Perm:
        try:
            i = self.members.index(tuple(h))
        except ValueError:
            raise HNotMember(f"{tuple(h)} is not in H") from None
        return Perm(self.witnesses[i])


@lru_cache(maxsize=None)
def h_enumerate(params: Params) -> HSet:
    """Enumerate H by filtering all (d+1)^n candidates.

    Cached per parameter set; raises TooLarge when the candidate count
    exceeds the enumeration budget.
    """
    candidates = (params.d + 1) ** params.n
    if candidates > H_ENUMERATION_LIMIT:
        raise TooLarge(f"{candidates} candidate vectors exceed {H_ENUMERATION_LIMIT}")
    members = []
    witnesses = []
    for h in itertools.product(range(params.d + 1), repeat=params.n):
        result = h_membership(params, h)
        if result.member:
            members.append(h)
            assert result.witness is not None
            witnesses.append(result.witness.order)
    return HSet(params=params, members=tuple(members), witnesses=tuple(witnesses))


def swap_preserves(params: Params, h: Sequence[int], perm: Perm, i: int) -> bool:
    """Whether swapping tied positions i, i+1 keeps majorization of h.

    Precondition: family size 2, h nonincreasing along perm, and the
    nodes at positions i and i+1 (1-based) carry equal h values.
    """
    if params.family_size != 2:
        raise PreconditionViolated("tie-swap preservation is a family-size-2 statement")
    if len(h) != params.n or len(perm.order) != params.n:
        raise LengthMismatch("h and perm must both cover all n nodes")
    values = [h[node - 1] for node in perm.order]
    if any(values[j] < values[j + 1] for j in range(params.n - 1)):
        raise PreconditionViolated("h is not sorted along perm")
    if not (1 <= i <= params.n - 1):
        raise PreconditionViolated(f"position {i} has no successor")
    if values[i - 1] != values[i]:
        raise PreconditionViolated(
            f"positions {i},{i + 1} carry different h values {values[i - 1]},{values[i]}"
        )
    swapped = list(perm.order)
    swapped[i - 1], swapped[i] = swapped[i], swapped[i - 1]
    return majorizes(score_vectors(params, Perm(tuple(swapped))).c, h)


def params_to_dict(params: Params) -> dict:
    return {
        "n": params.n,
        "k": params.k,
        "d": params.d,
        "r": params.r,
        "M": params.M,
        "alpha": params.alpha,
        "beta": params.beta,
    }


def params_from_dict(d: dict) -> Params:
    params = params_new(int(d["n"]), int(d["k"]), int(d["d"]), int(d["r"]))
    for key in ("M", "alpha", "beta"):
        if key in d and int(d[key]) != getattr(params, key):
            raise OutOfScope(f"stored {key}={d[key]} disagrees with derived {getattr(params, key)}")
    return params
