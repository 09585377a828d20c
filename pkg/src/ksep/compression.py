"""The shift f, the compressed family A*, and the C / C* / D decomposition.

For a family A of k-separated r-sets on the n-cycle (k >= 1), the shift
moves n to n - 1 whenever n - k - 1 is absent.  One compression pass,

    A* = {f(A) : A in A}  u  {A in A : f(A) in A},

keeps |A*| = |A|.  A* then splits into

    C* = A*_n  u  A*_{1, n-k}  u ... u  A*_{k, n-1}
    D  = A* minus C*

where A*_n holds the members containing n and A*_{i,j} the members
containing both i and j.  Tracing n (resp. n - k - 1 + i) out of each piece
of C* gives C, a family of (r - 1)-sets on the shorter circle n - k - 1,
while D lives on the circle n - 1.  Both are intersecting, which yields

    |A| = |C| + |D| <= C(n-kr-2, r-2) + C(n-kr-2, r-1) = C(n-kr-1, r-1).

Nothing here is trusted: every claim above is evaluated as a named verdict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core import KSepError, KSet, Params, binomial, mask_elems, separated
from .family import (
    SAMPLER_MODES,
    Family,
    compatibility_graph,
    first_disjoint_pair,
    has_shift_eligible,
    is_intersecting,
    restrict_pair,
    sample_intersecting,
    trace,
)

VERDICTS = (
    "size_preserved",
    "top_trace_intersecting",
    "C_intersecting",
    "C_separated",
    "D_separated",
    "D_intersecting",
    "C_pieces_disjoint",
    "size_identity",
    "k1_equivalence",
)


class PreconditionError(KSepError, ValueError):
    """Input violates a precondition of the decomposition."""


class UnsupportedRegimeError(PreconditionError):
    """The compression argument needs k >= 1."""


def shift_mask(mask: int, n: int, k: int) -> int:
    top = 1 << (n - 1)
    guard_pos = n - k - 1
    if mask & top and (guard_pos < 1 or not mask >> (guard_pos - 1) & 1):
        return (mask ^ top) | (top >> 1)
    return mask


def shift(s: KSet) -> KSet:
    """Replace n by n - 1 when s contains n but not n - k - 1."""
    p = s.params
    if p.k == 0:
        raise UnsupportedRegimeError("the shift is only defined for k >= 1")
    return KSet(shift_mask(s.mask, p.n, p.k), p)


def compress_family(A: Family) -> Family:
    """One compression pass: A* = f(A) together with the members f cannot move."""
    p = A.params
    if p.k == 0:
        raise UnsupportedRegimeError("compression is only defined for k >= 1")
    present = set(A.masks)
    images = [shift_mask(m, p.n, p.k) for m in A.masks]
    kept = [m for m, fm in zip(A.masks, images) if fm in present]
    return Family.of(p, images + kept)


def k1_construction(Astar: Family) -> tuple[Family, Family]:
    """The dedicated k = 1 pieces: B = {B in A*: 1, n-1 in B} and C = B(n-1) u A*(n)."""
    p = Astar.params
    n = p.n
    one, below = 1, 1 << (n - 2)
    top = 1 << (n - 1)
    B = Family(p, tuple(m for m in Astar.masks if m & one and m & below))
    C = Family.of(
        Params(n, p.k, p.r - 1),
        [m ^ below for m in B.masks] + [m ^ top for m in Astar.masks if m & top],
    )
    return B, C


@dataclass(frozen=True)
class CompressionTrace:
    """Everything one compression step produces, plus verdicts on each claim."""

    params: Params
    A: Family
    Astar: Family
    An: Family
    pair_parts: tuple[Family, ...]
    C: Family
    Cstar: Family
    D: Family
    verdicts: dict = field(compare=False)
    info: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    @property
    def failed(self) -> list[str]:
        return [name for name, ok in self.verdicts.items() if not ok]

    @property
    def C_params(self) -> Params:
        p = self.params
        return Params(p.n - p.k - 1, p.k, p.r - 1)

    @property
    def D_params(self) -> Params:
        p = self.params
        return Params(p.n - 1, p.k, p.r)

    def C_family(self) -> Family:
        """C as a family on its own circle of length n - k - 1."""
        return self.C.with_params(self.C_params)

    def D_family(self) -> Family:
        """D as a family on its own circle of length n - 1."""
        return self.D.with_params(self.D_params)

    def sizes(self) -> dict:
        return {
            "A": len(self.A),
            "Astar": len(self.Astar),
            "An": len(self.An),
            "pair_parts": [len(f) for f in self.pair_parts],
            "C": len(self.C),
            "Cstar": len(self.Cstar),
            "D": len(self.D),
        }

    def to_dict(self, members: bool = False) -> dict:
        p = self.params
        out = {
            "n": p.n,
            "k": p.k,
            "r": p.r,
            "sizes": self.sizes(),
            "verdicts": dict(self.verdicts),
            "info": dict(self.info),
            "passed": self.passed,
        }
        if members:
            def sets(f):
                return [list(mask_elems(m)) for m in f.masks]

            out["members"] = {
                "A": sets(self.A),
                "Astar": sets(self.Astar),
                "An": sets(self.An),
                "pair_parts": [sets(f) for f in self.pair_parts],
                "C": sets(self.C),
                "Cstar": sets(self.Cstar),
                "D": sets(self.D),
            }
        return out


def _member_problems(A: Family) -> list[str]:
    p = A.params
    for m in A.masks:
        elems = mask_elems(m)
        if m >> p.n or len(elems) != p.r or not separated(elems, p.n, p.k):
            return [f"{list(elems)} is not in [{p.n}]^({p.r})_{p.k}"]
    pair = first_disjoint_pair(A)
    if pair is not None:
        return [f"family is not intersecting: {{{pair[0]}}} and {{{pair[1]}}} are disjoint"]
    return []


def _require_intersecting_members(A: Family) -> None:
    problems = _member_problems(A)
    if problems:
        raise PreconditionError(problems[0])


def _require(A: Family) -> None:
    """Raise naming every violated precondition of the decomposition."""
    p = A.params
    if p.k == 0:
        raise UnsupportedRegimeError("k = 0: the compression argument needs k >= 1")
    problems = []
    if p.r < 2:
        problems.append(f"r = {p.r}: the decomposition needs r >= 2")
    if p.n < (p.k + 1) * p.r + 1:
        problems.append(f"n = {p.n} < (k+1)r + 1 = {(p.k + 1) * p.r + 1}: n too small for the decomposition")
    problems += _member_problems(A)
    if problems:
        raise PreconditionError("; ".join(problems))


def _all_separated(f: Family, n: int, k: int, r: int) -> bool:
    for m in f.masks:
        elems = mask_elems(m)
        if len(elems) != r or (elems and elems[-1] > n) or not separated(elems, n, k):
            return False
    return True


def build_decomposition(A: Family) -> CompressionTrace:
    """Compress A once, split A* into C* and D, and evaluate every claim."""
    _require(A)
    p = A.params
    n, k, r = p.n, p.k, p.r

    Astar = compress_family(A)
    top = 1 << (n - 1)
    An = Family(p, tuple(m for m in Astar.masks if m & top))
    pair_parts = tuple(restrict_pair(Astar, i, n - k - 1 + i) for i in range(1, k + 1))
    pieces = (trace(An, n),) + tuple(
        trace(part, n - k - 1 + i) for i, part in enumerate(pair_parts, start=1)
    )
    C = pieces[0].union(*pieces[1:])
    Cstar = An.union(*pair_parts)
    D = Astar.difference(Cstar)

    low_k = (1 << k) - 1
    disjoint = True
    seen: set[int] = set()
    for piece in pieces:
        if seen & set(piece.masks):
            disjoint = False
        seen.update(piece.masks)
    # A*(n) avoids [k]; piece i avoids [k] minus {i}.
    if any(m & low_k for m in pieces[0].masks):
        disjoint = False
    for i, piece in enumerate(pieces[1:], start=1):
        others = low_k & ~(1 << (i - 1))
        if any(m & others for m in piece.masks):
            disjoint = False

    cstar_masks, d_masks = set(Cstar.masks), set(D.masks)
    verdicts = {
        "size_preserved": len(Astar) == len(A),
        "top_trace_intersecting": is_intersecting(pieces[0]),
        "C_intersecting": is_intersecting(C),
        "C_separated": _all_separated(C, n - k - 1, k, r - 1),
        "D_separated": _all_separated(D, n - 1, k, r),
        "D_intersecting": is_intersecting(D),
        "C_pieces_disjoint": disjoint and len(C) == len(Cstar),
        "size_identity": (
            not cstar_masks & d_masks
            and cstar_masks | d_masks == set(Astar.masks)
            and len(A) == len(Cstar) + len(D)
        ),
        "k1_equivalence": True,
    }
    if k == 1:
        B, C_k1 = k1_construction(Astar)
        verdicts["k1_equivalence"] = pair_parts[0] == B and C == C_k1

    info = {"Astar_intersecting": is_intersecting(Astar), "shift_moved": Astar != A}
    return CompressionTrace(p, A, Astar, An, pair_parts, C, Cstar, D, verdicts, info)


def check_proof_invariants(A: Family) -> dict[str, bool]:
    """Run the decomposition and return the nine named verdicts, in order."""
    return dict(build_decomposition(A).verdicts)


@dataclass(frozen=True)
class Certificate:
    """One node of an induction replay.

    ``kind`` is ``"r=1"``, ``"tight"`` (n = (k+1)r), ``"empty"`` or
    ``"split"``.  A split node certifies |A| = |C| + |D| with children on
    (n-k-1, k, r-1) and (n-1, k, r) whose bounds sum to ``bound``.
    """

    params: Params
    size: int
    bound: int
    kind: str
    holds: bool
    children: tuple["Certificate", ...] = ()
    failed: tuple[str, ...] = ()

    @property
    def certified(self) -> bool:
        return self.holds and all(c.certified for c in self.children)

    def node_count(self) -> int:
        return 1 + sum(c.node_count() for c in self.children)

    def to_dict(self) -> dict:
        p = self.params
        out = {
            "n": p.n,
            "k": p.k,
            "r": p.r,
            "size": self.size,
            "bound": self.bound,
            "kind": self.kind,
            "holds": self.holds,
            "certified": self.certified,
        }
        if self.failed:
            out["failed"] = list(self.failed)
        if self.children:
            out["children"] = [c.to_dict() for c in self.children]
        return out


def _bound(p: Params) -> int:
    return binomial(p.n - p.k * p.r - 1, p.r - 1)


def _replay(A: Family) -> Certificate:
    p = A.params
    bound = _bound(p)
    size = len(A)
    if p.r == 1 or p.n == (p.k + 1) * p.r:
        # Singletons meet only when equal; at n = (k+1)r the k+1 sets are pairwise disjoint.
        return Certificate(p, size, bound, "r=1" if p.r == 1 else "tight", size <= 1 and bound == 1)
    if size == 0:
        return Certificate(p, 0, bound, "empty", bound >= 0)

    t = build_decomposition(A)
    if not t.passed:
        return Certificate(p, size, bound, "split", False, failed=tuple(t.failed))
    left = _replay(t.C_family())
    right = _replay(t.D_family())
    holds = (
        size == len(t.C) + len(t.D)
        and left.bound + right.bound == bound
        and left.size <= left.bound
        and right.size <= right.bound
        and size <= bound
    )
    return Certificate(p, size, bound, "split", holds, (left, right))


def replay_induction(A: Family) -> Certificate:
    """Recursively decompose A and certify |A| <= C(n-kr-1, r-1) at every node."""
    p = A.params
    if p.k == 0:
        raise UnsupportedRegimeError("k = 0: the induction replay needs k >= 1")
    if p.r < 1:
        raise PreconditionError("r must be at least 1")
    if not p.nonempty:
        raise PreconditionError(f"n = {p.n} < (k+1)r = {(p.k + 1) * p.r}: no sets exist")
    _require_intersecting_members(A)
    return _replay(A)


SAMPLE_DENSITIES = (0.25, 0.5, 0.75, 1.0)


@dataclass
class ProofCheckSummary:
    """Verdict tallies over many input families for one (n, k, r)."""

    params: Params
    source: str
    families: int = 0
    passes: dict = field(default_factory=lambda: {name: 0 for name in VERDICTS})
    failures: list = field(default_factory=list)
    shift_eligible: int = 0
    shift_moved: int = 0
    astar_intersecting: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def add(self, label: str, A: Family) -> None:
        t = build_decomposition(A)
        self.families += 1
        for name, ok in t.verdicts.items():
            self.passes[name] += ok
        if not t.passed:
            self.failures.append({"family": label, "sets": A.to_dict()["sets"], "failed": t.failed})
        self.shift_eligible += has_shift_eligible(A)
        self.shift_moved += t.info["shift_moved"]
        self.astar_intersecting += t.info["Astar_intersecting"]

    def to_dict(self) -> dict:
        p = self.params
        return {
            "n": p.n,
            "k": p.k,
            "r": p.r,
            "source": self.source,
            "families": self.families,
            "passed": self.passed,
            "verdict_passes": dict(self.passes),
            "shift_eligible": self.shift_eligible,
            "shift_moved": self.shift_moved,
            "astar_intersecting": self.astar_intersecting,
            "failures": self.failures[:20],
        }


def sample_plan(samples: int, seed: int) -> list[tuple[int, float, str]]:
    """(seed, density, mode) triples: modes cycle fastest, then densities."""
    rng = random.Random(seed)
    plan = []
    for i in range(samples):
        mode = SAMPLER_MODES[i % len(SAMPLER_MODES)]
        density = SAMPLE_DENSITIES[(i // len(SAMPLER_MODES)) % len(SAMPLE_DENSITIES)]
        plan.append((rng.randrange(1 << 32), density, mode))
    return plan


def check_sampled(p: Params, samples: int = 1000, seed: int = 0) -> ProofCheckSummary:
    """Run the checker on ``samples`` seeded random intersecting families."""
    summary = ProofCheckSummary(p, f"sampled(samples={samples}, seed={seed})")
    _require(Family(p))
    for s, density, mode in sample_plan(samples, seed):
        A = sample_intersecting(p, s, density, mode)
        summary.add(f"{mode}/{density}/{s}", A)
    return summary


def check_exhaustive(p: Params, vertex_cap: int = 24) -> ProofCheckSummary:
    """Run the checker on every intersecting family, i.e. every clique of the compatibility graph."""
    from .search import CapacityError, iter_cliques

    _require(Family(p))
    g = compatibility_graph(p)
    if len(g) > vertex_cap:
        raise CapacityError(f"{p}: {len(g)} sets exceed the exhaustive cap of {vertex_cap}")
    summary = ProofCheckSummary(p, "exhaustive")
    for i, clique in enumerate(iter_cliques(g.adjacency)):
        summary.add(f"clique#{i}", g.family(clique))
    return summary
