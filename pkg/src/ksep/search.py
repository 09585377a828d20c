"""Exact maximum intersecting families via maximum clique search.

Intersecting subfamilies of [n]^(r)_k are exactly the cliques of the
compatibility graph.  The solver is a bitset branch and bound in the MCS
style: greedy colouring gives the upper bound, and vertices that colouring
alone cannot prune are filtered by unit propagation over colour classes
(a set of classes from which no clique can pick one vertex each lowers the
bound by one).  Without that filter the near-threshold cases such as
n = 2r + 1 with k = 0 are out of reach.

A Bron-Kerbosch enumeration serves as the independent brute-force oracle.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .core import InputError, KSepError, Params, count_k_separated, enumerate_masks, predicted_bound
from .family import CompatGraph, Family, compatibility_graph, star_masks

DEFAULT_VERTEX_CAP = 20000
BRUTE_FORCE_CAP = 24
CSV_HEADER = ("n", "k", "r", "family_size", "optimum", "predicted", "match", "nodes", "millis")


class CapacityError(KSepError):
    """Instance too large for the requested exact method."""


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def degeneracy_order(adjacency: Sequence[int]) -> list[int]:
    """Vertices ordered so that each has the most neighbours among those after it.

    Repeatedly strips a minimum-degree vertex (lowest index on ties); the
    stripping sequence is reversed.
    """
    m = len(adjacency)
    alive = (1 << m) - 1
    degree = [a.bit_count() for a in adjacency]
    buckets: dict[int, set[int]] = {}
    for v, d in enumerate(degree):
        buckets.setdefault(d, set()).add(v)
    removed = []
    d = 0
    for _ in range(m):
        d = max(d - 1, 0)
        while not buckets.get(d):
            d += 1
        v = min(buckets[d])
        buckets[d].discard(v)
        removed.append(v)
        alive &= ~(1 << v)
        for u in _bits(adjacency[v] & alive):
            buckets[degree[u]].discard(u)
            degree[u] -= 1
            buckets.setdefault(degree[u], set()).add(u)
    removed.reverse()
    return removed


def greedy_classes(adjacency: Sequence[int], order: Iterable[int]) -> list[list[int]]:
    """Sequential greedy colouring: each vertex joins the first class it has no edge into."""
    classes: list[list[int]] = []
    masks: list[int] = []
    for v in order:
        row = adjacency[v]
        for i, m in enumerate(masks):
            if not row & m:
                masks[i] = m | (1 << v)
                classes[i].append(v)
                break
        else:
            masks.append(1 << v)
            classes.append([v])
    return classes


def dsatur_classes(adjacency: Sequence[int]) -> list[list[int]]:
    """DSATUR colouring: always colour the vertex seeing the most distinct colours."""
    m = len(adjacency)
    colour = [-1] * m
    seen = [0] * m
    degree = [a.bit_count() for a in adjacency]
    uncoloured = set(range(m))
    for _ in range(m):
        v = max(uncoloured, key=lambda u: (seen[u].bit_count(), degree[u], -u))
        uncoloured.discard(v)
        used = seen[v]
        c = 0
        while used >> c & 1:
            c += 1
        colour[v] = c
        for u in _bits(adjacency[v]):
            seen[u] |= 1 << c
    classes: dict[int, list[int]] = {}
    for v in range(m):
        classes.setdefault(colour[v], []).append(v)
    return [classes[c] for c in sorted(classes)]


DSATUR_LIMIT = 3000


def colour_order(adjacency: Sequence[int], rounds: int = 20) -> list[int]:
    """Vertices grouped by the classes of a good colouring, largest class first.

    Greedy colouring in this order reproduces the colouring, so the root
    bound starts from it and subproblems inherit its structure.  The
    colouring is DSATUR (small graphs) or plain greedy, polished by
    iterated greedy recolouring, which never increases the class count.
    """
    m = len(adjacency)
    best = greedy_classes(adjacency, range(m))
    if m <= DSATUR_LIMIT:
        alt = dsatur_classes(adjacency)
        if len(alt) < len(best):
            best = alt
    for it in range(rounds):
        if it % 2 == 0:
            ordered = sorted(best, key=lambda c: (-len(c), min(c)))
        else:
            ordered = best[::-1]
        trial = greedy_classes(adjacency, [v for c in ordered for v in sorted(c)])
        if len(trial) <= len(best):
            best = trial
    best.sort(key=lambda c: (-len(c), min(c)))
    return [v for c in best for v in sorted(c)]


ORDERINGS = ("colour", "degeneracy", "natural")


class CliqueSearch:
    """Branch and bound maximum clique on bitset adjacency.

    Deterministic: vertex order and tie-breaking depend only on the graph.
    ``ordering`` fixes the internal vertex order (``colour`` groups vertices
    by the classes of a good initial colouring).  ``orbits`` optionally
    lists vertex sets that are orbits of a graph automorphism group; the top
    level then branches once per orbit (experimental).
    """

    def __init__(
        self,
        adjacency: Sequence[int],
        orbits: Optional[Sequence[Iterable[int]]] = None,
        ordering: str = "colour",
    ):
        if ordering not in ORDERINGS:
            raise InputError(f"unknown ordering {ordering!r}")
        self.size = len(adjacency)
        if ordering == "colour":
            order = colour_order(adjacency)
        elif ordering == "degeneracy":
            order = degeneracy_order(adjacency)
        else:
            order = list(range(self.size))
        pos = [0] * self.size
        for i, v in enumerate(order):
            pos[v] = i
        self.order = order
        self.adj = []
        for v in order:
            row = 0
            for u in _bits(adjacency[v]):
                row |= 1 << pos[u]
            self.adj.append(row)
        self.pos = pos
        self.orbits = None
        if orbits is not None:
            self.orbits = [sorted(pos[v] for v in orb) for orb in orbits]
        self.nodes = 0
        self.best: list[int] = []

    def solve(self, lower_bound_hint: int = 0, hint_clique: Optional[Sequence[int]] = None) -> tuple[int, list[int]]:
        """Return the clique number and a witness (original vertex ids, ascending).

        With ``hint_clique`` the search starts from that clique as incumbent.
        A bare ``lower_bound_hint`` h only lets the search ignore cliques of
        size below h; it must not exceed the clique number.
        """
        self.nodes = 0
        adj = self.adj
        if hint_clique is not None:
            local = [self.pos[v] for v in hint_clique]
            for i, u in enumerate(local):
                for v in local[i + 1:]:
                    if not adj[u] >> v & 1:
                        raise InputError("hint_clique is not a clique")
            self.best = sorted(local)
            floor = len(local)
        else:
            self.best = []
            floor = max(lower_bound_hint - 1, 0)
        self._floor = floor
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, self.size + 1000))
        try:
            everything = (1 << self.size) - 1
            if self.orbits is None:
                self._expand([], everything)
            else:
                remaining = everything
                for orb in self.orbits:
                    v = orb[0]
                    self.nodes += 1
                    self._branch([v], remaining & adj[v])
                    for u in orb:
                        remaining &= ~(1 << u)
        finally:
            sys.setrecursionlimit(limit)
        if len(self.best) < lower_bound_hint:
            raise InputError(f"lower_bound_hint {lower_bound_hint} exceeds the clique number {len(self.best)}")
        witness = sorted(self.order[v] for v in self.best)
        return len(witness), witness

    def _target(self) -> int:
        return max(len(self.best), self._floor)

    def _branch(self, R: list[int], P: int) -> None:
        if P:
            self._expand(R, P)
        elif len(R) > self._target():
            self.best = list(R)

    def _colour(self, P: int) -> tuple[list[int], dict[int, int]]:
        adj = self.adj
        classes = []
        where = {}
        U = P
        c = 0
        while U:
            Q = U
            cls = 0
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                cls |= low
                where[v] = c
                Q &= ~(adj[v] | low)
            U &= ~cls
            classes.append(cls)
            c += 1
        return classes, where

    def _unresolved(self, classes: list[int], where: dict[int, int], kmin: int) -> list[int]:
        """Vertices beyond the first kmin classes that unit propagation cannot absorb.

        Each candidate v is treated as a singleton class and propagated over
        the unretired classes among the first kmin: a class left with one
        vertex forces it, and a class emptied by forced vertices proves that
        no clique picks one vertex from each class involved.  Those classes
        (traced through recorded reasons) retire together with v, lowering
        the bound by one.
        """
        adj = self.adj
        rem = classes[:kmin]
        live = 0
        for c in rem:
            live |= c
        out = []
        for c in range(len(classes) - 1, kmin - 1, -1):
            Q = classes[c]
            while Q:
                low = Q & -Q
                Q ^= low
                v = low.bit_length() - 1
                work: dict[int, int] = {}
                reason: dict[int, list[int]] = {}
                queue = [v]
                sources = [-1]
                conflict = -1
                qi = 0
                while qi < len(queue):
                    u = queue[qi]
                    src = sources[qi]
                    qi += 1
                    X = live & ~adj[u] & ~(1 << u)
                    while X:
                        bit = X & -X
                        X ^= bit
                        i = where[bit.bit_length() - 1]
                        x = work.get(i)
                        if x is None:
                            x = rem[i]
                        if not x & bit:
                            continue
                        x ^= bit
                        work[i] = x
                        why = reason.get(i)
                        if why is None:
                            reason[i] = [src]
                        else:
                            why.append(src)
                        if not x:
                            conflict = i
                            break
                        if not x & (x - 1):
                            # forced; a later clash empties the class
                            queue.append(x.bit_length() - 1)
                            sources.append(i)
                    if conflict >= 0:
                        break
                if conflict < 0:
                    out.append(v)
                    continue
                involved = set()
                stack = [conflict]
                while stack:
                    i = stack.pop()
                    if i >= 0 and i not in involved:
                        involved.add(i)
                        stack.extend(reason.get(i, ()))
                for i in involved:
                    live &= ~rem[i]
        out.reverse()
        return out

    def _expand(self, R: list[int], P: int) -> None:
        self.nodes += 1
        classes, where = self._colour(P)
        kmin = self._target() - len(R)
        if len(classes) <= kmin:
            return
        if kmin < 0:
            kmin = 0
        branch = self._unresolved(classes, where, kmin)
        adj = self.adj
        start = self._target()
        for idx in range(len(branch) - 1, -1, -1):
            if self._target() - start >= idx + 1:
                return
            v = branch[idx]
            R.append(v)
            self._branch(R, P & adj[v])
            R.pop()
            P &= ~(1 << v)


def max_clique(
    g: CompatGraph,
    lower_bound_hint: int = 0,
    hint_clique: Optional[Sequence[int]] = None,
    symmetry: bool = False,
    ordering: str = "colour",
) -> tuple[int, list[int]]:
    """Exact maximum clique of ``g``: (size, ascending vertex ids)."""
    orbits = rotation_orbits(g) if symmetry else None
    return CliqueSearch(g.adjacency, orbits, ordering).solve(lower_bound_hint, hint_clique)


def rotation_orbits(g: CompatGraph) -> list[list[int]]:
    """Orbits of the vertices under rotation of the circle."""
    from .core import rotate_mask

    n = g.params.n
    index = g.index()
    seen = set()
    orbits = []
    for v, m in enumerate(g.vertices):
        if v in seen:
            continue
        orb = sorted({index[rotate_mask(m, d, n)] for d in range(n)})
        seen.update(orb)
        orbits.append(orb)
    return orbits


def bron_kerbosch_max(adjacency: Sequence[int]) -> tuple[int, list[int], int]:
    """Largest maximal clique by Bron-Kerbosch with Tomita pivoting.

    No bounding: every maximal clique is visited.  Returns (size, witness,
    calls); the witness is the first maximum clique met.
    """
    best: list[int] = []
    calls = 0

    def bk(R: list[int], P: int, X: int) -> None:
        nonlocal best, calls
        calls += 1
        if not P and not X:
            if len(R) > len(best):
                best = list(R)
            return
        pivot = max(_bits(P | X), key=lambda u: (P & adjacency[u]).bit_count())
        for v in _bits(P & ~adjacency[pivot]):
            R.append(v)
            bk(R, P & adjacency[v], X & adjacency[v])
            R.pop()
            P &= ~(1 << v)
            X |= 1 << v

    if adjacency:
        bk([], (1 << len(adjacency)) - 1, 0)
    return len(best), sorted(best), calls


def iter_cliques(adjacency: Sequence[int]) -> Iterator[list[int]]:
    """Every clique, including the empty one, each exactly once."""

    def rec(R: list[int], P: int) -> Iterator[list[int]]:
        yield list(R)
        for v in _bits(P):
            R.append(v)
            yield from rec(R, P & adjacency[v] & ~((1 << (v + 1)) - 1))
            R.pop()

    yield from rec([], (1 << len(adjacency)) - 1)


def _pairwise_adjacency(masks: Sequence[int]) -> list[int]:
    # Direct pairwise construction, independent of the incidence-based builder.
    m = len(masks)
    adj = [0] * m
    for i in range(m):
        for j in range(i + 1, m):
            if masks[i] & masks[j]:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def brute_force_max(p: Params, cap: int = BRUTE_FORCE_CAP) -> int:
    """Maximum intersecting subfamily size by exhaustive maximal-clique scan."""
    return _brute_force(p, cap)[0]


def _brute_force(p: Params, cap: int) -> tuple[int, list[int], int]:
    masks = enumerate_masks(p)
    if len(masks) > cap:
        raise CapacityError(f"{p}: {len(masks)} sets exceed the brute-force cap of {cap}")
    size, witness, calls = bron_kerbosch_max(_pairwise_adjacency(masks))
    return size, [masks[v] for v in witness], calls


@dataclass(frozen=True)
class SearchResult:
    """Outcome of one exact search."""

    params: Params
    optimum: int
    witness: Family
    predicted: int
    match: bool
    nodes_explored: int
    elapsed: float = field(compare=False)
    family_size: int = 0
    method: str = "clique"

    def row(self, timing: bool = False) -> list[str]:
        p = self.params
        millis = f"{self.elapsed * 1000:.1f}" if timing else ""
        return [
            str(p.n), str(p.k), str(p.r), str(self.family_size), str(self.optimum),
            str(self.predicted), "true" if self.match else "false", str(self.nodes_explored), millis,
        ]

    def to_dict(self, witness: bool = False, timing: bool = False) -> dict:
        p = self.params
        out = {
            "n": p.n,
            "k": p.k,
            "r": p.r,
            "family_size": self.family_size,
            "optimum": self.optimum,
            "predicted": self.predicted,
            "match": self.match,
            "nodes": self.nodes_explored,
            "method": self.method,
        }
        if timing:
            out["millis"] = round(self.elapsed * 1000, 1)
        if witness:
            out["witness"] = self.witness.to_dict()["sets"]
        return out


def max_intersecting(
    p: Params,
    method: str = "clique",
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    symmetry: bool = False,
) -> SearchResult:
    """Largest intersecting subfamily of [n]^(r)_k, compared with the predicted bound."""
    if p.r < 1:
        raise InputError("max_intersecting needs r >= 1")
    if method not in ("clique", "bruteforce"):
        raise InputError(f"unknown method {method!r}")
    predicted = predicted_bound(p)
    size = count_k_separated(p)
    start = time.perf_counter()
    if size == 0:
        return SearchResult(p, 0, Family(p), predicted, predicted == 0, 0, time.perf_counter() - start, 0, method)

    if method == "bruteforce":
        cap = BRUTE_FORCE_CAP if vertex_cap == DEFAULT_VERTEX_CAP else vertex_cap
        optimum, witness_masks, nodes = _brute_force(p, cap)
        witness = Family.of(p, witness_masks)
    else:
        if size > vertex_cap:
            raise CapacityError(f"{p}: {size} sets exceed the vertex cap of {vertex_cap}")
        g = compatibility_graph(p)
        index = g.index()
        hint = [index[m] for m in star_masks(p, 1)]
        solver = CliqueSearch(g.adjacency, rotation_orbits(g) if symmetry else None)
        optimum, vertices = solver.solve(len(hint), hint)
        nodes = solver.nodes
        witness = g.family(vertices)
    elapsed = time.perf_counter() - start
    return SearchResult(p, optimum, witness, predicted, optimum == predicted, nodes, elapsed, size, method)


@dataclass
class Sweep:
    """Rows of a bound sweep plus any instances that were refused."""

    rows: list[SearchResult] = field(default_factory=list)
    errors: list[tuple[Params, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors and all(r.match for r in self.rows)

    @property
    def mismatches(self) -> list[SearchResult]:
        return [r for r in self.rows if not r.match]

    def to_csv(self, timing: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(r.row(timing))
        for p, _ in self.errors:
            w.writerow([p.n, p.k, p.r, count_k_separated(p), "", predicted_bound(p), "capacity", "", ""])
        return buf.getvalue()

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(
            {
                "passed": self.passed,
                "rows": [r.to_dict(timing=timing) for r in self.rows],
                "errors": [{"n": p.n, "k": p.k, "r": p.r, "error": msg} for p, msg in self.errors],
            },
            indent=2,
        )


def verify_bound_sweep(grid: Iterable[Params], method: str = "clique", vertex_cap: int = DEFAULT_VERTEX_CAP) -> Sweep:
    """Solve every instance of ``grid`` in order; refused instances are recorded, not fatal."""
    sweep = Sweep()
    for p in grid:
        try:
            sweep.rows.append(max_intersecting(p, method, vertex_cap))
        except CapacityError as exc:
            sweep.errors.append((p, str(exc)))
    return sweep


def bound_grid(k_values: Iterable[int], r_values: Iterable[int], n_max: int) -> list[Params]:
    """All (n, k, r) with (k+1)r <= n <= n_max."""
    return [
        Params(n, k, r)
        for k in k_values
        for r in r_values
        for n in range((k + 1) * r, n_max + 1)
    ]


def ekr_grid(r_values: Iterable[int], n_max: int) -> list[Params]:
    """k = 0 instances with 2r <= n <= n_max."""
    return [Params(n, 0, r) for r in r_values for n in range(max(2 * r, 1), n_max + 1)]
