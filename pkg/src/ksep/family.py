"""Families of k-separated sets, intersection structure and samplers."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Union

from .core import (
    InputError,
    KSet,
    Params,
    elems_mask,
    enumerate_masks,
    mask_elems,
    separated,
)

SAMPLER_MODES = ("greedy", "star-seeded", "shift-active")
SHIFT_ACTIVE_RETRIES = 64


def _lex_key(mask: int) -> tuple[int, ...]:
    return mask_elems(mask)


@dataclass(frozen=True)
class Family:
    """A canonical, duplicate-free collection of sets over one ``Params``.

    Members are kept as bitmasks sorted in lexicographic order of their
    elements, so two families are equal exactly when their member lists are.
    Build instances with :meth:`of`; the raw constructor assumes canonical
    input.
    """

    params: Params
    masks: tuple[int, ...] = ()

    @classmethod
    def of(cls, params: Params, items: Iterable = (), validate: bool = False) -> "Family":
        masks = set()
        for item in items:
            if isinstance(item, KSet):
                if item.params.n != params.n:
                    raise InputError(f"set {item} lives on n={item.params.n}, not n={params.n}")
                masks.add(item.mask)
            elif isinstance(item, int):
                masks.add(item)
            else:
                masks.add(elems_mask(item))
        fam = cls(params, tuple(sorted(masks, key=_lex_key)))
        if validate:
            fam.validate()
        return fam

    def validate(self) -> None:
        """Raise InputError unless every member lies in [n]^(r)_k."""
        p = self.params
        for m in self.masks:
            elems = mask_elems(m)
            if m >> p.n or len(elems) != p.r or not separated(elems, p.n, p.k):
                raise InputError(f"{list(elems)} is not a {p.k}-separated {p.r}-subset of [{p.n}]")

    @property
    def members(self) -> tuple[KSet, ...]:
        return tuple(KSet(m, self.params) for m in self.masks)

    def __len__(self):
        return len(self.masks)

    def __iter__(self) -> Iterator[KSet]:
        return iter(self.members)

    def __contains__(self, item) -> bool:
        if isinstance(item, KSet):
            item = item.mask
        return item in set(self.masks)

    def __bool__(self):
        return bool(self.masks)

    def union(self, *others: "Family") -> "Family":
        masks = set(self.masks)
        for o in others:
            masks.update(o.masks)
        return Family(self.params, tuple(sorted(masks, key=_lex_key)))

    def difference(self, other: "Family") -> "Family":
        drop = set(other.masks)
        return Family(self.params, tuple(m for m in self.masks if m not in drop))

    def is_subfamily(self, other: "Family") -> bool:
        return set(self.masks) <= set(other.masks)

    def with_params(self, params: Params) -> "Family":
        """Reinterpret the same members under different parameters."""
        return Family(params, self.masks)

    # Serialisation: {"n":..,"k":..,"r":..,"sets":[[1,4,7],...]} and one set per line.

    def to_dict(self) -> dict:
        p = self.params
        return {"n": p.n, "k": p.k, "r": p.r, "sets": [list(mask_elems(m)) for m in self.masks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_lines(self) -> str:
        return "".join(" ".join(map(str, mask_elems(m))) + "\n" for m in self.masks)

    @classmethod
    def from_dict(cls, data: dict, validate: bool = True) -> "Family":
        try:
            params = Params(data["n"], data["k"], data["r"])
            sets = data["sets"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"family JSON needs keys n, k, r, sets: {exc}") from exc
        members = []
        for s in sets:
            if not isinstance(s, list):
                raise InputError(f"each set must be a list, got {s!r}")
            members.append(KSet.from_elems(s, params) if validate else elems_mask(s))
        return cls.of(params, members)

    @classmethod
    def from_json(cls, text: str, validate: bool = True) -> "Family":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid family JSON: {exc}") from exc
        return cls.from_dict(data, validate=validate)

    @classmethod
    def from_lines(cls, text: str, params: Params) -> "Family":
        members = []
        for line in text.splitlines():
            if line.strip():
                try:
                    members.append(KSet.from_elems([int(t) for t in line.split()], params))
                except ValueError as exc:
                    if isinstance(exc, InputError):
                        raise
                    raise InputError(f"cannot parse line {line!r}") from exc
        return cls.of(params, members)


def first_disjoint_pair(f: Family) -> Optional[tuple[KSet, KSet]]:
    """The lexicographically first pair of disjoint members, or None."""
    masks = f.masks
    for i, a in enumerate(masks):
        for b in masks[i + 1:]:
            if not a & b:
                return KSet(a, f.params), KSet(b, f.params)
    return None


def is_intersecting(f: Family) -> bool:
    """True iff every two members of ``f`` share an element."""
    masks = f.masks
    for i, a in enumerate(masks):
        for b in masks[i + 1:]:
            if not a & b:
                return False
    return True


def trace(f: Family, i: int) -> Family:
    """Members containing ``i``, with ``i`` removed.

    The result keeps the ground set [n] and has set size r - 1; separation
    is not re-checked.
    """
    p = f.params
    if not 1 <= i <= p.n:
        raise InputError(f"element {i} outside [1, {p.n}]")
    if p.r == 0:
        raise InputError("cannot trace a family of empty sets")
    bit = 1 << (i - 1)
    # Removing a shared element preserves the relative lex order.
    masks = tuple(m ^ bit for m in f.masks if m & bit)
    return Family(Params(p.n, p.k, p.r - 1), tuple(sorted(masks, key=_lex_key)))


def restrict_pair(f: Family, i: int, j: int) -> Family:
    """Members containing both ``i`` and ``j``."""
    p = f.params
    if i == j:
        raise InputError("restrict_pair needs two distinct elements")
    for a in (i, j):
        if not 1 <= a <= p.n:
            raise InputError(f"element {a} outside [1, {p.n}]")
    both = (1 << (i - 1)) | (1 << (j - 1))
    return Family(p, tuple(m for m in f.masks if m & both == both))


def star_masks(p: Params, x: int) -> tuple[int, ...]:
    if not 1 <= x <= p.n:
        raise InputError(f"element {x} outside [1, {p.n}]")
    bit = 1 << (x - 1)
    return tuple(m for m in enumerate_masks(p) if m & bit)


def star(p: Params, x: int) -> Family:
    """All k-separated r-sets containing ``x``."""
    if p.r == 0:
        raise InputError("stars need r >= 1")
    return Family(p, star_masks(p, x))


@dataclass(frozen=True)
class CompatGraph:
    """Intersection graph on [n]^(r)_k.

    ``vertices[v]`` is the mask of vertex ``v`` (enumeration order) and
    ``adjacency[v]`` the bitset of vertices meeting it.
    """

    params: Params
    vertices: tuple[int, ...]
    adjacency: tuple[int, ...]

    def __len__(self):
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return sum(a.bit_count() for a in self.adjacency) // 2

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def family(self, vertex_set: Iterable[int]) -> Family:
        return Family.of(self.params, (self.vertices[v] for v in vertex_set))

    def index(self) -> dict[int, int]:
        return {m: v for v, m in enumerate(self.vertices)}

    def is_clique(self, vertex_set: Iterable[int]) -> bool:
        vs = list(vertex_set)
        return all(self.adjacency[u] >> v & 1 for i, u in enumerate(vs) for v in vs[i + 1:])


def graph_from_masks(params: Params, masks: tuple[int, ...]) -> CompatGraph:
    # Build through per-element incidence bitsets: O(|V| r) big-int ORs.
    holders = [0] * params.n
    for v, m in enumerate(masks):
        for a in mask_elems(m):
            holders[a - 1] |= 1 << v
    adjacency = []
    for v, m in enumerate(masks):
        row = 0
        for a in mask_elems(m):
            row |= holders[a - 1]
        adjacency.append(row & ~(1 << v))
    return CompatGraph(params, masks, tuple(adjacency))


@lru_cache(maxsize=64)
def compatibility_graph(p: Params) -> CompatGraph:
    """Vertices [n]^(r)_k, edges between intersecting sets."""
    return graph_from_masks(p, enumerate_masks(p))


def has_shift_eligible(f: Family) -> bool:
    """Whether some member contains n but not n - k - 1."""
    p = f.params
    if p.n - p.k - 1 < 1:
        return False
    top = 1 << (p.n - 1)
    guard = 1 << (p.n - p.k - 2)
    return any(m & top and not m & guard for m in f.masks)


def _greedy(g: CompatGraph, rng: random.Random, density, chosen: list[int], allowed: int) -> None:
    order = list(range(len(g)))
    rng.shuffle(order)
    for v in order:
        if allowed >> v & 1 and rng.random() < density:
            chosen.append(v)
            allowed &= g.adjacency[v]


def sample_intersecting(
    p: Params,
    seed: int,
    density: Union[float, Fraction] = 0.5,
    mode: str = "greedy",
) -> Family:
    """Draw a random intersecting subfamily of [n]^(r)_k.

    ``greedy`` walks a seeded shuffle of the enumeration and keeps a set when
    it meets every kept set and a coin of bias ``density`` agrees.
    ``star-seeded`` keeps each member of a random star with probability
    ``density`` and then augments greedily.  ``shift-active`` reruns the
    greedy walk under derived seeds (at most 64 times) until some member
    contains n but not n - k - 1; if none does, the last draw is returned.
    Output depends only on the arguments.
    """
    if mode not in SAMPLER_MODES:
        raise InputError(f"unknown sampler mode {mode!r}; choose from {', '.join(SAMPLER_MODES)}")
    if not 0 <= density <= 1:
        raise InputError(f"density must lie in [0, 1], got {density}")
    if p.r < 1:
        raise InputError("the sampler needs r >= 1")
    if not p.nonempty:
        raise InputError(f"[{p.n}]^({p.r})_{p.k} is empty")
    g = compatibility_graph(p)
    everything = (1 << len(g)) - 1

    if mode == "greedy":
        chosen: list[int] = []
        _greedy(g, random.Random(seed), density, chosen, everything)
        return g.family(chosen)

    if mode == "star-seeded":
        rng = random.Random(seed)
        bit = 1 << (rng.randint(1, p.n) - 1)
        chosen = []
        allowed = everything
        for v, m in enumerate(g.vertices):
            if m & bit and rng.random() < density:
                chosen.append(v)
                allowed &= g.adjacency[v]
        _greedy(g, rng, density, chosen, allowed)
        return g.family(chosen)

    fam = Family(p)
    for attempt in range(SHIFT_ACTIVE_RETRIES):
        chosen = []
        _greedy(g, random.Random(seed * SHIFT_ACTIVE_RETRIES + attempt), density, chosen, everything)
        fam = g.family(chosen)
        if has_shift_eligible(fam):
            break
    return fam
