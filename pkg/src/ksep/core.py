"""Ground-set arithmetic for k-separated subsets of the n-cycle.

Elements are 1-based.  A set is stored as a bitmask where element ``a``
occupies bit ``a - 1``; ground sets are capped at 64 points so every set
fits one machine word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

MAX_N = 64


class KSepError(Exception):
    """Base class for errors raised by this package."""


class InputError(KSepError, ValueError):
    """Malformed input: bad parameters, out-of-range or unsorted elements."""


@dataclass(frozen=True, order=True)
class Params:
    """The triple (n, k, r): circle length, separation gap, set size.

    ``r = 0`` is admitted so that traces of singleton families have a home;
    the only 0-set is the empty set.
    """

    n: int
    k: int
    r: int

    def __post_init__(self):
        for name in ("n", "k", "r"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise InputError(f"{name} must be an integer, got {value!r}")
        if not 1 <= self.n <= MAX_N:
            raise InputError(f"n must lie in [1, {MAX_N}], got {self.n}")
        if self.k < 0:
            raise InputError(f"k must be non-negative, got {self.k}")
        if self.r < 0:
            raise InputError(f"r must be non-negative, got {self.r}")

    @property
    def nonempty(self) -> bool:
        """True iff at least one k-separated r-set exists."""
        return self.n >= (self.k + 1) * self.r

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def __str__(self):
        return f"(n={self.n}, k={self.k}, r={self.r})"


@lru_cache(maxsize=1 << 16)
def mask_elems(mask: int) -> tuple[int, ...]:
    """Ascending 1-based elements of a bitmask."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return tuple(out)


def elems_mask(elems: Iterable[int]) -> int:
    mask = 0
    for a in elems:
        mask |= 1 << (a - 1)
    return mask


def _check_elems(elems: Sequence[int], n: int) -> None:
    prev = 0
    for a in elems:
        if isinstance(a, bool) or not isinstance(a, int):
            raise InputError(f"elements must be integers, got {a!r}")
        if not 1 <= a <= n:
            raise InputError(f"element {a} outside [1, {n}]")
        if a <= prev:
            raise InputError(f"elements must be strictly ascending: {list(elems)}")
        prev = a


def separated(elems: Sequence[int], n: int, k: int) -> bool:
    # Unchecked form of is_k_separated for hot loops.
    r = len(elems)
    if r == 0:
        return True
    for i in range(r - 1):
        if elems[i + 1] <= elems[i] + k:
            return False
    return elems[0] + n > elems[-1] + k


def is_k_separated(elems: Sequence[int], n: int, k: int) -> bool:
    """Return True iff ``elems`` is k-separated on the circle of length ``n``.

    Every consecutive gap, including the wrap-around gap
    ``elems[0] + n - elems[-1]``, must exceed ``k``.  Raises
    :class:`InputError` when ``elems`` is not strictly ascending in [1, n].
    """
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    if k < 0:
        raise InputError(f"k must be non-negative, got {k}")
    elems = tuple(elems)
    _check_elems(elems, n)
    return separated(elems, n, k)


@dataclass(frozen=True)
class KSet:
    """One r-element subset of [n] held as a bitmask.

    ``elems`` is a cache derived from ``mask``.  Instances built through
    :meth:`from_elems` or :meth:`from_mask` are validated against ``params``;
    the raw constructor is used internally for derived sets (traces) whose
    separation is checked elsewhere.
    """

    mask: int
    params: Params
    elems: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "elems", mask_elems(self.mask))

    @classmethod
    def from_elems(cls, elems: Iterable[int], params: Params) -> "KSet":
        elems = tuple(elems)
        _check_elems(elems, params.n)
        if len(elems) != params.r:
            raise InputError(f"expected {params.r} elements, got {len(elems)}")
        if not separated(elems, params.n, params.k):
            raise InputError(f"{list(elems)} is not {params.k}-separated mod {params.n}")
        return cls(elems_mask(elems), params)

    @classmethod
    def from_mask(cls, mask: int, params: Params) -> "KSet":
        if mask < 0 or mask >> params.n:
            raise InputError(f"mask {mask:#x} has bits outside [1, {params.n}]")
        return cls.from_elems(mask_elems(mask), params)

    def __len__(self):
        return len(self.elems)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elems)

    def __contains__(self, a) -> bool:
        return isinstance(a, int) and 1 <= a <= MAX_N and bool(self.mask >> (a - 1) & 1)

    def __lt__(self, other: "KSet") -> bool:
        return self.elems < other.elems

    def __str__(self):
        return " ".join(map(str, self.elems))

    def __repr__(self):
        return f"KSet({{{', '.join(map(str, self.elems))}}}, n={self.params.n})"

    def is_valid(self) -> bool:
        p = self.params
        return len(self.elems) == p.r and not self.mask >> p.n and separated(self.elems, p.n, p.k)


def _extend(prefix: list[int], last: int, limit: int, remaining: int, step: int) -> Iterator[tuple[int, ...]]:
    # Choose `remaining` more elements, each at least `step` past the previous,
    # the final one no larger than `limit`.
    if remaining == 0:
        yield tuple(prefix)
        return
    top = limit - (remaining - 1) * step
    for a in range(last + step, top + 1):
        prefix.append(a)
        yield from _extend(prefix, a, limit, remaining - 1, step)
        prefix.pop()


def iter_k_separated(p: Params) -> Iterator[tuple[int, ...]]:
    """Element tuples of [n]^(r)_k in lexicographic order."""
    n, k, r = p.n, p.k, p.r
    if r == 0:
        yield ()
        return
    if not p.nonempty:
        return
    step = k + 1
    for a1 in range(1, n + 1):
        # wrap condition: a_r + k < a_1 + n
        limit = min(n, a1 + n - step)
        if a1 + (r - 1) * step > limit:
            continue
        yield from _extend([a1], a1, limit, r - 1, step)


def enumerate_k_separated(p: Params) -> list[KSet]:
    """Every k-separated r-subset of [n], once each, in lexicographic order."""
    return [KSet(elems_mask(e), p) for e in iter_k_separated(p)]


@lru_cache(maxsize=256)
def enumerate_masks(p: Params) -> tuple[int, ...]:
    """Bitmasks of [n]^(r)_k in lexicographic order of their elements."""
    return tuple(elems_mask(e) for e in iter_k_separated(p))


def count_k_separated(p: Params) -> int:
    """Closed-form size of [n]^(r)_k: n/(n - kr) * C(n - kr, r)."""
    n, k, r = p.n, p.k, p.r
    if n < (k + 1) * r:
        return 0
    m = n - k * r
    return n * comb(m, r) // m


def binomial(a: int, b: int) -> int:
    """Exact C(a, b); zero when b < 0 or a < b."""
    if b < 0 or a < b:
        return 0
    return comb(a, b)


def predicted_bound(p: Params) -> int:
    """Largest intersecting subfamily size of [n]^(r)_k predicted by theory.

    C(n - kr - 1, r - 1) whenever the family is nonempty; for k = 0 this is
    the classical C(n - 1, r - 1), valid for n >= 2r.  Below that threshold
    with k = 0 every two r-sets meet, so the whole family C(n, r) qualifies.
    """
    n, k, r = p.n, p.k, p.r
    if r == 0:
        raise InputError("the bound is defined for r >= 1")
    if not p.nonempty:
        return 0
    if k == 0 and n < 2 * r:
        return comb(n, r)
    return binomial(n - k * r - 1, r - 1)


def rotate_mask(mask: int, d: int, n: int) -> int:
    d %= n
    if d == 0:
        return mask
    full = (1 << n) - 1
    return ((mask << d) | (mask >> (n - d))) & full


def rotate_set(s: KSet, d: int) -> KSet:
    """Map every element a to ((a - 1 + d) mod n) + 1."""
    return KSet(rotate_mask(s.mask, d, s.params.n), s.params)


def parse_set(text: str, params: Params) -> KSet:
    """Parse the canonical text form, e.g. ``"1 4 7"``."""
    try:
        elems = [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise InputError(f"cannot parse set {text!r}") from exc
    return KSet.from_elems(elems, params)
