"""Weyl groups of classical type as signed permutations.

An element stores the images of the basis vectors in window notation:
``images[i-1] = +-j`` means ``e_i -> +-e_j``.  Type A elements carry no
signs and type D elements an even number of minus signs.  Length is the
number of positive roots sent negative, computed once and cached.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional

from .rootdata import (Coroot, DomainError, RootSystem, Weight, dominance,
                       pairing, parabolic_positive_roots,
                       stabilizer_generators)

DEFAULT_MAX_WEYL = 40320


class ResourceError(RuntimeError):
    """A configured resource bound was exceeded."""


class InvariantViolation(AssertionError):
    """An identity the construction relies on failed at runtime."""


class WeylElem:
    __slots__ = ("images", "_length", "_hash")

    def __init__(self, images: tuple[int, ...], length: Optional[int] = None):
        self.images = images
        self._length = length
        self._hash = None

    @staticmethod
    def identity(n: int) -> "WeylElem":
        return WeylElem(tuple(range(1, n + 1)), 0)

    @property
    def rank(self) -> int:
        return len(self.images)

    def __eq__(self, other) -> bool:
        return isinstance(other, WeylElem) and self.images == other.images

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.images)
        return self._hash

    def __repr__(self):
        return "WeylElem%r" % (self.images,)

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.rank + 1))

    def __mul__(self, other: "WeylElem") -> "WeylElem":
        """Composition: (self * other)(v) = self(other(v))."""
        mine = self.images
        out = []
        for im in other.images:
            j = mine[abs(im) - 1]
            out.append(j if im > 0 else -j)
        return WeylElem(tuple(out))

    def inverse(self) -> "WeylElem":
        out = [0] * self.rank
        for i, im in enumerate(self.images, start=1):
            out[abs(im) - 1] = i if im > 0 else -i
        return WeylElem(tuple(out), self._length)

    def act_coords(self, coords: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * len(coords)
        for i, c in enumerate(coords):
            if c:
                im = self.images[i]
                if im > 0:
                    out[im - 1] += c
                else:
                    out[-im - 1] -= c
        return tuple(out)

    def act_weight(self, lam: Weight) -> Weight:
        if lam.rank != self.rank:
            raise DomainError("rank mismatch in Weyl action")
        return Weight(self.act_coords(lam.coords))

    def act_coroot(self, gamma: Coroot) -> Coroot:
        if gamma.rank != self.rank:
            raise DomainError("rank mismatch in Weyl action")
        return Coroot(self.act_coords(gamma.coords))

    def length(self, rs: RootSystem) -> int:
        """Number of positive roots mapped to negative roots (cached)."""
        if self._length is None:
            cnt = 0
            for root, _ in rs.positive_roots:
                img = self.act_coords(root.coords)
                first = next(c for c in img if c)
                if first < 0:
                    cnt += 1
            self._length = cnt
        return self._length

    def sign_count(self) -> int:
        return sum(1 for im in self.images if im < 0)


def reflection_elem(rs: RootSystem, root_index: int) -> WeylElem:
    """The reflection in a positive root, as a signed permutation."""
    root, coroot = rs.positive_root(root_index)
    n = rs.rank
    images = []
    for i in range(1, n + 1):
        img = Weight.basis(i, n) - pairing(Weight.basis(i, n), coroot) * root
        hit = [(j, c) for j, c in enumerate(img.coords, start=1) if c]
        if len(hit) != 1 or abs(hit[0][1]) != 1:
            raise InvariantViolation("reflection image is not a signed basis vector")
        j, c = hit[0]
        images.append(j if c > 0 else -j)
    return WeylElem(tuple(images))


def simple_reflection(rs: RootSystem, i: int) -> WeylElem:
    """The i-th simple reflection (0-indexed over the simple roots)."""
    if not 0 <= i < rs.lie_rank:
        raise DomainError("simple reflection index out of range")
    return reflection_elem(rs, _simple_positive_index(rs, i))


def _simple_positive_index(rs: RootSystem, i: int) -> int:
    target = rs.simple_roots[i]
    for idx, (root, _) in enumerate(rs.positive_roots):
        if root == target:
            return idx
    raise InvariantViolation("simple root missing from positive roots")


def all_elements(rs: RootSystem, max_weyl: int = DEFAULT_MAX_WEYL) -> list[WeylElem]:
    """Every Weyl group element, ordered by (length, window notation)."""
    order = rs.weyl_order()
    if order > max_weyl:
        raise ResourceError("Weyl group order %d exceeds bound %d" % (order, max_weyl))
    n = rs.rank
    out = []
    if rs.family == "A":
        sign_sets: list[tuple[int, ...]] = [()]
    elif rs.family in ("B", "C"):
        sign_sets = [s for k in range(n + 1) for s in itertools.combinations(range(n), k)]
    else:
        sign_sets = [s for k in range(0, n + 1, 2) for s in itertools.combinations(range(n), k)]
    for perm in itertools.permutations(range(1, n + 1)):
        for signs in sign_sets:
            images = tuple(-p if i in signs else p for i, p in enumerate(perm))
            out.append(WeylElem(images))
    out.sort(key=lambda w: (w.length(rs), w.images))
    return out


@dataclass(frozen=True)
class CosetList:
    """Minimal-length coset representatives for the stabilizer of a weight."""
    reps: tuple[WeylElem, ...]
    lam: Weight
    order_tag: str  # 'paper_A' | 'paper_BC' | 'paper_D' | 'generic'


def coset_min_rep(rs: RootSystem, w: WeylElem, lam: Weight) -> WeylElem:
    """Minimal-length representative of the coset w * Stab(lam).

    Greedy descent: multiply on the right by stabilizer generators while the
    length drops; the result is the unique minimum.
    """
    gens = stabilizer_generators(rs, lam)
    simp = [simple_reflection(rs, i) for i in sorted(gens)]
    cur = w
    cur_len = cur.length(rs)
    changed = True
    while changed:
        changed = False
        for s in simp:
            cand = cur * s
            if cand.length(rs) < cur_len:
                cur, cur_len = cand, cand.length(rs)
                changed = True
                break
    return cur


def min_coset_reps(rs: RootSystem, lam: Weight,
                   max_weyl: int = DEFAULT_MAX_WEYL) -> CosetList:
    """All minimal-length coset representatives, in a deterministic order.

    For the tracked weight -e_1 the representatives follow the fixed orbit
    order (-e_1, ..., -e_n, then e_n, ..., e_1 outside type A), which fixes
    the layout of every downstream matrix; otherwise the order is by
    (length, window notation).
    """
    dominance(rs, lam)
    n = rs.rank
    by_orbit: dict[tuple, WeylElem] = {}
    for w in all_elements(rs, max_weyl=max_weyl):
        key = w.act_weight(lam).coords
        cur = by_orbit.get(key)
        if cur is None or w.length(rs) < cur.length(rs):
            by_orbit[key] = w
    minus_e1 = Weight.basis(1, n) * Fraction(-1)
    if lam == minus_e1:
        order = [(-Weight.basis(i, n)).coords for i in range(1, n + 1)]
        if rs.family != "A":
            order += [Weight.basis(i, n).coords for i in range(n, 0, -1)]
        reps = tuple(by_orbit[key] for key in order)
        tag = {"A": "paper_A", "B": "paper_BC", "C": "paper_BC", "D": "paper_D"}[rs.family]
        return CosetList(reps, lam, tag)
    reps = tuple(sorted(by_orbit.values(), key=lambda w: (w.length(rs), w.images)))
    return CosetList(reps, lam, "generic")


def offdiag_root(rs: RootSystem, u: WeylElem, v: WeylElem, lam: Weight,
                 ) -> Optional[tuple[int, Coroot]]:
    """The positive-root index alpha outside the stabilizer span with
    min-rep(u s_alpha) = v, or None.

    Uniqueness is asserted at runtime; two qualifying roots raise
    InvariantViolation.
    """
    if u == v:
        raise DomainError("off-diagonal query requires distinct representatives")
    gens = stabilizer_generators(rs, lam)
    inside = parabolic_positive_roots(rs, gens)
    found = None
    for idx in range(len(rs.positive_roots)):
        if idx in inside:
            continue
        cand = coset_min_rep(rs, u * reflection_elem(rs, idx), lam)
        if cand == v:
            if found is not None:
                raise InvariantViolation(
                    "two roots connect the same coset pair: %d and %d" % (found, idx))
            found = idx
    if found is None:
        return None
    return found, rs.positive_roots[found][1]
