"""Classical root systems with exact rational coordinates.

Weights live in the standard coordinate lattice spanned by e_1..e_n (half
integers are legal, as needed for the spin weights in type D); coroots live
in the dual basis.  Type A is realized in the general-linear convention with
n independent coordinates; the special-linear quotient is taken downstream
by killing e_1 + ... + e_n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence


class DomainError(ValueError):
    """Input outside the supported domain (family, rank, dominance, ...)."""


@dataclass(frozen=True)
class Weight:
    coords: tuple[Fraction, ...]

    @staticmethod
    def of(*coords) -> "Weight":
        return Weight(tuple(Fraction(c) for c in coords))

    @staticmethod
    def basis(i: int, n: int) -> "Weight":
        return Weight(tuple(Fraction(1 if j == i - 1 else 0) for j in range(n)))

    @staticmethod
    def zero(n: int) -> "Weight":
        return Weight((Fraction(0),) * n)

    @property
    def rank(self) -> int:
        return len(self.coords)

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Weight":
        return Weight(tuple(-a for a in self.coords))

    def __mul__(self, c) -> "Weight":
        c = Fraction(c)
        return Weight(tuple(c * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class Coroot:
    coords: tuple[Fraction, ...]

    @staticmethod
    def of(*coords) -> "Coroot":
        return Coroot(tuple(Fraction(c) for c in coords))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def __add__(self, other: "Coroot") -> "Coroot":
        return Coroot(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Coroot":
        return Coroot(tuple(-a for a in self.coords))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def pairing(lam: Weight, gamma: Coroot) -> Fraction:
    """Natural pairing <lam, gamma>, exact."""
    if lam.rank != gamma.rank:
        raise DomainError("rank mismatch in pairing: %d vs %d" % (lam.rank, gamma.rank))
    return sum((a * b for a, b in zip(lam.coords, gamma.coords)), Fraction(0))


@dataclass(frozen=True)
class RootSystem:
    family: str                      # 'A', 'B', 'C', 'D'
    rank: int                        # number of e-coordinates n
    simple_roots: tuple[Weight, ...]
    simple_coroots: tuple[Coroot, ...]
    positive_roots: tuple[tuple[Weight, Coroot], ...]
    fundamental_weights: tuple[Weight, ...]
    rho: Weight
    p_param: Optional[int] = None    # 2 in type B, 1 in type C
    # positive roots expanded in the simple-root basis, for parabolic queries
    _simple_expansion: tuple[tuple[Fraction, ...], ...] = field(default=(), repr=False)

    @property
    def lie_rank(self) -> int:
        return len(self.simple_roots)

    def weyl_order(self) -> int:
        import math
        n = self.rank
        if self.family == "A":
            return math.factorial(n)
        if self.family in ("B", "C"):
            return (1 << n) * math.factorial(n)
        return (1 << (n - 1)) * math.factorial(n)

    def positive_root(self, idx: int) -> tuple[Weight, Coroot]:
        try:
            return self.positive_roots[idx]
        except IndexError:
            raise DomainError("root index %d out of range" % idx) from None

    def root_simple_coords(self, idx: int) -> tuple[Fraction, ...]:
        return self._simple_expansion[idx]


def _solve_simple_coords(simple_roots: Sequence[Weight], root: Weight) -> tuple[Fraction, ...]:
    """Expand a root over the simple roots by Gaussian elimination."""
    k = len(simple_roots)
    n = root.rank
    rows = [[simple_roots[j].coords[i] for j in range(k)] + [root.coords[i]]
            for i in range(n)]
    piv_cols = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        scale = rows[r][c]
        rows[r] = [x / scale for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    coeffs = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        coeffs[c] = rows[i][k]
    for i in range(r, n):
        if rows[i][k] != 0:
            raise DomainError("root does not lie in the simple-root span")
    return tuple(coeffs)


def build_root_system(family: str, rank: int) -> RootSystem:
    """Construct the root system of a classical family.

    Type A with parameter ``rank`` means the general-linear group on
    ``rank`` coordinates (Lie rank ``rank - 1``); B/C need rank >= 1 and
    D needs rank >= 2.
    """
    family = family.upper()
    n = rank
    if family not in ("A", "B", "C", "D"):
        raise DomainError("unsupported family %r" % family)
    if n < 1:
        raise DomainError("rank must be positive")
    if family == "D" and n < 2:
        raise DomainError("type D needs rank >= 2")

    e = lambda i: Weight.basis(i, n)
    ev = lambda i: Coroot(tuple(Fraction(1 if j == i - 1 else 0) for j in range(n)))

    def co(*pairs) -> Coroot:
        out = [Fraction(0)] * n
        for i, c in pairs:
            out[i - 1] += Fraction(c)
        return Coroot(tuple(out))

    simple_roots: list[Weight] = []
    simple_coroots: list[Coroot] = []
    positive: list[tuple[Weight, Coroot]] = []
    p_param: Optional[int] = None

    for i in range(1, n):
        simple_roots.append(e(i) - e(i + 1))
        simple_coroots.append(co((i, 1), (i + 1, -1)))
    if family == "B":
        simple_roots.append(e(n))
        simple_coroots.append(co((n, 2)))
        p_param = 2
    elif family == "C":
        simple_roots.append(2 * e(n))
        simple_coroots.append(co((n, 1)))
        p_param = 1
    elif family == "D":
        simple_roots.append(e(n - 1) + e(n))
        simple_coroots.append(co((n - 1, 1), (n, 1)))

    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            positive.append((e(i) - e(j), co((i, 1), (j, -1))))
    if family in ("B", "C", "D"):
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                positive.append((e(i) + e(j), co((i, 1), (j, 1))))
    if family == "B":
        for i in range(1, n + 1):
            positive.append((e(i), co((i, 2))))
    elif family == "C":
        for i in range(1, n + 1):
            positive.append((2 * e(i), co((i, 1))))

    fundamental: list[Weight] = []
    if family == "A":
        for i in range(1, n):
            fundamental.append(Weight(tuple(Fraction(1 if j < i else 0) for j in range(n))))
    elif family in ("B", "C"):
        for i in range(1, n + 1):
            w = Weight(tuple(Fraction(1 if j < i else 0) for j in range(n)))
            if family == "B" and i == n:
                w = w * Fraction(1, 2)
            fundamental.append(w)
    else:
        for i in range(1, n - 1):
            fundamental.append(Weight(tuple(Fraction(1 if j < i else 0) for j in range(n))))
        half = Fraction(1, 2)
        fundamental.append(Weight(tuple([half] * (n - 1) + [-half])))
        fundamental.append(Weight(tuple([half] * n)))

    # rho = sum of the fundamental weights; in type A this is the
    # general-linear normalization (n-1, n-2, ..., 0), which differs from the
    # half-sum of positive roots by a central vector.
    rho = Weight.zero(n)
    for w in fundamental:
        rho = rho + w

    expansions = tuple(_solve_simple_coords(simple_roots, root) for root, _ in positive)

    rs = RootSystem(
        family=family,
        rank=n,
        simple_roots=tuple(simple_roots),
        simple_coroots=tuple(simple_coroots),
        positive_roots=tuple(positive),
        fundamental_weights=tuple(fundamental),
        rho=rho,
        p_param=p_param,
        _simple_expansion=expansions,
    )
    _check_invariants(rs)
    return rs


def _check_invariants(rs: RootSystem) -> None:
    n = rs.rank
    counts = {"A": n * (n - 1) // 2, "B": n * n, "C": n * n, "D": n * (n - 1)}
    if len(rs.positive_roots) != counts[rs.family]:
        raise AssertionError("positive root count mismatch")
    for i, co in enumerate(rs.simple_coroots):
        if pairing(rs.rho, co) != 1:
            raise AssertionError("rho pairing with simple coroot %d is not 1" % i)


def reflect(rs: RootSystem, lam: Weight, root_index: int) -> Weight:
    """Reflection of a weight in the root with the given positive-root index."""
    root, coroot = rs.positive_root(root_index)
    return lam - pairing(lam, coroot) * root


def dominance(rs: RootSystem, lam: Weight) -> int:
    """+1 if dominant, -1 if antidominant, 0 if both (i.e. fixed), else raises."""
    signs = {0}
    for co in rs.simple_coroots:
        v = pairing(lam, co)
        if v > 0:
            signs.add(1)
        elif v < 0:
            signs.add(-1)
    if signs == {0}:
        return 0
    if signs == {0, 1}:
        return 1
    if signs == {0, -1}:
        return -1
    raise DomainError("weight %s is neither dominant nor antidominant" % lam)


def stabilizer_generators(rs: RootSystem, lam: Weight) -> frozenset[int]:
    """Indices i of simple reflections with <lam, alpha_i^v> = 0.

    Defined only for dominant or antidominant weights, where these generate
    the full stabilizer.
    """
    dominance(rs, lam)
    return frozenset(i for i, co in enumerate(rs.simple_coroots)
                     if pairing(lam, co) == 0)


def parabolic_positive_roots(rs: RootSystem, gens: frozenset[int]) -> frozenset[int]:
    """Positive-root indices lying in the span of the given simple roots."""
    out = []
    for idx in range(len(rs.positive_roots)):
        coords = rs.root_simple_coords(idx)
        if all(c == 0 or i in gens for i, c in enumerate(coords)):
            out.append(idx)
    return frozenset(out)
