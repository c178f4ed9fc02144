"""Quantum multiplication in the stable basis.

Ring elements are represented by the matrices of quantum multiplication in
the fixed stable basis, indexed by the Weyl group in its deterministic
order; the regular representation is faithful, so equality of ring elements
is equality of matrices.  This module provides the divisor (Chevalley)
operators, the twisted Weyl operators acting on quantum variables, the
coset-indexed operator matrix attached to a dominant or antidominant
weight, the trace and eigenvector identities it satisfies, and the ring
presentations they yield for every classical family.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .rootdata import (Coroot, DomainError, RootSystem, Weight, dominance,
                       pairing, parabolic_positive_roots,
                       stabilizer_generators)
from .reporting import VerifyReport, timed
from .symbolic import (HBAR, KIND_X, RAT_ONE, RAT_ZERO, Poly, RatExpr,
                       SymMatrix, eps, mono_of, one_minus_q, p_vars,
                       poly_const, q_monomial, qvar, var_index, var_kind,
                       xvar)
from .weyl import (CosetList, InvariantViolation, WeylElem, all_elements,
                   coset_min_rep, min_coset_reps, offdiag_root,
                   reflection_elem, simple_reflection)


# ---------------------------------------------------------------------------
# scalars attached to weights and coroots


def eps_linear(lam: Weight) -> RatExpr:
    """The weight as a linear polynomial in the equivariant parameters."""
    acc = RAT_ZERO
    for i, c in enumerate(lam.coords, start=1):
        if c:
            acc = acc + Fraction(c) * RatExpr.var(eps(i))
    return acc


def q_power(gamma: Coroot) -> RatExpr:
    """The Laurent monomial q^gamma for an integral coroot vector."""
    pairs = []
    for i, c in enumerate(gamma.coords, start=1):
        if c:
            if Fraction(c).denominator != 1:
                raise DomainError("coroot exponent %s is not integral" % (gamma,))
            pairs.append((i, int(c)))
    return q_monomial(pairs)


def one_minus_q_power(gamma: Coroot) -> RatExpr:
    pairs = []
    for i, c in enumerate(gamma.coords, start=1):
        if c:
            pairs.append((i, int(c)))
    return one_minus_q(pairs)


def delta_class_shift(rs: RootSystem, lam: Weight) -> RatExpr:
    """hbar * sum over positive roots of <lam, a^v> q^{a^v}/(1 - q^{a^v})."""
    acc = RAT_ZERO
    h = RatExpr.var(HBAR)
    for _, coroot in rs.positive_roots:
        c = pairing(lam, coroot)
        if c:
            acc = acc + h * Fraction(c) * q_power(coroot) / one_minus_q_power(coroot)
    return acc


# ---------------------------------------------------------------------------
# the Weyl-indexed operator model


@dataclass(frozen=True)
class OpMatrix:
    """Matrix of quantum multiplication by a ring element, in the stable basis."""
    matrix: SymMatrix
    order: tuple[WeylElem, ...]
    label: str = "derived"

    @property
    def dim(self) -> int:
        return self.matrix.dim

    def __mul__(self, other: "OpMatrix") -> "OpMatrix":
        if self.order != other.order:
            raise DomainError("operator basis mismatch")
        return OpMatrix(self.matrix * other.matrix, self.order)

    def __add__(self, other: "OpMatrix") -> "OpMatrix":
        return OpMatrix(self.matrix + other.matrix, self.order)

    def __sub__(self, other: "OpMatrix") -> "OpMatrix":
        return OpMatrix(self.matrix - other.matrix, self.order)

    def scale(self, c: RatExpr) -> "OpMatrix":
        return OpMatrix(self.matrix * c, self.order)

    def __eq__(self, other) -> bool:
        return isinstance(other, OpMatrix) and self.order == other.order \
            and self.matrix == other.matrix


class StableVec:
    """Finite combination of stable classes with rational-function weights."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Optional[dict[WeylElem, RatExpr]] = None):
        self.coeffs = {}
        if coeffs:
            for w, c in coeffs.items():
                if not c.is_zero():
                    self.coeffs[w] = c

    @staticmethod
    def basis(w: WeylElem) -> "StableVec":
        return StableVec({w: RAT_ONE})

    def __add__(self, other: "StableVec") -> "StableVec":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            acc = out.get(w, RAT_ZERO) + c
            if acc.is_zero():
                out.pop(w, None)
            else:
                out[w] = acc
        return StableVec(out)

    def __sub__(self, other: "StableVec") -> "StableVec":
        return self + other.scale(RatExpr.const(-1))

    def scale(self, c: RatExpr) -> "StableVec":
        return StableVec({w: cc * c for w, cc in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, StableVec) and self.coeffs == other.coeffs

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        items = ", ".join("%r: %s" % (w.images, c.to_text())
                          for w, c in sorted(self.coeffs.items(), key=lambda t: t[0].images))
        return "StableVec{%s}" % items


_W_ORDER_CACHE: dict[tuple, tuple[WeylElem, ...]] = {}


def weyl_order(rs: RootSystem) -> tuple[WeylElem, ...]:
    key = (rs.family, rs.rank)
    if key not in _W_ORDER_CACHE:
        _W_ORDER_CACHE[key] = tuple(all_elements(rs))
    return _W_ORDER_CACHE[key]


_CHEV_CACHE: dict[tuple, OpMatrix] = {}

# optional persistent store (an OperatorCache); installed by the CLI
persistent_cache = None


def set_persistent_cache(store) -> None:
    global persistent_cache
    persistent_cache = store


def chevalley_operator(rs: RootSystem, lam: Weight, variant: str = "delta") -> OpMatrix:
    """Quantum multiplication by the shifted divisor class of a weight.

    Column w of the "delta" variant holds the diagonal entry w(lam) together
    with, for every positive root a, the entry -hbar <lam, a^v>/(1 - q^{a^v})
    at row w s_a when w(a) > 0 and -hbar <lam, a^v> q^{a^v}/(1 - q^{a^v})
    when w(a) < 0.  The "divisor" variant subtracts delta_class_shift(lam)
    times the identity.  Linear in lam; results are memoized.
    """
    if variant not in ("delta", "divisor"):
        raise DomainError("unknown Chevalley variant %r" % variant)
    key = (rs.family, rs.rank, lam.coords, variant)
    got = _CHEV_CACHE.get(key)
    if got is not None:
        return got
    disk_key = ("chevalley", rs.family, rs.rank, str(lam), variant)
    if persistent_cache is not None:
        obj = persistent_cache.get(disk_key)
        if obj is not None:
            op = OpMatrix(SymMatrix.from_json_obj(obj), weyl_order(rs),
                          "mult_%s(%s)" % (variant, lam))
            _CHEV_CACHE[key] = op
            return op
    order = weyl_order(rs)
    index = {w: i for i, w in enumerate(order)}
    n = len(order)
    mat = SymMatrix.zero(n)
    h = RatExpr.var(HBAR)
    refl = [reflection_elem(rs, idx) for idx in range(len(rs.positive_roots))]
    for j, w in enumerate(order):
        mat.rows[j][j] = mat.rows[j][j] + eps_linear(w.act_weight(lam))
        for idx, (root, coroot) in enumerate(rs.positive_roots):
            c = pairing(lam, coroot)
            if not c:
                continue
            img = w.act_weight(root)
            first = next(x for x in img.coords if x)
            if first > 0:
                coeff = -h * Fraction(c) / one_minus_q_power(coroot)
            else:
                coeff = -h * Fraction(c) * q_power(coroot) / one_minus_q_power(coroot)
            i = index[w * refl[idx]]
            mat.rows[i][j] = mat.rows[i][j] + coeff
    if variant == "divisor":
        shift = delta_class_shift(rs, lam)
        for j in range(n):
            mat.rows[j][j] = mat.rows[j][j] - shift
    op = OpMatrix(mat, order, "mult_%s(%s)" % (variant, lam))
    _CHEV_CACHE[key] = op
    if persistent_cache is not None:
        persistent_cache.put(disk_key, mat.to_json_obj())
    return op


def apply_op(op: OpMatrix, vec: StableVec) -> StableVec:
    index = {w: i for i, w in enumerate(op.order)}
    out: dict[WeylElem, RatExpr] = {}
    for w, c in vec.coeffs.items():
        j = index[w]
        for i, row_w in enumerate(op.order):
            entry = op.matrix.rows[i][j]
            if entry.is_zero():
                continue
            acc = out.get(row_w, RAT_ZERO) + entry * c
            if acc.is_zero():
                out.pop(row_w, None)
            else:
                out[row_w] = acc
    return StableVec(out)


# ---------------------------------------------------------------------------
# twisted Weyl operators


def _q_action_table(rs: RootSystem, u: WeylElem) -> dict:
    """Substitution table q_i -> q^{u e_i^v} for the action on quantum variables."""
    table = {}
    n = rs.rank
    for i in range(1, n + 1):
        im = u.images[i - 1]
        target = [(qvar(abs(im)), 1 if im > 0 else -1)]
        if abs(im) != i or im < 0:
            table[qvar(i)] = (Fraction(1), target)
    return table


def q_act(rs: RootSystem, u: WeylElem, x: RatExpr) -> RatExpr:
    """Action of u on the quantum variables, fixing all other variables."""
    return x.subst_monomial(_q_action_table(rs, u))


def dl_transform(rs: RootSystem, u: WeylElem, vec: StableVec) -> StableVec:
    """Twisted Weyl operator on a stable-basis vector.

    Coefficients transform by the u-action on quantum variables (equivariant
    parameters are fixed), the basis by w -> w u^{-1} with the global sign
    (-1)^{length(u)}.
    """
    table = _q_action_table(rs, u)
    uinv = u.inverse()
    sign = Fraction(-1) ** (u.length(rs) % 2)
    out = {}
    for w, c in vec.coeffs.items():
        out[w * uinv] = c.subst_monomial(table) * sign
    return StableVec(out)


def dl_conjugate(rs: RootSystem, u: WeylElem, op: OpMatrix) -> OpMatrix:
    """Conjugate an operator matrix by the twisted Weyl operator of u."""
    order = op.order
    index = {w: i for i, w in enumerate(order)}
    table = _q_action_table(rs, u)
    twisted = op.matrix.apply(lambda e: e.subst_monomial(table))
    n = len(order)
    sign = Fraction(-1) ** (u.length(rs) % 2)
    uinv = u.inverse()
    perm = [index[w * uinv] for w in order]  # basis vector at w maps to slot w u^{-1}
    out = SymMatrix.zero(n)
    for i in range(n):
        for j in range(n):
            e = twisted.rows[i][j]
            if not e.is_zero():
                out.rows[perm[i]][perm[j]] = e  # the two signs cancel
    return OpMatrix(out, order, "conj")


def averaging_class(rs: RootSystem, lam: Weight) -> StableVec:
    """Alternating sum of stable classes over the stabilizer of the weight."""
    gens = stabilizer_generators(rs, lam)
    group = _parabolic_elements(rs, gens)
    out = {}
    for w in group:
        out[w] = RatExpr.const(Fraction(-1) ** (w.length(rs) % 2))
    return StableVec(out)


def _parabolic_elements(rs: RootSystem, gens: frozenset[int]) -> list[WeylElem]:
    simp = [simple_reflection(rs, i) for i in sorted(gens)]
    seen = {WeylElem.identity(rs.rank)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for w in frontier:
            for s in simp:
                c = w * s
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return sorted(seen, key=lambda w: (w.length(rs), w.images))


# ---------------------------------------------------------------------------
# the coset-indexed operator matrix


@dataclass(frozen=True)
class ThetaMatrix:
    """Square array over the minimal coset representatives of a weight.

    Diagonal blocks are tagged with the representative whose shifted divisor
    class acts there; off-diagonal entries are explicit scalars
    -hbar <lam, a^v> / (1 - q^{u a^v}) for the unique connecting root.
    """
    reps: CosetList
    lam: Weight
    entries: tuple  # tuple of row tuples; each cell ('delta', WeylElem) or ('scalar', RatExpr)

    @property
    def dim(self) -> int:
        return len(self.reps.reps)

    def scalar_entry(self, i: int, j: int) -> RatExpr:
        kind, val = self.entries[i][j]
        if kind != "scalar":
            raise DomainError("entry (%d, %d) is a diagonal block" % (i, j))
        return val

    def diag_weight(self, i: int) -> Weight:
        kind, val = self.entries[i][i]
        assert kind == "delta"
        return val.act_weight(self.lam)

    def scalar_skeleton(self, diag: Callable[[int, Weight], RatExpr]) -> SymMatrix:
        """Replace diagonal blocks by scalars from the callback."""
        n = self.dim
        out = SymMatrix.zero(n)
        for i in range(n):
            for j in range(n):
                kind, val = self.entries[i][j]
                if kind == "delta":
                    out.rows[i][j] = diag(i, val.act_weight(self.lam))
                else:
                    out.rows[i][j] = val
        return out

    def symbol_matrix(self) -> SymMatrix:
        """Scalar skeleton with abstract commuting symbols on the diagonal."""
        return self.scalar_skeleton(lambda i, _w: RatExpr.var(xvar(i + 1)))


def theta_matrix(rs: RootSystem, lam: Weight) -> ThetaMatrix:
    """Build the coset-indexed operator matrix of a (anti)dominant weight."""
    cl = min_coset_reps(rs, lam)
    reps = cl.reps
    h = RatExpr.var(HBAR)
    rows = []
    for u in reps:
        row = []
        for v in reps:
            if u == v:
                row.append(("delta", u))
                continue
            hit = offdiag_root(rs, u, v, lam)
            if hit is None:
                row.append(("scalar", RAT_ZERO))
                continue
            idx, coroot = hit
            c = pairing(lam, coroot)
            val = -h * Fraction(c) / one_minus_q_power(u.act_coroot(coroot))
            row.append(("scalar", val))
        rows.append(tuple(row))
    return ThetaMatrix(cl, lam, tuple(rows))


# ---------------------------------------------------------------------------
# verification suites


def _x_split(x: RatExpr) -> dict[tuple, RatExpr]:
    """Split by exponents of the abstract symbols; values are x-free."""
    buckets: dict[tuple, Poly] = {}
    for m, c in x.num.items():
        xpart = []
        rest = []
        for v, e in m:
            (xpart if var_kind(v) == KIND_X else rest).append((v, e))
        key = tuple(sorted(xpart))
        buckets.setdefault(key, {})[tuple(sorted(rest))] = c
    out = {}
    for key, num in buckets.items():
        out[key] = RatExpr(num, x.s_units, x.factors) + RAT_ZERO
    return out


def _rat_normal(x: RatExpr) -> RatExpr:
    return x + RAT_ZERO


def verify_trace_relation(rs: RootSystem, lam: Weight, k: int,
                          check_commutativity: bool = True) -> VerifyReport:
    """Check that the k-th power trace of the coset matrix equals the
    power sum of the weight orbit, as an identity of operators.

    The trace of the block-matrix power is evaluated by expanding the
    symbolic trace in the commuting diagonal symbols and substituting the
    corresponding multiplication operators; commutativity of those operators
    is itself checked first, which justifies the expansion.
    """
    inst = {"family": rs.family, "rank": rs.rank, "weight": str(lam), "k": k}
    with timed() as t:
        th = theta_matrix(rs, lam)
        m = th.dim
        ops = [chevalley_operator(rs, th.diag_weight(i)).matrix for i in range(m)]
        if check_commutativity:
            for a in range(m):
                for b in range(a + 1, m):
                    if not (ops[a] * ops[b] - ops[b] * ops[a]).is_zero():
                        return VerifyReport("traces", inst, False,
                                            "diagonal operators %d and %d do not commute" % (a, b),
                                            t.elapsed)
        sym = th.symbol_matrix()
        tr = _rat_normal(sym.power(k).trace())
        target = RAT_ZERO
        for i in range(m):
            target = target + eps_linear(th.diag_weight(i)) ** k
        n = ops[0].dim if ops else 0
        acc = SymMatrix.zero(n)
        mono_cache: dict[tuple, SymMatrix] = {(): SymMatrix.identity(n)}

        def op_monomial(key: tuple) -> SymMatrix:
            if key in mono_cache:
                return mono_cache[key]
            v, e = key[0]
            rest = (key[0][0], e - 1)
            prev = op_monomial(((v, e - 1),) + key[1:]) if e > 1 else op_monomial(key[1:])
            out = ops[var_index(v) - 1] * prev
            mono_cache[key] = out
            return out

        for key, coeff in _x_split(tr).items():
            acc = acc + op_monomial(key) * coeff
        diff = acc - SymMatrix.identity(n) * target
        ok = diff.is_zero()
        detail = "" if ok else _first_mismatch(diff)
    return VerifyReport("traces", inst, ok, detail, t.elapsed)


def _first_mismatch(diff: SymMatrix) -> str:
    for i in range(diff.dim):
        for j in range(diff.dim):
            if not diff.rows[i][j].is_zero():
                return "entry (%d, %d) differs by %s" % (i, j, diff.rows[i][j].to_text())
    return ""


def verify_eigencolumn(rs: RootSystem, lam: Weight) -> VerifyReport:
    """Check the first-column eigen identity of the coset matrix.

    With C_u the twisted transform of the averaging class, every row u must
    satisfy  sum_w Theta_{u,w} . C_w = lam . C_u  exactly.
    """
    inst = {"family": rs.family, "rank": rs.rank, "weight": str(lam)}
    with timed() as t:
        th = theta_matrix(rs, lam)
        sig = averaging_class(rs, lam)
        cols = [dl_transform(rs, u, sig) for u in th.reps.reps]
        lam_scalar = eps_linear(lam)
        for i, u in enumerate(th.reps.reps):
            acc = StableVec()
            for j in range(th.dim):
                kind, val = th.entries[i][j]
                if kind == "delta":
                    acc = acc + apply_op(chevalley_operator(rs, val.act_weight(lam)), cols[j])
                elif not val.is_zero():
                    acc = acc + cols[j].scale(val)
            want = cols[i].scale(lam_scalar)
            if acc != want:
                return VerifyReport("eigencolumn", inst, False,
                                    "row %d: got %r, want %r" % (i, acc, want), t.elapsed)
    return VerifyReport("eigencolumn", inst, True, "", t.elapsed)


def verify_automorphism(rs: RootSystem, u: WeylElem, lam: Weight,
                        w: WeylElem) -> VerifyReport:
    """Check T_u(Delta_lam * Stab(w)) = Delta_{u lam} * T_u(Stab(w))."""
    inst = {"family": rs.family, "rank": rs.rank, "weight": str(lam),
            "u": str(u.images), "w": str(w.images)}
    with timed() as t:
        lhs = dl_transform(rs, u, apply_op(chevalley_operator(rs, lam), StableVec.basis(w)))
        rhs = apply_op(chevalley_operator(rs, u.act_weight(lam)),
                       dl_transform(rs, u, StableVec.basis(w)))
        ok = lhs == rhs
        detail = "" if ok else "lhs %r != rhs %r" % (lhs, rhs)
    return VerifyReport("automorphism", inst, ok, detail, t.elapsed)


def verify_conjugation_law(rs: RootSystem, u: WeylElem, lam: Weight) -> VerifyReport:
    """Check that conjugating the operator of lam gives the operator of u(lam)."""
    inst = {"family": rs.family, "rank": rs.rank, "weight": str(lam), "u": str(u.images)}
    with timed() as t:
        lhs = dl_conjugate(rs, u, chevalley_operator(rs, lam))
        rhs = chevalley_operator(rs, u.act_weight(lam))
        ok = lhs.matrix == rhs.matrix
        detail = "" if ok else _first_mismatch(lhs.matrix - rhs.matrix)
    return VerifyReport("automorphism", inst, ok, detail, t.elapsed)


def verify_automorphism_suite(rs: RootSystem) -> VerifyReport:
    """Exhaustive twisted-operator checks for one root system: the product
    rule over all (u, w) pairs for every fundamental weight, and the
    conjugation law for every u."""
    inst = {"family": rs.family, "rank": rs.rank}
    with timed() as t:
        W = weyl_order(rs)
        for lam in rs.fundamental_weights:
            for u in W:
                r = verify_conjugation_law(rs, u, lam)
                if not r.passed:
                    return VerifyReport("automorphism", inst, False,
                                        "conjugation law fails: %s" % r.instance,
                                        t.elapsed)
                for w in W:
                    r = verify_automorphism(rs, u, lam, w)
                    if not r.passed:
                        return VerifyReport("automorphism", inst, False,
                                            "product rule fails: %s" % r.instance,
                                            t.elapsed)
    return VerifyReport("automorphism", inst, True, "", t.elapsed)


def sl_reduce(x: RatExpr, n: int) -> RatExpr:
    """Impose the special-linear quotient e_1 + ... + e_n = 0 by eliminating
    the last equivariant parameter."""
    sub = RAT_ZERO
    for i in range(1, n):
        sub = sub - RatExpr.var(eps(i))
    return x.substitute({eps(n): sub})


def verify_sl2_identities() -> VerifyReport:
    """The rank-one operator identities: the divisor product formula with
    the classical square evaluated through the Borel relation, the quadratic
    presentation relation, and the hypertoric product form."""
    inst = {"family": "A", "rank": 2, "weight": "e1"}
    with timed() as t:
        from .rootdata import build_root_system
        rs = build_root_system("A", 2)
        varpi = Weight.basis(1, 2)
        red = lambda m: m.apply(lambda e: sl_reduce(e, 2))
        d_plus = OpMatrix(red(chevalley_operator(rs, varpi, "divisor").matrix),
                          weyl_order(rs))
        d_minus = OpMatrix(red(chevalley_operator(rs, -varpi, "divisor").matrix),
                           weyl_order(rs))
        ident = SymMatrix.identity(2)
        h = RatExpr.var(HBAR)
        e1v = RatExpr.var(eps(1))
        q = q_monomial([(1, 1), (2, -1)])
        g = q / one_minus_q([(1, 1), (2, -1)])
        # product formula: the classical part D * D_- evaluates to -varpi^2
        lhs = d_plus.matrix * d_minus.matrix
        rhs = ident * (-(e1v ** 2)) + (d_plus.matrix - d_minus.matrix - ident * h) * (h * g)
        if lhs != rhs:
            return VerifyReport("traces", inst, False, "divisor product formula fails",
                                t.elapsed)
        # quadratic relation
        rel = d_plus.matrix * d_plus.matrix + d_plus.matrix * (2 * h * g) \
            - ident * (h * h * g) - ident * (e1v ** 2)
        if not rel.is_zero():
            return VerifyReport("traces", inst, False, "quadratic relation fails",
                                t.elapsed)
        # hypertoric form x*y = q (h-x)*(h-y) with x = -varpi - D, y = varpi - D
        xop = ident * (-e1v) - d_plus.matrix
        yop = ident * e1v - d_plus.matrix
        hop = ident * (-h)
        if (xop * yop) != (((hop - xop) * (hop - yop)) * q):
            return VerifyReport("traces", inst, False, "hypertoric product form fails",
                                t.elapsed)
    return VerifyReport("traces", inst, True, "", t.elapsed)


# ---------------------------------------------------------------------------
# presentations


def _fundamental_decomposition(rs: RootSystem, lam: Weight) -> list[Fraction]:
    """Coefficients of a weight over the fundamental weights.

    In type A the center contributes a final coordinate on the determinant
    weight (1, ..., 1), so every integral weight decomposes with n
    coefficients in all families.
    """
    if rs.family == "A":
        coeffs = [pairing(lam, co) for co in rs.simple_coroots]
        coeffs.append(lam.coords[-1])
        return coeffs
    return [pairing(lam, co) for co in rs.simple_coroots]


def presentation_relation(rs: RootSystem, lam: Weight, k: int) -> RatExpr:
    """The degree-k relation attached to a weight, in abstract generators.

    Diagonal symbols are the generator combinations of the orbit weights
    plus their scalar shifts; the result is tr(Theta^k) minus the orbit
    power sum, a polynomial in the generators with exact rational-function
    coefficients.  Its reduction mod hbar is sum(D_{u lam}^k) - sum((u lam)^k).
    """
    th = theta_matrix(rs, lam)
    diag = []
    for i in range(th.dim):
        mu = th.diag_weight(i)
        g = RAT_ZERO
        for j, c in enumerate(_fundamental_decomposition(rs, mu), start=1):
            if c:
                g = g + Fraction(c) * RatExpr.var(xvar(j))
        diag.append(g + delta_class_shift(rs, mu))
    sym = th.scalar_skeleton(lambda i, _w: diag[i])
    tr = sym.power(k).trace()
    target = RAT_ZERO
    for i in range(th.dim):
        target = target + eps_linear(th.diag_weight(i)) ** k
    return _rat_normal(tr - target)


@dataclass
class Presentation:
    family: str
    rank: int
    generators: list[str]
    relations: list[RatExpr]       # polynomials in the x symbols over the coefficient ring
    chi_defs: list[RatExpr]        # chi_i - x_i, the scalar shift of each diagonal class
    coefficient_ring: str = "O(T_reg^v)[hbar]"
    sl_quotient: bool = False

    def to_json_obj(self) -> dict:
        return {
            "family": self.family,
            "rank": self.rank,
            "generators": self.generators,
            "relations": [r.to_text() for r in self.relations],
            "chi_shifts": [d.to_text() for d in self.chi_defs],
            "coefficient_ring": self.coefficient_ring,
            "sl_quotient": self.sl_quotient,
        }

    def to_latex(self) -> str:
        lines = [r"\text{generators: } " + ", ".join(
            r"\chi_{%d}" % i for i in range(1, len(self.chi_defs) + 1))]
        for i, d in enumerate(self.chi_defs, start=1):
            lines.append(r"\chi_{%d} = x_{%d} + %s" % (i, i, d.to_latex(chi="x")))
        for r in self.relations:
            lines.append(_relation_latex(r))
        return "\\\\\n".join(lines)

    def to_text(self) -> str:
        lines = ["presentation %s_%d over %s" % (self.family, self.rank, self.coefficient_ring)]
        lines.append("generators: " + ", ".join(self.generators))
        for i, d in enumerate(self.chi_defs, start=1):
            lines.append("  chi%d = x%d + %s" % (i, i, d.to_text()))
        for j, r in enumerate(self.relations, start=1):
            lines.append("relation %d: %s = 0" % (j, _relation_text(r)))
        return "\n".join(lines)


def _eps_to_t_text(x: RatExpr, render) -> str:
    """Render with t_i = -e_i substituted for the equivariant parameters."""
    from .symbolic import KIND_EPS
    table = {}
    for v in x.variables():
        if var_kind(v) == KIND_EPS:
            table[v] = (Fraction(-1), [(v, 1)])
    return render(x.subst_monomial(table))


def _relation_text(r: RatExpr) -> str:
    import re
    return _eps_to_t_text(r, lambda x: re.sub(r"\be(\d+)", r"t\1", x.to_text()))


def _relation_latex(r: RatExpr) -> str:
    text = _eps_to_t_text(r, lambda x: x.to_latex(chi="chi"))
    return text.replace(r"\epsilon_", "t_")


def check_classical_limit(rs: RootSystem, relation: RatExpr,
                          chi_defs: Optional[Sequence[RatExpr]] = None) -> None:
    """A relation must reduce mod hbar to f(generators) - f(weights) with f
    invariant under the Weyl group; raise InvariantViolation otherwise."""
    from .symbolic import KIND_EPS, KIND_Q, p_subst_scalar

    r0 = relation.subst_scalar(HBAR, 0)
    if not r0.is_polynomial():
        raise InvariantViolation("classical limit is not polynomial")
    f_x: Poly = {}
    g_e: Poly = {}
    for m, c in r0.num.items():
        kinds = {var_kind(v) for v, _ in m}
        if KIND_Q in kinds:
            raise InvariantViolation("classical limit keeps quantum variables")
        if KIND_X in kinds and KIND_EPS in kinds:
            raise InvariantViolation("classical limit mixes generators and parameters")
        if KIND_X in kinds:
            f_x[m] = c
        else:
            g_e[m] = c
    fx = RatExpr.from_poly(f_x)
    # f evaluated on the opposite weights must cancel the parameter part
    table = {}
    for v in fx.variables():
        if var_kind(v) == KIND_X:
            table[v] = (Fraction(-1), [(eps(var_index(v)), 1)])
    if not (fx.subst_monomial(table) + RatExpr.from_poly(g_e)).is_zero():
        raise InvariantViolation("classical limit is not of the form f(D) - f(lambda)")
    # Weyl invariance of f, acting on the generator symbols like on the weights
    for i in range(rs.lie_rank):
        s = simple_reflection(rs, i)
        table = {}
        for j in range(1, rs.rank + 1):
            im = s.images[j - 1]
            if im != j:
                table[xvar(j)] = (Fraction(1 if im > 0 else -1), [(xvar(abs(im)), 1)])
        if not (fx.subst_monomial(table) - fx).is_zero():
            raise InvariantViolation("classical-limit polynomial is not Weyl invariant")


def emit_presentation(rs: RootSystem, sl: bool = False,
                      max_weyl: Optional[int] = None) -> Presentation:
    """Generators-and-relations description of the quantum ring.

    Type A uses relations E_k(chi) - e_k(t); types B/C use
    E_{2k}(chi) - (-1)^k e_k(t^2); type D additionally replaces the top even
    relation by det A(chi) - e_n(t).  The classical-limit invariant is
    checked for every relation before returning.
    """
    from . import presentations as cp

    n = rs.rank
    gens = ["x%d" % i for i in range(1, n + 1)] + ["t%d" % i for i in range(1, n + 1)] + ["hbar"]
    chi_defs = [delta_class_shift(rs, -Weight.basis(i, n)) for i in range(1, n + 1)]
    rels: list[RatExpr] = []
    if rs.family == "A":
        for k in range(1, n + 1):
            rels.append(cp.elementary_E(rs.family, n, k) - _ek_of_t(n, k))
    elif rs.family in ("B", "C"):
        for k in range(1, n + 1):
            rels.append(cp.elementary_E(rs.family, n, 2 * k)
                        - Fraction(-1) ** k * _ek_of_t_squared(n, k))
    else:
        for k in range(1, n):
            rels.append(cp.elementary_E(rs.family, n, 2 * k)
                        - Fraction(-1) ** k * _ek_of_t_squared(n, k))
        from .symbolic import determinant
        rels.append(determinant(cp.a_chi(n)) - _ek_of_t(n, n))
    for r in rels:
        if not r.is_zero():
            check_classical_limit(rs, r)
    if sl and rs.family == "A":
        # the center relation e_1(t) = 0 cuts the special-linear quotient; it
        # lives in the coefficient ring and is exempt from the trace shape
        rels.append(-_ek_of_t(n, 1))
    return Presentation(rs.family, n, gens, rels, chi_defs, sl_quotient=sl)


def _ek_of_t(n: int, k: int) -> RatExpr:
    """Elementary symmetric polynomial in t_i = -e_i."""
    from itertools import combinations
    acc: Poly = {}
    for sub in combinations(range(1, n + 1), k):
        mono = mono_of([(eps(i), 1) for i in sub])
        acc[mono] = acc.get(mono, 0) + Fraction(-1) ** k
    return RatExpr.from_poly(acc)


def _ek_of_t_squared(n: int, k: int) -> RatExpr:
    from itertools import combinations
    acc: Poly = {}
    for sub in combinations(range(1, n + 1), k):
        mono = mono_of([(eps(i), 2) for i in sub])
        acc[mono] = acc.get(mono, 0) + Fraction(1)
    return RatExpr.from_poly(acc)
