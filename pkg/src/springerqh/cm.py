"""Classical trigonometric Dunkl operators and the radial-part map.

Elements of the skew group algebra are finite sums of group elements with
rational-function coefficients in the momenta p_i, the quantum variables
and hbar; multiplication twists coefficients through the group action.
Summing the coefficients of a symmetrized Dunkl power gives the radial
part, which the trace of the momentum version of the coset matrix must
reproduce exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .reporting import VerifyReport, timed
from .rootdata import DomainError, RootSystem, Weight, pairing, stabilizer_generators
from .stable import (eps_linear, one_minus_q_power, q_power, theta_matrix,
                     weyl_order)
from .symbolic import (HBAR, RAT_ONE, RAT_ZERO, RatExpr, SymMatrix, pvar,
                       qvar, rat_sum)
from .weyl import WeylElem, all_elements, min_coset_reps, reflection_elem


def p_linear(lam: Weight) -> RatExpr:
    """The weight as a linear function of the momenta."""
    acc = RAT_ZERO
    for i, c in enumerate(lam.coords, start=1):
        if c:
            acc = acc + Fraction(c) * RatExpr.var(pvar(i))
    return acc


def coeff_act(rs: RootSystem, w: WeylElem, c: RatExpr) -> RatExpr:
    """Group action on coefficients: signed permutation of momenta and of
    the quantum variables alike."""
    table = {}
    for i in range(1, rs.rank + 1):
        im = w.images[i - 1]
        if im != i:
            sign = Fraction(1 if im > 0 else -1)
            table[qvar(i)] = (Fraction(1), [(qvar(abs(im)), 1 if im > 0 else -1)])
            table[pvar(i)] = (sign, [(pvar(abs(im)), 1)])
    if not table:
        return c
    return c.subst_monomial(table)


class SkewElem:
    """Finite sum of group elements with rational-function coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Optional[dict[WeylElem, RatExpr]] = None):
        self.coeffs = {}
        if coeffs:
            for w, c in coeffs.items():
                if not c.is_zero():
                    self.coeffs[w] = c

    @staticmethod
    def scalar(n: int, c: RatExpr) -> "SkewElem":
        return SkewElem({WeylElem.identity(n): c})

    @staticmethod
    def group(w: WeylElem) -> "SkewElem":
        return SkewElem({w: RAT_ONE})

    def __add__(self, other: "SkewElem") -> "SkewElem":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            acc = out.get(w, RAT_ZERO) + c
            if acc.is_zero():
                out.pop(w, None)
            else:
                out[w] = acc
        return SkewElem(out)

    def __sub__(self, other: "SkewElem") -> "SkewElem":
        return self + other.scale(RatExpr.const(-1))

    def scale(self, c: RatExpr) -> "SkewElem":
        return SkewElem({w: cc * c for w, cc in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, SkewElem) and self.coeffs == other.coeffs

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient_sum(self) -> RatExpr:
        return rat_sum(list(self.coeffs.values()))

    def identity_coefficient(self, n: int) -> RatExpr:
        return self.coeffs.get(WeylElem.identity(n), RAT_ZERO)


def skew_mul(rs: RootSystem, a: SkewElem, b: SkewElem) -> SkewElem:
    """Product with the twisted coefficient rule (f w)(g v) = f w(g) wv."""
    out: dict[WeylElem, RatExpr] = {}
    for w, f in a.coeffs.items():
        for v, g in b.coeffs.items():
            wv = w * v
            term = f * coeff_act(rs, w, g)
            acc = out.get(wv, RAT_ZERO) + term
            if acc.is_zero():
                out.pop(wv, None)
            else:
                out[wv] = acc
    return SkewElem(out)


def skew_power(rs: RootSystem, a: SkewElem, k: int) -> SkewElem:
    out = SkewElem.scalar(rs.rank, RAT_ONE)
    for _ in range(k):
        out = skew_mul(rs, out, a)
    return out


def dunkl(rs: RootSystem, lam: Weight) -> SkewElem:
    """p_lam minus hbar sum over positive roots of
    <lam, a^v> q^{a^v}/(1 - q^{a^v}) s_a; linear in lam."""
    n = rs.rank
    out = SkewElem({WeylElem.identity(n): p_linear(lam)})
    h = RatExpr.var(HBAR)
    for idx, (_, coroot) in enumerate(rs.positive_roots):
        c = pairing(lam, coroot)
        if c:
            coeff = -h * Fraction(c) * q_power(coroot) / one_minus_q_power(coroot)
            out = out + SkewElem({reflection_elem(rs, idx): coeff})
    return out


def radial_part(rs: RootSystem, lam: Weight, k: int) -> RatExpr:
    """Sum of all coefficients of sum_u Dun_{u lam}^k over the minimal
    coset representatives of the weight's stabilizer."""
    if k < 1:
        raise DomainError("power must be positive")
    parts = []
    for u in min_coset_reps(rs, lam).reps:
        power = skew_power(rs, dunkl(rs, u.act_weight(lam)), k)
        parts.append(power.coefficient_sum())
    return rat_sum(parts)


def y_matrix(rs: RootSystem, lam: Weight) -> SymMatrix:
    """The coset matrix with each diagonal class replaced by its momentum."""
    th = theta_matrix(rs, lam)
    return th.scalar_skeleton(lambda i, w: p_linear(w))


def gauge_classical(x: RatExpr, rs: RootSystem) -> RatExpr:
    """Momentum shift p_lam -> p_lam + hbar sum <lam, a^v> q^{a^v}/(1-q^{a^v});
    quantum variables are fixed.  A ring morphism."""
    h = RatExpr.var(HBAR)
    table = {}
    for i in range(1, rs.rank + 1):
        shift = RAT_ZERO
        for _, coroot in rs.positive_roots:
            c = pairing(Weight.basis(i, rs.rank), coroot)
            if c:
                shift = shift + h * Fraction(c) * q_power(coroot) / one_minus_q_power(coroot)
        table[pvar(i)] = RatExpr.var(pvar(i)) + shift
    return x.substitute(table)


# ---------------------------------------------------------------------------
# verification


def verify_cm_corollary(rs: RootSystem, lam: Weight, k: int) -> VerifyReport:
    """trace(Y(lam)^k) must equal the radial part of the orbit power sum."""
    inst = {"family": rs.family, "rank": rs.rank, "weight": str(lam), "k": k}
    with timed() as t:
        lhs = y_matrix(rs, lam).power(k).trace()
        rhs = radial_part(rs, lam, k)
        ok = lhs == rhs
        detail = "" if ok else "trace %s != radial part %s" % (lhs.to_text(), rhs.to_text())
    return VerifyReport("cm", inst, ok, detail, t.elapsed)


def verify_hamiltonian(rs: RootSystem, lam: Weight) -> VerifyReport:
    """For strictly dominant weights, trace(Y^2) is the quadratic Hamiltonian:
    the momentum power sum minus hbar^2 times orbit-summed pairings squared
    over q^{a^v} - 2 + q^{-a^v}."""
    inst = {"family": rs.family, "rank": rs.rank, "weight": str(lam)}
    if stabilizer_generators(rs, lam):
        raise DomainError("the quadratic Hamiltonian check needs a strictly dominant weight")
    with timed() as t:
        W = all_elements(rs)
        lhs = y_matrix(rs, lam).power(2).trace()
        parts = [p_linear(w.act_weight(lam)) ** 2 for w in W]
        h2 = RatExpr.var(HBAR) ** 2
        for _, coroot in rs.positive_roots:
            total = Fraction(0)
            for w in W:
                total += pairing(w.act_weight(lam), coroot) ** 2
            den = q_power(coroot) - RatExpr.const(2) + q_power(-coroot)
            parts.append(-h2 * RatExpr.const(total) / den)
        rhs = rat_sum(parts)
        ok = lhs == rhs
        detail = "" if ok else "trace %s != Hamiltonian %s" % (lhs.to_text(), rhs.to_text())
    return VerifyReport("hamiltonian", inst, ok, detail, t.elapsed)


def verify_dunkl_commutativity(rs: RootSystem) -> VerifyReport:
    """Dunkl operators of the fundamental weights commute pairwise."""
    inst = {"family": rs.family, "rank": rs.rank}
    with timed() as t:
        ops = [dunkl(rs, w) for w in rs.fundamental_weights]
        for i in range(len(ops)):
            for j in range(i + 1, len(ops)):
                ab = skew_mul(rs, ops[i], ops[j])
                ba = skew_mul(rs, ops[j], ops[i])
                if ab != ba:
                    return VerifyReport("cm", inst, False,
                                        "fundamental operators %d and %d do not commute"
                                        % (i, j), t.elapsed)
    return VerifyReport("cm", inst, True, "", t.elapsed)


def regular_rep(rs: RootSystem, x: SkewElem) -> SymMatrix:
    """Left multiplication on the algebra, written on the group basis with
    coefficients collected on the right; entry (uw, w) is (uw)^{-1}(f_u)."""
    order = weyl_order(rs)
    index = {w: i for i, w in enumerate(order)}
    n = len(order)
    mat = SymMatrix.zero(n)
    for u, f in x.coeffs.items():
        for w in order:
            uw = u * w
            i, j = index[uw], index[w]
            mat.rows[i][j] = mat.rows[i][j] + coeff_act(rs, uw.inverse(), f)
    return mat


def verify_tracefree(rs: RootSystem, lam: Weight, k: int) -> VerifyReport:
    """The regular-representation trace of
    sum_w Dun_{w lam}^k - sum_w w Dun_lam^k w^{-1} must vanish."""
    inst = {"family": rs.family, "rank": rs.rank, "weight": str(lam), "k": k}
    if stabilizer_generators(rs, lam):
        raise DomainError("the trace-free identity needs a strictly dominant weight")
    with timed() as t:
        W = all_elements(rs)
        n = rs.rank
        total = SkewElem()
        base = skew_power(rs, dunkl(rs, lam), k)
        for w in W:
            total = total + skew_power(rs, dunkl(rs, w.act_weight(lam)), k)
            conj = skew_mul(rs, skew_mul(rs, SkewElem.group(w), base),
                            SkewElem.group(w.inverse()))
            total = total - conj
        tr = regular_rep(rs, total).trace()
        ok = tr.is_zero()
        detail = "" if ok else "trace is %s" % tr.to_text()
    return VerifyReport("tracefree", inst, ok, detail, t.elapsed)
