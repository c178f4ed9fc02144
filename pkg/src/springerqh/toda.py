"""Degeneration of the presentation matrices to flag-variety matrices.

The degeneration substitutes q^beta -> hbar^{-<2 rho, beta>} q^beta, then
conjugates by a diagonal matrix of (half-integral) hbar powers and takes the
entrywise hbar -> infinity limit.  Half powers ride on the formal square
root s of hbar; the conjugator invariant (pairwise-integral exponent
differences) guarantees that s cancels from every conjugated entry, which
the engine asserts.  The expected limit matrices are stored as explicit
fixtures and compared exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .presentations import a_chi, m_chi
from .reporting import VerifyReport, timed
from .rootdata import DomainError, RootSystem, Weight, build_root_system
from .stable import delta_class_shift
from .symbolic import (HBAR, RAT_ONE, RAT_ZERO, SVAR, LimitDivergenceError,
                       RatExpr, SymMatrix, char_poly, q_monomial, qvar, xvar)


def toda_substitute(x: RatExpr, rs: RootSystem) -> RatExpr:
    """Apply q^beta -> hbar^{-<2 rho, beta>} q^beta to every quantum monomial."""
    table = {}
    for i in range(1, rs.rank + 1):
        c = 2 * rs.rho.coords[i - 1]
        if c.denominator != 1:
            raise AssertionError("pairing of 2 rho with a basis covector is not integral")
        c = int(c)
        if c:
            table[qvar(i)] = (Fraction(1), [(SVAR, -2 * c), (qvar(i), 1)])
    return x.subst_monomial(table)


@dataclass
class TodaJob:
    matrix: SymMatrix
    rs: RootSystem
    conjugator: Sequence[Fraction]          # hbar exponents, half-integers allowed
    signs: Optional[Sequence[int]] = None   # optional sign diagonal
    expected: Optional[SymMatrix] = None

    def __post_init__(self):
        if len(self.conjugator) != self.matrix.dim:
            raise DomainError("conjugator length must match the matrix dimension")
        c0 = Fraction(self.conjugator[0])
        for c in self.conjugator:
            if (Fraction(c) - c0).denominator != 1:
                raise DomainError("conjugator exponent differences must be integral")


class TodaMismatch(AssertionError):
    def __init__(self, i: int, j: int, got: RatExpr, want: RatExpr):
        super().__init__("limit entry (%d, %d) is %s, expected %s"
                         % (i, j, got.to_text(), want.to_text()))
        self.position = (i, j)


def toda_matrix_limit(job: TodaJob) -> SymMatrix:
    """Conjugate, substitute, and take the entrywise limit.

    Raises LimitDivergenceError naming the entry when any entry diverges and
    TodaMismatch when an expected matrix is attached and differs.
    """
    n = job.matrix.dim
    conj = [Fraction(c) for c in job.conjugator]
    signs = list(job.signs) if job.signs is not None else [1] * n
    out = SymMatrix.zero(n)
    for i in range(n):
        for j in range(n):
            entry = job.matrix.rows[i][j]
            if entry.is_zero():
                continue
            diff = conj[i] - conj[j]
            factor = RatExpr.const(signs[i] * signs[j]) * RatExpr.var(SVAR, int(2 * diff))
            entry = factor * entry
            entry = toda_substitute(entry, job.rs)
            try:
                lim = entry.limit_hbar_inf()
            except LimitDivergenceError as exc:
                raise LimitDivergenceError(exc.degree_gap) from TodaMismatch(
                    i, j, entry, RAT_ZERO)
            if any(v == SVAR for v in lim.variables()):
                raise AssertionError("limit entry (%d, %d) kept a half power" % (i, j))
            out.rows[i][j] = lim
    if job.expected is not None:
        for i in range(n):
            for j in range(n):
                if out.rows[i][j] != job.expected.rows[i][j]:
                    raise TodaMismatch(i, j, out.rows[i][j], job.expected.rows[i][j])
    return out


# ---------------------------------------------------------------------------
# concrete inputs and expected limits


def m_chi_concrete(family: str, n: int) -> SymMatrix:
    """Presentation matrix with each diagonal symbol expanded as a divisor
    symbol plus its scalar shift, ready for the degeneration."""
    rs = build_root_system(family, n)
    base = m_chi(family, n)
    table = {}
    for i in range(1, n + 1):
        table[xvar(i)] = RatExpr.var(xvar(i)) + delta_class_shift(rs, -Weight.basis(i, n))
    return base.apply(lambda e: e.substitute(table))


def _x(i: int) -> RatExpr:
    return RatExpr.var(xvar(i))


def _q(i: int) -> RatExpr:
    return q_monomial([(i, 1)])


def _qr(i: int, j: int) -> RatExpr:
    return q_monomial([(i, 1), (j, -1)])


def flag_matrix_a(n: int) -> SymMatrix:
    """Expected type-A limit: tridiagonal with -1 above and q_i/q_{i+1} below."""
    m = SymMatrix.zero(n)
    for i in range(n):
        m.rows[i][i] = _x(i + 1)
        if i + 1 < n:
            m.rows[i][i + 1] = RatExpr.const(-1)
            m.rows[i + 1][i] = _qr(i + 1, i + 2)
    return m


def flag_matrix_bc(family: str, n: int) -> SymMatrix:
    """Expected type-B/C limit (2n x 2n, block bidiagonal with a center coupling)."""
    p = 2 if family.upper() == "B" else 1
    dim = 2 * n
    m = SymMatrix.zero(dim)
    for i in range(1, n + 1):
        m.rows[i - 1][i - 1] = _x(i)
        m.rows[n + i - 1][n + i - 1] = -_x(n + 1 - i)
    for i in range(1, n):
        m.rows[i - 1][i] = RAT_ONE
        m.rows[i][i - 1] = -_qr(i, i + 1)
        m.rows[n + i - 1][n + i] = RAT_ONE
        m.rows[n + i][n + i - 1] = -_qr(n - i, n + 1 - i)
    m.rows[n - 1][n] = RatExpr.const(p)
    m.rows[n][n - 1] = RatExpr.const(-p) * (_q(n) ** p)
    if p == 1:
        # type C keeps the full lower-left antidiagonal -q_j
        for i in range(2, n + 1):
            j = n + 1 - i
            m.rows[n + i - 1][j - 1] = -_q(j)
    return m


def flag_matrix_c_extended(n: int) -> SymMatrix:
    """The (2n+1)-dimensional matrix sharing y * char(limit) in type C."""
    dim = 2 * n + 1
    m = SymMatrix.zero(dim)
    for i in range(1, n + 1):
        m.rows[i - 1][i - 1] = _x(i)
        m.rows[n + i][n + i] = -_x(n + 1 - i)
    for i in range(1, n):
        m.rows[i - 1][i] = RatExpr.const(-1)
        m.rows[i][i - 1] = _qr(i, i + 1)
        m.rows[n + i][n + i + 1] = RAT_ONE
        m.rows[n + i + 1][n + i] = -_qr(n - i, n + 1 - i)
    m.rows[n - 1][n] = RatExpr.const(Fraction(-1, 2))
    m.rows[n][n - 1] = _q(n)
    m.rows[n][n + 1] = RatExpr.const(Fraction(1, 2))
    m.rows[n + 1][n] = -_q(n)
    return m


def flag_matrix_d(n: int, flipped: bool = False) -> SymMatrix:
    """Expected type-D limit; ``flipped`` gives the sign-adjusted companion
    with the same characteristic polynomial."""
    dim = 2 * n
    m = SymMatrix.zero(dim)
    up, down = (RatExpr.const(-1), 1) if flipped else (RAT_ONE, -1)
    for i in range(1, n + 1):
        m.rows[i - 1][i - 1] = _x(i)
        m.rows[n + i - 1][n + i - 1] = -_x(n + 1 - i)
    for i in range(1, n):
        m.rows[i - 1][i] = up
        m.rows[i][i - 1] = RatExpr.const(down) * _qr(i, i + 1)
        m.rows[n + i - 1][n + i] = RAT_ONE
        m.rows[n + i][n + i - 1] = -_qr(n - i, n + 1 - i)
    qq = _q(n - 1) * _q(n)
    m.rows[n - 2][n] = up
    m.rows[n][n - 2] = RatExpr.const(down) * qq
    m.rows[n - 1][n + 1] = RAT_ONE
    m.rows[n + 1][n - 1] = -qq
    return m


# ---------------------------------------------------------------------------
# verification


def _conjugator_bc(n: int) -> list[Fraction]:
    return [Fraction(2 * k - 2 * n - 1, 2) for k in range(1, 2 * n + 1)]


def _conjugator_d(n: int) -> list[Fraction]:
    return [Fraction(k - n) for k in range(1, n + 1)] + \
           [Fraction(k - 1) for k in range(1, n + 1)]


def verify_shift_vanishes(family: str, n: int) -> VerifyReport:
    """The scalar shifts of the diagonal classes die in the limit."""
    inst = {"family": family, "rank": n}
    with timed() as t:
        rs = build_root_system(family, n)
        for i in range(1, n + 1):
            shift = delta_class_shift(rs, -Weight.basis(i, n))
            lim = toda_substitute(shift, rs).limit_hbar_inf()
            if not lim.is_zero():
                return VerifyReport("toda", inst, False,
                                    "shift %d limits to %s" % (i, lim.to_text()),
                                    t.elapsed)
    return VerifyReport("toda", inst, True, "", t.elapsed)


def verify_givental_kim(n: int) -> VerifyReport:
    """Type-A limit reproduces the flag-variety tridiagonal matrix."""
    inst = {"family": "A", "rank": n}
    with timed() as t:
        rs = build_root_system("A", n)
        shifts = verify_shift_vanishes("A", n)
        if not shifts.passed:
            return VerifyReport("toda", inst, False, shifts.detail, t.elapsed)
        job = TodaJob(
            matrix=m_chi_concrete("A", n),
            rs=rs,
            conjugator=[Fraction(k - 1) for k in range(1, n + 1)],
            signs=[(-1) ** (k - 1) for k in range(1, n + 1)],
            expected=flag_matrix_a(n),
        )
        try:
            toda_matrix_limit(job)
        except (TodaMismatch, LimitDivergenceError) as exc:
            return VerifyReport("toda", inst, False, str(exc), t.elapsed)
    return VerifyReport("toda", inst, True, "", t.elapsed)


def _verify_bc_limit(family: str, n: int) -> VerifyReport:
    inst = {"family": family, "rank": n}
    with timed() as t:
        rs = build_root_system(family, n)
        job = TodaJob(
            matrix=m_chi_concrete(family, n),
            rs=rs,
            conjugator=_conjugator_bc(n),
            expected=flag_matrix_bc(family, n),
        )
        try:
            toda_matrix_limit(job)
        except (TodaMismatch, LimitDivergenceError) as exc:
            return VerifyReport("toda", inst, False, str(exc), t.elapsed)
    return VerifyReport("toda", inst, True, "", t.elapsed)


def verify_typeB_limit(n: int) -> VerifyReport:
    return _verify_bc_limit("B", n)


def verify_typeC_limit(n: int) -> VerifyReport:
    return _verify_bc_limit("C", n)


def verify_typeC_extension(n: int) -> VerifyReport:
    """y * char(limit matrix) equals the characteristic polynomial of the
    (2n+1)-dimensional companion, as an exact polynomial identity."""
    inst = {"family": "C", "rank": n}
    with timed() as t:
        limit = flag_matrix_bc("C", n)
        big = flag_matrix_c_extended(n)
        small_coeffs = char_poly(limit)
        big_coeffs = char_poly(big)
        ok = all(a == b for a, b in zip(small_coeffs, big_coeffs[:-1])) \
            and big_coeffs[-1].is_zero()
        detail = "" if ok else "characteristic polynomials differ"
    return VerifyReport("toda", inst, ok, detail, t.elapsed)


def verify_typeD_limit(n: int) -> VerifyReport:
    """Type-D: the limit matches the fixture, and the fixture shares its
    characteristic polynomial with the sign-adjusted companion."""
    inst = {"family": "D", "rank": n}
    with timed() as t:
        rs = build_root_system("D", n)
        job = TodaJob(
            matrix=m_chi_concrete("D", n),
            rs=rs,
            conjugator=_conjugator_d(n),
            expected=flag_matrix_d(n),
        )
        try:
            toda_matrix_limit(job)
        except (TodaMismatch, LimitDivergenceError) as exc:
            return VerifyReport("toda", inst, False, str(exc), t.elapsed)
        if char_poly(flag_matrix_d(n)) != char_poly(flag_matrix_d(n, flipped=True)):
            return VerifyReport("toda", inst, False,
                                "companion characteristic polynomial differs", t.elapsed)
    return VerifyReport("toda", inst, True, "", t.elapsed)
