"""Exact multivariate rational arithmetic over Q.

The coefficient ring used throughout the package is

    Q[hbar, s, e_1..e_n, p_1..p_n][q_1^{+-1}..q_n^{+-1}]

localized at products of binomials ``1 - (q-monomial)`` and at linear forms
in the ``e`` variables, with ``s`` a formal square root of ``hbar``
(``s^2 = hbar`` is applied on normalization).  Denominators are kept in
factored form: a power of ``s`` together with a multiset of monic factor
polynomials.  Because every denominator enters through a small set of
canonicalizing constructors, reduced fractions are unique and equality is a
dictionary comparison.

Variables, in the fixed term order from smallest to largest:

    h < s < e1 < ... < en < p1 < ... < pn < q1 < ... < qn < x1 < ... < y

``xodd`` variables double as abstract commuting generator symbols (divisor
classes on the quantum-cohomology side, ``chi`` diagonal symbols in the
characteristic-polynomial computations); ``y`` is reserved for
characteristic-polynomial checks.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Optional, Sequence

# ---------------------------------------------------------------------------
# variables

_STRIDE = 1 << 20

KIND_HBAR = 0
KIND_S = 1
KIND_EPS = 2
KIND_P = 3
KIND_Q = 4
KIND_X = 5
KIND_Y = 6

HBAR = KIND_HBAR * _STRIDE
SVAR = KIND_S * _STRIDE
YVAR = KIND_Y * _STRIDE

_KIND_PREFIX = {KIND_EPS: "e", KIND_P: "p", KIND_Q: "q", KIND_X: "x"}
_PREFIX_KIND = {v: k for k, v in _KIND_PREFIX.items()}


def eps(i: int) -> int:
    """Equivariant parameter e_i (1-indexed)."""
    return KIND_EPS * _STRIDE + i


def pvar(i: int) -> int:
    """Momentum variable p_i (1-indexed)."""
    return KIND_P * _STRIDE + i


def qvar(i: int) -> int:
    """Quantum variable q_i (1-indexed, Laurent)."""
    return KIND_Q * _STRIDE + i


def xvar(i: int) -> int:
    """Abstract commuting generator symbol number i (1-indexed)."""
    return KIND_X * _STRIDE + i


def var_kind(v: int) -> int:
    return v // _STRIDE


def var_index(v: int) -> int:
    return v % _STRIDE


def var_name(v: int) -> str:
    kind = var_kind(v)
    if kind == KIND_HBAR:
        return "h"
    if kind == KIND_S:
        return "s"
    if kind == KIND_Y:
        return "y"
    return "%s%d" % (_KIND_PREFIX[kind], var_index(v))


def var_from_name(name: str) -> int:
    if name == "h":
        return HBAR
    if name == "s":
        return SVAR
    if name == "y":
        return YVAR
    m = re.fullmatch(r"([epqx])(\d+)", name)
    if m is None:
        raise ValueError("unknown variable name %r" % name)
    return _PREFIX_KIND[m.group(1)] * _STRIDE + int(m.group(2))


# ---------------------------------------------------------------------------
# monomials: sorted tuples of (variable, exponent), exponents nonzero.
# Only q variables may carry negative exponents; s^2 is rewritten to hbar.

Mono = tuple
_ONE_MONO: Mono = ()


def _mono_fix(items: Iterable[tuple[int, int]]) -> Mono:
    """Sort, drop zero exponents and apply the s^2 -> hbar rewrite."""
    d = {}
    for v, e in items:
        if e:
            d[v] = d.get(v, 0) + e
    se = d.get(SVAR, 0)
    if se >= 2:
        d[HBAR] = d.get(HBAR, 0) + se // 2
        se %= 2
        if se:
            d[SVAR] = se
        else:
            del d[SVAR]
    out = tuple(sorted((v, e) for v, e in d.items() if e))
    for v, e in out:
        if e < 0 and var_kind(v) != KIND_Q:
            raise ArithmeticError("negative exponent on non-quantum variable %s" % var_name(v))
    return out


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        v1, e1 = m1[i]
        v2, e2 = m2[j]
        if v1 == v2:
            e = e1 + e2
            if e:
                out.append((v1, e))
            i += 1
            j += 1
        elif v1 < v2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    if i < n1:
        out.extend(m1[i:])
    if j < n2:
        out.extend(m2[j:])
    # the s^2 -> hbar rewrite triggers only when both operands carry s
    for pos, (v, e) in enumerate(out):
        if v > SVAR:
            break
        if v == SVAR and e >= 2:
            return _mono_fix(out)
    return tuple(out)


def _mono_sdeg(m: Mono) -> int:
    """Degree in s-units (hbar counts 2, s counts 1)."""
    d = 0
    for v, e in m:
        if v == HBAR:
            d += 2 * e
        elif v == SVAR:
            d += e
    return d


_KEY_CACHE: dict = {}


def _mono_key(m: Mono):
    """Total order on monomials: graded, then by exponents of later variables."""
    key = _KEY_CACHE.get(m)
    if key is None:
        key = (sum(e for _, e in m), tuple(sorted(m, reverse=True)))
        _KEY_CACHE[m] = key
    return key


# ---------------------------------------------------------------------------
# polynomials: dict {Mono: Fraction}, zero coefficients never stored

Poly = dict

_P_ZERO: Poly = {}


def poly_const(c) -> Poly:
    c = Fraction(c)
    return {_ONE_MONO: c} if c else {}


def poly_var(v: int, e: int = 1) -> Poly:
    return {_mono_fix([(v, e)]): Fraction(1)}


def _p_add_into(acc: Poly, p: Poly, scale: Fraction = Fraction(1)) -> None:
    for m, c in p.items():
        nc = acc.get(m, 0) + c * scale
        if nc:
            acc[m] = nc
        elif m in acc:
            del acc[m]


def p_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    _p_add_into(out, b)
    return out


def p_sub(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    _p_add_into(out, b, Fraction(-1))
    return out


def p_neg(a: Poly) -> Poly:
    return {m: -c for m, c in a.items()}


def p_scale(a: Poly, c) -> Poly:
    c = Fraction(c)
    if not c:
        return {}
    return {m: cc * c for m, cc in a.items()}


def p_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            nc = out.get(m, 0) + c1 * c2
            if nc:
                out[m] = nc
            elif m in out:
                del out[m]
    return out


def p_mul_mono(a: Poly, mono: Mono, c: Fraction = Fraction(1)) -> Poly:
    if not c:
        return {}
    return {_mono_mul(m, mono): cc * c for m, cc in a.items()}


def p_pow(a: Poly, n: int) -> Poly:
    if n < 0:
        raise ArithmeticError("negative polynomial power")
    out = poly_const(1)
    base = a
    while n:
        if n & 1:
            out = p_mul(out, base)
        base = p_mul(base, base) if n > 1 else base
        n >>= 1
    return out


def p_vars(a: Poly) -> set:
    vs = set()
    for m in a:
        for v, _ in m:
            vs.add(v)
    return vs


def _p_qshift(a: Poly) -> tuple[Poly, Mono]:
    """Shift so q-exponents are nonnegative; return (shifted, multiplier)."""
    mins: dict[int, int] = {}
    for m in a:
        for v, e in m:
            if e < 0 and var_kind(v) == KIND_Q and e < mins.get(v, 0):
                mins[v] = e
    if not mins:
        return a, _ONE_MONO
    mono = _mono_fix([(v, -e) for v, e in mins.items()])
    return p_mul_mono(a, mono), mono


def _p_lead(a: Poly) -> tuple[Mono, Fraction]:
    m = max(a, key=_mono_key)
    return m, a[m]


def _mono_divides(m1: Mono, m2: Mono) -> bool:
    d2 = dict(m2)
    for v, e in m1:
        if d2.get(v, 0) < e:
            return False
    return True


def _mono_div(m2: Mono, m1: Mono) -> Mono:
    d = dict(m2)
    for v, e in m1:
        d[v] = d.get(v, 0) - e
    return tuple(sorted((v, e) for v, e in d.items() if e))


def _var_widths(p: Poly, vars_: Iterable[int]) -> dict[int, int]:
    """Per-variable exponent width (max - min over the support)."""
    out = {}
    for v in vars_:
        lo = hi = None
        for m in p:
            e = 0
            for vv, ee in m:
                if vv == v:
                    e = ee
                    break
            lo = e if lo is None else min(lo, e)
            hi = e if hi is None else max(hi, e)
        out[v] = (hi or 0) - (lo or 0)
    return out


def _width_reject(a: Poly, b: Poly) -> bool:
    """True when per-variable widths rule out divisibility of a by b.

    Widths are additive under multiplication (the extreme terms of a product
    never cancel), so a divisible numerator is at least as wide as the
    divisor in every variable.
    """
    bw = _var_widths(b, p_vars(b))
    aw = _var_widths(a, bw.keys())
    return any(aw[v] < w for v, w in bw.items())


def p_div_exact(a: Poly, b: Poly) -> Optional[Poly]:
    """Return a/b if b divides a exactly, else None.  Handles Laurent input."""
    if not a:
        return {}
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(b) == 1:
        (mb, cb), = b.items()
        out: Poly = {}
        for m, c in a.items():
            d = dict(m)
            for v, e in mb:
                ne = d.get(v, 0) - e
                if ne < 0 and var_kind(v) != KIND_Q:
                    return None
                if ne:
                    d[v] = ne
                else:
                    d.pop(v, None)
            out[tuple(sorted(d.items()))] = c / cb
        return out
    a1, sh_a = _p_qshift(a)
    b1, sh_b = _p_qshift(b)
    lm, lc = _p_lead(b1)
    tail = [(m, c) for m, c in b1.items() if m != lm]
    coeffs = dict(a1)
    order = sorted(coeffs, key=_mono_key)  # ascending; the maximum sits last
    queued = set(order)
    quot: Poly = {}
    import bisect
    while order:
        m = order.pop()
        queued.discard(m)
        c = coeffs.pop(m, None)
        if not c:
            continue
        if not _mono_divides(lm, m):
            return None
        qm = _mono_div(m, lm)
        qc = c / lc
        quot[qm] = quot.get(qm, 0) + qc
        for tm, tc in tail:
            u = _mono_mul(qm, tm)
            nc = coeffs.get(u, 0) - qc * tc
            if nc:
                coeffs[u] = nc
                if u not in queued:
                    queued.add(u)
                    bisect.insort(order, u, key=_mono_key)
            else:
                coeffs.pop(u, None)
    # a/b = (a1/sh_a)/(b1/sh_b) = (a1/b1) * sh_b/sh_a
    adj = _mono_mul(sh_b, _mono_fix([(v, -e) for v, e in sh_a]))
    quot = {m: c for m, c in quot.items() if c}
    return p_mul_mono(quot, adj)


def _p_min_sdeg(a: Poly) -> int:
    return min(_mono_sdeg(m) for m in a)


def _p_max_sdeg(a: Poly) -> int:
    return max(_mono_sdeg(m) for m in a)


def _p_div_spow(a: Poly, k: int) -> Poly:
    """Divide by s^k (k in s-units); caller guarantees divisibility."""
    out = {}
    for m, c in a.items():
        d = dict(m)
        units = 2 * d.pop(HBAR, 0) + d.pop(SVAR, 0) - k
        if units < 0:
            raise ArithmeticError("inexact division by hbar power")
        if units >= 2:
            d[HBAR] = units // 2
        if units % 2:
            d[SVAR] = 1
        out[tuple(sorted(d.items()))] = c
    return out


def p_subst_scalar(a: Poly, v: int, value: Fraction) -> Poly:
    value = Fraction(value)
    out: Poly = {}
    for m, c in a.items():
        d = dict(m)
        e = d.pop(v, 0)
        if e and value == 0:
            if e < 0:
                raise ZeroDivisionError("substituting 0 into negative power")
            continue
        coeff = c * value ** e
        mono = tuple(sorted(d.items()))
        nc = out.get(mono, 0) + coeff
        if nc:
            out[mono] = nc
        elif mono in out:
            del out[mono]
    return out


def p_eval(a: Poly, point: Mapping[int, Fraction]) -> Fraction:
    total = Fraction(0)
    for m, c in a.items():
        val = c
        for v, e in m:
            val *= Fraction(point[v]) ** e
        total += val
    return total


def p_degree(a: Poly, v: int) -> int:
    if not a:
        return 0
    return max(dict(m).get(v, 0) for m in a)


def p_coeff_of(a: Poly, v: int, e: int) -> Poly:
    """Coefficient of v^e, as a polynomial in the remaining variables."""
    out = {}
    for m, c in a.items():
        d = dict(m)
        if d.pop(v, 0) == e:
            out[tuple(sorted(d.items()))] = c
    return out


# ---------------------------------------------------------------------------
# factored denominators

FrozenPoly = tuple


def _freeze(p: Poly) -> FrozenPoly:
    return tuple(sorted(p.items(), key=lambda mc: _mono_key(mc[0])))


def _thaw(fp: FrozenPoly) -> Poly:
    return dict(fp)


def _cyclotomic(d: int) -> Poly:
    """The d-th cyclotomic polynomial in the placeholder variable y."""
    num: Poly = p_sub(poly_var(YVAR, d), poly_const(1))
    for dd in range(1, d):
        if d % dd == 0:
            q = p_div_exact(num, _cyclotomic(dd))
            assert q is not None
            num = q
    return num


def _subst_mono_for_y(p: Poly, direction: Mono) -> Poly:
    out = {}
    for m, c in p.items():
        e = dict(m).get(YVAR, 0)
        mono = _ONE_MONO
        for _ in range(e):
            mono = _mono_mul(mono, direction)
        out[mono] = out.get(mono, 0) + c
    return {m: c for m, c in out.items() if c}


def _factor_univariate_in_direction(p: Poly) -> Optional[list[Poly]]:
    """Split p when its support lies on a line in exponent space.

    Writing the support as ``m0 * d^k`` for a primitive direction ``d``
    (a Laurent monomial) turns p into a univariate polynomial, which is then
    split by trial division against ``y -+ 1`` and small cyclotomics.  This
    recognizes every shape that arises from the tracked denominators:
    ``1 - q^beta`` with imprimitive beta, powers of binomial differences,
    and powers of linear forms.  Returns None when no split is found.
    """
    monos = [dict(m) for m in p]
    if len(monos) < 2:
        return None
    base = monos[0]
    diffs = []
    for d in monos:
        keys = set(base) | set(d)
        diffs.append({v: d.get(v, 0) - base.get(v, 0) for v in keys
                      if d.get(v, 0) != base.get(v, 0)})
    direction = None
    for d in diffs:
        if d:
            g = 0
            for e in d.values():
                g = gcd(g, abs(e))
            direction = {v: e // g for v, e in d.items()}
            break
    if direction is None:
        return None
    degs = []
    for d in diffs:
        if not d:
            degs.append(0)
            continue
        if set(d) != set(direction):
            return None
        ratio = None
        for v, e in d.items():
            if e % direction[v]:
                return None
            r = e // direction[v]
            if ratio is None:
                ratio = r
            elif r != ratio:
                return None
        degs.append(ratio)
    lo = min(degs)
    degs = [k - lo for k in degs]
    uni: Poly = {}
    for (m, c), k in zip(p.items(), degs):
        mono = _mono_fix([(YVAR, k)]) if k else _ONE_MONO
        uni[mono] = uni.get(mono, 0) + c
    uni = {m: c for m, c in uni.items() if c}
    if p_degree(uni, YVAR) < 2:
        return None
    factors: list[Poly] = []
    work = uni
    changed = True
    while changed and p_degree(work, YVAR) > 1:
        changed = False
        for cand in (p_sub(poly_var(YVAR), poly_const(1)),
                     p_add(poly_var(YVAR), poly_const(1))):
            q = p_div_exact(work, cand)
            if q is not None:
                factors.append(cand)
                work = q
                changed = True
                break
        if not changed:
            for d in range(2, p_degree(work, YVAR) + 1):
                cyc = _cyclotomic(d)
                q = p_div_exact(work, cyc)
                if q is not None:
                    factors.append(cyc)
                    work = q
                    changed = True
                    break
    factors.append(work)
    if len(factors) == 1:
        return None
    # Homogenize each univariate piece back to a genuine polynomial: with
    # d = dpos/dneg, a piece of degree k maps to dneg^k * piece(d).
    dpos = _mono_fix([(v, e) for v, e in direction.items() if e > 0])
    dneg = _mono_fix([(v, -e) for v, e in direction.items() if e < 0])
    cleared = []
    for f in factors:
        k = p_degree(f, YVAR)
        out: Poly = {}
        for m, c in f.items():
            j = dict(m).get(YVAR, 0)
            mono = _ONE_MONO
            for _ in range(j):
                mono = _mono_mul(mono, dpos)
            for _ in range(k - j):
                mono = _mono_mul(mono, dneg)
            out[mono] = out.get(mono, 0) + c
        cleared.append({m: c for m, c in out.items() if c})
    prod = poly_const(1)
    for f in cleared:
        prod = p_mul(prod, f)
    rest = p_div_exact(p, prod)
    if rest is None or len(rest) != 1:
        return None
    ((rm, rc),) = rest.items()
    if rm or rc != 1:
        cleared.append({rm: rc})
    return cleared


_FACTOR_REGISTRY: dict[FrozenPoly, None] = {}


def _register_factor(f: FrozenPoly) -> FrozenPoly:
    _FACTOR_REGISTRY.setdefault(f, None)
    return f


def _registry_split(prim: Poly) -> Optional[tuple[Poly, Poly]]:
    """Peel off a previously seen canonical factor, if one divides."""
    fp = _freeze(prim)
    for f in _FACTOR_REGISTRY:
        if f == fp:
            return None
        fpoly = _thaw(f)
        if len(fpoly) > len(prim) or _width_reject(prim, fpoly):
            continue
        q = p_div_exact(prim, fpoly)
        if q is not None and len(q) > 1:
            return fpoly, q
    return None


def canonical_factor(p: Poly) -> tuple[Fraction, Mono, int, list[tuple[FrozenPoly, int]]]:
    """Canonicalize a denominator contribution.

    Returns ``(scalar, q_mono, s_units, factors)`` such that

        p = scalar * q_mono * s^{s_units} * prod(f^m for f, m in factors)

    with each factor monic (leading coefficient 1 in the term order),
    non-constant, with nonnegative exponents and trivial monomial content.
    Factors are split along one-dimensional support and against the registry
    of factors already in circulation, so a product of tracked denominators
    re-factors into the same canonical pieces it was built from.
    """
    if not p:
        raise ZeroDivisionError("zero denominator")
    # monomial content
    common: Optional[dict] = None
    for m in p:
        d = dict(m)
        if common is None:
            common = d
        else:
            for v in list(common):
                common[v] = min(common[v], d.get(v, 0))
            for v, e in d.items():
                if v not in common:
                    common[v] = min(0, e)
    assert common is not None
    content = _mono_fix([(v, e) for v, e in common.items() if e > 0 or var_kind(v) == KIND_Q])
    content_d = dict(content)
    prim = {}
    for m, c in p.items():
        d = dict(m)
        for v, e in content_d.items():
            ne = d.get(v, 0) - e
            if ne:
                d[v] = ne
            else:
                d.pop(v, None)
        prim[tuple(sorted(d.items()))] = c

    q_mono_part = []
    s_units = 0
    extra_factors: list[tuple[FrozenPoly, int]] = []
    for v, e in content:
        k = var_kind(v)
        if k == KIND_Q:
            q_mono_part.append((v, e))
        elif k == KIND_HBAR:
            s_units += 2 * e
        elif k == KIND_S:
            s_units += e
        else:
            extra_factors.append((_freeze(poly_var(v)), e))

    scalar = Fraction(1)
    factors: list[tuple[FrozenPoly, int]] = list(extra_factors)
    if len(prim) == 1:
        ((m0, c0),) = prim.items()
        assert m0 == _ONE_MONO
        scalar *= c0
    else:
        _, lc = _p_lead(prim)
        scalar *= lc
        prim = p_scale(prim, Fraction(1) / lc)
        pieces = _factor_univariate_in_direction(prim)
        if pieces is None:
            split = _registry_split(prim)
            pieces = list(split) if split is not None else None
        if pieces is None:
            factors.append((_register_factor(_freeze(prim)), 1))
        else:
            for piece in pieces:
                sc, qm, su, fs = canonical_factor(piece)
                scalar *= sc
                q_mono_part.extend(qm)
                s_units += su
                factors.extend(fs)
    return scalar, _mono_fix(q_mono_part), s_units, factors


# ---------------------------------------------------------------------------
# rational expressions


class RatExpr:
    """Immutable rational expression in canonical form.

    The denominator is ``s^{s_units} * prod(factors)`` with monic factors;
    all q-Laurent content lives in the numerator.  Equality and hashing are
    structural, which by canonicality coincides with equality of rational
    functions.
    """

    __slots__ = ("num", "s_units", "factors", "_hash")

    def __init__(self, num: Poly, s_units: int, factors: tuple, _raw: bool = False):
        self.num = num
        self.s_units = s_units
        self.factors = factors
        self._hash = None

    # -- construction ------------------------------------------------------

    @staticmethod
    def const(c) -> "RatExpr":
        return _make(poly_const(c), 0, {})

    @staticmethod
    def var(v: int, e: int = 1) -> "RatExpr":
        if e >= 0 or var_kind(v) == KIND_Q:
            return _make(poly_var(v, e), 0, {})
        if v == HBAR:
            return _make(poly_const(1), -2 * e, {})
        if v == SVAR:
            return _make(poly_const(1), -e, {})
        return _make(poly_const(1), 0, {_freeze(poly_var(v, -e)): 1})

    @staticmethod
    def from_poly(p: Poly) -> "RatExpr":
        return _make(dict(p), 0, {})

    @staticmethod
    def fraction(num: Poly, den: Poly) -> "RatExpr":
        scalar, qm, su, fs = canonical_factor(den)
        inv_q = _mono_fix([(v, -e) for v, e in qm])
        n = p_mul_mono(num, inv_q, Fraction(1) / scalar)
        fd: dict = {}
        for f, m in fs:
            fd[f] = fd.get(f, 0) + m
        return _make(n, su, fd)

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return self.s_units == 0 and not self.factors

    def as_poly(self) -> Poly:
        if not self.is_polynomial():
            raise ArithmeticError("expression has a nontrivial denominator")
        return self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other) -> "RatExpr":
        other = _coerce(other)
        if not self.num:
            return other
        if not other.num:
            return self
        if self.s_units == other.s_units and self.factors == other.factors:
            return _make(p_add(self.num, other.num), self.s_units,
                         dict(self.factors))
        fa = dict(self.factors)
        fb = dict(other.factors)
        lcm = dict(fa)
        for f, m in fb.items():
            lcm[f] = max(lcm.get(f, 0), m)
        su = max(self.s_units, other.s_units)
        na = self.num
        if su > self.s_units:
            na = p_mul_mono(na, _spow_mono(su - self.s_units))
        nb = other.num
        if su > other.s_units:
            nb = p_mul_mono(nb, _spow_mono(su - other.s_units))
        for f, m in lcm.items():
            da = m - fa.get(f, 0)
            db = m - fb.get(f, 0)
            fp = _thaw(f)
            for _ in range(da):
                na = p_mul(na, fp)
            for _ in range(db):
                nb = p_mul(nb, fp)
        return _make(p_add(na, nb), su, lcm)

    def __radd__(self, other) -> "RatExpr":
        return self.__add__(other)

    def __neg__(self) -> "RatExpr":
        return RatExpr(p_neg(self.num), self.s_units, self.factors)

    def __sub__(self, other) -> "RatExpr":
        return self.__add__(_coerce(other).__neg__())

    def __rsub__(self, other) -> "RatExpr":
        return _coerce(other).__sub__(self)

    def __mul__(self, other) -> "RatExpr":
        other = _coerce(other)
        if not self.num or not other.num:
            return RAT_ZERO
        fd = dict(self.factors)
        for f, m in other.factors:
            fd[f] = fd.get(f, 0) + m
        return _make(p_mul(self.num, other.num),
                     self.s_units + other.s_units, fd)

    def __rmul__(self, other) -> "RatExpr":
        return self.__mul__(other)

    def inverse(self) -> "RatExpr":
        if not self.num:
            raise ZeroDivisionError("inverting zero")
        num = _spow_poly(self.s_units)
        for f, m in self.factors:
            fp = _thaw(f)
            for _ in range(m):
                num = p_mul(num, fp)
        return RatExpr.fraction(num, self.num)

    def __truediv__(self, other) -> "RatExpr":
        other = _coerce(other)
        return self.__mul__(other.inverse())

    def __rtruediv__(self, other) -> "RatExpr":
        return _coerce(other).__mul__(self.inverse())

    def __pow__(self, n: int) -> "RatExpr":
        if n < 0:
            return self.inverse() ** (-n)
        out = RAT_ONE
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatExpr):
            other = _coerce(other)
        return (self.num == other.num and self.s_units == other.s_units
                and self.factors == other.factors)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((_freeze(self.num), self.s_units, self.factors))
        return self._hash

    def __repr__(self):
        return "RatExpr(%s)" % self.to_text()

    # -- queries -------------------------------------------------------------

    def variables(self) -> set:
        vs = p_vars(self.num)
        if self.s_units:
            vs.add(HBAR)
        for f, _ in self.factors:
            vs |= p_vars(_thaw(f))
        return vs

    def den_poly(self) -> Poly:
        den = _spow_poly(self.s_units)
        for f, m in self.factors:
            fp = _thaw(f)
            for _ in range(m):
                den = p_mul(den, fp)
        return den

    def eval(self, point: Mapping[int, Fraction]) -> Fraction:
        nv = p_eval(self.num, point)
        dv = p_eval(self.den_poly(), point)
        if dv == 0:
            raise ZeroDivisionError("denominator vanishes at the sample point")
        return nv / dv

    def subst_scalar(self, v: int, value) -> "RatExpr":
        """Substitute an exact rational constant for one variable."""
        value = Fraction(value)
        num = p_subst_scalar(self.num, v, value)
        fd: dict = {}
        scale = Fraction(1)
        qshift: list = []
        su = self.s_units
        for f, m in self.factors:
            fp = p_subst_scalar(_thaw(f), v, value)
            sc, qm, u, fs = canonical_factor(fp)
            scale *= sc ** m
            for _ in range(m):
                qshift.extend(qm)
            su += u * m
            for ff, mm in fs:
                fd[ff] = fd.get(ff, 0) + mm * m
        inv_q = _mono_fix([(vv, -e) for vv, e in _mono_fix(qshift)])
        num = p_mul_mono(num, inv_q, Fraction(1) / scale)
        return _make(num, su, fd)

    def subst_monomial(self, table: Mapping[int, tuple[Fraction, Sequence[tuple[int, int]]]]) -> "RatExpr":
        """Substitute ``v -> coeff * monomial`` for q-type variables.

        The image monomial may carry negative hbar/s exponents (as in the
        hbar-weighted degeneration substitution); the deficit is absorbed
        into the denominator.  Used also for Weyl actions on quantum
        variables.  Keeps denominators factored.
        """
        num, k_num = _p_monomial_map(self.num, table)
        fd: dict = {}
        scale = Fraction(1)
        qshift: list = []
        su = self.s_units + k_num
        for f, m in self.factors:
            fp, k_f = _p_monomial_map(_thaw(f), table)
            su -= k_f * m
            sc, qm, u, fs = canonical_factor(fp)
            scale *= sc ** m
            for _ in range(m):
                qshift.extend(qm)
            su += u * m
            for ff, mm in fs:
                fd[ff] = fd.get(ff, 0) + mm * m
        inv_q = _mono_fix([(vv, -e) for vv, e in _mono_fix(qshift)])
        num = p_mul_mono(num, inv_q, Fraction(1) / scale)
        if su < 0:
            num = p_mul_mono(num, _spow_mono(-su))
            su = 0
        return _make(num, su, fd)

    def substitute(self, table: Mapping[int, "RatExpr"]) -> "RatExpr":
        """General substitution; the image of every variable is a RatExpr."""
        den_vars = set()
        if self.factors:
            for f, _ in self.factors:
                den_vars |= p_vars(_thaw(f))
        if den_vars & set(table):
            den = RatExpr.from_poly(self.den_poly()).substitute(table)
            num = RatExpr.from_poly(self.num).substitute(table)
            return num / den
        out = RAT_ZERO
        cache: dict[tuple[int, int], RatExpr] = {}

        def power(v: int, e: int) -> RatExpr:
            key = (v, e)
            if key not in cache:
                cache[key] = table[v] ** e if v in table else RatExpr.var(v, e)
            return cache[key]

        for m, c in self.num.items():
            term = RatExpr.const(c)
            for v, e in m:
                term = term * power(v, e)
            out = out + term
        if self.s_units or self.factors:
            out = out * RatExpr(poly_const(1), self.s_units, self.factors)
        return out

    def limit_hbar_inf(self) -> "RatExpr":
        """Exact limit as hbar -> infinity (s-units graded leading terms)."""
        if not self.num:
            return RAT_ZERO
        dn = _p_max_sdeg(self.num)
        dd = self.s_units
        factor_leads = []
        for f, m in self.factors:
            fp = _thaw(f)
            df = _p_max_sdeg(fp)
            dd += df * m
            factor_leads.append((fp, m, df))
        if dn < dd:
            return RAT_ZERO
        if dn > dd:
            raise LimitDivergenceError(dn - dd)
        lead_num = _s_leading_part(self.num, dn)
        out = RatExpr.from_poly(lead_num)
        for fp, m, df in factor_leads:
            lead = _s_leading_part(fp, df)
            for _ in range(m):
                out = out / RatExpr.from_poly(lead)
        return out

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        num = poly_to_text(self.num)
        if self.s_units == 0 and not self.factors:
            return num
        parts = []
        if self.s_units:
            a, b = divmod(self.s_units, 2)
            if a:
                parts.append("h^%d" % a if a > 1 else "h")
            if b:
                parts.append("s")
        for f, m in self.factors:
            ftext = "(%s)" % poly_to_text(_thaw(f))
            parts.append(ftext + ("^%d" % m if m > 1 else ""))
        return "(%s) / %s" % (num, "*".join(parts))

    def to_json_obj(self) -> dict:
        obj = {
            "num": poly_to_json(self.num),
            "den": poly_to_json(self.den_poly()),
        }
        if self.s_units or self.factors:
            obj["den_factors"] = [
                {"s_units": self.s_units},
                *({"factor": poly_to_json(_thaw(f)), "mult": m}
                  for f, m in self.factors),
            ]
        return obj

    @staticmethod
    def from_json_obj(obj: dict) -> "RatExpr":
        num = poly_from_json(obj["num"])
        if "den_factors" not in obj:
            den = poly_from_json(obj["den"])
            if den == poly_const(1):
                return RatExpr.from_poly(num)
            return RatExpr.fraction(num, den)
        meta = obj["den_factors"]
        su = meta[0]["s_units"]
        fd: dict = {}
        for item in meta[1:]:
            fd[_freeze(poly_from_json(item["factor"]))] = item["mult"]
        return _make(num, su, fd)

    def to_latex(self, chi: str = "x") -> str:
        num = poly_to_latex(self.num, chi=chi)
        if self.s_units == 0 and not self.factors:
            return num
        parts = []
        if self.s_units:
            a, b = divmod(self.s_units, 2)
            exp = Fraction(2 * a + b, 2)
            parts.append(r"\hbar" + ("^{%s}" % exp if exp != 1 else ""))
        for f, m in self.factors:
            body = r"\left(%s\right)" % poly_to_latex(_thaw(f), chi=chi)
            parts.append(body + ("^{%d}" % m if m > 1 else ""))
        return r"\frac{%s}{%s}" % (num, "".join(parts))


class LimitDivergenceError(ArithmeticError):
    """Raised when an hbar -> infinity limit diverges."""

    def __init__(self, degree_gap: int):
        super().__init__("limit diverges (hbar-degree gap %s)" % degree_gap)
        self.degree_gap = degree_gap


def _coerce(x) -> RatExpr:
    if isinstance(x, RatExpr):
        return x
    if isinstance(x, (int, Fraction)):
        return RatExpr.const(x)
    raise TypeError("cannot coerce %r to RatExpr" % (x,))


def _spow_mono(u: int) -> Mono:
    return _mono_fix([(HBAR, u // 2), (SVAR, u % 2)])


def _spow_poly(u: int) -> Poly:
    return {_spow_mono(u): Fraction(1)}


def _s_leading_part(p: Poly, deg: int) -> Poly:
    out = {}
    for m, c in p.items():
        if _mono_sdeg(m) == deg:
            d = dict(m)
            d.pop(HBAR, None)
            d.pop(SVAR, None)
            out[tuple(sorted(d.items()))] = c
    return out


def _p_monomial_map(p: Poly, table: Mapping[int, tuple[Fraction, Sequence[tuple[int, int]]]]) -> tuple[Poly, int]:
    """Monomial substitution; returns (poly, k) such that poly / s^k is the image."""
    mapped = []
    min_units = 0
    for m, c in p.items():
        coeff = c
        units = 0
        parts: dict[int, int] = {}
        for v, e in m:
            if v in table:
                tc, tm = table[v]
                coeff *= tc ** e
                for tv, te in tm:
                    if tv == HBAR:
                        units += 2 * te * e
                    elif tv == SVAR:
                        units += te * e
                    else:
                        parts[tv] = parts.get(tv, 0) + te * e
            else:
                if v == HBAR:
                    units += 2 * e
                elif v == SVAR:
                    units += e
                else:
                    parts[v] = parts.get(v, 0) + e
        mapped.append((parts, units, coeff))
        if units < min_units:
            min_units = units
    k = -min_units
    out: Poly = {}
    for parts, units, coeff in mapped:
        mono = _mono_fix(list(parts.items()) + list(_spow_mono(units + k)))
        nc = out.get(mono, 0) + coeff
        if nc:
            out[mono] = nc
        elif mono in out:
            del out[mono]
    return out, k


def _make(num: Poly, s_units: int, factors: dict) -> RatExpr:
    """Reduce to canonical form: cancel factors, strip s-powers."""
    if not num:
        return RatExpr({}, 0, ())
    fd = {f: m for f, m in factors.items() if m}
    for f in list(fd):
        fp = _thaw(f)
        while fd.get(f, 0) > 0:
            if _width_reject(num, fp):
                break
            q = p_div_exact(num, fp)
            if q is None:
                break
            num = q
            fd[f] -= 1
        if fd.get(f) == 0:
            del fd[f]
    if s_units:
        k = min(s_units, _p_min_sdeg(num))
        if k > 0:
            num = _p_div_spow(num, k)
            s_units -= k
    return RatExpr(num, s_units, tuple(sorted(fd.items())))


RAT_ZERO = RatExpr({}, 0, ())
RAT_ONE = RatExpr(poly_const(1), 0, ())


def mono_of(pairs: Iterable[tuple[int, int]]) -> Mono:
    """Build a normalized monomial from (variable, exponent) pairs."""
    return _mono_fix(pairs)


def rat_sum(terms: Iterable[RatExpr]) -> RatExpr:
    """Sum many expressions over one common denominator.

    Far cheaper than folding with pairwise addition when the terms carry
    many distinct denominators, since numerator accumulation stays purely
    polynomial and normalization happens once.
    """
    terms = [t for t in terms if t.num]
    if not terms:
        return RAT_ZERO
    if len(terms) == 1:
        return terms[0]
    su = max(t.s_units for t in terms)
    fd: dict = {}
    for t in terms:
        for f, m in t.factors:
            if fd.get(f, 0) < m:
                fd[f] = m
    acc: Poly = {}
    for t in terms:
        num = t.num
        ds = su - t.s_units
        if ds:
            num = p_mul_mono(num, _spow_mono(ds))
        ef = dict(t.factors)
        for f, m in fd.items():
            for _ in range(m - ef.get(f, 0)):
                num = p_mul(num, _thaw(f))
        _p_add_into(acc, num)
    return _make(acc, su, fd)


def rat_var(v: int, e: int = 1) -> RatExpr:
    return RatExpr.var(v, e)


def q_monomial(exps: Mapping[int, int] | Sequence[tuple[int, int]]) -> RatExpr:
    """The Laurent monomial prod q_i^{e_i} from 1-indexed exponent data."""
    items = exps.items() if isinstance(exps, Mapping) else exps
    return RatExpr.from_poly({_mono_fix([(qvar(i), e) for i, e in items]): Fraction(1)})


def one_minus_q(exps: Mapping[int, int] | Sequence[tuple[int, int]]) -> RatExpr:
    """The canonical element 1 - q^beta for a nonzero exponent vector."""
    items = list(exps.items() if isinstance(exps, Mapping) else exps)
    if all(e == 0 for _, e in items):
        raise ArithmeticError("1 - q^0 vanishes")
    mono = _mono_fix([(qvar(i), e) for i, e in items])
    return RatExpr.from_poly(p_sub(poly_const(1), {mono: Fraction(1)}))


# ---------------------------------------------------------------------------
# text serialization


def poly_to_text(p: Poly) -> str:
    if not p:
        return "0"
    terms = sorted(p.items(), key=lambda mc: _mono_key(mc[0]), reverse=True)
    chunks = []
    for m, c in terms:
        factors = [var_name(v) + ("^%d" % e if e != 1 else "") for v, e in m]
        if not factors:
            body = str(abs(c))
        else:
            body = "*".join(factors)
            if abs(c) != 1:
                body = "%s*%s" % (abs(c), body)
        sign = "-" if c < 0 else "+"
        chunks.append((sign, body))
    first_sign, first_body = chunks[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in chunks[1:]:
        out += " %s %s" % (sign, body)
    return out


_TERM_RE = re.compile(r"\s*([+-])\s*")


def poly_from_text(text: str) -> Poly:
    text = text.strip()
    if text == "0":
        return {}
    if not text.startswith(("+", "-")):
        text = "+" + text
    out: Poly = {}
    pos = 0
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if m is None:
            raise ValueError("bad polynomial text at %r" % text[pos:])
        sign = -1 if m.group(1) == "-" else 1
        pos = m.end()
        end = pos
        while end < len(text):
            if text[end] in "+-" and text[end - 1] != "^":
                break
            end += 1
        term = text[pos:end].strip()
        pos = end
        coeff = Fraction(sign)
        mono_parts = []
        for piece in term.split("*"):
            piece = piece.strip()
            if not piece:
                continue
            if re.fullmatch(r"\d+(/\d+)?", piece):
                coeff *= Fraction(piece)
                continue
            if "^" in piece:
                name, _, exp = piece.partition("^")
                mono_parts.append((var_from_name(name.strip()), int(exp)))
            else:
                mono_parts.append((var_from_name(piece), 1))
        mono = _mono_fix(mono_parts)
        nc = out.get(mono, 0) + coeff
        if nc:
            out[mono] = nc
        elif mono in out:
            del out[mono]
    return out


def rat_to_text(x: RatExpr) -> str:
    return x.to_text()


def rat_from_text(text: str) -> RatExpr:
    text = text.strip()
    if not text.startswith("("):
        return RatExpr.from_poly(poly_from_text(text))
    # grammar: (num) / part*part*...  with parts (poly)^m | h^a | s
    depth = 0
    split = None
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            split = i
            break
    if split is None:
        if text.startswith("(") and text.endswith(")"):
            return RatExpr.from_poly(poly_from_text(text[1:-1]))
        return RatExpr.from_poly(poly_from_text(text))
    num_text = text[:split].strip()
    num = poly_from_text(num_text[1:-1])
    den = poly_const(1)
    rest = text[split + 1:].strip()
    pos = 0
    while pos < len(rest):
        if rest[pos] == "*":
            pos += 1
            continue
        if rest[pos] == "(":
            depth = 0
            j = pos
            while True:
                if rest[j] == "(":
                    depth += 1
                elif rest[j] == ")":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            body = poly_from_text(rest[pos + 1:j])
            pos = j + 1
            mult = 1
            if pos < len(rest) and rest[pos] == "^":
                j = pos + 1
                while j < len(rest) and rest[j].isdigit():
                    j += 1
                mult = int(rest[pos + 1:j])
                pos = j
            den = p_mul(den, p_pow(body, mult))
        else:
            j = pos
            while j < len(rest) and rest[j] not in "*(":
                j += 1
            piece = rest[pos:j].strip()
            pos = j
            if "^" in piece:
                name, _, exp = piece.partition("^")
                den = p_mul(den, poly_var(var_from_name(name.strip()), int(exp)))
            elif piece:
                den = p_mul(den, poly_var(var_from_name(piece)))
    return RatExpr.fraction(num, den)


def poly_to_json(p: Poly) -> list:
    terms = sorted(p.items(), key=lambda mc: _mono_key(mc[0]), reverse=True)
    return [[str(c), [[var_name(v), e] for v, e in m]] for m, c in terms]


def poly_from_json(obj: list) -> Poly:
    out: Poly = {}
    for coeff, mono in obj:
        m = _mono_fix([(var_from_name(name), e) for name, e in mono])
        c = Fraction(coeff)
        nc = out.get(m, 0) + c
        if nc:
            out[m] = nc
    return out


_LATEX_NAME = {
    KIND_EPS: r"\epsilon_{%d}",
    KIND_P: r"p_{%d}",
    KIND_Q: r"q_{%d}",
}


def _latex_var(v: int, chi: str) -> str:
    kind = var_kind(v)
    if kind == KIND_HBAR:
        return r"\hbar"
    if kind == KIND_S:
        return r"\hbar^{1/2}"
    if kind == KIND_Y:
        return "y"
    if kind == KIND_X:
        if chi == "chi":
            return r"\chi_{%d}" % var_index(v)
        return r"%s_{%d}" % (chi, var_index(v))
    return _LATEX_NAME[kind] % var_index(v)


def poly_to_latex(p: Poly, chi: str = "x") -> str:
    if not p:
        return "0"
    terms = sorted(p.items(), key=lambda mc: _mono_key(mc[0]), reverse=True)
    out = ""
    for m, c in terms:
        factors = []
        for v, e in m:
            name = _latex_var(v, chi)
            factors.append(name if e == 1 else "%s^{%d}" % (name, e))
        if factors:
            body = " ".join(factors)
            if abs(c) != 1:
                body = "%s %s" % (_frac_latex(abs(c)), body)
        else:
            body = _frac_latex(abs(c))
        if not out:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out


def _frac_latex(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return r"\tfrac{%d}{%d}" % (c.numerator, c.denominator)


class PolyExpr:
    """Public wrapper for exact sparse polynomials.

    Internals pass around the raw term dictionaries; this class is the
    serialization and arithmetic surface for callers.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Poly):
        self.terms = dict(terms)

    @staticmethod
    def const(c) -> "PolyExpr":
        return PolyExpr(poly_const(c))

    @staticmethod
    def variable(v: int, e: int = 1) -> "PolyExpr":
        return PolyExpr(poly_var(v, e))

    def __add__(self, other: "PolyExpr") -> "PolyExpr":
        return PolyExpr(p_add(self.terms, other.terms))

    def __sub__(self, other: "PolyExpr") -> "PolyExpr":
        return PolyExpr(p_sub(self.terms, other.terms))

    def __mul__(self, other: "PolyExpr") -> "PolyExpr":
        return PolyExpr(p_mul(self.terms, other.terms))

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyExpr) and self.terms == other.terms

    def __hash__(self):
        return hash(_freeze(self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def as_rat(self) -> RatExpr:
        return RatExpr.from_poly(self.terms)

    def to_text(self) -> str:
        return poly_to_text(self.terms)

    @staticmethod
    def from_text(text: str) -> "PolyExpr":
        return PolyExpr(poly_from_text(text))

    def to_json_obj(self) -> list:
        return poly_to_json(self.terms)

    @staticmethod
    def from_json_obj(obj: list) -> "PolyExpr":
        return PolyExpr(poly_from_json(obj))

    def to_latex(self, chi: str = "x") -> str:
        return poly_to_latex(self.terms, chi=chi)

    def __repr__(self):
        return "PolyExpr(%s)" % self.to_text()


# ---------------------------------------------------------------------------
# symbolic matrices


class SymMatrix:
    """Dense square matrix over RatExpr."""

    __slots__ = ("rows", "dim")

    def __init__(self, rows: Sequence[Sequence[RatExpr]]):
        self.rows = [list(r) for r in rows]
        self.dim = len(self.rows)
        for r in self.rows:
            if len(r) != self.dim:
                raise ValueError("matrix must be square")

    @staticmethod
    def zero(n: int) -> "SymMatrix":
        return SymMatrix([[RAT_ZERO] * n for _ in range(n)])

    @staticmethod
    def identity(n: int) -> "SymMatrix":
        return SymMatrix([[RAT_ONE if i == j else RAT_ZERO for j in range(n)]
                          for i in range(n)])

    @staticmethod
    def diagonal(entries: Sequence[RatExpr]) -> "SymMatrix":
        n = len(entries)
        m = SymMatrix.zero(n)
        for i, e in enumerate(entries):
            m.rows[i][i] = e
        return m

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def __eq__(self, other):
        return isinstance(other, SymMatrix) and self.rows == other.rows

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        return SymMatrix([[a + b for a, b in zip(ra, rb)]
                          for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        return SymMatrix([[a - b for a, b in zip(ra, rb)]
                          for ra, rb in zip(self.rows, other.rows)])

    def __mul__(self, other):
        if isinstance(other, SymMatrix):
            n = self.dim
            out = []
            cols = list(zip(*other.rows))
            for i in range(n):
                row = []
                for j in range(n):
                    row.append(rat_sum([a * b for a, b in zip(self.rows[i], cols[j])
                                        if a.num and b.num]))
                out.append(row)
            return SymMatrix(out)
        other = _coerce(other)
        return SymMatrix([[e * other for e in r] for r in self.rows])

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return SymMatrix([[-e for e in r] for r in self.rows])

    def power(self, k: int) -> "SymMatrix":
        out = SymMatrix.identity(self.dim)
        for _ in range(k):
            out = out * self
        return out

    def trace(self) -> RatExpr:
        return rat_sum([self.rows[i][i] for i in range(self.dim)])

    def apply(self, fn) -> "SymMatrix":
        return SymMatrix([[fn(e) for e in r] for r in self.rows])

    def is_zero(self) -> bool:
        return all(not e.num for r in self.rows for e in r)

    def to_json_obj(self) -> list:
        return [[e.to_json_obj() for e in r] for r in self.rows]

    @staticmethod
    def from_json_obj(obj: list) -> "SymMatrix":
        return SymMatrix([[RatExpr.from_json_obj(e) for e in r] for r in obj])

    def to_text_rows(self) -> list[list[str]]:
        return [[e.to_text() for e in r] for r in self.rows]

    def to_latex(self, chi: str = "x") -> str:
        body = r" \\ ".join(" & ".join(e.to_latex(chi=chi) for e in r)
                            for r in self.rows)
        return r"\begin{bmatrix} %s \end{bmatrix}" % body


def determinant(mat: SymMatrix) -> RatExpr:
    """Exact determinant, computed by clearing each row's denominator,
    expanding the resulting polynomial matrix by memoized cofactors, and
    cancelling the row multipliers once at the end.

    The pure-polynomial expansion avoids per-addition denominator work,
    which is what makes the dense rational matrices here tractable.
    """
    n = mat.dim
    if n == 0:
        return RAT_ONE
    prows, s_units, fd = _rows_cleared(mat)
    det = _det_poly(prows)
    return _make(det, s_units, fd)


def _rows_cleared(mat: SymMatrix) -> tuple[list[list[Poly]], int, dict]:
    """Scale each row to polynomial entries; return rows and the total scale."""
    s_total = 0
    fd_total: dict = {}
    prows: list[list[Poly]] = []
    for row in mat.rows:
        su = 0
        fd: dict = {}
        for e in row:
            if not e.num:
                continue
            su = max(su, e.s_units)
            for f, m in e.factors:
                if fd.get(f, 0) < m:
                    fd[f] = m
        cleared = []
        for e in row:
            num = e.num
            if num:
                ds = su - e.s_units
                if ds:
                    num = p_mul_mono(num, _spow_mono(ds))
                ef = dict(e.factors)
                for f, m in fd.items():
                    for _ in range(m - ef.get(f, 0)):
                        num = p_mul(num, _thaw(f))
            cleared.append(num)
        prows.append(cleared)
        s_total += su
        for f, m in fd.items():
            fd_total[f] = fd_total.get(f, 0) + m
    return prows, s_total, fd_total


def _det_poly(prows: list[list[Poly]]) -> Poly:
    n = len(prows)
    if n == 1:
        return prows[0][0]
    memo: dict[tuple, Poly] = {}

    def minor(cols: tuple) -> Poly:
        if len(cols) == 1:
            return prows[n - 1][cols[0]]
        got = memo.get(cols)
        if got is not None:
            return got
        row = n - len(cols)
        acc: Poly = {}
        for pos, c in enumerate(cols):
            entry = prows[row][c]
            if not entry:
                continue
            sub = minor(cols[:pos] + cols[pos + 1:])
            if not sub:
                continue
            _p_add_into(acc, p_mul(entry, sub),
                        Fraction(1) if pos % 2 == 0 else Fraction(-1))
        memo[cols] = acc
        return acc

    return minor(tuple(range(n)))


def principal_minor_sum(mat: SymMatrix, k: int) -> RatExpr:
    """Sum of the principal k x k minors; the k-th characteristic coefficient."""
    from itertools import combinations
    dets = []
    for subset in combinations(range(mat.dim), k):
        sub = SymMatrix([[mat.rows[i][j] for j in subset] for i in subset])
        dets.append(determinant(sub))
    return rat_sum(dets)


def char_poly(mat: SymMatrix) -> list[RatExpr]:
    """Coefficients [E_1, ..., E_n] of det(y*1 + M) = y^n + E_1 y^{n-1} + ...

    E_k is the sum of the principal k x k minors of M, so E_1 = trace(M).
    """
    return [principal_minor_sum(mat, k) for k in range(1, mat.dim + 1)]


# ---------------------------------------------------------------------------
# randomized evaluation cross-checks


def random_point(vars_: Iterable[int], rng) -> dict[int, Fraction]:
    return {v: Fraction(rng.randint(2, 60), rng.randint(1, 7)) for v in vars_}


def rand_eval_equal(a: RatExpr, b: RatExpr, rng, trials: int = 20) -> bool:
    """Cheap probabilistic pre-filter for equality of two expressions."""
    vs = a.variables() | b.variables()
    for _ in range(trials):
        point = random_point(vs, rng)
        try:
            if a.eval(point) != b.eval(point):
                return False
        except ZeroDivisionError:
            continue
    return True
