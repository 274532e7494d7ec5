"""Exact arithmetic kernel: Gaussian-rational scalars, sparse multivariate
polynomials, rational functions, truncated jets at the origin, and exact
Hermitian linear algebra.

Conventions used throughout the package:

* Scalars are Gaussian rationals (complex numbers with ``Fraction`` real and
  imaginary parts), so every symbolic computation is exact.
* A polynomial carries an explicit, ordered tuple of variable names.  Terms
  map exponent tuples (one entry per variable) to nonzero scalars.  Operations
  require both operands to live over the *same* variable tuple; this keeps
  multi-index bookkeeping unambiguous across modules.
* All variables denote real coordinates.  Complex conjugation therefore acts
  on coefficients only.
* Rational functions are pairs num/den with den != 0.  Equality is decided by
  cross multiplication.  Normalization removes common monomial content and
  scales the trailing (lowest-order) coefficient of the denominator to 1; no
  multivariate GCD is attempted.
* Jets are Taylor expansions at the origin truncated at a fixed total degree.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations


class AlgebraError(Exception):
    pass


class DenominatorVanishesAtBase(AlgebraError):
    """Rational function cannot be expanded at the origin."""


class NotHermitian(AlgebraError):
    pass


class ZeroDenominator(AlgebraError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class GaussRat:
    """A Gaussian rational number re + im*i with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @classmethod
    def of(cls, x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        return cls(_frac(x))

    def __add__(self, other):
        other = GaussRat.of(other)
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussRat.of(other))

    def __rsub__(self, other):
        return GaussRat.of(other) + (-self)

    def __mul__(self, other):
        other = GaussRat.of(other)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussRat.of(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussRat")
        return GaussRat(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        return GaussRat.of(other) / self

    def conjugate(self):
        return GaussRat(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GaussRat.of(other)
        if not isinstance(other, GaussRat):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)
HALF = GaussRat(Fraction(1, 2))


def _deg_key(exps):
    # graded order: total degree first, then the exponent tuple itself
    return (sum(exps), exps)


class Poly:
    """Sparse multivariate polynomial over GaussRat with a fixed variable
    tuple.  Zero coefficients are never stored."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None, _clean=True):
        object.__setattr__(self, "vars", tuple(vars))
        if terms is None:
            terms = {}
        if _clean:
            cleaned = {}
            for exps, c in terms.items():
                c = GaussRat.of(c)
                if len(exps) != len(self.vars):
                    raise ValueError("exponent length does not match variables")
                if not c.is_zero():
                    cleaned[tuple(exps)] = c
            terms = cleaned
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, vars):
        return cls(vars, {}, _clean=False)

    @classmethod
    def const(cls, vars, c):
        c = GaussRat.of(c)
        if c.is_zero():
            return cls.zero(vars)
        z = (0,) * len(tuple(vars))
        return cls(vars, {z: c}, _clean=False)

    @classmethod
    def one(cls, vars):
        return cls.const(vars, 1)

    @classmethod
    def var(cls, vars, name, power=1):
        vars = tuple(vars)
        idx = vars.index(name)
        e = [0] * len(vars)
        e[idx] = power
        return cls(vars, {tuple(e): ONE}, _clean=False)

    @classmethod
    def monomial(cls, vars, exps, c=ONE):
        return cls(vars, {tuple(exps): GaussRat.of(c)})

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> GaussRat:
        return self.terms.get((0,) * len(self.vars), ZERO)

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    def coefficient(self, exps) -> GaussRat:
        return self.terms.get(tuple(exps), ZERO)

    def _check(self, other):
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            other = Poly.const(self.vars, other)
        self._check(other)
        res = dict(self.terms)
        for e, c in other.terms.items():
            s = res.get(e, ZERO) + c
            if s.is_zero():
                res.pop(e, None)
            else:
                res[e] = s
        return Poly(self.vars, res, _clean=False)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()}, _clean=False)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            other = Poly.const(self.vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            c = GaussRat.of(other)
            if c.is_zero():
                return Poly.zero(self.vars)
            return Poly(
                self.vars, {e: k * c for e, k in self.terms.items()}, _clean=False
            )
        self._check(other)
        res = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = res.get(e, ZERO) + c1 * c2
                if s.is_zero():
                    res.pop(e, None)
                else:
                    res[e] = s
        return Poly(self.vars, res, _clean=False)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.one(self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            other = Poly.const(self.vars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # -- calculus ---------------------------------------------------------
    def diff(self, name) -> "Poly":
        idx = self.vars.index(name)
        res = {}
        for e, c in self.terms.items():
            k = e[idx]
            if k == 0:
                continue
            ne = list(e)
            ne[idx] = k - 1
            res[tuple(ne)] = c * k
        return Poly(self.vars, res, _clean=False)

    def conjugate(self) -> "Poly":
        return Poly(
            self.vars, {e: c.conjugate() for e, c in self.terms.items()}, _clean=False
        )

    def real_part(self) -> "Poly":
        return (self + self.conjugate()) * HALF

    def imag_part(self) -> "Poly":
        return (self - self.conjugate()) * GaussRat(0, Fraction(-1, 2))

    def evaluate(self, point) -> GaussRat:
        """Evaluate at a full rational point, given as a sequence of
        Fraction/int/GaussRat values in variable order."""
        point = [GaussRat.of(p) for p in point]
        if len(point) != len(self.vars):
            raise ValueError("point length does not match variables")
        total = ZERO
        for e, c in self.terms.items():
            v = c
            for p, k in zip(point, e):
                for _ in range(k):
                    v = v * p
            total = total + v
        return total

    def shift_divide(self, exps) -> "Poly":
        """Exact division by the monomial with exponent ``exps``; every term
        must be divisible."""
        res = {}
        for e, c in self.terms.items():
            ne = tuple(a - b for a, b in zip(e, exps))
            if any(k < 0 for k in ne):
                raise ValueError("not divisible by the requested monomial")
            res[ne] = c
        return Poly(self.vars, res, _clean=False)

    def min_exponents(self):
        """Componentwise minimum exponent over the support (the largest
        monomial dividing every term)."""
        if not self.terms:
            raise ValueError("zero polynomial has no support")
        it = iter(self.terms)
        m = list(next(it))
        for e in it:
            for j, k in enumerate(e):
                if k < m[j]:
                    m[j] = k
        return tuple(m)

    def trailing_term(self):
        """(exps, coeff) of the lowest-order term in the graded order."""
        if not self.terms:
            raise ValueError("zero polynomial has no trailing term")
        e = min(self.terms, key=_deg_key)
        return e, self.terms[e]

    def truncate(self, order) -> "Poly":
        return Poly(
            self.vars,
            {e: c for e, c in self.terms.items() if sum(e) <= order},
            _clean=False,
        )

    def rename_vars(self, new_vars, mapping=None) -> "Poly":
        """Re-express over a different variable tuple.

        ``mapping`` sends old names to new names (identity by default).  Every
        variable actually occurring must be mapped to a member of
        ``new_vars``."""
        new_vars = tuple(new_vars)
        mapping = mapping or {}
        pos = {}
        for j, name in enumerate(self.vars):
            target = mapping.get(name, name)
            pos[j] = new_vars.index(target) if target in new_vars else None
        res = {}
        for e, c in self.terms.items():
            ne = [0] * len(new_vars)
            for j, k in enumerate(e):
                if k == 0:
                    continue
                if pos[j] is None:
                    raise ValueError(f"variable {self.vars[j]} has no image")
                ne[pos[j]] += k
            key = tuple(ne)
            s = res.get(key, ZERO) + c
            if s.is_zero():
                res.pop(key, None)
            else:
                res[key] = s
        return Poly(new_vars, res, _clean=False)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=_deg_key):
            c = self.terms[e]
            mono = "*".join(
                f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, e) if k
            )
            if mono:
                parts.append(f"({c!r})*{mono}")
            else:
                parts.append(f"({c!r})")
        return " + ".join(parts)


class RatFun:
    """Quotient of two polynomials over the same variables, den != 0.

    Only monomial content is cancelled; full normal forms would need
    multivariate GCDs, which the desk-scale computations here do not."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.one(num.vars)
        if den.is_zero():
            raise ZeroDenominator("rational function with zero denominator")
        if num.vars != den.vars:
            raise ValueError("numerator/denominator variable mismatch")
        if num.is_zero():
            den = Poly.one(num.vars)
        else:
            lo_n = num.min_exponents()
            lo_d = den.min_exponents()
            common = tuple(min(a, b) for a, b in zip(lo_n, lo_d))
            if any(common):
                num = num.shift_divide(common)
                den = den.shift_divide(common)
        _, c = den.trailing_term()
        if c != ONE:
            inv = ONE / c
            num = num * inv
            den = den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFun is immutable")

    @classmethod
    def of(cls, x, vars=None):
        if isinstance(x, RatFun):
            return x
        if isinstance(x, Poly):
            return cls(x)
        if vars is None:
            raise TypeError("cannot coerce scalar to RatFun without variables")
        return cls(Poly.const(vars, x))

    @property
    def vars(self):
        return self.num.vars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> Poly:
        if not self.den.is_constant():
            raise ValueError("denominator is not constant")
        c = self.den.constant_term()
        return self.num * (ONE / c)

    def __add__(self, other):
        other = RatFun.of(other, self.vars)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RatFun.of(other, self.vars))

    def __rsub__(self, other):
        return RatFun.of(other, self.vars) + (-self)

    def __mul__(self, other):
        other = RatFun.of(other, self.vars)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RatFun.of(other, self.vars)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RatFun.of(other, self.vars) / self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussRat, Poly)):
            other = RatFun.of(other, self.vars)
        if not isinstance(other, RatFun):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        raise TypeError("RatFun is unhashable (equality is cross-multiplicative)")

    def diff(self, name) -> "RatFun":
        return RatFun(
            self.num.diff(name) * self.den - self.num * self.den.diff(name),
            self.den * self.den,
        )

    def conjugate(self) -> "RatFun":
        return RatFun(self.num.conjugate(), self.den.conjugate())

    def evaluate(self, point) -> GaussRat:
        d = self.den.evaluate(point)
        if d.is_zero():
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.evaluate(point) / d

    def value_at_origin(self) -> GaussRat:
        d = self.den.constant_term()
        if d.is_zero():
            raise DenominatorVanishesAtBase("denominator vanishes at the base point")
        return self.num.constant_term() / d

    def __repr__(self):
        if self.den == Poly.one(self.vars):
            return repr(self.num)
        return f"({self.num!r}) / ({self.den!r})"


class Jet:
    """Taylor expansion at the origin truncated at total degree ``order``."""

    __slots__ = ("order", "vars", "terms")

    def __init__(self, order, vars, terms=None, _clean=True):
        if order < 0:
            raise ValueError("jet order must be nonnegative")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "vars", tuple(vars))
        if terms is None:
            terms = {}
        if _clean:
            cleaned = {}
            for e, c in terms.items():
                c = GaussRat.of(c)
                if sum(e) <= order and not c.is_zero():
                    cleaned[tuple(e)] = c
            terms = cleaned
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    @classmethod
    def from_poly(cls, p: Poly, order: int) -> "Jet":
        return cls(order, p.vars, p.terms)

    @classmethod
    def constant(cls, vars, c, order):
        return cls.from_poly(Poly.const(vars, c), order)

    def is_zero(self):
        return not self.terms

    def constant_term(self) -> GaussRat:
        return self.terms.get((0,) * len(self.vars), ZERO)

    def _common_order(self, other):
        if self.vars != other.vars:
            raise ValueError("jet variable mismatch")
        return min(self.order, other.order)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            other = Jet.constant(self.vars, other, self.order)
        k = self._common_order(other)
        res = {e: c for e, c in self.terms.items() if sum(e) <= k}
        for e, c in other.terms.items():
            if sum(e) > k:
                continue
            s = res.get(e, ZERO) + c
            if s.is_zero():
                res.pop(e, None)
            else:
                res[e] = s
        return Jet(k, self.vars, res, _clean=False)

    __radd__ = __add__

    def __neg__(self):
        return Jet(
            self.order, self.vars, {e: -c for e, c in self.terms.items()}, _clean=False
        )

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            other = Jet.constant(self.vars, other, self.order)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            c = GaussRat.of(other)
            if c.is_zero():
                return Jet(self.order, self.vars, {}, _clean=False)
            return Jet(
                self.order,
                self.vars,
                {e: k * c for e, k in self.terms.items()},
                _clean=False,
            )
        k = self._common_order(other)
        res = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            if d1 > k:
                continue
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) > k:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                s = res.get(e, ZERO) + c1 * c2
                if s.is_zero():
                    res.pop(e, None)
                else:
                    res[e] = s
        return Jet(k, self.vars, res, _clean=False)

    __rmul__ = __mul__

    def diff(self, name) -> "Jet":
        """Derivative; trustworthy only one order lower, so the order drops."""
        idx = self.vars.index(name)
        res = {}
        for e, c in self.terms.items():
            k = e[idx]
            if k == 0:
                continue
            ne = list(e)
            ne[idx] = k - 1
            res[tuple(ne)] = c * k
        return Jet(max(self.order - 1, 0), self.vars, res, _clean=True)

    def truncate(self, order) -> "Jet":
        return Jet(order, self.vars, self.terms, _clean=True)

    def inverse(self) -> "Jet":
        """Multiplicative inverse; requires a nonzero constant term."""
        c0 = self.constant_term()
        if c0.is_zero():
            raise DenominatorVanishesAtBase("jet has zero constant term")
        # write self = c0*(1 - u) and sum the geometric series in u
        u = Jet(
            self.order,
            self.vars,
            {e: -(c / c0) for e, c in self.terms.items() if sum(e) > 0},
            _clean=False,
        )
        acc = Jet.constant(self.vars, ONE, self.order)
        term = Jet.constant(self.vars, ONE, self.order)
        for _ in range(self.order):
            term = term * u
            if term.is_zero():
                break
            acc = acc + term
        return acc * (ONE / c0)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (
            self.order == other.order
            and self.vars == other.vars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.order, self.vars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Jet[{self.order}]({Poly(self.vars, self.terms, _clean=False)!r})"


def ratfun_jet(f: RatFun, order: int) -> Jet:
    """Degree-``order`` Taylor expansion of f at the origin.

    Raises DenominatorVanishesAtBase if the denominator vanishes at 0."""
    dj = Jet.from_poly(f.den, order)
    if dj.constant_term().is_zero():
        raise DenominatorVanishesAtBase("denominator vanishes at the base point")
    return Jet.from_poly(f.num, order) * dj.inverse()


# -- exact linear algebra ---------------------------------------------------


def _as_gauss_matrix(rows):
    return [[GaussRat.of(x) for x in row] for row in rows]


def exact_rank(rows) -> int:
    """Rank over the complex rationals by exact Gaussian elimination."""
    m = _as_gauss_matrix(rows)
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    col = 0
    while rank < len(m) and col < ncols:
        pivot = None
        for r in range(rank, len(m)):
            if not m[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            col += 1
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        m[rank] = [x / pv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        col += 1
    return rank


def minor_rank(rows) -> int:
    """Rank by brute-force enumeration of square minors (test oracle)."""
    m = _as_gauss_matrix(rows)
    if not m or not m[0]:
        return 0
    nr, nc = len(m), len(m[0])
    for size in range(min(nr, nc), 0, -1):
        for ri in combinations(range(nr), size):
            for ci in combinations(range(nc), size):
                sub = [[m[r][c] for c in ci] for r in ri]
                if not _det_gauss(sub).is_zero():
                    return size
    return 0


def _det_gauss(m):
    """Determinant of a square GaussRat matrix by expansion (small sizes)."""
    n = len(m)
    if n == 0:
        return ONE
    if n == 1:
        return m[0][0]
    total = ZERO
    sign = ONE
    for j in range(n):
        a = m[0][j]
        if not a.is_zero():
            sub = [[row[c] for c in range(n) if c != j] for row in m[1:]]
            total = total + sign * a * _det_gauss(sub)
        sign = -sign
    return total


class HermitianMatrix:
    """Exact Hermitian matrix with GaussRat entries."""

    __slots__ = ("n", "entries")

    def __init__(self, entries):
        entries = _as_gauss_matrix(entries)
        n = len(entries)
        for row in entries:
            if len(row) != n:
                raise NotHermitian("matrix is not square")
        for j in range(n):
            for k in range(j, n):
                if entries[j][k] != entries[k][j].conjugate():
                    raise NotHermitian(f"entry ({j},{k}) breaks Hermitian symmetry")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("HermitianMatrix is immutable")

    def inertia(self):
        return hermitian_inertia(self)


def hermitian_inertia(h: HermitianMatrix):
    """Exact inertia (n_plus, n_minus, n_zero) by symmetric elimination.

    A nonzero diagonal entry is used as pivot directly.  When the active
    diagonal vanishes but some off-diagonal entry a = m[j][k] does not, the
    congruence row_j += a*row_k, col_j += conj(a)*col_k manufactures the
    positive diagonal entry 2|a|^2 at (j, j); inertia is congruence-invariant,
    so the count is unaffected."""
    if not isinstance(h, HermitianMatrix):
        h = HermitianMatrix(h)
    n = h.n
    m = [row[:] for row in h.entries]
    active = list(range(n))
    n_pos = n_neg = n_zero = 0
    while active:
        pivot = None
        for p in active:
            if not m[p][p].is_zero():
                pivot = p
                break
        if pivot is None:
            pair = None
            for j in active:
                for k in active:
                    if k > j and not m[j][k].is_zero():
                        pair = (j, k)
                        break
                if pair:
                    break
            if pair is None:
                n_zero += len(active)
                break
            j, k = pair
            a = m[j][k]
            ac = a.conjugate()
            for c in range(n):
                m[j][c] = m[j][c] + a * m[k][c]
            for r in range(n):
                m[r][j] = m[r][j] + ac * m[r][k]
            pivot = j
        active.remove(pivot)
        pv = m[pivot][pivot]
        for r in active:
            f = m[r][pivot] / pv
            if f.is_zero():
                continue
            fc = f.conjugate()
            for c in range(n):
                m[r][c] = m[r][c] - f * m[pivot][c]
            for c in range(n):
                m[c][r] = m[c][r] - fc * m[c][pivot]
        if pv.re > 0:
            n_pos += 1
        else:
            n_neg += 1
    return (n_pos, n_neg, n_zero)


def det_exact(rows) -> GaussRat:
    """Exact determinant of a square GaussRat matrix."""
    return _det_gauss(_as_gauss_matrix(rows))


def poly_det(m):
    """Exact determinant of a square Poly matrix by cofactor expansion."""
    n = len(m)
    if n == 0:
        raise ValueError("empty matrix has no variables for poly_det")
    if n == 1:
        return m[0][0]
    total = Poly.zero(m[0][0].vars)
    sign = 1
    for j in range(n):
        a = m[0][j]
        if not a.is_zero():
            sub = [[row[c] for c in range(n) if c != j] for row in m[1:]]
            term = a * poly_det(sub)
            total = total + (term if sign > 0 else -term)
        sign = -sign
    return total


def poly_adjugate(m):
    """Classical adjoint of a square Poly matrix: adj(M) M = det(M) I."""
    n = len(m)
    vars = m[0][0].vars
    if n == 1:
        return [[Poly.one(vars)]]
    adj = [[None] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            sub = [
                [m[i][j] for j in range(n) if j != c] for i in range(n) if i != r
            ]
            cof = poly_det(sub)
            if (r + c) % 2:
                cof = -cof
            adj[c][r] = cof
    return adj


def ratfun_det(m):
    """Exact determinant of a square RatFun matrix."""
    n = len(m)
    if n == 1:
        return m[0][0]
    vars = m[0][0].vars
    total = RatFun(Poly.zero(vars))
    sign = 1
    for j in range(n):
        a = m[0][j]
        if not a.is_zero():
            sub = [[row[c] for c in range(n) if c != j] for row in m[1:]]
            term = a * ratfun_det(sub)
            total = total + (term if sign > 0 else -term)
        sign = -sign
    return total


def ratfun_matrix_inverse(m):
    """Inverse of a square RatFun matrix via the adjugate; det must be != 0."""
    n = len(m)
    vars = m[0][0].vars
    d = ratfun_det(m)
    if d.is_zero():
        raise ZeroDenominator("matrix is singular over the rational functions")
    if n == 1:
        return [[RatFun.of(1, vars) / m[0][0]]]
    inv = [[None] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            sub = [
                [m[i][j] for j in range(n) if j != c] for i in range(n) if i != r
            ]
            cof = ratfun_det(sub)
            if (r + c) % 2:
                cof = -cof
            inv[c][r] = cof / d
    return inv
