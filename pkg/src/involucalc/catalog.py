"""Built-in example structures used as fixtures across the test suite and
as ready-made inputs for the CLI."""

from __future__ import annotations

from fractions import Fraction

from .algebra import Poly
from .structure import StructureDef, structure_vars


def standard_mizohata(nu: int, n: int) -> StructureDef:
    """Type {nu, n - nu} on R^{n+1}: d = 1, mu = n,
    phi = (1/2) * sum_j eps_j t_j^2 with eps_j = +1 for j <= nu, else -1."""
    if not 0 <= nu <= n:
        raise ValueError("need 0 <= nu <= n")
    vars = structure_vars(0, 1, n)
    phi = Poly.zero(vars)
    for j in range(1, n + 1):
        eps = 1 if j <= nu else -1
        phi = phi + Poly.var(vars, f"t{j}", 2) * Fraction(eps, 2)
    return StructureDef(0, 1, n, (phi,))


def crossing_powers(k: int, l: int) -> StructureDef:
    """Two first integrals s_1 + i t^{l+1}/(l+1), s_2 + i t^{k+1}/(k+1)
    over a single t variable; the frame field is
    d/dt - i t^l d/ds_1 - i t^k d/ds_2."""
    vars = structure_vars(0, 2, 1)
    phi1 = Poly.var(vars, "t1", l + 1) * Fraction(1, l + 1)
    phi2 = Poly.var(vars, "t1", k + 1) * Fraction(1, k + 1)
    return StructureDef(0, 2, 1, (phi1, phi2))


def three_quadrics() -> StructureDef:
    """W_1 = s_1 + i t_1^2, W_2 = s_2 + i t_1 t_2, W_3 = s_3 + i t_2^2."""
    vars = structure_vars(0, 3, 2)
    t1 = Poly.var(vars, "t1")
    t2 = Poly.var(vars, "t2")
    return StructureDef(0, 3, 2, (t1 * t1, t1 * t2, t2 * t2))


def disk_weighted_powers(k: int, l: int) -> StructureDef:
    """Z = x + iy together with
    W_1 = s_1 + i t^{k+1}/(k+1) (x^2+y^2), W_2 = s_2 + i t^{l+1}/(l+1) (x^2+y^2)."""
    vars = structure_vars(1, 2, 1)
    zz = Poly.var(vars, "x1", 2) + Poly.var(vars, "y1", 2)
    phi1 = Poly.var(vars, "t1", k + 1) * zz * Fraction(1, k + 1)
    phi2 = Poly.var(vars, "t1", l + 1) * zz * Fraction(1, l + 1)
    return StructureDef(1, 2, 1, (phi1, phi2))


def monomial_structure(alphas) -> StructureDef:
    """W_k = s_k + i t^{alpha^k} for multi-indices alpha^k of common length mu.
    Each alpha^k must have total degree >= 2."""
    alphas = [tuple(a) for a in alphas]
    d = len(alphas)
    mu = len(alphas[0])
    if any(len(a) != mu for a in alphas):
        raise ValueError("all exponent vectors must have the same length")
    if any(sum(a) < 2 for a in alphas):
        raise ValueError("exponents must have total degree at least 2")
    vars = structure_vars(0, d, mu)
    phi = []
    for a in alphas:
        p = Poly.one(vars)
        for r, e in enumerate(a, start=1):
            p = p * Poly.var(vars, f"t{r}", e) if e else p
        phi.append(p)
    return StructureDef(0, d, mu, tuple(phi))


def flat_structure(d: int, mu: int) -> StructureDef:
    """phi = 0: the frame is just the coordinate t-fields."""
    vars = structure_vars(0, d, mu)
    return StructureDef(0, d, mu, tuple(Poly.zero(vars) for _ in range(d)))


def complex_structure(nu: int) -> StructureDef:
    """d = mu = 0: the frame consists of the d/dzbar_j alone."""
    return StructureDef(nu, 0, 0, ())


def disk_times_line() -> StructureDef:
    """Product structure on R^4 with first integrals x + iy and
    s + i(x^2 + y^2); the extra t coordinate is inert."""
    vars = structure_vars(1, 1, 1)
    zz = Poly.var(vars, "x1", 2) + Poly.var(vars, "y1", 2)
    return StructureDef(1, 1, 1, (zz,))
