"""Infinitesimal automorphism systems.

A real vector field X is an infinitesimal automorphism exactly when
L (dF(X)) = 0 for every first integral F and frame field L.  Writing
X = sum_c u_c d/dc over the real coordinates, each pair (F, L) yields one
linear first-order PDE in the unknowns u_c.  Coefficients live in
Q(i)[coords, 1/det W_s]; every denominator is a power of det W_s, so the
emitted equations are cleared exactly by multiplying with the right power.

Candidate fields are checked by substituting their polynomial components into
the cleared equations; the verdict is Automorphism iff every residual is the
zero polynomial."""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Poly, RatFun
from .structure import StructureDef, build_frame, jacobians


class AutosysError(Exception):
    pass


class RealVectorFieldSym:
    """Real vector field with real polynomial coefficients per coordinate."""

    __slots__ = ("vars", "coeffs")

    def __init__(self, vars, coeffs):
        object.__setattr__(self, "vars", tuple(vars))
        clean = {}
        for name, p in coeffs.items():
            if name not in self.vars:
                raise AutosysError(f"unknown coordinate {name}")
            if not isinstance(p, Poly):
                raise AutosysError("coefficients must be polynomials")
            if not p.is_real():
                raise AutosysError(f"coefficient of d/d{name} is not real")
            if not p.is_zero():
                clean[name] = p
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("RealVectorFieldSym is immutable")

    def coeff(self, name) -> Poly:
        return self.coeffs.get(name, Poly.zero(self.vars))


def _det_power_of(c: RatFun, det: Poly, max_power=4):
    """Express c as (num, p) with c = num / det^p; the denominators produced
    by the frame construction are always powers of det W_s."""
    if c.den.is_constant():
        # normalization scales the trailing den coefficient to 1
        return c.num, 0
    power = det
    for p in range(1, max_power + 1):
        if c.den == power:
            return c.num, p
        power = power * det
    raise AutosysError("denominator is not a small power of det W_s")


@dataclass(frozen=True)
class PDETerm:
    unknown: str
    deriv: str | None  # None for the zeroth-order part
    coeff: Poly


@dataclass(frozen=True)
class PDEEquation:
    integral: str
    field_index: int  # 1-based frame index
    cleared_power: int  # the equation was multiplied by det^cleared_power
    terms: tuple  # PDETerm, complex Poly coefficients


@dataclass(frozen=True)
class PDESystem:
    sdef: StructureDef
    unknowns: tuple  # one unknown per coordinate, named after it
    equations: tuple


def generate_system(sdef: StructureDef) -> PDESystem:
    """One cleared linear PDE per (first integral, frame field) pair."""
    frame = build_frame(sdef)
    det = jacobians(sdef).det_w_s
    vars = sdef.vars
    integrals = sdef.first_integrals()
    labels = sdef.integral_labels()
    equations = []
    frame_pairs = []
    for L in frame:
        frame_pairs.append({n: _det_power_of(c, det) for n, c in L.coeffs.items()})
    for label, F in zip(labels, integrals):
        dF = {c: F.diff(c) for c in vars}
        for i, pairs in enumerate(frame_pairs, start=1):
            raw = {}  # (unknown, deriv) -> (num, power)
            for c in vars:
                fc = dF[c]
                if fc.is_zero():
                    continue
                # zeroth order: L(F_c) * u_c
                for cprime, (num, p) in pairs.items():
                    d = fc.diff(cprime)
                    if d.is_zero():
                        continue
                    _accumulate(raw, (c, None), num * d, p, det)
                # first order: F_c * L^{c'} * du_c/dc'
                for cprime, (num, p) in pairs.items():
                    _accumulate(raw, (c, cprime), fc * num, p, det)
            if not raw:
                continue
            big = max(p for (_, p) in raw.values())
            terms = []
            for (unknown, deriv), (num, p) in sorted(
                raw.items(), key=lambda kv: (kv[0][0], kv[0][1] or "")
            ):
                coeff = num
                for _ in range(big - p):
                    coeff = coeff * det
                if not coeff.is_zero():
                    terms.append(PDETerm(unknown, deriv, coeff))
            equations.append(PDEEquation(label, i, big, tuple(terms)))
    return PDESystem(sdef, vars, tuple(equations))


def _accumulate(raw, key, num, p, det):
    if key not in raw:
        raw[key] = (num, p)
        return
    num0, p0 = raw[key]
    big = max(p0, p)
    for _ in range(big - p0):
        num0 = num0 * det
    for _ in range(big - p):
        num = num * det
    raw[key] = (num0 + num, big)


@dataclass(frozen=True)
class CandidateVerdict:
    automorphism: bool
    failure: tuple | None = None  # ((integral, field_index), residual Poly)

    def __bool__(self):
        return self.automorphism


def equation_residual(eq: PDEEquation, X: RealVectorFieldSym) -> Poly:
    vars = X.vars
    total = Poly.zero(vars)
    for term in eq.terms:
        u = X.coeff(term.unknown)
        if term.deriv is not None:
            u = u.diff(term.deriv)
        if u.is_zero():
            continue
        total = total + term.coeff * u
    return total


def check_candidate(
    sdef: StructureDef, X: RealVectorFieldSym, system: PDESystem | None = None
) -> CandidateVerdict:
    """Substitute X into the generated system; Automorphism iff all cleared
    residuals vanish identically.  Returns the first nonvanishing residual
    otherwise."""
    if system is None:
        system = generate_system(sdef)
    if X.vars != sdef.vars:
        raise AutosysError("candidate lives over different coordinates")
    for eq in system.equations:
        res = equation_residual(eq, X)
        if not res.is_zero():
            return CandidateVerdict(False, ((eq.integral, eq.field_index), res))
    return CandidateVerdict(True)


def candidate_residuals_direct(sdef: StructureDef, X: RealVectorFieldSym):
    """Oracle: residuals computed as L(dF(X)) without the emitted system,
    one RatFun per (integral, field)."""
    frame = build_frame(sdef)
    out = []
    for label, F in zip(sdef.integral_labels(), sdef.first_integrals()):
        dFX = Poly.zero(sdef.vars)
        for c in sdef.vars:
            fc = F.diff(c)
            if not fc.is_zero():
                dFX = dFX + fc * X.coeff(c)
        for i, L in enumerate(frame, start=1):
            out.append(((label, i), L.apply(dFX)))
    return out
