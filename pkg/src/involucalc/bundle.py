"""Flat partial connections over an involutive base frame.

Conventions.  A bundle of rank r over a base frame L_1..L_n stores one r x r
matrix per frame field with entries

    (D_j)[alpha][beta] = D^alpha_beta(L_j),     D_L w^alpha = D^alpha_beta(L) w^beta,

so that for a section with component row vector eta the derivative components
are L_j eta + eta . D_j, a solution satisfies L_j eta = -eta . D_j, and a
matrix Lambda of solution rows satisfies L_j Lambda = -Lambda D_j.

Structure constants [L_j, L_k] = sum_l C^l_{jk} L_l are computed exactly from
the base frame at construction, and the curvature identity

    L_j D_k - L_k D_j + D_k D_j - D_j D_k = sum_l C^l_{jk} D_l

is checked; bundles are flat by admission."""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import (
    GaussRat,
    Poly,
    RatFun,
    exact_rank,
    ratfun_det,
    ratfun_matrix_inverse,
)
from .structure import StructureDef, VectorFieldSym, build_frame


class BundleError(Exception):
    pass


class NotFlat(BundleError):
    pass


class BaseFrameMismatch(BundleError):
    pass


class NotInvertible(BundleError):
    pass


class NotInvertibleAtBase(BundleError):
    pass


# -- small RatFun matrix helpers ----------------------------------------------


def _zero(vars):
    return RatFun.of(Poly.zero(vars))


def _mat(entries):
    return tuple(tuple(row) for row in entries)


def _mzero(r, vars):
    return _mat([[_zero(vars)] * r for _ in range(r)])


def _mid(r, vars):
    one = RatFun.of(Poly.one(vars))
    return _mat(
        [[one if i == j else _zero(vars) for j in range(r)] for i in range(r)]
    )


def _madd(a, b):
    return _mat([[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)])


def _msub(a, b):
    return _mat([[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)])


def _mmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = a[i][0] * b[0][j]
            for k in range(1, m):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return _mat(out)


def _mapply(L: VectorFieldSym, a):
    return _mat([[L.apply(x) for x in row] for row in a])


def _mscale(a, f):
    return _mat([[x * f for x in row] for row in a])


def _mtranspose(a):
    return _mat(list(zip(*a)))


def _is_mzero(a):
    return all(x.is_zero() for row in a for x in row)


def expand_in_span(fields, target):
    """Solve target = sum_i c_i fields[i] exactly over the rational functions.

    Raises BundleError when the target is not in the span."""
    vars = target.vars
    coords = sorted(set(target.coeffs).union(*(set(f.coeffs) for f in fields)))
    n = len(fields)
    rows = [
        [f.coeff(c) for f in fields] + [target.coeff(c)] for c in coords
    ]
    # Gaussian elimination over the RatFun field
    pivots = []
    rank = 0
    for col in range(n):
        pr = None
        for r in range(rank, len(rows)):
            if not rows[r][col].is_zero():
                pr = r
                break
        if pr is None:
            continue
        rows[rank], rows[pr] = rows[pr], rows[rank]
        pv = rows[rank][col]
        rows[rank] = [x / pv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    for r in range(rank, len(rows)):
        if not rows[r][n].is_zero():
            raise BundleError("vector field is not in the span of the frame")
    coeffs = [_zero(vars) for _ in range(n)]
    for r, col in enumerate(pivots):
        coeffs[col] = rows[r][n]
    return coeffs


class VBundle:
    """Rank-r bundle with a flat partial connection over a base frame."""

    __slots__ = ("vars", "base", "labels", "rank", "D", "C", "flat")

    def __init__(self, base, D, labels=None, require_flat=True):
        base = tuple(base)
        if not base:
            raise BundleError("base frame must be nonempty")
        vars = base[0].vars
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "base", base)
        D = tuple(_mat(m) for m in D)
        if len(D) != len(base):
            raise BundleError("one connection matrix per base field required")
        rank = len(D[0])
        for m in D:
            if len(m) != rank or any(len(row) != rank for row in m):
                raise BundleError("connection matrices must be square of equal size")
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "D", D)
        if labels is None:
            labels = tuple(f"w{a}" for a in range(1, rank + 1))
        object.__setattr__(self, "labels", tuple(labels))
        n = len(base)
        C = []
        for j in range(n):
            row = []
            for k in range(n):
                if k <= j:
                    row.append(None)
                    continue
                row.append(expand_in_span(list(base), base[j].bracket(base[k])))
            C.append(row)
        object.__setattr__(self, "C", C)
        verdict = flatness_check(self)
        object.__setattr__(self, "flat", verdict.flat)
        if require_flat and not verdict.flat:
            raise NotFlat(f"curvature identity fails at {verdict.failure[:4]}")

    def __setattr__(self, name, value):
        raise AttributeError("VBundle is immutable")

    def structure_coeffs(self, j, k):
        """Coefficients of [L_j, L_k] in the frame (antisymmetric in j, k)."""
        if j == k:
            return [_zero(self.vars) for _ in self.base]
        if j < k:
            return list(self.C[j][k])
        return [c * GaussRat(-1) for c in self.C[k][j]]

    def same_base(self, other) -> bool:
        return len(self.base) == len(other.base) and all(
            a == b for a, b in zip(self.base, other.base)
        )

    @classmethod
    def trivial(cls, base, rank, labels=None):
        base = tuple(base)
        vars = base[0].vars
        return cls(base, [_mzero(rank, vars) for _ in base], labels)


def canonical_annihilator_bundle(sdef: StructureDef) -> VBundle:
    """The annihilator bundle in the first-integral coframe: the canonical
    derivative acts componentwise there, so all connection matrices vanish."""
    base = build_frame(sdef)
    rank = sdef.nu + sdef.d
    labels = tuple(
        [f"dZ{j}" for j in range(1, sdef.nu + 1)]
        + [f"dW{k}" for k in range(1, sdef.d + 1)]
    )
    return VBundle.trivial(base, rank, labels)


@dataclass(frozen=True)
class FlatnessVerdict:
    flat: bool
    failure: tuple | None = None  # (j, k, alpha, beta, residual)

    def __bool__(self):
        return self.flat


def flatness_check(b: VBundle) -> FlatnessVerdict:
    """Evaluate the curvature identity exactly for all j < k."""
    n = len(b.base)
    for j in range(n):
        for k in range(j + 1, n):
            lhs = _msub(
                _madd(_mapply(b.base[j], b.D[k]), _mmul(b.D[k], b.D[j])),
                _madd(_mapply(b.base[k], b.D[j]), _mmul(b.D[j], b.D[k])),
            )
            rhs = _mzero(b.rank, b.vars)
            for l, c in enumerate(b.structure_coeffs(j, k)):
                if not c.is_zero():
                    rhs = _madd(rhs, _mscale(b.D[l], c))
            res = _msub(lhs, rhs)
            for alpha in range(b.rank):
                for beta in range(b.rank):
                    if not res[alpha][beta].is_zero():
                        return FlatnessVerdict(
                            False, (j + 1, k + 1, alpha + 1, beta + 1, res[alpha][beta])
                        )
    return FlatnessVerdict(True)


def frame_change(b: VBundle, T) -> VBundle:
    """New bundle in the frame w~^alpha = T^alpha_beta w^beta:
    D~_j = (L_j T + T D_j) T^{-1}."""
    T = _mat(T)
    if ratfun_det(T).is_zero():
        raise NotInvertible("frame change matrix is singular")
    Tinv = ratfun_matrix_inverse(T)
    newD = []
    for L, Dj in zip(b.base, b.D):
        newD.append(_mmul(_madd(_mapply(L, T), _mmul(T, Dj)), Tinv))
    return VBundle(b.base, newD, b.labels)


def transform_section(b: VBundle, T, eta):
    """Components of a section in the changed frame: eta~ = eta . T^{-1}."""
    Tinv = ratfun_matrix_inverse(_mat(T))
    row = _mmul((tuple(eta),), Tinv)
    return tuple(row[0])


def dual_bundle(b: VBundle) -> VBundle:
    """Dual connection matrices are minus the transposes."""
    newD = [_mscale(_mtranspose(Dj), GaussRat(-1)) for Dj in b.D]
    return VBundle(b.base, newD, tuple(l + "*" for l in b.labels))


def tensor_bundle(b: VBundle, b2: VBundle) -> VBundle:
    """Kronecker-sum connection on the tensor product, frame index pairing
    (alpha, gamma) in row-major order."""
    if not b.same_base(b2):
        raise BaseFrameMismatch("tensor factors live over different base frames")
    r1, r2 = b.rank, b2.rank
    vars = b.vars
    newD = []
    for Dj, Ej in zip(b.D, b2.D):
        m = [[_zero(vars)] * (r1 * r2) for _ in range(r1 * r2)]
        for a in range(r1):
            for g in range(r2):
                row = a * r2 + g
                for bb in range(r1):
                    m[row][bb * r2 + g] = m[row][bb * r2 + g] + Dj[a][bb]
                for dd in range(r2):
                    m[row][a * r2 + dd] = m[row][a * r2 + dd] + Ej[g][dd]
        newD.append(_mat(m))
    labels = tuple(f"{x}(x){y}" for x in b.labels for y in b2.labels)
    return VBundle(b.base, newD, labels)


def hom_bundle(b: VBundle, b2: VBundle) -> VBundle:
    """Hom(E, F) = E* tensor F."""
    if not b.same_base(b2):
        raise BaseFrameMismatch("hom factors live over different base frames")
    return tensor_bundle(dual_bundle(b), b2)


@dataclass(frozen=True)
class SectionVerdict:
    solution: bool
    failure: tuple | None = None  # (field index, component, residual)

    def __bool__(self):
        return self.solution


def is_solution_section(b: VBundle, eta) -> SectionVerdict:
    """Exact residual check of L_j eta = -eta . D_j for all j."""
    eta = tuple(RatFun.of(x, b.vars) for x in eta)
    if len(eta) != b.rank:
        raise BundleError("section has wrong number of components")
    for j, (L, Dj) in enumerate(zip(b.base, b.D), start=1):
        for beta in range(b.rank):
            res = L.apply(eta[beta])
            for alpha in range(b.rank):
                res = res + eta[alpha] * Dj[alpha][beta]
            if not res.is_zero():
                return SectionVerdict(False, (j, beta + 1, res))
    return SectionVerdict(True)


def pair_sections(eta_dual, omega):
    """Natural pairing of dual components against components."""
    acc = None
    for a, w in zip(eta_dual, omega):
        term = a * w
        acc = term if acc is None else acc + term
    return acc


@dataclass(frozen=True)
class IntegratingVerdict:
    integrating: bool
    failure: tuple | None = None

    def __bool__(self):
        return self.integrating


def is_integrating_frame(b: VBundle, lam) -> IntegratingVerdict:
    """Exact residual check of L_j Lambda = -Lambda D_j; Lambda must be
    invertible at the base point."""
    lam = _mat(lam)
    det = ratfun_det(lam)
    if det.is_zero() or det.value_at_origin().is_zero():
        raise NotInvertibleAtBase("matrix is singular at the base point")
    for j, (L, Dj) in enumerate(zip(b.base, b.D), start=1):
        res = _madd(_mapply(L, lam), _mmul(lam, Dj))
        for a in range(b.rank):
            for c in range(b.rank):
                if not res[a][c].is_zero():
                    return IntegratingVerdict(False, (j, a + 1, c + 1, res[a][c]))
    return IntegratingVerdict(True)


# -- the lifted involutive structure on the total space --------------------------


def _lift_ratfun(f: RatFun, new_vars):
    return RatFun(f.num.rename_vars(new_vars), f.den.rename_vars(new_vars))


def lifted_generators(b: VBundle):
    """Generators of the induced involutive structure on the total space, in
    coordinates (base coords, w_1..w_r, wbar_1..wbar_r): one lift per base
    field plus the antiholomorphic fiber fields.

    The lift of L_j carries fiber coefficient -sum_beta D^beta_alpha(L_j) w_beta
    on d/dw_alpha."""
    r = b.rank
    ext = b.vars + tuple(f"w{a}" for a in range(1, r + 1)) + tuple(
        f"wbar{a}" for a in range(1, r + 1)
    )
    gens = []
    for L, Dj in zip(b.base, b.D):
        coeffs = {n: _lift_ratfun(c, ext) for n, c in L.coeffs.items()}
        for alpha in range(r):
            acc = RatFun.of(Poly.zero(ext))
            for beta in range(r):
                entry = _lift_ratfun(Dj[beta][alpha], ext)
                acc = acc + entry * RatFun.of(Poly.var(ext, f"w{beta + 1}"))
            if not acc.is_zero():
                coeffs[f"w{alpha + 1}"] = acc * GaussRat(-1)
        gens.append(VectorFieldSym(ext, coeffs))
    for alpha in range(r):
        gens.append(
            VectorFieldSym(ext, {f"wbar{alpha + 1}": RatFun.of(Poly.one(ext))})
        )
    return gens, ext


def lifted_bracket_closure(b: VBundle) -> bool:
    """[G_i, G_j] must re-expand over the lifted frame with the base structure
    constants; exact check via the flatness identity."""
    gens, ext = lifted_generators(b)
    n = len(b.base)
    for i in range(n):
        for j in range(i + 1, n):
            br = gens[i].bracket(gens[j])
            for l, c in enumerate(b.structure_coeffs(i, j)):
                if not c.is_zero():
                    br = br - gens[l].scale_ratfun(_lift_ratfun(c, ext))
            if not br.is_zero():
                return False
    # lifts commute with the fiber fields: coefficients are wbar-free
    for i in range(n):
        for alpha in range(n, n + b.rank):
            if not gens[i].bracket(gens[alpha]).is_zero():
                return False
    return True


def lifted_rank_at(b: VBundle, base_point, fiber_point) -> int:
    """Rank of the lifted generator family at a point (base, fiber)."""
    gens, ext = lifted_generators(b)
    point = list(base_point) + [GaussRat.of(x) for x in fiber_point]
    point = point + [GaussRat.of(x).conjugate() for x in fiber_point]
    rows = []
    for g in gens:
        rows.append([g.coeff(v).evaluate(point) for v in ext])
    return exact_rank(rows)
