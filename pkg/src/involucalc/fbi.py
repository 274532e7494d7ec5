"""Wave-front direction scanning via a Gaussian-modulated oscillatory pairing.

For sampled data u on an (x, t) grid with a smooth compactly supported window
w (identically 1 on an inner box) the transform evaluated at basepoint p and
covector (xi, tau) is the quadrature of

    w(x', t') u(x', t') exp( i (xi, tau) . (p - (x', t'))
                             - kappa |(xi, tau)| |p - (x', t')|^2 ).

Magnitudes are scanned along rays (xi, tau) = lambda * direction over a radius
grid spanning at least two decades, and the fitted log-log slope classifies
each direction: steep decay means microlocally smooth at (p, direction), flat
decay flags a singular direction.  The classification thresholds are artifact
choices stored in the scan configuration, not claims of the underlying
regularity theorems; the theorem content enters through the exact drift sign
condition, which the scans are correlated against.

Quadrature is composite Simpson per axis (with a 3/8 tail when the interval
count is odd), which for these smooth, compactly supported integrands
converges superalgebraically; aliasing of the integrand spectrum at the
half-grid frequency is the practical accuracy floor, so radius grids should
stay well below pi / grid_step."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import GaussRat, Poly, RatFun
from .approx import NormalFormField, chi_float
from .structure import StructureDef, build_frame, levi_form


class FbiError(Exception):
    pass


class DegenerateGrid(FbiError):
    pass


class NoNegativeDirection(FbiError):
    pass


class RectificationUnavailable(FbiError):
    pass


# -- sampled data ---------------------------------------------------------------


@dataclass(frozen=True)
class SampledData:
    xs: np.ndarray  # 1-D grid in x
    ts: np.ndarray  # 1-D grid in t
    values: np.ndarray  # (r, nx, nt) complex samples
    window: np.ndarray  # (nx, nt), 1 on an inner box, 0 near the boundary

    @property
    def rank(self) -> int:
        return self.values.shape[0]


def scaled_window(x, plateau, support):
    """Smooth bump equal to 1 on |x| <= plateau, supported in |x| < support.

    The transition maps [plateau, support] affinely into the transition zone
    of the reference bump; the gluing is flat, so the result is smooth."""
    if not 0 < plateau < support:
        raise DegenerateGrid("window plateau must sit inside the support")
    ax = np.abs(np.asarray(x, dtype=float))
    u = 0.5 + (ax - plateau) / (2.0 * (support - plateau))
    return chi_float(np.clip(u, 0.0, 1.0))


def sample_data(
    fn,
    halfwidth=1.0,
    n=256,
    window_support=0.95,
    window_plateau=None,
    rank=1,
) -> SampledData:
    """Sample fn(x, t) (broadcasting over arrays) on a centered square grid.

    The window is a product of per-axis bumps with support radius
    window_support * halfwidth (strictly inside the box) and plateau radius
    window_plateau * halfwidth (default: half the support)."""
    if n < 5:
        raise DegenerateGrid("need at least 5 points per axis")
    if not 0 < window_support < 1:
        raise DegenerateGrid("window support must sit strictly inside the box")
    if window_plateau is None:
        window_plateau = window_support / 2.0
    xs = np.linspace(-halfwidth, halfwidth, n)
    ts = np.linspace(-halfwidth, halfwidth, n)
    X, T = np.meshgrid(xs, ts, indexing="ij")
    vals = np.asarray(fn(X, T), dtype=complex)
    if vals.ndim == 2:
        vals = vals[None, :, :]
    if vals.shape != (rank, n, n):
        raise DegenerateGrid("sampled values have unexpected shape")
    ws = window_support * halfwidth
    wp = window_plateau * halfwidth
    window = scaled_window(X, wp, ws) * scaled_window(T, wp, ws)
    return SampledData(xs, ts, vals, window)


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights for n equally spaced points; when the
    interval count is odd the last three intervals use the 3/8 rule."""
    if n < 5 or h <= 0:
        raise DegenerateGrid("quadrature grid is degenerate")
    w = np.zeros(n)
    if n % 2 == 1:
        w[0] = w[-1] = 1.0
        w[1:-1:2] = 4.0
        w[2:-2:2] = 2.0
        w *= h / 3.0
        return w
    # even point count: Simpson on the first n-3 points, 3/8 on the rest
    m = n - 3
    w[0] = w[m - 1] = 1.0
    w[1 : m - 1 : 2] = 4.0
    w[2 : m - 2 : 2] = 2.0
    w *= h / 3.0
    tail = np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    w[m - 1 : n] += tail
    return w


def fbi_transform(data: SampledData, kappa, basepoint, covector) -> np.ndarray:
    """Transform value per component at one basepoint and covector."""
    kappa = float(kappa)
    if kappa <= 0:
        raise FbiError("kappa must be positive")
    xi, tau = float(covector[0]), float(covector[1])
    rho = math.hypot(xi, tau)
    if rho == 0:
        raise FbiError("covector must be nonzero")
    bx, bt = float(basepoint[0]), float(basepoint[1])
    X, T = np.meshgrid(data.xs, data.ts, indexing="ij")
    dx = bx - X
    dt = bt - T
    kernel = np.exp(1j * (xi * dx + tau * dt) - kappa * rho * (dx**2 + dt**2))
    wx = simpson_weights(len(data.xs), data.xs[1] - data.xs[0])
    wt = simpson_weights(len(data.ts), data.ts[1] - data.ts[0])
    weights = np.outer(wx, wt)
    integrand = data.window[None, :, :] * data.values * kernel[None, :, :]
    return np.tensordot(integrand, weights, axes=([1, 2], [0, 1]))


SMOOTH = "Smooth"
SINGULAR = "Singular"
INCONCLUSIVE = "Inconclusive"


@dataclass
class FbiScan:
    kappa: float
    basepoint: tuple
    directions: list  # unit covectors (xi, tau)
    radii: list
    magnitudes: list  # magnitudes[i][m] for direction i, radius m
    slopes: list  # fitted d log|F| / d log radius per direction
    labels: list  # Smooth / Singular / Inconclusive
    smooth_threshold: float
    singular_threshold: float
    # aperture of the covector cone a Smooth verdict speaks for: decay at a
    # scanned direction (xi, tau) extends to covectors within transverse
    # ratio < cone_aperture of it
    cone_aperture: float = 1.0 / math.sqrt(2.0)

    def label_of(self, i):
        return self.labels[i]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["direction_index", "xi", "tau", "radius", "abs_F"])
            for i, (xi, tau) in enumerate(self.directions):
                for lam, mag in zip(self.radii, self.magnitudes[i]):
                    w.writerow(
                        [i, f"{xi:.17g}", f"{tau:.17g}", f"{lam:.17g}", f"{mag:.17g}"]
                    )
            w.writerow([])
            w.writerow(["direction_index", "xi", "tau", "slope", "classification"])
            for i, (xi, tau) in enumerate(self.directions):
                w.writerow(
                    [i, f"{xi:.17g}", f"{tau:.17g}", f"{self.slopes[i]:.17g}", self.labels[i]]
                )


def fit_loglog_slope(radii, magnitudes, floor=1e-300) -> float:
    lx = np.log(np.asarray(radii, dtype=float))
    ly = np.log(np.maximum(np.asarray(magnitudes, dtype=float), floor))
    return float(np.polyfit(lx, ly, 1)[0])


def direction_scan(
    data: SampledData,
    kappa,
    basepoint,
    n_dirs: int,
    radii,
    smooth_threshold: float = 4.0,
    singular_threshold: float = -1.5,
) -> FbiScan:
    """Scan |F| over a circle of directions and a radius grid; classify each
    direction by the fitted log-log slope."""
    radii = [float(r) for r in radii]
    if len(radii) < 4:
        raise FbiError("slope fits need at least 4 radii")
    if max(radii) / min(radii) < 99.0:
        raise FbiError("radius grid must span at least two decades")
    directions = [
        (math.cos(2 * math.pi * i / n_dirs), math.sin(2 * math.pi * i / n_dirs))
        for i in range(n_dirs)
    ]
    magnitudes = []
    slopes = []
    labels = []
    for xi, tau in directions:
        mags = []
        for lam in radii:
            vals = fbi_transform(data, kappa, basepoint, (lam * xi, lam * tau))
            mag = float(np.max(np.abs(vals)))
            if not math.isfinite(mag):
                raise FbiError("non-finite transform magnitude in the scan")
            mags.append(mag)
        slope = fit_loglog_slope(radii, mags)
        magnitudes.append(mags)
        slopes.append(slope)
        if slope <= -smooth_threshold:
            labels.append(SMOOTH)
        elif slope >= singular_threshold:
            labels.append(SINGULAR)
        else:
            labels.append(INCONCLUSIVE)
    return FbiScan(
        float(kappa),
        tuple(float(b) for b in basepoint),
        directions,
        radii,
        magnitudes,
        slopes,
        labels,
        smooth_threshold,
        singular_threshold,
    )


# -- the exact side: sign condition and normal-form reduction ----------------------


@dataclass(frozen=True)
class SignReport:
    holds: bool
    value: Fraction  # the exact pairing d_t b(0) . xi0


def sign_condition(field: NormalFormField, xi0) -> SignReport:
    """Exact evaluation of d_t b(0) . xi0 > 0."""
    xi0 = tuple(Fraction(x) for x in xi0)
    if len(xi0) != field.n_x:
        raise FbiError("covector has wrong length")
    if all(x == 0 for x in xi0):
        raise FbiError("covector must be nonzero")
    total = Fraction(0)
    for bj, x in zip(field.b, xi0):
        if x:
            c = bj.diff("t").constant_term()
            total += Fraction(c.re) * x
    return SignReport(total > 0, total)


@dataclass(frozen=True)
class SmallnessReport:
    """Sampled check of the window-width constraint
    (3 kappa / 2)(1 + sup |Im shift|) < rho / 16, where rho is the sampled
    lower bound of the drift pairing along the covector direction."""

    ok: bool
    lhs: float
    rho: float
    sup_im_shift: float


def kappa_smallness_check(
    field: NormalFormField,
    xi0,
    kappa,
    box_halfwidth=1.0,
    s_max=0.25,
    order=6,
    grid=17,
) -> SmallnessReport:
    from .approx import poly_complex_fn, series_coefficients

    xi0 = tuple(Fraction(x) for x in xi0)
    norm = math.sqrt(sum(float(x) ** 2 for x in xi0))
    if norm == 0:
        raise FbiError("covector must be nonzero")
    vars = field.vars
    axes = [np.linspace(-box_halfwidth, box_halfwidth, grid) for _ in vars]
    mesh = np.meshgrid(*axes, indexing="ij")
    pairing = None
    for bj, x in zip(field.b, xi0):
        if x == 0:
            continue
        vals = poly_complex_fn(bj.diff("t"))(*mesh).real * float(x)
        pairing = vals if pairing is None else pairing + vals
    rho = float(np.min(pairing)) / norm if pairing is not None else 0.0
    sup_im = 0.0
    svals = np.linspace(-s_max, s_max, grid)
    for j in range(1, field.n_x + 1):
        series = series_coefficients(field, (Poly.var(vars, f"x{j}"),), order + 1)
        for s in svals:
            acc = np.zeros(mesh[0].shape, dtype=complex)
            for k in range(order + 1):
                acc = acc + poly_complex_fn(series.coeffs[k + 1][0])(*mesh) * s**k
            sup_im = max(sup_im, float(np.max(np.abs(acc.imag))))
    lhs = 1.5 * float(kappa) * (1.0 + sup_im)
    return SmallnessReport(lhs < rho / 16.0, lhs, rho, sup_im)


@dataclass(frozen=True)
class NormalFormReduction:
    witness_index: int  # 1-based frame index whose Levi diagonal is negative
    field: NormalFormField
    xi0: tuple  # covector in the rectified x coordinates
    coordinate_names: tuple  # original names of (x_1..x_N), then the rectified t


def levi_to_normal_form(sdef: StructureDef, point, xi: dict) -> NormalFormReduction:
    """Find a frame field with negative Levi diagonal at the covector and
    rewrite it as d/dt + i b . d/dx in the remaining coordinates.

    Only polynomial-rectifiable witnesses are handled: the distinguished real
    coordinate coefficient must be constant 1 after scaling and every other
    coefficient purely imaginary with polynomial imaginary part.  The sign
    condition holds for the returned covector by the commutator identity."""
    from .structure import characteristic_dim

    if characteristic_dim(sdef, point) == 0:
        raise NoNegativeDirection("characteristic set is trivial at this point")
    report = levi_form(sdef, point, xi)
    if report.inertia[1] < 1:
        raise NoNegativeDirection("the Levi form has no negative eigenvalue here")
    if any(p != 0 for p in report.point):
        raise RectificationUnavailable("translate the structure to the base point first")
    frame = build_frame(sdef)
    vars = sdef.vars
    candidates = [
        j for j in range(len(frame)) if report.matrix.entries[j][j].re < 0
    ]
    if not candidates:
        raise RectificationUnavailable(
            "no frame field has a negative Levi diagonal in this covector"
        )
    last_error = None
    for j in candidates:
        try:
            return _rectify(sdef, frame, j, report.covector, vars)
        except RectificationUnavailable as e:
            last_error = e
    raise last_error


def _rectify(sdef, frame, j, xi, vars) -> NormalFormReduction:
    L = frame[j]
    if j >= sdef.nu:
        marker = f"t{j - sdef.nu + 1}"
        scale = GaussRat(1)
    else:
        marker = f"x{j + 1}"
        scale = GaussRat(2)
    rest = [v for v in vars if v != marker]
    new_vars = tuple(f"x{i}" for i in range(1, len(rest) + 1)) + ("t",)
    mapping = {old: new for old, new in zip(rest, new_vars)}
    mapping[marker] = "t"
    b = []
    for old in rest:
        c = L.coeff(old) * scale
        re = c + c.conjugate()
        if not re.is_zero():
            raise RectificationUnavailable(
                f"coefficient on d/d{old} is not purely imaginary"
            )
        im = c * GaussRat(0, -1)
        if not im.is_polynomial():
            raise RectificationUnavailable(
                f"coefficient on d/d{old} is not polynomial"
            )
        b.append(im.as_poly().rename_vars(new_vars, mapping))
    marker_coeff = L.coeff(marker) * scale
    if not (marker_coeff - RatFun.of(Poly.one(vars))).is_zero():
        raise RectificationUnavailable("distinguished coefficient is not constant")
    if xi.get(marker, Fraction(0)) != 0:
        raise RectificationUnavailable(
            "covector has a component along the rectified direction"
        )
    xi0 = tuple(Fraction(xi.get(old, 0)) for old in rest)
    field = NormalFormField(len(rest), tuple(b))
    sr = sign_condition(field, xi0)
    if not sr.holds:
        raise RectificationUnavailable("sign condition failed after rectification")
    return NormalFormReduction(j + 1, field, xi0, tuple(rest) + (marker,))
