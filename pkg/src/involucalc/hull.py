"""Lie-derivative calculus on annihilator sections and the ascending span
chains that decide the nondegeneracy order at the base point.

In the first-integral coframe {dZ_j, dW_k} the canonical derivative along a
frame field acts componentwise, because each dZ_j, dW_k is closed and
annihilates the frame.  Chains are computed on jets at the origin: the level-k
entries are iterated derivatives L_w of the characteristic forms over words w
of length <= k, and the span dimension is taken on the values at 0.

Iterated words are deduplicated by their truncated jets: a word whose jet is a
constant-coefficient combination of already-kept jets contributes nothing new
at any later level, since differentiation is linear over constants.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Jet, RatFun, ZERO, exact_rank, ratfun_jet
from .structure import (
    CotangentSection,
    StructureDef,
    VectorFieldSym,
    build_frame,
    characteristic_form,
)

DEFAULT_KMAX = 8


def lie_derivative(
    sdef: StructureDef, L: VectorFieldSym, omega: CotangentSection
) -> CotangentSection:
    """Derivative of an annihilator section along a frame field,
    componentwise in the first-integral coframe."""
    return CotangentSection(
        sdef,
        tuple(L.apply(c) for c in omega.cz),
        tuple(L.apply(c) for c in omega.cw),
    )


def lie_derivative_defining_formula(
    sdef: StructureDef, L: VectorFieldSym, omega: CotangentSection, X: VectorFieldSym
) -> RatFun:
    """(D_L omega)(X) computed from L(omega(X)) - omega([L, X]); test oracle
    for the componentwise rule."""
    return L.apply(omega.apply_to_field(X)) - omega.apply_to_field(L.bracket(X))


def apply_word(
    sdef: StructureDef, omega: CotangentSection, word, frame=None
) -> CotangentSection:
    """Iterated symbolic derivative along frame indices, leftmost applied last:
    word (i, j) means L_i (L_j omega)."""
    if frame is None:
        frame = build_frame(sdef)
    for idx in reversed(word):
        omega = lie_derivative(sdef, frame[idx], omega)
    return omega


# -- jet span bookkeeping -----------------------------------------------------


class _SpanTracker:
    """Incremental reduced echelon basis of sparse vectors keyed by
    (component, exponent tuple)."""

    def __init__(self):
        self.rows = []  # list of (pivot_key, {key: GaussRat}) with pivot coeff 1

    @property
    def dim(self):
        return len(self.rows)

    def add(self, vec: dict) -> bool:
        v = {k: c for k, c in vec.items() if not c.is_zero()}
        for pivot, row in self.rows:
            c = v.get(pivot)
            if c is None or c.is_zero():
                continue
            for k2, c2 in row.items():
                nv = v.get(k2, ZERO) - c * c2
                if nv.is_zero():
                    v.pop(k2, None)
                else:
                    v[k2] = nv
        if not v:
            return False
        pivot = min(v)
        pc = v[pivot]
        newrow = {k: c / pc for k, c in v.items()}
        # keep the basis mutually reduced so a single pass suffices later
        for j, (pk, row) in enumerate(self.rows):
            c = row.get(pivot)
            if c is None or c.is_zero():
                continue
            merged = dict(row)
            for k2, c2 in newrow.items():
                nv = merged.get(k2, ZERO) - c * c2
                if nv.is_zero():
                    merged.pop(k2, None)
                else:
                    merged[k2] = nv
            self.rows[j] = (pk, merged)
        self.rows.append((pivot, newrow))
        self.rows.sort(key=lambda t: t[0])
        return True


def _jet_vec_key(jets) -> dict:
    out = {}
    for ci, j in enumerate(jets):
        for e, c in j.terms.items():
            out[(ci, e)] = c
    return out


def _apply_field_jets(field_coeff_jets: dict, jets) -> tuple:
    out = []
    for j in jets:
        acc = None
        for name, cj in field_coeff_jets.items():
            term = cj * j.diff(name)
            acc = term if acc is None else acc + term
        if acc is None:
            acc = Jet(max(j.order - 1, 0), j.vars, {}, _clean=False)
        out.append(acc)
    return tuple(out)


@dataclass
class SpanChain:
    """Per-level generators (kept words with their values at 0), span
    dimensions, and the resulting nondegeneracy verdict."""

    target: int
    k_max: int
    dims: list  # dims[k] = span dimension at 0 of all iterates of length <= k
    entries: list  # (word, start index, value tuple at 0) per kept generator
    nondeg_order: int | None  # least k with dims[k] == target, if attained
    stabilized_at: int | None  # level at which the jet frontier was exhausted
    kernel: tuple = ()  # the kernel vectors the chain was built from

    @property
    def nondegenerate(self) -> bool:
        return self.nondeg_order is not None

    def words(self, max_len=None):
        if max_len is None:
            return [(w, i) for w, i, _ in self.entries]
        return [(w, i) for w, i, _ in self.entries if len(w) <= max_len]


def _run_chain(sdef: StructureDef, start_vectors, target, k_max):
    """Shared chain driver: start_vectors is a list of tuples of RatFun (or
    Poly) components; iterates all frame words up to length k_max with jet
    deduplication."""
    frame = build_frame(sdef)
    frame_jets = []
    for L in frame:
        frame_jets.append(
            {name: ratfun_jet(c, k_max) for name, c in L.coeffs.items()}
        )
    tracker = _SpanTracker()
    entries = []
    value_rows = []
    frontier = []
    for si, comp in enumerate(start_vectors):
        jets = tuple(
            ratfun_jet(RatFun.of(c, sdef.vars), k_max) for c in comp
        )
        if tracker.add(_jet_vec_key(jets)):
            word = ()
            values = tuple(j.constant_term() for j in jets)
            entries.append((word, si, values))
            value_rows.append(list(values))
            frontier.append((word, si, jets))
    dims = [exact_rank(value_rows) if value_rows else 0]
    stabilized_at = None
    for k in range(1, k_max + 1):
        new_frontier = []
        for word, si, jets in frontier:
            for fi, fj in enumerate(frame_jets):
                njets = _apply_field_jets(fj, jets)
                if tracker.add(_jet_vec_key(njets)):
                    nword = (fi,) + word
                    values = tuple(j.constant_term() for j in njets)
                    entries.append((nword, si, values))
                    value_rows.append(list(values))
                    new_frontier.append((nword, si, njets))
        frontier = new_frontier
        dims.append(exact_rank(value_rows) if value_rows else 0)
        if not frontier:
            stabilized_at = k
            break
    # pad: once the frontier is empty the dimension can never grow
    while len(dims) <= k_max:
        dims.append(dims[-1])
    nondeg_order = None
    for k, dim in enumerate(dims):
        if dim == target:
            nondeg_order = k
            break
    return SpanChain(target, k_max, dims, entries, nondeg_order, stabilized_at)


def hull_chain(sdef: StructureDef, kernel, k_max=DEFAULT_KMAX) -> SpanChain:
    """Ascending chain of iterated derivatives of the characteristic forms;
    the structure is nondegenerate at 0 when the values at 0 span all of the
    annihilator fiber (dimension nu + d)."""
    starts = []
    for kv in kernel:
        theta = characteristic_form(sdef, kv)
        starts.append(theta.components())
    chain = _run_chain(sdef, starts, sdef.nu + sdef.d, k_max)
    chain.kernel = tuple(kernel)
    return chain


def kernel_chain(sdef: StructureDef, kernel, k_max=DEFAULT_KMAX, hull=None) -> SpanChain:
    """Chain on the kernel rows alone (values in C^d).

    When the hull chain reaches full span at level k, this chain must reach
    C^d by the same level (necessary condition); pass ``hull`` to have that
    checked."""
    starts = [kv.b for kv in kernel]
    chain = _run_chain(sdef, starts, sdef.d, k_max)
    chain.kernel = tuple(kernel)
    if hull is not None and hull.nondeg_order is not None:
        k = hull.nondeg_order
        if chain.dims[min(k, len(chain.dims) - 1)] != sdef.d:
            raise AssertionError(
                "hull chain reached full span but the kernel chain did not"
            )
    return chain


def word_value_at_origin(sdef: StructureDef, omega: CotangentSection, word, frame=None):
    """Value at 0 of an iterated derivative, computed symbolically."""
    section = apply_word(sdef, omega, word, frame=frame)
    return tuple(c.value_at_origin() for c in section.components())
