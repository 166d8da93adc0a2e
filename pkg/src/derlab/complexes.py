"""Unbounded complexes of diagrams as lazily generated, window-inspected
values: complete resolutions, shifts, cones, termwise contractibility, and
the projective/termwise-contractible semiorthogonal decomposition.

Cohomological convention: differentials have degree +1; shift satisfies
d_{C[n]} = (-1)^n d_C; the cone of f: X -> Y has terms Y^k (+) X^{k+1} with
differential [[d_Y, f], [0, -d_X]].

A LazyComplex memoizes terms and differentials and re-checks d o d = 0 on
everything it materializes.  Memoization is not synchronized: hand a value
to at most one worker at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .algebra import Algebra
from .cats import CatFunctor, DirectCategory, full_subcategory, terminal_category
from .field import Mat, hstack, rank, solve, vstack
from .modules import Module, ModuleMap, submodule, is_projective, zero_module
from .diagrams import (
    Diagram,
    DiagramMap,
    compose_diagram_maps,
    counit_from_point,
    direct_sum_diagrams,
    hom_space_diagrams,
    identity_diagram_map,
    is_projective_diagram,
    kernel_diagram,
    left_kan_from_point,
    restrict,
    vec_diagram_map,
    zero_diagram,
    zero_diagram_map,
)
from .gorenstein import VerificationError, embed_gproj_into_proj, is_gproj
from .diagrams import projective_cover_diagram


class WindowError(ValueError):
    """A question was asked outside the materializable window."""


class LazyComplex:
    def __init__(self, shape: DirectCategory, alg: Algebra, term_fn: Callable[[int], Diagram], diff_fn: Callable[[int], DiagramMap], label: str = "") -> None:
        self.shape = shape
        self.alg = alg
        self._term_fn = term_fn
        self._diff_fn = diff_fn
        self.label = label
        self._terms: Dict[int, Diagram] = {}
        self._diffs: Dict[int, DiagramMap] = {}

    def term(self, n: int) -> Diagram:
        if n not in self._terms:
            self._terms[n] = self._term_fn(n)
        return self._terms[n]

    def diff(self, n: int) -> DiagramMap:
        if n not in self._diffs:
            d = self._diff_fn(n)
            for o in self.shape.objects:
                if d.comps[o].rows != self.term(n + 1).at(o).dim or d.comps[o].cols != self.term(n).at(o).dim:
                    raise VerificationError(f"differential at degree {n} has wrong shape at {o}")
            self._diffs[n] = d
            for m in (n - 1, n + 1):
                if m in self._diffs:
                    lo, hi = min(n, m), max(n, m)
                    comp = compose_diagram_maps(self._diffs[hi], self._diffs[lo])
                    if not comp.is_zero():
                        raise VerificationError(f"d o d != 0 between degrees {lo} and {hi + 1}")
        return self._diffs[n]

    def is_acyclic_on(self, lo: int, hi: int) -> bool:
        """Exactness at the inner degrees lo+1 .. hi-1."""
        for k in range(lo + 1, hi):
            for o in self.shape.objects:
                dk = self.diff(k).comps[o]
                dprev = self.diff(k - 1).comps[o]
                if dk.cols - rank(dk) != rank(dprev):
                    return False
        return True

    def is_termwise_projective_on(self, lo: int, hi: int) -> bool:
        return all(
            is_projective(self.term(k).at(o)) for k in range(lo, hi + 1) for o in self.shape.objects
        )

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(shape: DirectCategory, alg: Algebra) -> "LazyComplex":
        z = zero_diagram(shape, alg)
        return LazyComplex(shape, alg, lambda n: z, lambda n: zero_diagram_map(z, z), "zero")

    @staticmethod
    def bounded(shape: DirectCategory, alg: Algebra, terms: Dict[int, Diagram], diffs: Dict[int, DiagramMap], label: str = "bounded") -> "LazyComplex":
        terms = dict(terms)
        diffs = dict(diffs)
        z = zero_diagram(shape, alg)

        def term_fn(n: int) -> Diagram:
            return terms.get(n, z)

        def diff_fn(n: int) -> DiagramMap:
            if n in diffs:
                return diffs[n]
            return zero_diagram_map(term_fn(n), term_fn(n + 1))

        return LazyComplex(shape, alg, term_fn, diff_fn, label)

    @staticmethod
    def periodic(shape: DirectCategory, alg: Algebra, terms: Dict[int, Diagram], diffs: Dict[int, DiagramMap], period: int, label: str = "periodic") -> "LazyComplex":
        lo = min(terms)

        def fold(n: int) -> int:
            return lo + ((n - lo) % period)

        def term_fn(n: int) -> Diagram:
            return terms[fold(n)]

        def diff_fn(n: int) -> DiagramMap:
            return diffs[fold(n)]

        return LazyComplex(shape, alg, term_fn, diff_fn, label)


def complete_resolution(x: Diagram) -> LazyComplex:
    """An acyclic complex of projective diagrams with degree-0 cocycles x.

    Negative side from iterated projective covers, positive side from
    iterated embeddings into projectives; the splice sits between degrees
    -1 and 0, so ker(d^0) recovers x.
    """
    if not is_gproj(x):
        raise VerificationError("complete resolutions are defined for Gorenstein projectives")
    shape, alg = x.shape, x.alg
    pos: List = [embed_gproj_into_proj(x)]   # pos[k]: x_k >-> E_k ->> x_{k+1}
    neg: List = [projective_cover_diagram(x)]  # neg[k]: syz_{k+1} >-> P_k ->> syz_k

    def pos_confl(k: int):
        while len(pos) <= k:
            pos.append(embed_gproj_into_proj(pos[-1].quot))
        return pos[k]

    def neg_confl(k: int):
        while len(neg) <= k:
            neg.append(projective_cover_diagram(neg[-1].sub))
        return neg[k]

    def term_fn(n: int) -> Diagram:
        if n >= 0:
            return pos_confl(n).middle
        return neg_confl(-n - 1).middle

    def diff_fn(n: int) -> DiagramMap:
        if n >= 0:
            # E_n ->> x_{n+1} >-> E_{n+1}
            return compose_diagram_maps(pos_confl(n + 1).left, pos_confl(n).right)
        if n == -1:
            # P_0 ->> x >-> E_0
            return compose_diagram_maps(pos_confl(0).left, neg_confl(0).right)
        # P_{k+1} ->> syz_{k+1} >-> P_k with k = -n - 2
        k = -n - 2
        return compose_diagram_maps(neg_confl(k).left, neg_confl(k + 1).right)

    c = LazyComplex(shape, alg, term_fn, diff_fn, "complete-resolution")
    c.seed = x  # noqa: attribute for witnesses
    return c


def z0(c: LazyComplex) -> Tuple[Diagram, DiagramMap]:
    """Degree-0 cocycles with their inclusion into the degree-0 term."""
    ker, incl = kernel_diagram(c.diff(0))
    return ker, incl


def z0_witness(c: LazyComplex) -> Tuple[Diagram, DiagramMap]:
    """For a complete resolution: the canonical isomorphism seed -> Z^0."""
    if not hasattr(c, "seed"):
        raise WindowError("witness is only available for complete resolutions")
    x = c.seed
    ker, incl = z0(c)
    # solve w with incl o w = eta where eta: x -> E_0 is the embed inflation
    eta = _complete_resolution_unit(c)
    comps = {}
    for o in c.shape.objects:
        sol = solve(incl.comps[o], eta.comps[o])
        if sol is None:
            raise VerificationError("seed does not land in the degree-0 cocycles")
        comps[o] = sol
    w = DiagramMap(x, ker, comps)
    for o in c.shape.objects:
        if rank(w.comps[o]) != ker.at(o).dim or ker.at(o).dim != x.at(o).dim:
            raise VerificationError("z0 witness is not an isomorphism")
    return ker, w


def _complete_resolution_unit(c: LazyComplex) -> DiagramMap:
    c.term(0)
    # pos[0].left is the inflation seed -> E_0; regenerate through the memo
    # only the conflation data is needed; reconstruct from the diff structure:
    # ker(d^0) = image of the unit, and the unit itself is stored on first build
    if not hasattr(c, "_unit"):
        emb = embed_gproj_into_proj(c.seed)
        # By determinism this equals the conflation used in term/diff generation.
        c._unit = emb.left
    return c._unit


class ComplexMap:
    def __init__(self, src: LazyComplex, tgt: LazyComplex, comps: Dict[int, DiagramMap], label: str = "") -> None:
        self.src = src
        self.tgt = tgt
        self.comps = dict(comps)
        self.label = label

    def comp(self, n: int) -> DiagramMap:
        if n in self.comps:
            return self.comps[n]
        return zero_diagram_map(self.src.term(n), self.tgt.term(n))

    def verify_chain_on(self, lo: int, hi: int) -> "ComplexMap":
        for k in range(lo, hi):
            lhs = compose_diagram_maps(self.tgt.diff(k), self.comp(k))
            rhs = compose_diagram_maps(self.comp(k + 1), self.src.diff(k))
            if not (lhs - rhs).is_zero():
                raise VerificationError(f"chain-map square fails at degree {k}")
        return self


def shift(c: LazyComplex, n: int) -> LazyComplex:
    sign = 1 if n % 2 == 0 else -1

    def term_fn(k: int) -> Diagram:
        return c.term(k + n)

    def diff_fn(k: int) -> DiagramMap:
        d = c.diff(k + n)
        return d if sign == 1 else d.scale(-1)

    return LazyComplex(c.shape, c.alg, term_fn, diff_fn, f"{c.label}[{n}]")


def cone(f: ComplexMap) -> LazyComplex:
    """Terms Y^k (+) X^{k+1}; differential [[d_Y, f], [0, -d_X]]."""
    X, Y = f.src, f.tgt
    shape, alg = X.shape, X.alg

    def term_fn(k: int) -> Diagram:
        return direct_sum_diagrams([Y.term(k), X.term(k + 1)])[0]

    def diff_fn(k: int) -> DiagramMap:
        src = term_fn(k)
        tgt = term_fn(k + 1)
        comps = {}
        for o in shape.objects:
            ty, tx = Y.term(k).at(o).dim, X.term(k + 1).at(o).dim
            ny, nx = Y.term(k + 1).at(o).dim, X.term(k + 2).at(o).dim
            top = hstack([Y.diff(k).comps[o], f.comp(k + 1).comps[o]]) if ny else Mat.zeros(alg.p, 0, ty + tx)
            bot = hstack([Mat.zeros(alg.p, nx, ty), (-X.diff(k + 1).comps[o]) if nx else Mat.zeros(alg.p, nx, tx)]) if nx else Mat.zeros(alg.p, 0, ty + tx)
            comps[o] = vstack([top, bot]) if (ny or nx) else Mat.zeros(alg.p, 0, ty + tx)
        return DiagramMap(src, tgt, comps)

    return LazyComplex(shape, alg, term_fn, diff_fn, f"cone({f.label})")


def cone_block_dims(f: ComplexMap, k: int, o: str) -> Tuple[int, int]:
    return f.tgt.term(k).at(o).dim, f.src.term(k + 1).at(o).dim


# -- contractibility -----------------------------------------------------------


def restrict_complex_to_object(c: LazyComplex, o: str) -> LazyComplex:
    """The component complex at one object, as a complex over the point."""
    e = terminal_category()

    def term_fn(n: int) -> Diagram:
        return Diagram(e, c.alg, {"*": c.term(n).at(o)}, {})

    def diff_fn(n: int) -> DiagramMap:
        return DiagramMap(term_fn(n), term_fn(n + 1), {"*": c.diff(n).comps[o]})

    return LazyComplex(e, c.alg, term_fn, diff_fn, f"{c.label}@{o}")


def is_termwise_contractible(c: LazyComplex, lo: int, hi: int, oracle: str = "auto") -> bool:
    """Are all component cocycle modules projective on the window?

    Valid for acyclic complexes of projectives over a self-injective
    algebra: the cocycle conflations split exactly when the cocycles are
    projective (= injective), and splitting everywhere is contractibility.

    The independent oracle is a linear contraction solve per component;
    with oracle="auto" it runs whenever the window is small enough to make
    the joint solve cheap, with "always"/"never" forcing either way.
    Disagreement between criterion and oracle is a hard error.
    """
    if not c.is_acyclic_on(lo, hi):
        raise WindowError("termwise contractibility asks for an acyclic window")
    answer = True
    for k in range(lo, hi + 1):
        for o in c.shape.objects:
            zmod, _ = submodule(c.term(k).at(o), _kernel_cols(c.diff(k).comps[o]))
            if not is_projective(zmod):
                answer = False
                break
        if not answer:
            break
    biggest = max(
        (c.term(k).at(o).dim for k in range(lo, hi + 1) for o in c.shape.objects),
        default=0,
    )
    run_oracle = oracle == "always" or (oracle == "auto" and biggest <= 12)
    # the contraction solve places equations at lo..hi, which presumes
    # exactness there; skip the cross-check when the larger window is not
    # materializably acyclic
    if run_oracle and c.is_acyclic_on(lo - 1, hi + 1):
        by_search = all(
            component_contraction_exists(c, o, lo - 1, hi + 1) for o in c.shape.objects
        )
        if by_search != answer:
            raise VerificationError(
                "projective-cocycle criterion and contraction search disagree"
            )
    return answer


def _kernel_cols(m: Mat) -> Mat:
    from .field import kernel_basis

    return kernel_basis(m)


def contraction_on_window(c: LazyComplex, lo: int, hi: int) -> Optional[Dict[int, DiagramMap]]:
    """Degree -1 maps h with d h + h d = id at the inner degrees, or None.

    One joint linear solve over the hom spaces Hom(C^k, C^{k-1}).
    """
    p = c.alg.p
    degrees = list(range(lo + 1, hi + 1))   # h^k: C^k -> C^{k-1}
    inner = list(range(lo + 1, hi))         # equations at these degrees
    bases = {k: hom_space_diagrams(c.term(k), c.term(k - 1)) for k in degrees}
    cols = []
    col_meta = []
    for k in degrees:
        for idx, b in enumerate(bases[k]):
            parts = []
            for m in inner:
                contrib = None
                if m == k:
                    contrib = compose_diagram_maps(c.diff(m - 1), b)
                elif m == k - 1:
                    contrib = compose_diagram_maps(b, c.diff(m))
                if contrib is None:
                    contrib = zero_diagram_map(c.term(m), c.term(m))
                parts.append(vec_diagram_map(contrib).a.reshape(-1))
            cols.append(np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64))
            col_meta.append((k, idx))
    target_parts = [vec_diagram_map(identity_diagram_map(c.term(m))).a.reshape(-1) for m in inner]
    target = np.concatenate(target_parts) if target_parts else np.zeros(0, dtype=np.int64)
    if not cols:
        return {} if not target.any() else None
    sol = solve(Mat(p, np.stack(cols, axis=1)), Mat(p, target.reshape(-1, 1)))
    if sol is None:
        return None
    out: Dict[int, DiagramMap] = {k: zero_diagram_map(c.term(k), c.term(k - 1)) for k in degrees}
    for pos_idx, (k, idx) in enumerate(col_meta):
        coeff = int(sol.a[pos_idx, 0])
        if coeff:
            out[k] = out[k] + bases[k][idx].scale(coeff)
    return out


def component_contraction_exists(c: LazyComplex, o: str, lo: int, hi: int) -> bool:
    return contraction_on_window(restrict_complex_to_object(c, o), lo, hi) is not None


# -- cohomology ------------------------------------------------------------------


@dataclass
class CohomologyData:
    degree: int
    cocycles: Diagram
    incl: DiagramMap       # Z^k -> C^k
    homology: Diagram
    proj: DiagramMap       # Z^k -> H^k


def cohomology_at(c: LazyComplex, k: int) -> CohomologyData:
    Z, incl = kernel_diagram(c.diff(k))
    prev = c.diff(k - 1)
    comps = {}
    for o in c.shape.objects:
        sol = solve(incl.comps[o], prev.comps[o])
        if sol is None:
            raise VerificationError("boundaries do not land in the cocycles")
        comps[o] = sol
    beta = DiagramMap(c.term(k - 1), Z, comps)
    from .diagrams import cokernel_diagram

    H, proj = cokernel_diagram(beta)
    return CohomologyData(k, Z, incl, H, proj)


def induced_on_cohomology(f: ComplexMap, k: int, src_data: Optional[CohomologyData] = None, tgt_data: Optional[CohomologyData] = None) -> DiagramMap:
    a = src_data or cohomology_at(f.src, k)
    b = tgt_data or cohomology_at(f.tgt, k)
    comps = {}
    from .diagrams import factor_matrix_through_surjection

    for o in f.src.shape.objects:
        moved = f.comp(k).comps[o] @ a.incl.comps[o]
        zeta = solve(b.incl.comps[o], moved)
        if zeta is None:
            raise VerificationError("cocycles are not preserved")
        comps[o] = factor_matrix_through_surjection(b.proj.comps[o] @ zeta, a.proj.comps[o])
    return DiagramMap(a.homology, b.homology, comps)


def is_quasi_iso_on(f: ComplexMap, lo: int, hi: int) -> bool:
    for k in range(lo, hi + 1):
        h = induced_on_cohomology(f, k)
        for o in f.src.shape.objects:
            m = h.comps[o]
            if m.rows != m.cols or rank(m) != m.rows:
                return False
    return True


# -- semiorthogonal decomposition ---------------------------------------------------


@dataclass
class SodResult:
    p_part: LazyComplex
    tc_part: LazyComplex
    map_p: ComplexMap          # p_part -> x
    map_tc: ComplexMap         # x -> tc_part
    window: Tuple[int, int]


def _component_complex_at_min(c: LazyComplex, i: str) -> Tuple[LazyComplex, ComplexMap]:
    """A := i_! i^* c together with the counit A -> c (i minimal)."""
    shape, alg = c.shape, c.alg

    def term_fn(k: int) -> Diagram:
        return left_kan_from_point(shape, alg, i, c.term(k).at(i))

    def diff_fn(k: int) -> DiagramMap:
        src, tgt = term_fn(k), term_fn(k + 1)
        d_i = c.diff(k).comps[i]
        comps = {}
        from .field import block_diag

        for o in shape.objects:
            n = len(shape.hom(i, o))
            comps[o] = block_diag(alg.p, [d_i] * n) if n else Mat.zeros(alg.p, tgt.at(o).dim, src.at(o).dim)
        return DiagramMap(src, tgt, comps)

    A = LazyComplex(shape, alg, term_fn, diff_fn, f"{c.label}|{i}-part")
    comps_by_degree: Dict[int, DiagramMap] = {}

    def eps(k: int) -> DiagramMap:
        if k not in comps_by_degree:
            _, e = counit_from_point(c.term(k), i)
            comps_by_degree[k] = DiagramMap(A.term(k), c.term(k), e.comps)
        return comps_by_degree[k]

    class _EpsMap(ComplexMap):
        def comp(self, n: int) -> DiagramMap:
            return eps(n)

    return A, _EpsMap(A, c, {}, label="counit")


def _extend_by_zero_complex(sub_shape: DirectCategory, c: LazyComplex, full_shape: DirectCategory, missing: str) -> LazyComplex:
    alg = c.alg

    def term_fn(k: int) -> Diagram:
        base = c.term(k)
        modules = {o: base.at(o) for o in sub_shape.objects}
        modules[missing] = zero_module(alg)
        mats = {}
        for f in full_shape.nonidentity_morphisms():
            s, t = full_shape.src(f), full_shape.tgt(f)
            if s in sub_shape.objects and t in sub_shape.objects:
                mats[f] = base.mat(f)
            else:
                mats[f] = Mat.zeros(alg.p, modules[t].dim, modules[s].dim)
        return Diagram(full_shape, alg, modules, mats)

    def diff_fn(k: int) -> DiagramMap:
        base = c.diff(k)
        comps = {o: base.comps[o] for o in sub_shape.objects}
        comps[missing] = Mat.zeros(alg.p, 0, 0)
        return DiagramMap(term_fn(k), term_fn(k + 1), comps)

    return LazyComplex(full_shape, alg, term_fn, diff_fn, f"{c.label}-ext0")


def sod_decompose(c: LazyComplex, lo: int, hi: int) -> SodResult:
    """Split an acyclic complex with termwise-projective components into a
    projective-diagram part and a termwise-contractible part, by recursion
    over a minimal object; all three postconditions re-verified on the
    window."""
    if not c.is_acyclic_on(lo - 1, hi + 1):
        raise WindowError("semiorthogonal decomposition asks for an acyclic window")
    if not c.is_termwise_projective_on(lo, hi):
        raise VerificationError("input terms are not termwise projective")
    res = _sod_recurse(c, lo, hi)
    # postconditions
    for k in range(lo, hi + 1):
        if not is_projective_diagram(res.p_part.term(k)):
            raise VerificationError("p-part has a non-projective term")
    if not is_termwise_contractible(res.tc_part, lo, hi):
        raise VerificationError("tc-part is not termwise contractible on the window")
    res.map_p.verify_chain_on(lo, hi)
    return res


def _sod_recurse(c: LazyComplex, lo: int, hi: int) -> SodResult:
    shape, alg = c.shape, c.alg
    if len(shape.objects) <= 1:
        return SodResult(c, LazyComplex.zero(shape, alg), ComplexMap(c, c, {k: identity_diagram_map(c.term(k)) for k in range(lo - 1, hi + 2)}, "id"), ComplexMap(c, LazyComplex.zero(shape, alg), {}, "0"), (lo, hi))
    i = shape.minimal_objects()[0]
    A, eps = _component_complex_at_min(c, i)
    X_ic = cone(eps)  # the i-contractible remainder
    sub_shape, incl = full_subcategory(shape, [o for o in shape.objects if o != i])
    restricted = _restrict_complex(incl, X_ic)
    inner = _sod_recurse(restricted, lo, hi)
    # zeta = counit o k_!(theta): k_! is extension by zero since i is minimal
    B = _extend_by_zero_complex(sub_shape, inner.p_part, shape, i)

    def zeta(k: int) -> DiagramMap:
        theta_k = inner.map_p.comp(k)
        comps = {o: theta_k.comps[o] for o in sub_shape.objects}
        comps[i] = Mat.zeros(alg.p, X_ic.term(k).at(i).dim, 0)
        return DiagramMap(B.term(k), X_ic.term(k), comps)

    # split zeta into (f: B -> c, h: B -> A[1]) through the cone block structure
    def f_of(k: int) -> DiagramMap:
        zk = zeta(k)
        comps = {}
        for o in shape.objects:
            ty = c.term(k).at(o).dim
            comps[o] = Mat(alg.p, zk.comps[o].a[:ty, :]) if zk.comps[o].rows else Mat.zeros(alg.p, ty, zk.comps[o].cols)
        return DiagramMap(B.term(k), c.term(k), comps)

    def h_of(k: int) -> DiagramMap:
        zk = zeta(k)
        comps = {}
        for o in shape.objects:
            ty = c.term(k).at(o).dim
            ta = A.term(k + 1).at(o).dim
            comps[o] = Mat(alg.p, zk.comps[o].a[ty : ty + ta, :]) if ta else Mat.zeros(alg.p, 0, zk.comps[o].cols)
        return DiagramMap(B.term(k), A.term(k + 1), comps)

    def p_term(k: int) -> Diagram:
        return direct_sum_diagrams([A.term(k), B.term(k)])[0]

    def p_diff(k: int) -> DiagramMap:
        src, tgt = p_term(k), p_term(k + 1)
        hk = h_of(k)
        comps = {}
        for o in shape.objects:
            ra, rb = A.term(k + 1).at(o).dim, B.term(k + 1).at(o).dim
            ca, cb = A.term(k).at(o).dim, B.term(k).at(o).dim
            top = hstack([A.diff(k).comps[o], -hk.comps[o]]) if ra else Mat.zeros(alg.p, 0, ca + cb)
            bot = hstack([Mat.zeros(alg.p, rb, ca), B.diff(k).comps[o]]) if rb else Mat.zeros(alg.p, 0, ca + cb)
            comps[o] = vstack([top, bot]) if (ra or rb) else Mat.zeros(alg.p, 0, ca + cb)
        return DiagramMap(src, tgt, comps)

    p_part = LazyComplex(shape, alg, p_term, p_diff, f"{c.label}-p")

    phi_comps: Dict[int, DiagramMap] = {}
    for k in range(lo - 1, hi + 2):
        fk = f_of(k)
        comps = {}
        for o in shape.objects:
            comps[o] = hstack([eps.comp(k).comps[o], fk.comps[o]])
        phi_comps[k] = DiagramMap(p_part.term(k), c.term(k), comps)
    map_p = ComplexMap(p_part, c, phi_comps, "sod-p")
    tc_part = cone(map_p)
    inj_comps: Dict[int, DiagramMap] = {}
    for k in range(lo - 1, hi + 1):
        src_t = c.term(k)
        tgt_t = tc_part.term(k)
        comps = {}
        for o in shape.objects:
            rows = tgt_t.at(o).dim
            cy = src_t.at(o).dim
            block = np.zeros((rows, cy), dtype=np.int64)
            block[:cy, :] = np.eye(cy, dtype=np.int64)
            comps[o] = Mat(alg.p, block)
        inj_comps[k] = DiagramMap(src_t, tgt_t, comps)
    map_tc = ComplexMap(c, tc_part, inj_comps, "sod-tc")
    return SodResult(p_part, tc_part, map_p, map_tc, (lo, hi))


def _restrict_complex(u: CatFunctor, c: LazyComplex) -> LazyComplex:
    def term_fn(k: int) -> Diagram:
        return restrict(u, c.term(k))

    def diff_fn(k: int) -> DiagramMap:
        d = c.diff(k)
        return DiagramMap(term_fn(k), term_fn(k + 1), {o: d.comps[u.on_obj(o)] for o in u.dom.objects})

    return LazyComplex(u.dom, c.alg, term_fn, diff_fn, f"{c.label}|sub")


def restrict_complex(u: CatFunctor, c: LazyComplex) -> LazyComplex:
    return _restrict_complex(u, c)
