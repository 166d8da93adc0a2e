"""Diagrams of modules over a finite direct category, with the degreewise
exact structure: homs, kernels/cokernels, pointwise Kan extensions, covers,
envelopes and one-step Ext.

A Diagram holds one Module per object and one matrix per non-identity
morphism (identities are implicit).  All block decompositions run over
`shape.objects` order and sorted hom-sets, so constructions are canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import Algebra
from .cats import (
    CatFunctor,
    DirectCategory,
    SlicePresentation,
    analyze_components,
    opposite_category,
    same_category,
    slice_category,
)
from .field import Mat, column_space_basis, hstack, in_column_span, kernel_basis, kron, rank, solve, vstack
from .modules import (
    Conflation,
    Module,
    ModuleMap,
    ModuleError,
    compose,
    direct_sum,
    dual_module,
    free_cover,
    identity_map,
    injective_embed,
    quotient_module,
    submodule,
    zero_map,
    zero_module,
)


class DiagramError(ValueError):
    pass


class Diagram:
    __slots__ = ("shape", "alg", "modules", "mats")

    def __init__(self, shape: DirectCategory, alg: Algebra, modules: Dict[str, Module], mats: Dict[str, Mat]) -> None:
        self.shape = shape
        self.alg = alg
        self.modules = dict(modules)
        self.mats = dict(mats)
        for o in shape.objects:
            if o not in self.modules:
                raise DiagramError(f"diagram misses object {o}")
        for f in shape.nonidentity_morphisms():
            if f not in self.mats:
                raise DiagramError(f"diagram misses morphism {f}")
            m = self.mats[f]
            s, t = shape.src(f), shape.tgt(f)
            if m.rows != self.modules[t].dim or m.cols != self.modules[s].dim:
                raise DiagramError(f"matrix for {f} has shape {m.rows}x{m.cols}")

    def at(self, o: str) -> Module:
        return self.modules[o]

    def mat(self, f: str) -> Mat:
        if self.shape.is_identity(f):
            o = self.shape.src(f)
            return Mat.identity(self.alg.p, self.modules[o].dim)
        return self.mats[f]

    def map_for(self, f: str) -> ModuleMap:
        return ModuleMap(self.modules[self.shape.src(f)], self.modules[self.shape.tgt(f)], self.mat(f))

    def total_dim(self) -> int:
        return sum(m.dim for m in self.modules.values())

    def validate(self) -> "Diagram":
        for o in self.shape.objects:
            self.modules[o].validate()
        for f in self.shape.nonidentity_morphisms():
            self.map_for(f).validate()
        for (g, f), h in self.shape.comp.items():
            if self.mat(g) @ self.mat(f) != self.mat(h):
                raise DiagramError(f"functoriality fails on ({g}, {f})")
        return self

    def is_functorial(self) -> bool:
        try:
            for (g, f), h in self.shape.comp.items():
                if self.mat(g) @ self.mat(f) != self.mat(h):
                    return False
        except (KeyError, ValueError):
            return False
        return True

    def __repr__(self) -> str:
        dims = {o: self.modules[o].dim for o in self.shape.objects}
        return f"Diagram({dims})"


class DiagramMap:
    __slots__ = ("src", "tgt", "comps")

    def __init__(self, src: Diagram, tgt: Diagram, comps: Dict[str, Mat]) -> None:
        self.src = src
        self.tgt = tgt
        self.comps = dict(comps)
        for o in src.shape.objects:
            c = self.comps[o]
            if c.rows != tgt.at(o).dim or c.cols != src.at(o).dim:
                raise DiagramError(f"component at {o} has shape {c.rows}x{c.cols}")

    def at(self, o: str) -> ModuleMap:
        return ModuleMap(self.src.at(o), self.tgt.at(o), self.comps[o])

    def validate(self) -> "DiagramMap":
        for o in self.src.shape.objects:
            self.at(o).validate()
        for f in self.src.shape.nonidentity_morphisms():
            s, t = self.src.shape.src(f), self.src.shape.tgt(f)
            if self.comps[t] @ self.src.mat(f) != self.tgt.mat(f) @ self.comps[s]:
                raise DiagramError(f"naturality fails at {f}")
        return self

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps.values())

    def __add__(self, other: "DiagramMap") -> "DiagramMap":
        return DiagramMap(self.src, self.tgt, {o: self.comps[o] + other.comps[o] for o in self.comps})

    def __sub__(self, other: "DiagramMap") -> "DiagramMap":
        return DiagramMap(self.src, self.tgt, {o: self.comps[o] - other.comps[o] for o in self.comps})

    def scale(self, c: int) -> "DiagramMap":
        return DiagramMap(self.src, self.tgt, {o: m.scale(c) for o, m in self.comps.items()})

    def __repr__(self) -> str:
        return f"DiagramMap({ {o: (c.rows, c.cols) for o, c in self.comps.items()} })"


def compose_diagram_maps(g: DiagramMap, f: DiagramMap) -> DiagramMap:
    return DiagramMap(f.src, g.tgt, {o: g.comps[o] @ f.comps[o] for o in f.comps})


def identity_diagram_map(x: Diagram) -> DiagramMap:
    return DiagramMap(x, x, {o: Mat.identity(x.alg.p, x.at(o).dim) for o in x.shape.objects})


def zero_diagram_map(x: Diagram, y: Diagram) -> DiagramMap:
    return DiagramMap(x, y, {o: Mat.zeros(x.alg.p, y.at(o).dim, x.at(o).dim) for o in x.shape.objects})


@dataclass
class DiagramConflation:
    left: DiagramMap
    right: DiagramMap

    @property
    def sub(self) -> Diagram:
        return self.left.src

    @property
    def middle(self) -> Diagram:
        return self.left.tgt

    @property
    def quot(self) -> Diagram:
        return self.right.tgt

    def validate(self) -> "DiagramConflation":
        self.left.validate()
        self.right.validate()
        for o in self.middle.shape.objects:
            Conflation(self.left.at(o), self.right.at(o)).validate()
        return self


# -- buildingblocks ----------------------------------------------------------


def zero_diagram(shape: DirectCategory, alg: Algebra) -> Diagram:
    z = zero_module(alg)
    return Diagram(shape, alg, {o: z for o in shape.objects}, {f: Mat.zeros(alg.p, 0, 0) for f in shape.nonidentity_morphisms()})


def stalk_diagram(shape: DirectCategory, alg: Algebra, j: str, m: Module) -> Diagram:
    z = zero_module(alg)
    modules = {o: (m if o == j else z) for o in shape.objects}
    mats = {}
    for f in shape.nonidentity_morphisms():
        s, t = shape.src(f), shape.tgt(f)
        mats[f] = Mat.zeros(alg.p, modules[t].dim, modules[s].dim)
    return Diagram(shape, alg, modules, mats)


def constant_diagram(shape: DirectCategory, alg: Algebra, m: Module) -> Diagram:
    mats = {f: Mat.identity(alg.p, m.dim) for f in shape.nonidentity_morphisms()}
    return Diagram(shape, alg, {o: m for o in shape.objects}, mats)


def direct_sum_diagrams(xs: Sequence[Diagram]) -> Tuple[Diagram, List[DiagramMap], List[DiagramMap]]:
    xs = list(xs)
    if not xs:
        raise DiagramError("empty direct sum needs a shape; use zero_diagram")
    shape, alg = xs[0].shape, xs[0].alg
    modules = {}
    injs_by_obj: Dict[str, List[ModuleMap]] = {}
    projs_by_obj: Dict[str, List[ModuleMap]] = {}
    for o in shape.objects:
        total, injs, projs = direct_sum([x.at(o) for x in xs])
        modules[o] = total
        injs_by_obj[o] = injs
        projs_by_obj[o] = projs
    mats = {}
    from .field import block_diag

    for f in shape.nonidentity_morphisms():
        mats[f] = block_diag(alg.p, [x.mat(f) for x in xs])
    total_diag = Diagram(shape, alg, modules, mats)
    injections = [
        DiagramMap(x, total_diag, {o: injs_by_obj[o][k].mat for o in shape.objects}) for k, x in enumerate(xs)
    ]
    projections = [
        DiagramMap(total_diag, x, {o: projs_by_obj[o][k].mat for o in shape.objects}) for k, x in enumerate(xs)
    ]
    return total_diag, injections, projections


def left_kan_from_point(shape: DirectCategory, alg: Algebra, j: str, m: Module) -> Diagram:
    """The free diagram on m at j: value at a is one copy of m per morphism
    j -> a, structure maps relabel copies by composition."""
    p = alg.p
    modules = {}
    copies = {a: shape.hom(j, a) for a in shape.objects}
    for a in shape.objects:
        n = len(copies[a])
        modules[a] = direct_sum([m] * n)[0] if n else zero_module(alg)
    mats = {}
    for h in shape.nonidentity_morphisms():
        a, b = shape.src(h), shape.tgt(h)
        src_c, tgt_c = copies[a], copies[b]
        out = np.zeros((len(tgt_c) * m.dim, len(src_c) * m.dim), dtype=np.int64)
        for si, f in enumerate(src_c):
            ti = tgt_c.index(shape.compose(h, f))
            out[ti * m.dim : (ti + 1) * m.dim, si * m.dim : (si + 1) * m.dim] = np.eye(m.dim, dtype=np.int64)
        mats[h] = Mat(p, out)
    return Diagram(shape, alg, modules, mats)


def right_kan_from_point(shape: DirectCategory, alg: Algebra, j: str, m: Module) -> Diagram:
    """Value at a is one copy of m per morphism a -> j."""
    p = alg.p
    copies = {a: shape.hom(a, j) for a in shape.objects}
    modules = {}
    for a in shape.objects:
        n = len(copies[a])
        modules[a] = direct_sum([m] * n)[0] if n else zero_module(alg)
    mats = {}
    for h in shape.nonidentity_morphisms():
        a, b = shape.src(h), shape.tgt(h)
        src_c, tgt_c = copies[a], copies[b]
        out = np.zeros((len(tgt_c) * m.dim, len(src_c) * m.dim), dtype=np.int64)
        for ti, g in enumerate(tgt_c):
            si = src_c.index(shape.compose(g, h))
            out[ti * m.dim : (ti + 1) * m.dim, si * m.dim : (si + 1) * m.dim] = np.eye(m.dim, dtype=np.int64)
        mats[h] = Mat(p, out)
    return Diagram(shape, alg, modules, mats)


def counit_from_point(x: Diagram, j: str, cover_map: Optional[ModuleMap] = None) -> Tuple[Diagram, DiagramMap]:
    """The counit  j_!(P) -> x  where P covers x_j (default: P = x_j, id)."""
    shape, alg = x.shape, x.alg
    base = cover_map if cover_map is not None else identity_map(x.at(j))
    dom = left_kan_from_point(shape, alg, j, base.src)
    comps = {}
    for a in shape.objects:
        fs = shape.hom(j, a)
        if fs:
            comps[a] = hstack([x.mat(f) @ base.mat for f in fs])
        else:
            comps[a] = Mat.zeros(alg.p, x.at(a).dim, 0)
    return dom, DiagramMap(dom, x, comps)


def unit_to_point(x: Diagram, j: str, env_map: Optional[ModuleMap] = None) -> Tuple[Diagram, DiagramMap]:
    """The unit  x -> j_*(E)  where x_j embeds in E (default: E = x_j, id)."""
    shape, alg = x.shape, x.alg
    base = env_map if env_map is not None else identity_map(x.at(j))
    cod = right_kan_from_point(shape, alg, j, base.tgt)
    comps = {}
    for a in shape.objects:
        gs = shape.hom(a, j)
        if gs:
            comps[a] = vstack([base.mat @ x.mat(g) for g in gs])
        else:
            comps[a] = Mat.zeros(alg.p, 0, x.at(a).dim)
    return cod, DiagramMap(x, cod, comps)


def restrict(u: CatFunctor, y: Diagram) -> Diagram:
    """(u^* y)_i = y_{u(i)}."""
    if not same_category(y.shape, u.cod):
        raise DiagramError("restriction functor does not match the diagram shape")
    shape = u.dom
    modules = {i: y.at(u.on_obj(i)) for i in shape.objects}
    mats = {}
    for f in shape.nonidentity_morphisms():
        mats[f] = y.mat(u.on_mor(f))
    return Diagram(shape, y.alg, modules, mats)


def restrict_map(u: CatFunctor, phi: DiagramMap) -> DiagramMap:
    return DiagramMap(restrict(u, phi.src), restrict(u, phi.tgt), {i: phi.comps[u.on_obj(i)] for i in u.dom.objects})


# -- homs --------------------------------------------------------------------


def hom_space_diagrams(x: Diagram, y: Diagram) -> List[DiagramMap]:
    """Canonical basis of Hom_{F^I}(x, y): solution space of the module-map
    and naturality constraints, vectorized object by object."""
    if not same_category(x.shape, y.shape):
        raise DiagramError("hom of diagrams over different shapes")
    alg, p = x.alg, x.alg.p
    objs = x.shape.objects
    sizes = [y.at(o).dim * x.at(o).dim for o in objs]
    offsets = {}
    off = 0
    for o, sz in zip(objs, sizes):
        offsets[o] = off
        off += sz
    total = off
    if total == 0:
        return []
    rows: List[np.ndarray] = []

    def block_into(mat_rows: int, big: np.ndarray, o: str, piece: Mat) -> None:
        big[:, offsets[o] : offsets[o] + piece.cols] = piece.a

    for o in objs:
        s, t = x.at(o).dim, y.at(o).dim
        if s == 0 or t == 0:
            continue
        eye_t = Mat.identity(p, t)
        eye_s = Mat.identity(p, s)
        for k in range(alg.dim):
            piece = kron(eye_t, x.at(o).action[k].T) - kron(y.at(o).action[k], eye_s)
            big = np.zeros((piece.rows, total), dtype=np.int64)
            block_into(piece.rows, big, o, piece)
            rows.append(big)
    for f in x.shape.nonidentity_morphisms():
        a, b = x.shape.src(f), x.shape.tgt(f)
        sa, ta = x.at(a).dim, y.at(a).dim
        sb, tb = x.at(b).dim, y.at(b).dim
        nrows = tb * sa
        if nrows == 0:
            continue
        big = np.zeros((nrows, total), dtype=np.int64)
        if sb * tb:
            piece = kron(Mat.identity(p, tb), x.mat(f).T)  # vec(comp_b @ x_f)
            big[:, offsets[b] : offsets[b] + tb * sb] = piece.a
        if sa * ta:
            piece = kron(y.mat(f), Mat.identity(p, sa))  # vec(y_f @ comp_a)
            big[:, offsets[a] : offsets[a] + ta * sa] = (big[:, offsets[a] : offsets[a] + ta * sa] - piece.a) % p
        rows.append(big)
    system = Mat(p, np.vstack(rows)) if rows else Mat.zeros(p, 0, total)
    basis = kernel_basis(system)
    out = []
    for jcol in range(basis.cols):
        comps = {}
        for o in objs:
            s, t = x.at(o).dim, y.at(o).dim
            seg = basis.a[offsets[o] : offsets[o] + t * s, jcol]
            comps[o] = Mat(p, seg.reshape(t, s)) if t * s else Mat.zeros(p, t, s)
        out.append(DiagramMap(x, y, comps))
    return out


def vec_diagram_map(phi: DiagramMap) -> Mat:
    parts = []
    p = phi.src.alg.p
    for o in phi.src.shape.objects:
        parts.append(phi.comps[o].a.reshape(-1))
    flat = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    return Mat(p, flat.reshape(-1, 1))


def hom_dim_diagrams(x: Diagram, y: Diagram) -> int:
    return len(hom_space_diagrams(x, y))


def solve_in_hom(x: Diagram, y: Diagram, constraints: List[Tuple[DiagramMap, DiagramMap, DiagramMap]]) -> Optional[DiagramMap]:
    """Find phi in Hom(x, y) with post @ phi @ pre = rhs for each constraint.

    Each constraint is (pre: w -> x, post: y -> z, rhs: w -> z).  Linear in
    the hom-space coordinates of phi.
    """
    basis = hom_space_diagrams(x, y)
    p = x.alg.p
    cols = []
    rhs_parts = []
    for pre, post, rhs_map in constraints:
        rhs_parts.append(vec_diagram_map(rhs_map).a.reshape(-1))
    rhs_vec = np.concatenate(rhs_parts) if rhs_parts else np.zeros(0, dtype=np.int64)
    for b in basis:
        parts = []
        for pre, post, rhs_map in constraints:
            comp = compose_diagram_maps(post, compose_diagram_maps(b, pre))
            parts.append(vec_diagram_map(comp).a.reshape(-1))
        cols.append(np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64))
    if not cols:
        if not rhs_vec.any():
            return zero_diagram_map(x, y)
        return None
    system = Mat(p, np.stack(cols, axis=1))
    sol = solve(system, Mat(p, rhs_vec.reshape(-1, 1)))
    if sol is None:
        return None
    phi = zero_diagram_map(x, y)
    for jrow in range(sol.rows):
        c = int(sol.a[jrow, 0])
        if c:
            phi = phi + basis[jrow].scale(c)
    return phi


def split_section_diagrams(defl: DiagramMap) -> Optional[DiagramMap]:
    x = defl.tgt
    return solve_in_hom(x, defl.src, [(identity_diagram_map(x), defl, identity_diagram_map(x))])


def split_retraction_diagrams(infl: DiagramMap) -> Optional[DiagramMap]:
    x = infl.src
    return solve_in_hom(infl.tgt, x, [(infl, identity_diagram_map(x), identity_diagram_map(x))])


# -- kernels, cokernels, (co)limits ------------------------------------------


def kernel_diagram(phi: DiagramMap) -> Tuple[Diagram, DiagramMap]:
    shape, alg = phi.src.shape, phi.src.alg
    kmods: Dict[str, Module] = {}
    incls: Dict[str, ModuleMap] = {}
    for o in shape.objects:
        kmod, kincl = submodule(phi.src.at(o), kernel_basis(phi.comps[o]))
        kmods[o] = kmod
        incls[o] = kincl
    mats = {}
    for f in shape.nonidentity_morphisms():
        a, b = shape.src(f), shape.tgt(f)
        moved = phi.src.mat(f) @ incls[a].mat
        coords = solve(incls[b].mat, moved)
        if coords is None:
            raise DiagramError("kernel is not preserved by the structure maps")
        mats[f] = coords
    ker = Diagram(shape, alg, kmods, mats)
    return ker, DiagramMap(ker, phi.src, {o: incls[o].mat for o in shape.objects})


def cokernel_diagram(phi: DiagramMap) -> Tuple[Diagram, DiagramMap]:
    shape, alg = phi.src.shape, phi.src.alg
    qmods: Dict[str, Module] = {}
    projs: Dict[str, ModuleMap] = {}
    for o in shape.objects:
        qmod, qproj = quotient_module(phi.tgt.at(o), phi.comps[o])
        qmods[o] = qmod
        projs[o] = qproj
    mats = {}
    for f in shape.nonidentity_morphisms():
        a, b = shape.src(f), shape.tgt(f)
        mats[f] = factor_matrix_through_surjection(projs[b].mat @ phi.tgt.mat(f), projs[a].mat)
    quot = Diagram(shape, alg, qmods, mats)
    return quot, DiagramMap(phi.tgt, quot, {o: projs[o].mat for o in shape.objects})


def image_diagram(phi: DiagramMap) -> Tuple[Diagram, DiagramMap]:
    """Image subdiagram of the target with its inclusion."""
    shape, alg = phi.src.shape, phi.src.alg
    mods, incls = {}, {}
    for o in shape.objects:
        mod, incl = submodule(phi.tgt.at(o), phi.comps[o])
        mods[o] = mod
        incls[o] = incl
    mats = {}
    for f in shape.nonidentity_morphisms():
        a, b = shape.src(f), shape.tgt(f)
        coords = solve(incls[b].mat, phi.tgt.mat(f) @ incls[a].mat)
        if coords is None:
            raise DiagramError("image is not preserved by the structure maps")
        mats[f] = coords
    img = Diagram(shape, alg, mods, mats)
    return img, DiagramMap(img, phi.tgt, {o: incls[o].mat for o in shape.objects})


def factor_matrix_through_surjection(t: Mat, sigma: Mat) -> Mat:
    """phi with phi @ sigma = t, given that t kills ker(sigma); verified."""
    phi_t = solve(sigma.T, t.T)
    if phi_t is None:
        raise DiagramError("map does not factor through the surjection")
    phi = phi_t.T
    if phi @ sigma != t:
        raise DiagramError("factorization verification failed")
    return phi


def colimit_of_diagram(x: Diagram) -> Tuple[Module, Dict[str, ModuleMap]]:
    """Pointwise colimit: coker of the standard difference map, plus the cocone."""
    shape, alg = x.shape, x.alg
    p = alg.p
    objs = shape.objects
    sum_mod, injs, _ = direct_sum([x.at(o) for o in objs]) if objs else (zero_module(alg), [], [])
    inj_of = dict(zip(objs, injs))
    cols = []
    for f in shape.nonidentity_morphisms():
        a, b = shape.src(f), shape.tgt(f)
        cols.append(inj_of[b].mat @ x.mat(f) - inj_of[a].mat)
    span = hstack(cols) if cols else Mat.zeros(p, sum_mod.dim, 0)
    colim, proj = quotient_module(sum_mod, span)
    cocone = {o: compose(proj, inj_of[o]) for o in objs}
    return colim, cocone


def limit_of_diagram(x: Diagram) -> Tuple[Module, Dict[str, ModuleMap]]:
    shape, alg = x.shape, x.alg
    p = alg.p
    objs = shape.objects
    sum_mod, _, projs = direct_sum([x.at(o) for o in objs]) if objs else (zero_module(alg), [], [])
    proj_of = dict(zip(objs, projs))
    rows = []
    for f in shape.nonidentity_morphisms():
        a, b = shape.src(f), shape.tgt(f)
        rows.append(x.mat(f) @ proj_of[a].mat - proj_of[b].mat)
    mat = vstack(rows) if rows else Mat.zeros(p, 0, sum_mod.dim)
    lim, incl = submodule(sum_mod, kernel_basis(mat))
    cone = {o: compose(proj_of[o], incl) for o in objs}
    return lim, cone


def pushout_diagrams(f: DiagramMap, g: DiagramMap) -> Tuple[Diagram, DiagramMap, DiagramMap]:
    """Pushout of x <-f- z -g-> y in the diagram category (componentwise)."""
    if f.src is not g.src:
        raise DiagramError("pushout needs a shared source diagram")
    total, injs, _ = direct_sum_diagrams([f.tgt, g.tgt])
    combined = DiagramMap(
        f.src,
        total,
        {o: vstack([f.comps[o], -g.comps[o] if g.comps[o].rows else g.comps[o]]) for o in f.src.shape.objects},
    )
    po, proj = cokernel_diagram(combined)
    return po, compose_diagram_maps(proj, injs[0]), compose_diagram_maps(proj, injs[1])


def pullback_diagrams(f: DiagramMap, g: DiagramMap) -> Tuple[Diagram, DiagramMap, DiagramMap]:
    if f.tgt is not g.tgt:
        raise DiagramError("pullback needs a shared target diagram")
    total, _, projs = direct_sum_diagrams([f.src, g.src])
    combined = DiagramMap(
        total,
        f.tgt,
        {o: hstack([f.comps[o], -g.comps[o] if g.comps[o].cols else g.comps[o]]) for o in f.src.shape.objects},
    )
    pb, incl = kernel_diagram(combined)
    return pb, compose_diagram_maps(projs[0], incl), compose_diagram_maps(projs[1], incl)


# -- covers and envelopes ------------------------------------------------------


def projective_cover_diagram(x: Diagram) -> DiagramConflation:
    """Deflation  (+)_j j_!(free cover of x_j) ->> x  assembled from counits,
    with the syzygy diagram as kernel."""
    shape, alg = x.shape, x.alg
    pieces = []
    counits = []
    for j in shape.objects:
        cover = free_cover(x.at(j)).right
        dom, eps = counit_from_point(x, j, cover)
        pieces.append(dom)
        counits.append(eps)
    middle, injs, _ = direct_sum_diagrams(pieces)
    comps = {}
    for o in shape.objects:
        comps[o] = hstack([eps.comps[o] for eps in counits]) if counits else Mat.zeros(alg.p, x.at(o).dim, 0)
    defl = DiagramMap(middle, x, comps)
    ker, incl = kernel_diagram(defl)
    return DiagramConflation(incl, defl)


def injective_embed_diagram(x: Diagram) -> DiagramConflation:
    """Inflation  x >--> (+)_j j_*(injective envelope of x_j)  from units."""
    shape, alg = x.shape, x.alg
    pieces = []
    units = []
    for j in shape.objects:
        env = injective_embed(x.at(j)).left
        cod, eta = unit_to_point(x, j, env)
        pieces.append(cod)
        units.append(eta)
    middle, _, projs = direct_sum_diagrams(pieces)
    comps = {}
    for o in shape.objects:
        comps[o] = vstack([eta.comps[o] for eta in units]) if units else Mat.zeros(alg.p, 0, x.at(o).dim)
    infl = DiagramMap(x, middle, comps)
    cok, proj = cokernel_diagram(infl)
    return DiagramConflation(infl, proj)


def is_projective_diagram(x: Diagram) -> bool:
    return split_section_diagrams(projective_cover_diagram(x).right) is not None


def is_injective_diagram(x: Diagram) -> bool:
    return split_retraction_diagrams(injective_embed_diagram(x).left) is not None


# -- Ext^1 ---------------------------------------------------------------------


@dataclass
class Ext1Result:
    dim: int
    reps: List[DiagramMap]        # maps K -> y representing a basis of classes
    syzygy: Diagram               # K
    syzygy_incl: DiagramMap       # K -> P
    cover: DiagramConflation      # K >-> P ->> x


def ext1(x: Diagram, y: Diagram) -> Ext1Result:
    """Ext^1(x, y) from one projective presentation:
    coker( Hom(P, y) -> Hom(K, y) )."""
    cover = projective_cover_diagram(x)
    K, incl = cover.sub, cover.left
    from_p = hom_space_diagrams(cover.middle, y)
    from_k = hom_space_diagrams(K, y)
    p = x.alg.p
    if not from_k:
        return Ext1Result(0, [], K, incl, cover)
    basis_mat = hstack([vec_diagram_map(b) for b in from_k])
    img_cols = []
    for h in from_p:
        img_cols.append(vec_diagram_map(compose_diagram_maps(h, incl)))
    img = hstack(img_cols) if img_cols else Mat.zeros(p, basis_mat.rows, 0)
    img_rank = rank(img)
    dim = len(from_k) - img_rank
    # representatives: greedy completion of the image to all of Hom(K, y)
    reps = []
    current = column_space_basis(img) if img.cols else img
    for b in from_k:
        v = vec_diagram_map(b)
        inside = v.is_zero() if current.cols == 0 else in_column_span(current, v)
        if not inside:
            reps.append(b)
            current = hstack([current, v]) if current.cols else v
    assert len(reps) == dim
    return Ext1Result(dim, reps, K, incl, cover)


# -- pointwise Kan extensions ----------------------------------------------------


@dataclass
class PointwiseKan:
    diagram: Diagram
    slices: Dict[str, SlicePresentation]
    cones: Dict[str, Dict[str, ModuleMap]]   # per target object: slice object -> leg


def pointwise_left_kan_data(u: CatFunctor, x: Diagram) -> PointwiseKan:
    J = u.cod
    alg = x.alg
    slices: Dict[str, SlicePresentation] = {}
    cocones: Dict[str, Dict[str, ModuleMap]] = {}
    modules: Dict[str, Module] = {}
    for j in J.objects:
        pres = slice_category(u, j, "under")
        rest = restrict(pres.projection, x)
        colim, cocone = colimit_of_diagram(rest)
        slices[j] = pres
        cocones[j] = cocone
        modules[j] = colim
        _certify_coproduct_formula(pres, rest, colim, cocone)
    mats = {}
    for alpha in J.nonidentity_morphisms():
        j, j2 = J.src(alpha), J.tgt(alpha)
        pres, pres2 = slices[j], slices[j2]
        src_objs = pres.cat.objects
        sigma = hstack([cocones[j][o].mat for o in src_objs]) if src_objs else Mat.zeros(alg.p, modules[j].dim, 0)
        t_blocks = []
        for o in src_objs:
            i, f = pres.pairs[o]
            f2 = J.compose(alpha, f)
            name2 = None
            for o2, (i2, g2) in pres2.pairs.items():
                if i2 == i and g2 == f2:
                    name2 = o2
                    break
            if name2 is None:
                raise DiagramError("slice transport failed")
            t_blocks.append(cocones[j2][name2].mat)
        target = hstack(t_blocks) if t_blocks else Mat.zeros(alg.p, modules[j2].dim, 0)
        if modules[j].dim == 0:
            mats[alpha] = Mat.zeros(alg.p, modules[j2].dim, 0)
        else:
            mats[alpha] = factor_matrix_through_surjection(target, sigma)
    return PointwiseKan(Diagram(J, alg, modules, mats), slices, cocones)


def pointwise_left_kan(u: CatFunctor, x: Diagram) -> Diagram:
    return pointwise_left_kan_data(u, x).diagram


def _certify_coproduct_formula(pres: SlicePresentation, rest: Diagram, colim: Module, cocone: Dict[str, ModuleMap]) -> None:
    comps = analyze_components(pres.cat)
    if not comps:
        if colim.dim != 0:
            raise DiagramError("empty slice with nonzero colimit")
        return
    if not all(c.terminal for c in comps):
        return
    legs = [cocone[c.terminal].mat for c in comps]
    cmp = hstack(legs)
    if cmp.rows != cmp.cols or rank(cmp) != cmp.rows:
        raise DiagramError("terminal-component coproduct formula failed certification")


def pointwise_right_kan_data(u: CatFunctor, y: Diagram) -> PointwiseKan:
    J = u.cod
    alg = y.alg
    slices: Dict[str, SlicePresentation] = {}
    cones: Dict[str, Dict[str, ModuleMap]] = {}
    modules: Dict[str, Module] = {}
    for j in J.objects:
        pres = slice_category(u, j, "over")
        rest = restrict(pres.projection, y)
        lim, cone = limit_of_diagram(rest)
        slices[j] = pres
        cones[j] = cone
        modules[j] = lim
    mats = {}
    for alpha in J.nonidentity_morphisms():
        j, j2 = J.src(alpha), J.tgt(alpha)
        pres, pres2 = slices[j], slices[j2]
        # alpha: j -> j2 turns a pair (i, f: j2 -> u(i)) into (i, f o alpha)
        tgt_objs = pres2.cat.objects
        if modules[j2].dim == 0:
            mats[alpha] = Mat.zeros(alg.p, 0, modules[j].dim)
            continue
        rows = []
        for o2 in tgt_objs:
            i, f = pres2.pairs[o2]
            f_pre = J.compose(f, alpha)
            name = None
            for o, (i1, g1) in pres.pairs.items():
                if i1 == i and g1 == f_pre:
                    name = o
                    break
            if name is None:
                raise DiagramError("coslice transport failed")
            rows.append(cones[j][name].mat)
        stacked = vstack(rows) if rows else Mat.zeros(alg.p, 0, modules[j].dim)
        # factor through the limit inclusion of j2
        incl = vstack([cones[j2][o2].mat for o2 in tgt_objs])
        coords = solve(incl, stacked)
        if coords is None:
            raise DiagramError("limit transport failed")
        mats[alpha] = coords
    return PointwiseKan(Diagram(J, alg, modules, mats), slices, cones)


def pointwise_right_kan(u: CatFunctor, y: Diagram) -> Diagram:
    return pointwise_right_kan_data(u, y).diagram


# -- duality -----------------------------------------------------------------


def dual_diagram(x: Diagram) -> Diagram:
    """Linear dual over the opposite algebra and opposite shape (involutive)."""
    op_shape = opposite_category(x.shape)
    modules = {o: dual_module(x.at(o)) for o in x.shape.objects}
    mats = {f: x.mats[f].T for f in x.shape.nonidentity_morphisms()}
    return Diagram(op_shape, x.alg.opposite(), modules, mats)


def dual_diagram_map(phi: DiagramMap) -> DiagramMap:
    return DiagramMap(dual_diagram(phi.tgt), dual_diagram(phi.src), {o: phi.comps[o].T for o in phi.comps})


# -- io ------------------------------------------------------------------------


def module_from_dict(alg: Algebra, data: dict) -> Module:
    dim = int(data["dim"])
    action = [Mat(alg.p, a) if dim else Mat.zeros(alg.p, 0, 0) for a in data["action"]]
    return Module(alg, action).validate()


def module_to_dict(m: Module) -> dict:
    return {"dim": m.dim, "action": [a.to_list() for a in m.action]}


def diagram_from_dict(shape: DirectCategory, alg: Algebra, data: dict) -> Diagram:
    modules = {o: module_from_dict(alg, d) for o, d in data["objects"].items()}
    mats = {}
    for f in shape.nonidentity_morphisms():
        s, t = shape.src(f), shape.tgt(f)
        if f in data.get("morphisms", {}):
            mats[f] = Mat(alg.p, data["morphisms"][f]) if modules[t].dim and modules[s].dim else Mat(alg.p, np.zeros((modules[t].dim, modules[s].dim), dtype=np.int64))
        else:
            mats[f] = Mat.zeros(alg.p, modules[t].dim, modules[s].dim)
    return Diagram(shape, alg, modules, mats).validate()


def diagram_to_dict(x: Diagram, shape_name: str = "") -> dict:
    return {
        "shape": shape_name,
        "objects": {o: module_to_dict(x.at(o)) for o in x.shape.objects},
        "morphisms": {f: x.mats[f].to_list() for f in x.shape.nonidentity_morphisms()},
    }
