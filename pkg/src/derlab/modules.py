"""The category of finite-dimensional right modules over a session algebra.

Conventions, used everywhere downstream:

* module elements are coordinate columns; the right action of the basis
  element e_k is a matrix, and m . e_k = action[k] @ m;
* the module law reads sum_k c[i][j][k] action[k] = action[j] @ action[i]
  (an anti-homomorphism into matrices, as right actions must be);
* a map is a matrix F with F @ src.action[k] = tgt.action[k] @ F.

Linear duality sends a right Lambda-module to a right module over the
opposite algebra by transposing all matrices; it is exact, contravariant
and literally involutive in these coordinates, which the injective side
of the library exploits throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import Algebra
from .field import (
    FieldError,
    Mat,
    block_diag,
    column_space_basis,
    hstack,
    in_column_span,
    kernel_basis,
    kron,
    rank,
    rref,
    solve,
    solve_left,
    vstack,
)
from .verdict import FALSE, TRUE, UNKNOWN, Verdict


class ModuleError(ValueError):
    pass


class Module:
    __slots__ = ("alg", "dim", "action")

    def __init__(self, alg: Algebra, action: Sequence[Mat]) -> None:
        self.alg = alg
        self.action = list(action)
        if len(self.action) != alg.dim:
            raise ModuleError(f"need {alg.dim} action matrices, got {len(self.action)}")
        dims = {(m.rows, m.cols) for m in self.action} or {(0, 0)}
        if len(dims) != 1 or len({d for pair in dims for d in pair}) > 1:
            raise ModuleError("action matrices must be square of equal size")
        self.dim = self.action[0].rows if self.action else 0

    def act(self, coeffs) -> Mat:
        out = Mat.zeros(self.alg.p, self.dim, self.dim)
        for k, c in enumerate(np.asarray(coeffs, dtype=np.int64) % self.alg.p):
            if c:
                out = out + self.action[k].scale(int(c))
        return out

    def validate(self) -> "Module":
        alg = self.alg
        if not self.act(alg.unit).is_identity():
            raise ModuleError("unit does not act as the identity")
        for i in range(alg.dim):
            for j in range(alg.dim):
                lhs = Mat.zeros(alg.p, self.dim, self.dim)
                for k in range(alg.dim):
                    c = int(alg.mul[i, j, k])
                    if c:
                        lhs = lhs + self.action[k].scale(c)
                if lhs != self.action[j] @ self.action[i]:
                    raise ModuleError(
                        f"module law fails on ({alg.basis_labels[i]}, {alg.basis_labels[j]})"
                    )
        return self

    def __repr__(self) -> str:
        return f"Module(dim={self.dim})"


class ModuleMap:
    __slots__ = ("src", "tgt", "mat")

    def __init__(self, src: Module, tgt: Module, mat: Mat) -> None:
        if mat.rows != tgt.dim or mat.cols != src.dim:
            raise ModuleError(f"map matrix is {mat.rows}x{mat.cols}, expected {tgt.dim}x{src.dim}")
        self.src = src
        self.tgt = tgt
        self.mat = mat

    def validate(self) -> "ModuleMap":
        for k in range(self.src.alg.dim):
            if self.mat @ self.src.action[k] != self.tgt.action[k] @ self.mat:
                raise ModuleError(f"not a module map (fails at basis element {k})")
        return self

    def is_zero(self) -> bool:
        return self.mat.is_zero()

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.src, self.tgt, self.mat + other.mat)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.src, self.tgt, self.mat - other.mat)

    def scale(self, c: int) -> "ModuleMap":
        return ModuleMap(self.src, self.tgt, self.mat.scale(c))

    def __repr__(self) -> str:
        return f"ModuleMap({self.src.dim}->{self.tgt.dim})"


def same_module(m: Module, n: Module) -> bool:
    """Structural equality: same algebra instance, same action matrices."""
    return m is n or (m.alg is n.alg and m.dim == n.dim and all(a == b for a, b in zip(m.action, n.action)))


def compose(g: ModuleMap, f: ModuleMap) -> ModuleMap:
    """g after f."""
    if not same_module(g.src, f.tgt):
        raise ModuleError("composition mismatch")
    return ModuleMap(f.src, g.tgt, g.mat @ f.mat)


def identity_map(m: Module) -> ModuleMap:
    return ModuleMap(m, m, Mat.identity(m.alg.p, m.dim))


def zero_map(src: Module, tgt: Module) -> ModuleMap:
    return ModuleMap(src, tgt, Mat.zeros(src.alg.p, tgt.dim, src.dim))


@dataclass
class Conflation:
    """A short exact sequence: left an inflation, right a deflation."""

    left: ModuleMap
    right: ModuleMap

    @property
    def sub(self) -> Module:
        return self.left.src

    @property
    def middle(self) -> Module:
        return self.left.tgt

    @property
    def quot(self) -> Module:
        return self.right.tgt

    def validate(self) -> "Conflation":
        if self.left.tgt.dim != self.right.src.dim:
            raise ModuleError("conflation middle mismatch")
        if not (self.right.mat @ self.left.mat).is_zero():
            raise ModuleError("conflation composite is nonzero")
        rl = rank(self.left.mat)
        rr = rank(self.right.mat)
        if rl != self.sub.dim:
            raise ModuleError("conflation left map is not injective")
        if rr != self.quot.dim:
            raise ModuleError("conflation right map is not surjective")
        if rl + rr != self.middle.dim:
            raise ModuleError("conflation is not exact in the middle")
        return self


# -- basic objects -------------------------------------------------------


def zero_module(alg: Algebra) -> Module:
    return Module(alg, [Mat.zeros(alg.p, 0, 0) for _ in range(alg.dim)])


def regular_module(alg: Algebra) -> Module:
    return Module(alg, alg.right_regular_action())


def direct_sum(mods: Sequence[Module]) -> Tuple[Module, List[ModuleMap], List[ModuleMap]]:
    """Direct sum with canonical injections and projections."""
    mods = list(mods)
    if not mods:
        raise ModuleError("direct_sum of nothing needs an algebra; use zero_module")
    alg = mods[0].alg
    p = alg.p
    total = Module(alg, [block_diag(p, [m.action[k] for m in mods]) for k in range(alg.dim)])
    injs, projs = [], []
    off = 0
    for m in mods:
        inj = np.zeros((total.dim, m.dim), dtype=np.int64)
        inj[off : off + m.dim] = np.eye(m.dim, dtype=np.int64)
        injs.append(ModuleMap(m, total, Mat(p, inj)))
        projs.append(ModuleMap(total, m, Mat(p, inj.T)))
        off += m.dim
    return total, injs, projs


def free_module(alg: Algebra, n: int) -> Module:
    if n == 0:
        return zero_module(alg)
    total, _, _ = direct_sum([regular_module(alg)] * n)
    return total


def dual_module(m: Module) -> Module:
    """Linear dual, a right module over the opposite algebra."""
    return Module(m.alg.opposite(), [a.T for a in m.action])


def dual_map(f: ModuleMap) -> ModuleMap:
    return ModuleMap(dual_module(f.tgt), dual_module(f.src), f.mat.T)


# -- hom spaces ----------------------------------------------------------


def hom_space(m: Module, n: Module) -> List[ModuleMap]:
    """Canonical basis of Hom(m, n), via the intertwining equations.

    Matrices are vectorized row-major; the kernel basis of the stacked
    constraints gives a deterministic ordering.
    """
    if m.alg is not n.alg:
        raise ModuleError("hom_space requires a shared algebra instance")
    p = m.alg.p
    s, t = m.dim, n.dim
    if s == 0 or t == 0:
        return []
    blocks = []
    eye_t = Mat.identity(p, t)
    eye_s = Mat.identity(p, s)
    for k in range(m.alg.dim):
        # X @ S_k - T_k @ X = 0, row-major vec: kron(I, S_k^T) - kron(T_k, I)
        blocks.append(kron(eye_t, m.action[k].T) - kron(n.action[k], eye_s))
    system = vstack(blocks)
    basis = kernel_basis(system)
    out = []
    for j in range(basis.cols):
        out.append(ModuleMap(m, n, Mat(p, basis.a[:, j].reshape(t, s))))
    return out


def hom_dim(m: Module, n: Module) -> int:
    return len(hom_space(m, n))


# -- sub/quotient machinery ----------------------------------------------


def submodule(amb: Module, span_cols: Mat) -> Tuple[Module, ModuleMap]:
    """Canonical submodule on the span of the given columns.

    Raises if the span is not invariant under the action.
    """
    p = amb.alg.p
    basis = column_space_basis(span_cols)
    incl = basis  # amb.dim x r
    action = []
    for k in range(amb.alg.dim):
        moved = amb.action[k] @ incl
        coords = solve(incl, moved)
        if coords is None:
            raise ModuleError("span is not action-invariant")
        action.append(coords)
    sub = Module(amb.alg, action)
    return sub, ModuleMap(sub, amb, incl)


def quotient_module(amb: Module, span_cols: Mat) -> Tuple[Module, ModuleMap]:
    """Canonical quotient by the (invariant) span of the given columns."""
    p = amb.alg.p
    red, r, pivots = rref(span_cols.T)
    nonpiv = [c for c in range(amb.dim) if c not in set(pivots)]
    # reduce v by the canonical row basis, then restrict to non-pivot coords
    redmat = np.eye(amb.dim, dtype=np.int64)
    for t, pc in enumerate(pivots):
        sel = np.zeros((1, amb.dim), dtype=np.int64)
        sel[0, pc] = 1
        redmat = redmat - red.a[t].reshape(-1, 1) @ sel
    proj = Mat(p, redmat[nonpiv, :] if nonpiv else np.zeros((0, amb.dim), dtype=np.int64))
    sect = np.zeros((amb.dim, len(nonpiv)), dtype=np.int64)
    for j, c in enumerate(nonpiv):
        sect[c, j] = 1
    sect = Mat(p, sect)
    action = [proj @ amb.action[k] @ sect for k in range(amb.alg.dim)]
    quot = Module(amb.alg, action)
    if not (proj @ column_space_basis(span_cols)).is_zero():
        raise ModuleError("quotient projection does not kill the span")
    return quot, ModuleMap(amb, quot, proj)


@dataclass
class Factorization:
    kernel: ModuleMap  # inflation into the source
    image: Module
    cokernel: ModuleMap  # deflation out of the target
    image_in_target: ModuleMap


def factorize(f: ModuleMap) -> Factorization:
    ker_cols = kernel_basis(f.mat)
    kernel_mod, kernel_incl = submodule(f.src, ker_cols)
    image_mod, image_incl = submodule(f.tgt, f.mat)
    coker_mod, coker_proj = quotient_module(f.tgt, f.mat)
    return Factorization(kernel_incl, image_mod, coker_proj, image_incl)


def kernel_incl(f: ModuleMap) -> ModuleMap:
    return factorize(f).kernel


def cokernel_proj(f: ModuleMap) -> ModuleMap:
    return factorize(f).cokernel


def pushout(f: ModuleMap, g: ModuleMap) -> Tuple[Module, ModuleMap, ModuleMap]:
    """Pushout of X <-f- Z -g-> Y: coker of (f, -g) with its two legs."""
    if not same_module(f.src, g.src):
        raise ModuleError("pushout needs a common source")
    x, y = f.tgt, g.tgt
    sum_mod, injs, _ = direct_sum([x, y])
    combined = vstack([f.mat, -g.mat if g.mat.rows else g.mat])
    po, proj = quotient_module(sum_mod, combined)
    ix = compose(proj, injs[0])
    iy = compose(proj, injs[1])
    return po, ix, iy


def pullback(f: ModuleMap, g: ModuleMap) -> Tuple[Module, ModuleMap, ModuleMap]:
    """Pullback of X -f-> W <-g- Y: kernel of (f, -g) with its projections."""
    if not same_module(f.tgt, g.tgt):
        raise ModuleError("pullback needs a common target")
    x, y = f.src, g.src
    sum_mod, _, projs = direct_sum([x, y])
    combined = hstack([f.mat, -g.mat if g.mat.cols else g.mat])
    pb, incl = submodule(sum_mod, kernel_basis(combined))
    px = compose(projs[0], incl)
    py = compose(projs[1], incl)
    return pb, px, py


# -- covers, envelopes, syzygies ------------------------------------------


def generators(m: Module) -> Mat:
    """Columns generating m: a lift of a basis of m / m.rad when the
    algebra declares its radical, the full standard basis otherwise."""
    p = m.alg.p
    if m.dim == 0:
        return Mat.zeros(p, 0, 0)
    if m.alg.radical is None or m.alg.radical.cols == 0:
        return Mat.identity(p, m.dim)
    rad = m.alg.radical
    cols = [m.act(rad.a[:, j]) for j in range(rad.cols)]
    mrad = column_space_basis(hstack([c for c in cols])) if cols else Mat.zeros(p, m.dim, 0)
    # greedily extend a basis of m.rad by standard vectors; the complement lifts a basis of m/m.rad
    chosen = []
    current = mrad
    for i in range(m.dim):
        e = Mat.zeros(p, m.dim, 1) + Mat(p, np.eye(m.dim, dtype=np.int64)[:, i : i + 1])
        if not in_column_span(current, e):
            chosen.append(e)
            current = hstack([current, e]) if current.cols else e
    return hstack(chosen) if chosen else Mat.zeros(p, m.dim, 0)


def free_cover(m: Module) -> Conflation:
    """Conflation  syzygy >--> Lambda^g -->> m  from chosen generators."""
    alg = m.alg
    p = alg.p
    gens = generators(m)
    g = gens.cols
    middle = free_module(alg, g)
    if g == 0:
        cover = ModuleMap(middle, m, Mat.zeros(p, m.dim, 0))
    else:
        cols = []
        for i in range(g):
            gen = gens.col(i)
            for k in range(alg.dim):
                cols.append(m.action[k] @ gen)
        cover = ModuleMap(middle, m, hstack(cols))
    if rank(cover.mat) != m.dim:
        raise ModuleError("chosen generators do not generate")
    ker_mod, ker_incl = submodule(middle, kernel_basis(cover.mat))
    return Conflation(ModuleMap(ker_mod, middle, ker_incl.mat), cover)


def injective_embed(m: Module) -> Conflation:
    """Conflation  m >--> E -->> cosyzygy  with E injective.

    Built as the linear dual of a free cover over the opposite algebra;
    over a self-injective algebra E is projective as well.
    """
    dm = dual_module(m)
    op_cover = free_cover(dm)
    emb = ModuleMap(m, dual_module(op_cover.middle), op_cover.right.mat.T)
    cosyz = dual_module(op_cover.sub)
    out_map = ModuleMap(emb.tgt, cosyz, op_cover.left.mat.T)
    return Conflation(emb, out_map)


def is_projective(m: Module) -> bool:
    """Does the free cover split?  Solved linearly in the hom space."""
    cover = free_cover(m).right
    return split_section(cover) is not None


def split_section(defl: ModuleMap) -> Optional[ModuleMap]:
    """A section s of a surjection (defl o s = id), if one exists."""
    cands = hom_space(defl.tgt, defl.src)
    if defl.tgt.dim == 0:
        return zero_map(defl.tgt, defl.src)
    if not cands:
        return None
    p = defl.src.alg.p
    cols = [ (defl.mat @ c.mat).a.reshape(-1, 1) for c in cands ]
    target = Mat.identity(p, defl.tgt.dim).a.reshape(-1, 1)
    sol = solve(Mat(p, np.hstack(cols)), Mat(p, target))
    if sol is None:
        return None
    out = Mat.zeros(p, defl.src.dim, defl.tgt.dim)
    for j in range(sol.rows):
        if sol.a[j, 0]:
            out = out + cands[j].mat.scale(int(sol.a[j, 0]))
    return ModuleMap(defl.tgt, defl.src, out)


def split_retraction(infl: ModuleMap) -> Optional[ModuleMap]:
    """A retraction r of an injection (r o infl = id), if one exists."""
    cands = hom_space(infl.tgt, infl.src)
    if infl.src.dim == 0:
        return zero_map(infl.tgt, infl.src)
    if not cands:
        return None
    p = infl.src.alg.p
    cols = [ (c.mat @ infl.mat).a.reshape(-1, 1) for c in cands ]
    target = Mat.identity(p, infl.src.dim).a.reshape(-1, 1)
    sol = solve(Mat(p, np.hstack(cols)), Mat(p, target))
    if sol is None:
        return None
    out = Mat.zeros(p, infl.src.dim, infl.tgt.dim)
    for j in range(sol.rows):
        if sol.a[j, 0]:
            out = out + cands[j].mat.scale(int(sol.a[j, 0]))
    return ModuleMap(infl.tgt, infl.src, out)


def is_injective(m: Module) -> bool:
    return is_projective(dual_module(m))


def syzygy(m: Module) -> Module:
    return free_cover(m).sub


def cosyzygy(m: Module) -> Module:
    return injective_embed(m).quot


# -- stable homs and stable isomorphism ------------------------------------


@dataclass
class StableHomReport:
    basis: List[ModuleMap]           # canonical basis of Hom(m, n)
    proj_subspace: Mat               # columns: vectorized maps factoring through a projective
    quotient_dim: int

    def in_proj_subspace(self, f: ModuleMap) -> bool:
        v = Mat(f.mat.p, f.mat.a.reshape(-1, 1))
        if self.proj_subspace.cols == 0:
            return v.is_zero()
        return in_column_span(self.proj_subspace, v)

    def stably_equal(self, f: ModuleMap, g: ModuleMap) -> bool:
        return self.in_proj_subspace(f - g)


def stable_hom(m: Module, n: Module) -> StableHomReport:
    """Hom(m, n), the subspace factoring through a projective, and the
    quotient dimension.

    Any factorization through a projective lifts through the free-cover
    deflation P(n) ->> n, so the subspace is the image of composition
    Hom(m, P(n)) -> Hom(m, n).
    """
    p = m.alg.p
    basis = hom_space(m, n)
    cover = free_cover(n).right
    through = hom_space(m, cover.src)
    cols = [ (cover.mat @ h.mat).a.reshape(-1, 1) for h in through ]
    sub = Mat(p, np.hstack(cols)) if cols else Mat.zeros(p, n.dim * m.dim if n.dim * m.dim else 0, 0)
    sub = column_space_basis(sub) if sub.cols else sub
    qdim = len(basis) - (rank(sub) if sub.cols else 0)
    return StableHomReport(basis, sub, qdim)


def stable_class_reps(report: StableHomReport) -> List[ModuleMap]:
    """Hom-basis vectors completing the projective subspace to all of Hom;
    their classes form a basis of the stable quotient."""
    if not report.basis:
        return []
    p = report.basis[0].mat.p
    current = report.proj_subspace
    reps = []
    for b in report.basis:
        v = Mat(p, b.mat.a.reshape(-1, 1))
        if current.cols == 0:
            inside = v.is_zero()
        else:
            inside = in_column_span(current, v)
        if not inside:
            reps.append(b)
            current = hstack([current, v]) if current.cols else v
    return reps


def _solve_left_stable_inverse(f: ModuleMap, rep_end_src: StableHomReport) -> Optional[ModuleMap]:
    """g with g o f = id_src modulo projectives (linear in g)."""
    m, n = f.src, f.tgt
    p = m.alg.p
    if m.dim == 0:
        return zero_map(n, m)
    back = hom_space(n, m)
    cols = [ (b.mat @ f.mat).a.reshape(-1, 1) for b in back ]
    sub = rep_end_src.proj_subspace
    all_cols = cols + [ sub.col(j).a.reshape(-1, 1) for j in range(sub.cols) ]
    if not all_cols:
        return None
    target = Mat(p, Mat.identity(p, m.dim).a.reshape(-1, 1))
    sol = solve(Mat(p, np.hstack(all_cols)), target)
    if sol is None:
        return None
    out = Mat.zeros(p, m.dim, n.dim)
    for j, b in enumerate(back):
        if sol.a[j, 0]:
            out = out + b.mat.scale(int(sol.a[j, 0]))
    return ModuleMap(n, m, out)


def is_stable_iso_map(f: ModuleMap) -> Tuple[bool, Optional[ModuleMap]]:
    """Is the given map invertible in the stable category?  Exact, no budget.

    Returns (verdict, two-sided stable inverse when true).
    """
    end_src = stable_hom(f.src, f.src)
    g = _solve_left_stable_inverse(f, end_src)
    if g is None:
        return False, None
    end_tgt = stable_hom(f.tgt, f.tgt)
    # right inverse: h with f o h = id_tgt mod projectives; then g is two-sided
    fwd = hom_space(f.tgt, f.src)
    p = f.mat.p
    if f.tgt.dim == 0:
        return True, g
    cols = [ (f.mat @ b.mat).a.reshape(-1, 1) for b in fwd ]
    sub = end_tgt.proj_subspace
    all_cols = cols + [ sub.col(j).a.reshape(-1, 1) for j in range(sub.cols) ]
    if not all_cols:
        return False, None
    target = Mat(p, Mat.identity(p, f.tgt.dim).a.reshape(-1, 1))
    if solve(Mat(p, np.hstack(all_cols)), target) is None:
        return False, None
    # standard: a left inverse plus existence of a right inverse makes g two-sided
    if not end_tgt.in_proj_subspace(compose(f, g) - identity_map(f.tgt)):
        raise ModuleError("stable inverse check is inconsistent")
    return True, g


def is_stable_iso(m: Module, n: Module, budget: int = 4096, seed: int = 0) -> Verdict:
    """Search for a stable isomorphism m ~ n.

    Candidates range over stable classes of Hom(m, n); for each candidate
    the two-sided stable invertibility is a pair of linear solves.  An
    exhausted exhaustive enumeration certifies "false"; a sampled search
    that finds nothing reports "unknown".
    """
    p = m.alg.p
    end_m = stable_hom(m, m)
    end_n = stable_hom(n, n)
    if end_m.quotient_dim != end_n.quotient_dim:
        return Verdict(FALSE, reason=f"stable endomorphism dimensions differ ({end_m.quotient_dim} vs {end_n.quotient_dim})")
    fwd = stable_hom(m, n)
    bwd = stable_hom(n, m)
    if fwd.quotient_dim == 0 and (end_m.quotient_dim or end_n.quotient_dim):
        return Verdict(FALSE, reason="stable Hom(m, n) = 0 but stable endomorphisms are nonzero")
    if bwd.quotient_dim == 0 and (end_m.quotient_dim or end_n.quotient_dim):
        return Verdict(FALSE, reason="stable Hom(n, m) = 0 but stable endomorphisms are nonzero")
    reps = stable_class_reps(fwd)
    t = len(reps)
    total = p ** t

    def candidate(coeffs) -> ModuleMap:
        f = zero_map(m, n)
        for c, r in zip(coeffs, reps):
            if c:
                f = f + r.scale(int(c))
        return f

    if total <= budget:
        for coeffs in itertools.product(range(p), repeat=t):
            f = candidate(coeffs)
            ok, g = is_stable_iso_map(f)
            if ok:
                return Verdict(TRUE, reason="witness found by exhaustive class search", witness=(f, g))
        return Verdict(FALSE, reason=f"exhausted all {total} stable classes of Hom(m, n)")
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        coeffs = rng.integers(0, p, size=t)
        f = candidate(coeffs)
        ok, g = is_stable_iso_map(f)
        if ok:
            return Verdict(TRUE, reason="witness found by randomized search", witness=(f, g))
    return Verdict(UNKNOWN, reason=f"budget {budget} exhausted over {total} stable classes")


def find_module_iso(m: Module, n: Module, budget: int = 4096, seed: int = 0) -> Optional[ModuleMap]:
    """An actual isomorphism m -> n, by search over Hom; None if not found."""
    if m.dim != n.dim:
        return None
    if m.dim == 0:
        return zero_map(m, n)
    basis = hom_space(m, n)
    p = m.alg.p
    t = len(basis)
    if p ** t <= budget:
        space = itertools.product(range(p), repeat=t)
        draws = None
    else:
        rng = np.random.default_rng(seed)
        draws = (tuple(int(x) for x in rng.integers(0, p, size=t)) for _ in range(budget))
        space = draws
    from .field import invert

    for coeffs in space:
        f = zero_map(m, n)
        for c, b in zip(coeffs, basis):
            if c:
                f = f + b.scale(int(c))
        if invert(f.mat) is not None:
            return f
    return None
