import numpy as np
import pytest

from derlab.algebra import dual_numbers, upper_triangular_2x2
from derlab.field import Mat, rank
from derlab.modules import (
    Conflation,
    Module,
    ModuleMap,
    compose,
    cosyzygy,
    direct_sum,
    dual_map,
    dual_module,
    factorize,
    free_cover,
    hom_dim,
    hom_space,
    identity_map,
    injective_embed,
    is_injective,
    is_projective,
    is_stable_iso,
    is_stable_iso_map,
    find_module_iso,
    pullback,
    pushout,
    regular_module,
    stable_hom,
    syzygy,
    zero_map,
    zero_module,
)


def socle_embedding(dn, simple, reg):
    """k -> Lambda hitting the socle x*Lambda."""
    return ModuleMap(simple, reg, Mat(2, [[0], [1]])).validate()


def test_hom_space_dims(dn, simple, reg):
    assert hom_dim(reg, reg) == 2  # End(Lambda) = Lambda
    assert hom_dim(simple, simple) == 1
    assert hom_dim(simple, reg) == 1  # socle embedding only
    assert hom_dim(reg, simple) == 1


def test_hom_space_members_are_maps(dn, simple, reg):
    for f in hom_space(reg, reg):
        f.validate()


def test_factorize_zero_and_identity(dn, simple, reg):
    z = zero_map(reg, simple)
    fac = factorize(z)
    assert fac.kernel.src.dim == reg.dim
    assert fac.cokernel.tgt.dim == simple.dim
    fac_id = factorize(identity_map(reg))
    assert fac_id.kernel.src.dim == 0
    assert fac_id.cokernel.tgt.dim == 0


def test_factorize_projection(dn, simple, reg):
    # Lambda ->> k, kernel is the socle, isomorphic to k itself
    proj = ModuleMap(reg, simple, Mat(2, [[1, 0]])).validate()
    fac = factorize(proj)
    assert fac.kernel.src.dim == 1
    assert fac.image.dim == 1
    assert fac.cokernel.tgt.dim == 0
    ker = fac.kernel.src
    assert ker.action[1].is_zero()  # x acts by zero on the socle


def test_conflation_arithmetic(dn, simple, reg):
    proj = ModuleMap(reg, simple, Mat(2, [[1, 0]])).validate()
    fac = factorize(proj)
    assert fac.kernel.src.dim + rank(proj.mat) == reg.dim
    assert rank(proj.mat) + fac.cokernel.tgt.dim == simple.dim


def test_pushout_along_zero(dn, simple, reg):
    f = socle_embedding(dn, simple, reg)
    g = zero_map(simple, reg)
    po, ix, iy = pushout(f, g)
    # coker(f) + Lambda = 1 + 2
    assert po.dim == 3


def test_pushout_of_iso(dn, simple, reg):
    f = identity_map(simple)
    g = socle_embedding(dn, simple, reg)
    po, ix, iy = pushout(f, g)
    assert po.dim == reg.dim
    assert rank(iy.mat) == reg.dim  # the induced leg is an isomorphism


def test_pushout_sum_example(dn, simple, reg):
    f = socle_embedding(dn, simple, reg)
    po, ix, iy = pushout(f, f)
    assert po.dim == 3  # 2 + 2 - 1
    # universal property: both legs agree after f
    assert compose(ix, f).mat == compose(iy, f).mat


def test_pullback_duality(dn, simple, reg):
    # pullback here = dual of pushout over the opposite algebra
    f = ModuleMap(reg, simple, Mat(2, [[1, 0]])).validate()
    pb, px, py = pullback(f, f)
    dpo, dix, diy = pushout(dual_map(f), dual_map(f))
    assert pb.dim == dpo.dim


def test_free_cover_of_regular_minimal(dn, reg):
    c = free_cover(reg)
    c.validate()
    assert c.middle.dim == reg.dim  # minimal: one generator
    assert c.sub.dim == 0


def test_free_cover_of_simple(dn, simple, reg):
    c = free_cover(simple)
    c.validate()
    assert c.middle.dim == 2
    assert c.sub.dim == 1
    assert c.sub.action[1].is_zero()  # syzygy(k) = k


def test_free_cover_zero(dn, zero):
    c = free_cover(zero)
    assert c.middle.dim == 0


def test_injective_embed(dn, simple, reg):
    c = injective_embed(simple)
    c.validate()
    assert c.middle.dim == 2
    assert c.quot.dim == 1  # cosyzygy(k) = k
    ce = injective_embed(reg)
    ce.validate()
    assert ce.quot.dim == 0  # Lambda is injective


def test_injective_embed_zero(dn, zero):
    c = injective_embed(zero)
    assert c.middle.dim == 0


def test_is_projective(dn, simple, reg, zero):
    assert is_projective(reg)
    assert is_projective(direct_sum([reg, reg])[0])
    assert not is_projective(simple)
    assert is_projective(zero)
    assert is_injective(reg)
    assert not is_injective(simple)


def test_stable_hom_examples(dn, simple, reg):
    assert stable_hom(simple, simple).quotient_dim == 1
    assert stable_hom(reg, simple).quotient_dim == 0
    assert stable_hom(reg, reg).quotient_dim == 0
    assert stable_hom(simple, reg).quotient_dim == 0


def test_stable_hom_invariant_under_projective_summands(dn, simple, reg):
    ks = direct_sum([simple, reg])[0]
    assert stable_hom(simple, simple).quotient_dim == stable_hom(ks, simple).quotient_dim
    assert stable_hom(simple, ks).quotient_dim == stable_hom(simple, simple).quotient_dim


def test_is_stable_iso_self(dn, simple):
    v = is_stable_iso(simple, simple)
    assert v.is_true
    f, g = v.witness
    ok, _ = is_stable_iso_map(f)
    assert ok


def test_is_stable_iso_add_projective(dn, simple, reg):
    ks = direct_sum([simple, reg])[0]
    v = is_stable_iso(simple, ks)
    assert v.is_true


def test_is_stable_iso_false_certificate(dn, simple, reg):
    v = is_stable_iso(simple, reg)
    assert v.is_false
    assert v.reason


def test_projective_stably_zero(dn, reg, zero):
    assert is_stable_iso(reg, zero).is_true
    assert is_stable_iso(zero, zero).is_true


def test_syzygy_cosyzygy(dn, simple, reg):
    s = syzygy(simple)
    assert s.dim == 1 and s.action[1].is_zero()
    c = cosyzygy(simple)
    assert c.dim == 1 and c.action[1].is_zero()
    assert syzygy(reg).dim == 0  # minimal mode


def test_syzygy_cosyzygy_stable_inverse(dn, simple):
    # on the non-projective sample k: cosyzygy(syzygy(k)) ~ k stably
    s = syzygy(simple)
    cs = cosyzygy(s)
    assert is_stable_iso(cs, simple).is_true


def test_is_projective_iff_stably_zero(dn, simple, reg, zero):
    for m in (simple, reg, zero, direct_sum([simple, reg])[0]):
        assert is_projective(m) == is_stable_iso(m, zero).is_true


def test_full_basis_covers_without_radical():
    alg = dual_numbers(2)
    stripped = dual_numbers(2)
    stripped.radical = None
    reg = regular_module(stripped)
    c = free_cover(reg)
    c.validate()
    assert c.middle.dim == 4  # full-basis cover: one generator per basis vector
    assert is_projective(reg)


def test_find_module_iso(dn, simple):
    s2 = Module(dn, [Mat.identity(2, 1), Mat.zeros(2, 1, 1)])
    f = find_module_iso(simple, s2)
    assert f is not None


def test_upper_triangular_modules():
    # sanity outside the self-injective world: the algebra's own modules work
    alg = upper_triangular_2x2(2)
    reg = regular_module(alg).validate()
    c = free_cover(reg)
    c.validate()
    assert is_projective(reg)
    d = dual_module(reg).validate()
    assert not is_projective(d)  # this is exactly the self-injectivity failure


def test_is_stable_iso_unknown_under_budget(dn, simple, reg):
    ks = direct_sum([simple, reg])[0]
    v = is_stable_iso(simple, ks, budget=0)
    assert v.is_unknown
    assert "budget" in v.reason


from hypothesis import given, settings, strategies as st


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_factorize_dimension_formulas(seed):
    import random as _random

    from derlab.samples import random_module

    alg = dual_numbers(2)
    rng = _random.Random(seed)
    m = random_module(alg, 3, rng)
    n = random_module(alg, 3, rng)
    basis = hom_space(m, n)
    f = zero_map(m, n)
    for b in basis:
        c = rng.randrange(2)
        if c:
            f = f + b
    fac = factorize(f)
    r = rank(f.mat)
    assert fac.kernel.src.dim + r == m.dim
    assert r + fac.cokernel.tgt.dim == n.dim
    assert fac.image.dim == r
    # the kernel inclusion composed with f vanishes
    assert (f.mat @ fac.kernel.mat).is_zero()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_cover_and_envelope_are_exact(seed):
    import random as _random

    from derlab.samples import random_module

    alg = dual_numbers(2)
    rng = _random.Random(seed)
    m = random_module(alg, 3, rng)
    free_cover(m).validate()
    injective_embed(m).validate()
