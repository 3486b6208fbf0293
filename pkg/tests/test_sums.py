"""Character sums: direct evaluation, blockwise reduction, bound sweeps."""

import math

import numpy as np
import pytest

from weilrep.gfq import FieldCtx
from weilrep.heiwei import WeilRep
from weilrep.spectra import decompose, torus_characters
from weilrep.sums import (
    SingularTermError,
    bound_report,
    c_chi_direct,
    c_chi_reduced,
    c_chi_table,
    default_vector_range,
    orbit_spans_space,
)
from weilrep.symp import SympSpace, build_maximal_torus, module_structure


def setup(p, N, kind):
    sp = SympSpace(FieldCtx(p), N)
    return sp, build_maximal_torus(sp, kind)


def all_nonzero_vectors(sp):
    ctx = sp.ctx
    n = sp.dim
    for enc in range(1, ctx.q**n):
        yield tuple(ctx.from_int((enc // ctx.q**i) % ctx.q) for i in range(n))


def test_sum_over_characters_vanishes():
    """sum over chi of c_chi(v) = 0 for v != 0: character orthogonality
    collapses the torus sum to the excluded identity."""
    for kind in (["split"], ["inert"]):
        sp, torus = setup(7, 1, kind)
        vs = list(all_nonzero_vectors(sp))
        table, _ = c_chi_table(sp, torus, vs)
        sums = table.sum(axis=0)
        assert np.max(np.abs(sums)) < 1e-9


def test_c_chi_equals_torus_times_wigner():
    """c_chi = |T| <phi| pi(v) phi> on one-dimensional character spaces."""
    sp, torus = setup(5, 1, ["inert"])
    rep = WeilRep(sp)
    dec = decompose(rep, torus)
    vs = list(all_nonzero_vectors(sp))
    table, chars = c_chi_table(sp, torus, vs)
    for ci, chi in enumerate(chars):
        if dec.multiplicity(chi) != 1:
            continue
        phi = dec.bases[chi.exponents][:, 0]
        for vi, v in enumerate(vs):
            w = rep.wigner(phi, v)
            assert abs(table[ci, vi] - torus.order * w) < 1e-8


def test_two_dimensional_bound_exhaustive_f7():
    sp_split, torus_split = setup(7, 1, ["split"])
    sp_inert, torus_inert = setup(7, 1, ["inert"])
    for sp, torus in ((sp_split, torus_split), (sp_inert, torus_inert)):
        rpt = bound_report(sp, torus)
        assert rpt.max_ratio <= 1 + 1e-12
        assert rpt.rows
    # the split torus excludes its eigenvectors
    rpt = bound_report(sp_split, torus_split)
    assert rpt.excluded


def test_eigenvector_exclusion_is_necessary():
    """On a split-torus eigenvector the sum exceeds 2 sqrt(q): the
    admissibility condition in the bound is not vacuous."""
    sp, torus = setup(11, 1, ["split"])
    ctx = sp.ctx
    v = (ctx.one, ctx.zero)  # eigenvector of the diagonal torus
    assert not orbit_spans_space(sp, torus, v)
    table, chars = c_chi_table(sp, torus, [v])
    best = np.max(np.abs(table))
    assert best > 2 * math.sqrt(11) + 1e-9


def test_singular_term_raises_with_witness():
    sp, torus = setup(5, 2, ["split", "split"])
    ctx = sp.ctx
    v = tuple([ctx.one] * 4)
    with pytest.raises(SingularTermError):
        c_chi_table(sp, torus, [v])


def test_reduced_equals_direct_sl2():
    """N = 1: the reduction is the direct sum verbatim (K = k)."""
    sp, torus = setup(7, 1, ["inert"])
    ms = module_structure(torus)
    chars = torus_characters(torus)
    for v in list(all_nonzero_vectors(sp))[:12]:
        for chi in chars:
            d = c_chi_direct(sp, torus, chi, v)
            r = c_chi_reduced(ms, torus, chi, v)
            assert abs(d - r) < 1e-9


@pytest.mark.parametrize("p", [3, 5])
def test_reduced_equals_direct_irreducible_sp4(p):
    sp, torus = setup(p, 2, ["irreducible2"])
    ms = module_structure(torus)
    chars = torus_characters(torus)
    ctx = sp.ctx
    # a spanning set of vectors
    vs = []
    for i in range(4):
        v = [ctx.zero] * 4
        v[i] = ctx.one
        vs.append(tuple(v))
    vs.append(tuple(ctx.el(k + 1) for k in range(4)))
    for chi in chars:
        for v in vs:
            d = c_chi_direct(sp, torus, chi, v)
            r = c_chi_reduced(ms, torus, chi, v)
            assert abs(d - r) < 1e-8 * math.sqrt(ctx.q**2)


def test_reduced_handles_product_torus():
    """Blockwise evaluation stays defined on product tori where the direct
    character formula has singular terms, and matches |T| Tr(pi(v) P_chi)."""
    sp, torus = setup(5, 2, ["split", "inert"])
    ms = module_structure(torus)
    rep = WeilRep(sp)
    dec = decompose(rep, torus)
    ctx = sp.ctx
    vs = [
        tuple([ctx.one, ctx.zero, ctx.zero, ctx.zero]),
        tuple([ctx.one, ctx.one, ctx.zero, ctx.one]),
        tuple([ctx.zero, ctx.one, ctx.zero, ctx.el(2)]),
    ]
    for chi in dec.characters:
        P = dec.projectors[chi.exponents]
        for v in vs:
            lhs = c_chi_reduced(ms, torus, chi, v)
            rhs = torus.order * np.trace(rep.pi_op((v, ctx.zero)) @ P)
            assert abs(lhs - rhs) < 1e-8


def test_sharp_bound_irreducible_sp4():
    """|c_chi| <= 2 sqrt(q^N) on irreducible tori: strictly sharper than the
    2^N sqrt(q^N) cohomological bound."""
    sp, torus = setup(3, 2, ["irreducible2"])
    rpt = bound_report(sp, torus)
    assert rpt.rank == 1
    assert rpt.max_ratio <= 1 + 1e-12
    assert rpt.bound == pytest.approx(2 * 3)
    assert rpt.es_bound == pytest.approx(4 * 3)
    # observed maxima stay within half of the Es-style bound
    best = rpt.max_ratio * rpt.bound
    assert best <= rpt.es_bound / 2 + 1e-9


def test_bound_report_empty_vrange():
    sp, torus = setup(5, 1, ["split"])
    rpt = bound_report(sp, torus, v_list=[])
    assert rpt.rows == []
    assert rpt.max_ratio == 0.0


def test_default_vector_range_small_space_exhaustive():
    sp, _ = setup(5, 1, ["split"])
    vs = default_vector_range(sp)
    assert len(vs) == 24  # q^2 - 1


def test_csv_rows_shape():
    sp, torus = setup(5, 1, ["inert"])
    rpt = bound_report(sp, torus)
    rows = rpt.csv_rows()
    assert rows and len(rows[0]) == 11
    summary = rpt.summary()
    assert summary["max_ratio"] <= 1
    assert summary["argmax"] is not None


def test_triangle_sanity():
    """|c_chi| never exceeds the number of summands (unit modulus terms)."""
    sp, torus = setup(7, 1, ["inert"])
    vs = list(all_nonzero_vectors(sp))
    table, _ = c_chi_table(sp, torus, vs)
    assert np.abs(table).max() <= torus.order - 1 + 1e-9


def test_prime_power_base_field():
    """Everything runs over GF(9) as the base field: torus orders, the
    two-dimensional bound, and the blockwise reduction over GF(81)."""
    ctx = FieldCtx(3, 2)
    sp = SympSpace(ctx, 1)
    for kind, order in (("split", 8), ("inert", 10)):
        torus = build_maximal_torus(sp, [kind])
        assert torus.order == order
        rpt = bound_report(sp, torus)
        assert rpt.max_ratio <= 1 + 1e-9
    sp2 = SympSpace(ctx, 2)
    torus2 = build_maximal_torus(sp2, ["irreducible2"])
    assert torus2.order == 82
    ms = module_structure(torus2)
    chars = torus_characters(torus2)
    v = (ctx.one, ctx.zero, ctx.zero, ctx.zero)
    for chi in chars[:4]:
        d = c_chi_direct(sp2, torus2, chi, v)
        r = c_chi_reduced(ms, torus2, chi, v)
        assert abs(d - r) < 1e-9
        assert abs(d) <= 2 * math.sqrt(81) + 1e-8
