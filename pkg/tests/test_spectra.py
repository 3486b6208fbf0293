"""Torus characters, eigenspace decompositions, multiplicities."""

import numpy as np

from weilrep.gfq import FieldCtx
from weilrep.heiwei import WeilRep, max_abs
from weilrep.spectra import (
    decompose,
    expected_multiplicity,
    multiplicity_table_rows,
    sigma_block_character,
    sigma_character,
    torus_characters,
)
from weilrep.symp import SympSpace, build_maximal_torus


def setup_rep(p, N, kind):
    sp = SympSpace(FieldCtx(p), N)
    torus = build_maximal_torus(sp, kind)
    return WeilRep(sp), torus


def test_character_group_structure():
    _, torus = setup_rep(5, 1, ["inert"])
    chars = torus_characters(torus)
    assert len(chars) == 6
    for chi in chars:
        for g1 in torus.elements:
            for g2 in torus.elements:
                from weilrep import fqlin as la

                prod = la.freeze(
                    la.mat_mul(torus.space.ctx, la.thaw(g1), la.thaw(g2))
                )
                assert abs(chi(prod) - chi(g1) * chi(g2)) < 1e-10
        # values are |T|-th roots of unity
        for g in torus.elements:
            assert abs(chi(g) ** torus.order - 1) < 1e-9


def test_sigma_character_inert_sl2_f5():
    _, torus = setup_rep(5, 1, ["inert"])
    sig = sigma_character(torus)
    vals = sig.values()
    assert np.all(np.abs(np.abs(vals.real) - 1) < 1e-12)
    assert np.any(vals.real < 0)
    # it is the unique quadratic one
    quad = [c for c in torus_characters(torus) if c.is_quadratic()]
    assert quad == [sig]


def test_multiplicities_sl2_f5_split():
    rep, torus = setup_rep(5, 1, ["split"])
    dec = decompose(rep, torus)
    mults = sorted(dec.multiplicities.values())
    assert mults == [1, 1, 1, 2]
    sig = sigma_character(torus)
    assert dec.multiplicity(sig) == 2


def test_multiplicities_sl2_f5_inert():
    rep, torus = setup_rep(5, 1, ["inert"])
    dec = decompose(rep, torus)
    mults = sorted(dec.multiplicities.values())
    assert mults == [0, 1, 1, 1, 1, 1]
    sig = sigma_character(torus)
    assert dec.multiplicity(sig) == 0


def test_multiplicities_sp4_f3_inert_inert():
    rep, torus = setup_rep(3, 2, ["inert", "inert"])
    dec = decompose(rep, torus)
    mults = list(dec.multiplicities.values())
    assert sorted(mults) == [0] * 7 + [1] * 9
    assert sum(mults) == 9
    # the sigma character of each inert factor never appears
    for alpha in range(2):
        sig = sigma_block_character(torus, alpha)
        assert dec.multiplicity(sig) == 0


def test_multiplicity_law_matches_prediction():
    cases = [
        (5, 1, ["split"]),
        (5, 1, ["inert"]),
        (3, 2, ["split", "split"]),
        (3, 2, ["split", "inert"]),
        (3, 2, ["irreducible2"]),
        (3, 2, [("split", 2)]),
        (5, 2, ["split", "inert"]),
    ]
    for p, N, kind in cases:
        rep, torus = setup_rep(p, N, kind)
        dec = decompose(rep, torus)
        for chi in dec.characters:
            assert dec.multiplicity(chi) == expected_multiplicity(torus, chi), (
                p,
                kind,
                chi.exponents,
            )


def test_projector_axioms_and_equivariance():
    rep, torus = setup_rep(5, 1, ["split"])
    dec = decompose(rep, torus)
    dim = rep.dim
    total = np.zeros((dim, dim), dtype=np.complex128)
    for chi in dec.characters:
        P = dec.projectors[chi.exponents]
        assert max_abs(P @ P - P) < rep.tol
        assert max_abs(P - P.conj().T) < rep.tol
        total += P
        # rho(g) P = chi(g) P on the generators
        for gkey in torus.generators:
            R = rep.weil_op(gkey)
            assert max_abs(R @ P - chi(gkey) * P) < rep.tol
    assert max_abs(total - np.eye(dim)) < rep.tol
    # distinct projectors are orthogonal
    chars = dec.characters
    for i in range(len(chars)):
        for j in range(i + 1, len(chars)):
            Pi = dec.projectors[chars[i].exponents]
            Pj = dec.projectors[chars[j].exponents]
            assert max_abs(Pi @ Pj) < rep.tol


def test_eigenbases_orthonormal_and_eigen():
    rep, torus = setup_rep(7, 1, ["inert"])
    dec = decompose(rep, torus)
    for chi, phi in dec.eigenstates():
        assert abs(np.linalg.norm(phi) - 1) < 1e-9
        for gkey in torus.generators:
            R = rep.weil_op(gkey)
            assert max_abs(R @ phi - chi(gkey) * phi) < rep.tol


def test_tensor_consistency_product_torus():
    """For a product torus the nonzero eigenspaces match the products of the
    block multiplicities (tensor factorization)."""
    rep, torus = setup_rep(5, 2, ["split", "split"])
    dec = decompose(rep, torus)
    for chi in dec.characters:
        expected = 1
        for k in range(2):
            n = torus.orders[k]
            expected *= 2 if (n % 2 == 0 and chi.exponents[k] == n // 2) else 1
        assert dec.multiplicity(chi) == expected
    assert sum(dec.multiplicities.values()) == 25


def test_multiplicity_rows_format():
    rep, torus = setup_rep(5, 1, ["split"])
    dec = decompose(rep, torus)
    rows = multiplicity_table_rows(dec)
    assert len(rows) == 4
    assert rows[0][0] == 5 and rows[0][2] == 1
    assert all(isinstance(r[5], int) for r in rows)


def test_character_restriction_sign():
    """On the punctured torus, sigma(-det(g - I)) equals the quadratic
    character of T (split) or its negative (inert)."""
    from weilrep import fqlin as la

    for p in (5, 7, 11):
        for kind, sign in (("split", 1), ("inert", -1)):
            sp = SympSpace(FieldCtx(p), 1)
            torus = build_maximal_torus(sp, [kind])
            sig = sigma_character(torus)
            ctx = sp.ctx
            ident = torus.identity_matrix()
            for gkey in torus.elements:
                if gkey == ident:
                    continue
                g = la.thaw(gkey)
                gmI = [
                    [ctx.sub(g[i][j], ctx.one if i == j else ctx.zero) for j in range(2)]
                    for i in range(2)
                ]
                val = ctx.legendre(ctx.neg(la.det(ctx, gmI)))
                expect = sign * int(round(sig(gkey).real))
                assert val == expect, (p, kind, gkey)


def test_multiplicities_sp8_f3_inert_blocks():
    rep, torus = setup_rep(3, 4, ["inert"] * 4)
    dec = decompose(rep, torus)
    assert sum(dec.multiplicities.values()) == 81
    for chi in dec.characters:
        assert dec.multiplicity(chi) == expected_multiplicity(torus, chi)


def test_multiplicities_sp6_f3():
    for kind in (["irreducible3"], ["split", "irreducible2"]):
        rep, torus = setup_rep(3, 3, kind)
        dec = decompose(rep, torus)
        assert sum(dec.multiplicities.values()) == 27
        for chi in dec.characters:
            assert dec.multiplicity(chi) == expected_multiplicity(torus, chi)


def test_multiplicities_over_f9_base():
    rep, torus = setup_rep(3, 1, ["inert"])
    # now the same over the extension base field GF(9)
    sp = SympSpace(FieldCtx(3, 2), 1)
    rep9 = WeilRep(sp)
    for kind in ("split", "inert"):
        torus9 = build_maximal_torus(sp, [kind])
        dec = decompose(rep9, torus9)
        assert sum(dec.multiplicities.values()) == 9
        for chi in dec.characters:
            assert dec.multiplicity(chi) == expected_multiplicity(torus9, chi)
