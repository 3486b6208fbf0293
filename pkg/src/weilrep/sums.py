"""The torus character sums

    c_chi(v) = sum over g in T minus I of
               conj(chi(g)) sigma((-1)^N det(g-I)) psi((1/2) omega((g-I)^(-1) v, v)),

their one-dimensional reductions over the block fields, and sweep reports
against the square-root cancellation bounds 2^r sqrt(q)^N.

Phases are exact integers (indices of p-th roots of unity); sums are
accumulated in complex doubles.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from . import fqlin as la
from .spectra import TorusCharacter, torus_characters
from .symp import SympSpace, Torus


class SingularTermError(ValueError):
    """det(g - I) = 0 for a non-identity torus element."""

    def __init__(self, g):
        self.g = g
        super().__init__(f"det(g - I) = 0 for torus element {g}")


def _char_sign_and_phases(space: SympSpace, g, v_array):
    """sign = sigma((-1)^N det(g-I)) and the psi indices of
    (1/2) omega((g-I)^(-1) v, v) over the rows of v_array."""
    ctx = space.ctx
    n = space.dim
    g = la.thaw(g)
    gmI = [
        [ctx.sub(g[i][j], ctx.one if i == j else ctx.zero) for j in range(n)]
        for i in range(n)
    ]
    d = la.det(ctx, gmI)
    if d == ctx.zero:
        return None, None
    M = la.inv(ctx, gmI)
    sign = ctx.legendre(ctx.mul(ctx.el((-1) ** space.N), d))
    half = ctx.inv(ctx.el(2))
    if ctx.m == 1:
        p = ctx.p
        Mnp = np.array(M, dtype=np.int64)
        J = np.array(space.gram, dtype=np.int64)
        Q = (Mnp.T @ J) % p
        V = np.asarray(v_array, dtype=np.int64)
        phase = ((V @ Q.T % p) * V).sum(axis=1) % p
        return sign, (half * phase) % p
    idx = np.empty(len(v_array), dtype=np.int64)
    for k, v in enumerate(v_array):
        w = la.mat_vec(ctx, M, list(v))
        idx[k] = ctx.psi_index(ctx.mul(half, space.omega(w, list(v))))
    return sign, idx


def c_chi_direct(space: SympSpace, torus: Torus, chi: TorusCharacter, v) -> complex:
    """One character sum, straight over the torus points."""
    table, chars = c_chi_table(space, torus, [v], characters=[chi])
    return complex(table[0, 0])


def c_chi_table(space: SympSpace, torus: Torus, v_list, characters=None):
    """Matrix of c_chi(v) over characters x vectors.

    Raises SingularTermError when some non-identity torus element has
    det(g - I) = 0 (the formula does not apply to such tori).
    """
    ctx = space.ctx
    if characters is None:
        characters = torus_characters(torus)
    p = ctx.p
    psi_pow = np.exp(2j * np.pi * np.arange(p) / p)
    identity = torus.identity_matrix()
    term_rows = []
    kept = []
    for gi, g in enumerate(torus.elements):
        if g == identity:
            continue
        sign, idx = _char_sign_and_phases(space, g, v_list)
        if sign is None:
            raise SingularTermError(g)
        term_rows.append(sign * psi_pow[idx])
        kept.append(gi)
    terms = np.stack(term_rows) if term_rows else np.zeros((0, len(v_list)))
    X = np.stack([chi.values()[kept] for chi in characters])
    return X.conj() @ terms, characters


def _block_torus_positions(ms, torus: Torus):
    """For each module-structure block, the index of the torus generator
    supported on it."""
    ctx = torus.space.ctx
    n = torus.space.dim
    ident = la.identity(ctx, n)
    out = []
    for blk in ms.blocks:
        found = None
        for k, gkey in enumerate(torus.generators):
            g = la.thaw(gkey)
            moves_this = la.mat_mul(ctx, la.thaw(blk.idempotent), g) != la.mat_mul(
                ctx, la.thaw(blk.idempotent), ident
            )
            if moves_this:
                if found is not None:
                    raise ValueError("generator supported on two blocks")
                found = k
        if found is None:
            raise ValueError("no torus generator acts on a block")
        out.append(found)
    if sorted(out) != list(range(len(torus.generators))):
        raise ValueError("block/generator correspondence is not a bijection")
    return out


def c_chi_reduced(ms, torus: Torus, chi: TorusCharacter, v) -> complex:
    """The same sum computed blockwise over the fields K_alpha:

        prod over alpha of  sum over g in T_alpha of
            conj(chi(g)) sigma_bar(-det_K(g-1)) psi_bar((1/2) omega_bar((g-1)^(-1) v, v))

    with the g = 1 term contributing |K_alpha| when the block component of v
    vanishes and 0 otherwise.
    """
    ctx = torus.space.ctx
    positions = _block_torus_positions(ms, torus)
    total = 1.0 + 0j
    for bi, (blk, gen_pos) in enumerate(zip(ms.blocks, positions)):
        bf = blk.bf
        n_a = torus.orders[gen_pos]
        v_alpha = blk.project(list(v))
        x, y = blk.coords_sl2(v_alpha)
        v_is_zero = x == bf.zero and y == bf.zero
        gen = torus.generators[gen_pos]
        ((ga, gb), (gc, gd)) = ms.torus_element_blocks(gen)[bi]
        cur = ((bf.one, bf.zero), (bf.zero, bf.one))
        block_sum = 0.0 + 0j
        for j in range(n_a):
            if j == 0:
                block_sum += bf.size if v_is_zero else 0.0
            else:
                ((a, b), (c, d)) = cur
                am1, dm1 = bf.sub(a, bf.one), bf.sub(d, bf.one)
                det = bf.sub(bf.mul(am1, dm1), bf.mul(b, c))
                if det == bf.zero:
                    raise SingularTermError(gen)
                sign = bf.legendre(bf.neg(det))
                det_inv = bf.inv(det)
                # (g - 1)^(-1) = adj / det on the (x, y) coordinates
                wx = bf.mul(det_inv, bf.sub(bf.mul(dm1, x), bf.mul(b, y)))
                wy = bf.mul(det_inv, bf.sub(bf.mul(am1, y), bf.mul(c, x)))
                ob = bf.sub(bf.mul(wx, y), bf.mul(wy, x))
                half = ctx.inv(ctx.el(2))
                phase = bf.scale(half, ob)
                exps = tuple(
                    j if k == gen_pos else 0 for k in range(len(torus.orders))
                )
                chival = chi.value_at_exponents(exps)
                block_sum += chival.conjugate() * sign * bf.psi_bar(phase)
            # advance cur = gen^(j+1) in SL(2, K_alpha)
            ((a, b), (c, d)) = cur
            cur = (
                (
                    bf.add(bf.mul(a, ga), bf.mul(b, gc)),
                    bf.add(bf.mul(a, gb), bf.mul(b, gd)),
                ),
                (
                    bf.add(bf.mul(c, ga), bf.mul(d, gc)),
                    bf.add(bf.mul(c, gb), bf.mul(d, gd)),
                ),
            )
        total *= block_sum
    return complex(total)


def orbit_spans_space(space: SympSpace, torus: Torus, v) -> bool:
    """Whether the torus orbit of v spans V (v avoids every proper invariant
    subspace)."""
    ctx = space.ctx
    rows = []
    for g in torus.elements:
        rows.append(la.mat_vec(ctx, la.thaw(g), list(v)))
        if len(rows) % space.dim == 0 and la.rank(ctx, rows) == space.dim:
            return True
    return la.rank(ctx, rows) == space.dim


@dataclass
class SumReport:
    space: SympSpace
    torus: Torus
    rows: list = field(default_factory=list)
    excluded: list = field(default_factory=list)
    seed: int | None = None
    rank: int = 0
    bound: float = 0.0
    es_bound: float = 0.0
    max_ratio: float = 0.0
    argmax: dict | None = None

    def csv_rows(self):
        out = []
        ctx = self.space.ctx
        desc = self.torus.descriptor_string()
        for row in self.rows:
            out.append(
                (
                    ctx.p,
                    ctx.m,
                    self.space.N,
                    desc,
                    ";".join(str(e) for e in row["chi"]),
                    ";".join(
                        ",".join(str(c) for c in ctx.serialize(x)) for x in row["v"]
                    ),
                    f"{row['re']:.12g}",
                    f"{row['im']:.12g}",
                    f"{row['abs']:.12g}",
                    f"{self.bound:.12g}",
                    f"{row['ratio']:.12g}",
                )
            )
        return out

    def summary(self):
        return {
            "p": self.space.ctx.p,
            "m": self.space.ctx.m,
            "N": self.space.N,
            "torus": self.torus.descriptor(),
            "rank": self.rank,
            "bound": self.bound,
            "es_bound": self.es_bound,
            "max_ratio": self.max_ratio,
            "argmax": self.argmax,
            "n_rows": len(self.rows),
            "n_excluded": len(self.excluded),
            "seed": self.seed,
        }


def default_vector_range(space: SympSpace, seed: int = 0):
    """Every nonzero vector when the space is small, otherwise a seeded
    sample of 4096 plus all vectors of Hamming weight at most 2."""
    ctx = space.ctx
    n = space.dim
    total = ctx.q**n
    if total <= 6561:
        vs = []
        for enc in range(1, total):
            vs.append(
                tuple(ctx.from_int((enc // ctx.q**i) % ctx.q) for i in range(n))
            )
        return vs
    rng = random.Random(seed)
    seen = set()
    out = []
    for i in range(n):
        for j in range(i, n):
            for a in range(ctx.q):
                for b in range(ctx.q):
                    v = [ctx.zero] * n
                    v[i] = ctx.from_int(a)
                    v[j] = ctx.from_int(b)
                    v = tuple(v)
                    if any(x != ctx.zero for x in v) and v not in seen:
                        seen.add(v)
                        out.append(v)
    while len(out) < 4096 + len(seen):
        v = tuple(ctx.from_int(rng.randrange(ctx.q)) for _ in range(n))
        if any(x != ctx.zero for x in v) and v not in seen:
            seen.add(v)
            out.append(v)
    return out


def bound_report(space: SympSpace, torus: Torus, v_list=None, seed: int = 0) -> SumReport:
    """Evaluate |c_chi(v)| against 2^r sqrt(q)^N over all characters and the
    given (or default) vectors; vectors inside a proper invariant subspace
    are excluded from the bound assertion and reported separately."""
    ctx = space.ctx
    if v_list is None:
        v_list = default_vector_range(space, seed)
    report = SumReport(space, torus, seed=seed)
    report.rank = len(torus.blocks)
    report.bound = 2**report.rank * math.sqrt(ctx.q**space.N)
    report.es_bound = 2**space.N * math.sqrt(ctx.q**space.N)
    admissible = []
    for v in v_list:
        if orbit_spans_space(space, torus, v):
            admissible.append(v)
        else:
            report.excluded.append(v)
    if not admissible:
        return report
    table, chars = c_chi_table(space, torus, admissible)
    mags = np.abs(table)
    for ci, chi in enumerate(chars):
        for vi, v in enumerate(admissible):
            val = table[ci, vi]
            ratio = mags[ci, vi] / report.bound
            report.rows.append(
                {
                    "chi": chi.exponents,
                    "v": v,
                    "re": float(val.real),
                    "im": float(val.imag),
                    "abs": float(mags[ci, vi]),
                    "ratio": float(ratio),
                }
            )
            if ratio > report.max_ratio:
                report.max_ratio = float(ratio)
                report.argmax = {
                    "chi": list(chi.exponents),
                    "v": [ctx.serialize(x) for x in v],
                    "abs": float(mags[ci, vi]),
                }
    return report
