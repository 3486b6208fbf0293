"""The Heisenberg representation in the Schroedinger model, the Weil
representation built from the explicit character formulas, and the
restriction comparison onto SL(2) over extension fields.

Model conventions on a standard symplectic space with coordinates split as
v = (a; b), a and b of length N, omega(v, v') = a.b' - b.a':

    [pi(a, b, z) f](x) = psi(z + b.x + (1/2) a.b) * f(x + a)

on functions on L = GF(q)^N.  The Weil operator of a group element g with
det(g - I) != 0 is recovered by expanding in the orthogonal operator basis
{pi(v, 0)}:

    rho(g) = q^(-N) * sum_v  ch(g, v) pi(v, 0),

where ch(g, v) = sigma((-1)^N det(g-I)) psi((1/2) omega((g-I)^(-1) v, v)) is
the Heisenberg-Weil character.  Non-generic elements are handled by writing
g as a product of two generic factors.  All phases are integer indices into
a table of p-th roots of unity; only the final accumulation is floating
point.
"""

from __future__ import annotations

import random

import numpy as np

from . import fqlin as la
from .symp import SympSpace, assert_symplectic, random_symplectic


def max_abs(A) -> float:
    return float(np.max(np.abs(A))) if np.size(A) else 0.0


def op_dist(A, B) -> float:
    return max_abs(np.asarray(A) - np.asarray(B))


def is_unitary(U, tol) -> bool:
    U = np.asarray(U)
    return op_dist(U @ U.conj().T, np.eye(U.shape[0])) <= tol


# -- Heisenberg group ----------------------------------------------------------


def heisenberg_compose(space: SympSpace, h1, h2):
    """(v, z)(v', z') = (v + v', z + z' + (1/2) omega(v, v'))."""
    ctx = space.ctx
    v1, z1 = h1
    v2, z2 = h2
    v = tuple(ctx.add(a, b) for a, b in zip(v1, v2))
    half = ctx.inv(ctx.el(2))
    z = ctx.add(ctx.add(z1, z2), ctx.mul(half, space.omega(list(v1), list(v2))))
    return (v, z)


def heisenberg_identity(space: SympSpace):
    return (tuple([space.ctx.zero] * space.dim), space.ctx.zero)


def heisenberg_inverse(space: SympSpace, h):
    ctx = space.ctx
    v, z = h
    return (tuple(ctx.neg(a) for a in v), ctx.neg(z))


class WeilRep:
    """Heisenberg and Weil operators on the q^N-dimensional Schroedinger
    space attached to a standard symplectic space.

    Operators are dense complex matrices; ``tol`` (default 1e-9 * q^N)
    is the max-norm comparison tolerance used by the internal sanity
    checks.  Computed Weil operators are cached by group element; the cache
    is the only mutable state, and since insertion is a single dict
    assignment of an idempotent value, concurrent readers plus redundant
    recomputation are harmless.
    """

    def __init__(self, space: SympSpace, tol=None, seed: int = 0):
        ctx = space.ctx
        if space.gram != la.thaw(_standard_gram_cache(space)):
            raise ValueError("the Schroedinger model needs the standard gram form")
        self.space = space
        self.ctx = ctx
        self.N = space.N
        self.dim = ctx.q**space.N
        self.tol = tol if tol is not None else 1e-9 * self.dim
        self.seed = seed
        self._cache = {}
        self._half = ctx.inv(ctx.el(2))
        p = ctx.p
        self.psi_pow = np.exp(2j * np.pi * np.arange(p) / p)
        # component tuples of L = GF(q)^N, indexed by base-q encodings
        self._L = [
            tuple(ctx.from_int((n // ctx.q**i) % ctx.q) for i in range(space.N))
            for n in range(self.dim)
        ]
        self._Lindex = {x: i for i, x in enumerate(self._L)}
        self.shift_table = np.empty((self.dim, self.dim), dtype=np.int64)
        for ai, a in enumerate(self._L):
            for xi, x in enumerate(self._L):
                s = tuple(ctx.add(u, v) for u, v in zip(a, x))
                self.shift_table[ai, xi] = self._Lindex[s]
        dot_idx = np.empty((self.dim, self.dim), dtype=np.int64)
        half_idx = np.empty((self.dim, self.dim), dtype=np.int64)
        for bi, b in enumerate(self._L):
            for xi, x in enumerate(self._L):
                d = ctx.zero
                for u, v in zip(b, x):
                    d = ctx.add(d, ctx.mul(u, v))
                dot_idx[bi, xi] = ctx.psi_index(d)
                half_idx[bi, xi] = ctx.psi_index(self.mul_half(d))
        self.psi_mat = self.psi_pow[dot_idx]
        self.half_ab_idx = half_idx.T.copy()  # [a_idx, b_idx]

    def mul_half(self, a):
        return self.ctx.mul(self._half, a)

    # -- vectors and indices ---------------------------------------------------

    def l_index(self, x) -> int:
        return self._Lindex[tuple(x)]

    def split_v(self, v):
        return tuple(v[: self.N]), tuple(v[self.N :])

    def v_index(self, v) -> int:
        a, b = self.split_v(v)
        return self._Lindex[a] * self.dim + self._Lindex[b]

    def all_vectors(self):
        for a in self._L:
            for b in self._L:
                yield a + b

    # -- Heisenberg operators ---------------------------------------------------

    def pi_op(self, h) -> np.ndarray:
        """Unitary of a Heisenberg element (v, z)."""
        ctx = self.ctx
        v, z = h
        a, b = self.split_v(v)
        ai, bi = self._Lindex[a], self._Lindex[b]
        zi = ctx.psi_index(z)
        phases = (
            self.psi_mat[bi, :]
            * self.psi_pow[(self.half_ab_idx[ai, bi] + zi) % ctx.p]
        )
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        out[np.arange(self.dim), self.shift_table[ai]] = phases
        return out

    # -- character formulas ------------------------------------------------------

    def _g_minus_I_inverse(self, g):
        ctx = self.ctx
        g = la.thaw(g)
        n = self.space.dim
        gmI = [
            [ctx.sub(g[i][j], ctx.one if i == j else ctx.zero) for j in range(n)]
            for i in range(n)
        ]
        d = la.det(ctx, gmI)
        if d == ctx.zero:
            return None, None
        return la.inv(ctx, gmI), d

    def ch_rho(self, g) -> int:
        """sigma((-1)^N det(g - I)); errors when g - I is singular."""
        ctx = self.ctx
        _, d = self._g_minus_I_inverse(g)
        if d is None:
            raise ValueError("character formula undefined: det(g - I) = 0")
        sign_arg = ctx.mul(ctx.el((-1) ** self.N), d)
        return ctx.legendre(sign_arg)

    def ch_tau(self, g, h) -> complex:
        """Character of the joint representation at (g, (v, z))."""
        ctx = self.ctx
        M, d = self._g_minus_I_inverse(g)
        if d is None:
            raise ValueError("character formula undefined: det(g - I) = 0")
        v, z = h
        w = la.mat_vec(ctx, M, list(v))
        phase = ctx.add(self.mul_half(self.space.omega(w, list(v))), z)
        sign_arg = ctx.mul(ctx.el((-1) ** self.N), d)
        return ctx.legendre(sign_arg) * ctx.psi(phase)

    def char_phase_table(self, g):
        """(sign, idx) of the character over all of V: the character at
        v is sign * psi_pow[idx[a_idx, b_idx]].  Requires det(g-I) != 0."""
        ctx = self.ctx
        M, d = self._g_minus_I_inverse(g)
        if d is None:
            raise ValueError("character formula undefined: det(g - I) = 0")
        sign = ctx.legendre(ctx.mul(ctx.el((-1) ** self.N), d))
        n = self.space.dim
        if ctx.m == 1:
            p = ctx.p
            Mnp = np.array(M, dtype=np.int64)
            J = np.array(self.space.gram, dtype=np.int64)
            Q = (Mnp.T @ J) % p
            V = self._vmat_np()
            phase = ((V @ Q.T % p) * V).sum(axis=1) % p
            half = (self._half * phase) % p
            return sign, half.reshape(self.dim, self.dim)
        idx = np.empty(self.dim * self.dim, dtype=np.int64)
        for ai, a in enumerate(self._L):
            for bi, b in enumerate(self._L):
                v = list(a + b)
                w = la.mat_vec(ctx, M, v)
                ph = self.mul_half(self.space.omega(w, v))
                idx[ai * self.dim + bi] = ctx.psi_index(ph)
        return sign, idx.reshape(self.dim, self.dim)

    def _vmat_np(self):
        if not hasattr(self, "_vmat"):
            n = self.space.dim
            V = np.empty((self.dim * self.dim, n), dtype=np.int64)
            for ai, a in enumerate(self._L):
                for bi, b in enumerate(self._L):
                    V[ai * self.dim + bi] = a + b
            self._vmat = V
        return self._vmat

    # -- Weil operators -----------------------------------------------------------

    def weil_op(self, g) -> np.ndarray:
        ctx = self.ctx
        if ctx.q == 3 and self.N == 1:
            raise ValueError(
                "the linearization over GF(3) in dimension 2 is not unique; "
                "this case is excluded from operator-level computations"
            )
        key = la.freeze(g)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        assert_symplectic(self.space, la.thaw(g), "weil_op input")
        try:
            sign, idx = self.char_phase_table(g)
        except ValueError:
            op = self._weil_op_by_factorization(g)
        else:
            W = sign * self.psi_pow[(idx + self.half_ab_idx) % ctx.p]
            C = W @ self.psi_mat
            op = np.zeros((self.dim, self.dim), dtype=np.complex128)
            rows = np.arange(self.dim)
            for ai in range(self.dim):
                op[rows, self.shift_table[ai]] = C[ai] / self.dim
        if not is_unitary(op, self.tol):
            raise AssertionError("constructed Weil operator is not unitary")
        self._cache[key] = op
        return op

    def _weil_op_by_factorization(self, g):
        """g = g1 g2 with both factors generic; multiplicativity of the
        linearization gives rho(g)."""
        ctx = self.ctx
        rng = random.Random(self.seed)
        g = la.thaw(g)
        for _ in range(64):
            r = random_symplectic(self.space, rng)
            _, dr = self._g_minus_I_inverse(r)
            if dr is None:
                continue
            g1 = la.mat_mul(ctx, g, la.inv(ctx, r))
            _, d1 = self._g_minus_I_inverse(g1)
            if d1 is None:
                continue
            return self.weil_op(g1) @ self.weil_op(r)
        raise RuntimeError("no generic factorization found after 64 draws")

    # -- batched Wigner values ------------------------------------------------------

    def wigner_batch(self, states: np.ndarray) -> np.ndarray:
        """<phi | pi(v, 0) phi> for the columns phi of ``states`` and every
        v in V; result has shape (n_states, q^N * q^N) indexed by
        a_idx * q^N + b_idx."""
        states = np.asarray(states, dtype=np.complex128)
        dim, nstates = states.shape
        assert dim == self.dim
        out = np.empty((nstates, dim * dim), dtype=np.complex128)
        conj = states.conj()
        for ai in range(dim):
            shifted = states[self.shift_table[ai], :]
            U = conj * shifted
            T = self.psi_mat @ U
            T *= self.psi_pow[self.half_ab_idx[ai]][:, None]
            out[:, ai * dim : (ai + 1) * dim] = T.T
        return out

    def wigner(self, phi, v) -> complex:
        """<phi | pi(v, 0) phi> for a unit vector phi."""
        phi = np.asarray(phi, dtype=np.complex128)
        if abs(np.linalg.norm(phi) - 1.0) > self.tol:
            raise ValueError("wigner expects a unit vector")
        h = (tuple(v), self.ctx.zero)
        return complex(phi.conj() @ (self.pi_op(h) @ phi))


def _standard_gram_cache(space):
    from .symp import standard_gram

    return la.freeze(standard_gram(space.ctx, space.N))


# -- restriction to SL(2) over the extension fields ----------------------------


def _intertwiner(rep: WeilRep, bar_pi_of_v, dim_bar):
    """Unitary U with pi(iota_H(v, 0)) U = U pi_bar(v, 0) for all v, found
    by averaging rank-one seeds over the Heisenberg translates."""
    for i in range(rep.dim):
        for j in range(dim_bar):
            U = np.zeros((rep.dim, dim_bar), dtype=np.complex128)
            for v in rep.all_vectors():
                big = rep.pi_op((v, rep.ctx.zero))
                bar = bar_pi_of_v(v)
                U += np.outer(big[:, i], bar[:, j].conj())
            gram = U.conj().T @ U
            c = abs(gram.trace()) / dim_bar
            if c < 1e-8:
                continue
            if max_abs(gram - c * np.eye(dim_bar)) > rep.tol * c:
                continue
            return U / np.sqrt(c)
    raise RuntimeError("no Heisenberg intertwiner found")  # pragma: no cover


def restrict_to_extension(rep: WeilRep, ms, n_samples: int = 50, seed: int = 0):
    """Compare the restriction of the Weil representation along the module
    structure with the tensor product of the block Weil representations.

    Returns a report with the exact trace-level identity counts over the
    torus and the maximum operator distance after one global alignment.
    """
    if rep.dim > 343:
        raise ValueError(
            f"dimension {rep.dim} exceeds the supported bound 343 for the "
            "operator-level comparison"
        )
    ctx = rep.ctx
    space = rep.space
    blocks = ms.blocks
    bar_data = []
    for blk in blocks:
        ctxK, to_ctx, from_ctx = blk.bf.as_field_ctx()
        bar_space = SympSpace(ctxK, 1)
        bar_rep = WeilRep(bar_space)
        bar_data.append((blk, ctxK, to_ctx, from_ctx, bar_rep))

    def coords_ctxK(v):
        out = []
        for blk, ctxK, to_ctx, _, _ in bar_data:
            x, y = blk.coords_sl2(blk.project(list(v)))
            out.append((to_ctx(x), to_ctx(y)))
        return out

    def bar_pi_of_v(v):
        mats = []
        for (blk, ctxK, _, _, bar_rep), (x, y) in zip(bar_data, coords_ctxK(v)):
            mats.append(bar_rep.pi_op(((x, y), ctxK.zero)))
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    dim_bar = 1
    for _, ctxK, _, _, _ in bar_data:
        dim_bar *= ctxK.q
    assert dim_bar == rep.dim
    U = _intertwiner(rep, bar_pi_of_v, dim_bar)

    # exact trace-level identities over the torus
    torus = ms.torus
    sigma_checked = 0
    sigma_failures = 0
    psi_checked = 0
    psi_failures = 0
    identity = torus.identity_matrix()
    n = space.dim
    for gkey in torus.elements:
        if gkey == identity:
            continue
        g = la.thaw(gkey)
        gb = ms.torus_element_blocks(gkey)
        dets = []
        ok = True
        for blk, ((a, b), (c, d)) in zip(blocks, gb):
            bf = blk.bf
            am1 = bf.sub(a, bf.one)
            dm1 = bf.sub(d, bf.one)
            det = bf.sub(bf.mul(am1, dm1), bf.mul(b, c))
            if det == bf.zero:
                ok = False
                break
            dets.append((blk, det))
        if not ok:
            continue
        rhs = 1
        for blk, det in dets:
            rhs *= blk.bf.legendre(blk.bf.neg(det))
        lhs = rep.ch_rho(g)
        sigma_checked += 1
        if lhs != rhs:
            sigma_failures += 1
        # psi-level identity on the standard basis vectors, as exact indices
        M, _ = rep._g_minus_I_inverse(g)
        for col in range(n):
            v = [ctx.one if i == col else ctx.zero for i in range(n)]
            w = la.mat_vec(ctx, M, v)
            lhs_idx = ctx.psi_index(rep.mul_half(space.omega(w, v)))
            rhs_idx = 0
            for blk in blocks:
                ob = blk.omega_bar(blk.project(w), blk.project(v))
                rhs_idx += ctx.psi_index(rep.mul_half(blk.bf.trace_to_base(ob)))
            psi_checked += 1
            if lhs_idx != rhs_idx % ctx.p:
                psi_failures += 1

    # operator-level distance over torus elements and random SL(2, K) points;
    # every test element is a tuple of 2 x 2 matrices in block coordinates
    rng = random.Random(seed)
    test_elements = [ms.torus_element_blocks(gkey) for gkey in torus.elements]
    for _ in range(n_samples):
        blocks_coeffs = []
        for _, ctxK, _, from_ctx, _ in bar_data:
            mat2 = _random_sl2(ctxK, rng)
            blocks_coeffs.append(
                tuple(tuple(from_ctx(e) for e in row) for row in mat2)
            )
        test_elements.append(tuple(blocks_coeffs))
    max_dist = 0.0
    for gb in test_elements:
        bar_ops = []
        for (blk, ctxK, to_ctx, from_ctx, bar_rep), coeffs in zip(bar_data, gb):
            gK = [[to_ctx(coeffs[0][0]), to_ctx(coeffs[0][1])],
                  [to_ctx(coeffs[1][0]), to_ctx(coeffs[1][1])]]
            bar_ops.append(bar_rep.weil_op(gK))
        g_global = ms.embed_sl2(gb)
        assert_symplectic(space, g_global, "embedded SL(2, K) element")
        big = rep.weil_op(g_global)
        bar = bar_ops[0]
        for mop in bar_ops[1:]:
            bar = np.kron(bar, mop)
        dist = max_abs(big - U @ bar @ U.conj().T)
        max_dist = max(max_dist, dist)
    return {
        "sigma_identity_checked": sigma_checked,
        "sigma_identity_failures": sigma_failures,
        "psi_identity_checked": psi_checked,
        "psi_identity_failures": psi_failures,
        "n_operator_tests": len(test_elements),
        "max_operator_distance": max_dist,
        "tol": rep.tol,
    }


def _random_sl2(ctxK, rng):
    """Random element of SL(2, K) as a 2 x 2 of ctxK elements."""
    while True:
        a = ctxK.from_int(rng.randrange(ctxK.q))
        b = ctxK.from_int(rng.randrange(ctxK.q))
        c = ctxK.from_int(rng.randrange(ctxK.q))
        if a != ctxK.zero:
            d = ctxK.div(ctxK.add(ctxK.one, ctxK.mul(b, c)), a)
            return ((a, b), (c, d))
        if b != ctxK.zero:
            # det = -bc = 1 fixes c; d free
            c = ctxK.neg(ctxK.inv(b))
            d = ctxK.from_int(rng.randrange(ctxK.q))
            return ((a, b), (c, d))
