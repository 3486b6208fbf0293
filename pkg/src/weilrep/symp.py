"""Symplectic vector spaces over GF(q), maximal tori in Sp(2N), the
module structure (K, V, omega_bar) attached to a torus, and the symplectic
type and rank.

A torus here is always stored as a product of cyclic blocks, one per
irreducible piece of the underlying module: a split block of degree d is a
copy of GF(q^d)^* acting on a Lagrangian pair, an irreducible block of
degree d is the norm-one group of GF(q^(2d)) over GF(q^d) acting by
multiplication operators ("inert" for d = 1).  Elements are enumerated as
generator powers, so character theory and spectral decompositions can refer
to exponent tuples directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import gfq
from . import fqlin as la
from .gfq import FieldCtx, factorize


def standard_gram(ctx, N):
    J = la.zeros(ctx, 2 * N, 2 * N)
    for i in range(N):
        J[i][N + i] = ctx.one
        J[N + i][i] = ctx.neg(ctx.one)
    return J


class SympSpace:
    """A 2N-dimensional symplectic space over GF(q) with a fixed Gram matrix
    (block antidiagonal by default)."""

    def __init__(self, ctx: FieldCtx, N: int, gram=None):
        self.ctx = ctx
        self.N = N
        self.dim = 2 * N
        if gram is None:
            gram = standard_gram(ctx, N)
        gram = la.thaw(gram)
        for i in range(self.dim):
            if gram[i][i] != ctx.zero:
                raise ValueError("gram matrix must have zero diagonal")
            for j in range(self.dim):
                if gram[i][j] != ctx.neg(gram[j][i]):
                    raise ValueError("gram matrix must be antisymmetric")
        self.gram = gram
        self.gram_inv = la.inv(ctx, gram)  # raises if degenerate

    def omega(self, u, v):
        return la.vec_dot(self.ctx, u, la.mat_vec(self.ctx, self.gram, v))

    def zero_vector(self):
        return [self.ctx.zero] * self.dim

    def __repr__(self):
        return f"SympSpace(N={self.N}, {self.ctx!r})"


def symplectic_transpose(space: SympSpace, R):
    """R^t with omega(Rv, u) = omega(v, R^t u); equals gram^-1 R^T gram."""
    ctx = space.ctx
    return la.mat_mul(ctx, space.gram_inv, la.mat_mul(ctx, la.transpose(R), space.gram))


def is_symplectic(space: SympSpace, g) -> bool:
    ctx = space.ctx
    lhs = la.mat_mul(ctx, la.transpose(g), la.mat_mul(ctx, space.gram, g))
    return lhs == space.gram


def assert_symplectic(space: SympSpace, g, what="matrix"):
    if not is_symplectic(space, g):
        raise ValueError(f"{what} does not preserve the symplectic form")


def transvection(space: SympSpace, u, lam):
    """x -> x + lam * omega(x, u) * u, always symplectic."""
    ctx = space.ctx
    Ju = la.mat_vec(ctx, space.gram, u)
    n = space.dim
    T = la.identity(ctx, n)
    for i in range(n):
        if u[i] == ctx.zero:
            continue
        for j in range(n):
            T[i][j] = ctx.add(T[i][j], ctx.mul(lam, ctx.mul(u[i], Ju[j])))
    return T


def random_symplectic(space: SympSpace, rng, n_factors=None):
    """Product of random symplectic transvections."""
    ctx = space.ctx
    if n_factors is None:
        n_factors = space.dim + 1
    g = la.identity(ctx, space.dim)
    for _ in range(n_factors):
        while True:
            u = [ctx.from_int(rng.randrange(ctx.q)) for _ in range(space.dim)]
            if any(x != ctx.zero for x in u):
                break
        lam = ctx.from_int(rng.randrange(1, ctx.q))
        g = la.mat_mul(ctx, g, transvection(space, u, lam))
    return g


# -- torus containers ---------------------------------------------------------


@dataclass(frozen=True)
class BlockInfo:
    """One cyclic block of a torus.

    name:   'split', 'inert', or 'irreducible'
    degree: d, so the block spans d pairs of symplectic coordinates and its
            field of definition K_alpha has degree d over the base field
    order:  q^d - 1 (split) or q^d + 1 (inert/irreducible)
    pairs:  indices of the symplectic coordinate pairs the block occupies,
            or None for tori not built from the standard block layout
    idempotent: projector matrix onto the block subspace (frozen), or None
    """

    name: str
    degree: int
    order: int
    pairs: tuple | None = None
    idempotent: tuple | None = None

    def descriptor(self):
        return {"type": self.name, "degree": self.degree}


@dataclass
class Torus:
    space: SympSpace
    generators: list
    orders: list[int]
    blocks: list[BlockInfo]
    elements: list = field(default_factory=list)
    exponents: list = field(default_factory=list)
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.elements:
            self._enumerate()

    def _enumerate(self):
        ctx = self.space.ctx
        size = 1
        for o in self.orders:
            size *= o
        exps = list(itertools.product(*[range(o) for o in self.orders]))
        self.elements = []
        self.exponents = []
        self.index = {}
        gen_powers = []
        for g, order in zip(self.generators, self.orders):
            powers = [la.identity(ctx, self.space.dim)]
            for _ in range(order - 1):
                powers.append(la.mat_mul(ctx, powers[-1], g))
            gen_powers.append(powers)
        for e in exps:
            m = la.identity(ctx, self.space.dim)
            for powers, ei in zip(gen_powers, e):
                m = la.mat_mul(ctx, m, powers[ei])
            key = la.freeze(m)
            if key in self.index:
                raise ValueError("torus generators are not independent")
            self.index[key] = e
            self.elements.append(key)
            self.exponents.append(e)
        assert len(self.elements) == size

    @property
    def order(self) -> int:
        return len(self.elements)

    def identity_matrix(self):
        return la.freeze(la.identity(self.space.ctx, self.space.dim))

    def contains(self, mat) -> bool:
        return la.freeze(mat) in self.index

    def descriptor(self):
        return {
            "blocks": [b.descriptor() for b in self.blocks],
            "p": self.space.ctx.p,
            "m": self.space.ctx.m,
        }

    def descriptor_string(self):
        parts = []
        for b in self.blocks:
            parts.append(b.name if b.degree == 1 else f"{b.name}{b.degree}")
        return "+".join(parts)


# -- torus construction -------------------------------------------------------


def _scatter_block(space: SympSpace, local, pairs):
    """Place a 2d x 2d block matrix (local coords: e-parts then f-parts)
    into the global 2N x 2N identity at the given coordinate pairs."""
    ctx = space.ctx
    N = space.N
    d = len(pairs)
    glob = la.identity(ctx, space.dim)
    coords = [pairs[i] for i in range(d)] + [N + pairs[i] for i in range(d)]
    for a in range(2 * d):
        for b in range(2 * d):
            glob[coords[a]][coords[b]] = local[a][b]
    for a in range(2 * d):
        glob[coords[a]][coords[a]] = local[a][a]
    return glob


def _companion(ctx, f):
    """Companion matrix of a monic polynomial, acting on column vectors."""
    d = gfq.poly_deg(f)
    C = la.zeros(ctx, d, d)
    for i in range(1, d):
        C[i][i - 1] = ctx.one
    for i in range(d):
        C[i][d - 1] = ctx.neg(f[i])
    return C


def _split_block_generator(space: SympSpace, d: int):
    """Generator of GF(q^d)^* acting on a Lagrangian pair: the companion
    matrix of a primitive polynomial on the e-side, its inverse transpose on
    the f-side."""
    ctx = space.ctx
    if d == 1:
        g0 = ctx.generator
        local = [[g0, ctx.zero], [ctx.zero, ctx.inv(g0)]]
        return local, ctx.q - 1
    h = gfq.find_primitive_irreducible(ctx, d)
    C = _companion(ctx, h)
    Cit = la.transpose(la.inv(ctx, C))
    local = la.zeros(ctx, 2 * d, 2 * d)
    for i in range(d):
        for j in range(d):
            local[i][j] = C[i][j]
            local[d + i][d + j] = Cit[i][j]
    return local, ctx.q**d - 1


def _invariant_symplectic_form(ctx, C):
    """A nonzero invertible antisymmetric G with C^T G C = G."""
    n = len(C)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    pos = {pr: k for k, pr in enumerate(pairs)}

    def gram_from(vecfree):
        G = la.zeros(ctx, n, n)
        for (i, j), k in pos.items():
            G[i][j] = vecfree[k]
            G[j][i] = ctx.neg(vecfree[k])
        return G

    rows = []
    for i, j in pairs:
        # (C^T G C - G)_{ij} as a linear functional of the free entries
        row = [ctx.zero] * len(pairs)
        for a in range(n):
            for b in range(n):
                coeff = ctx.mul(C[a][i], C[b][j])
                if a < b:
                    row[pos[(a, b)]] = ctx.add(row[pos[(a, b)]], coeff)
                elif b < a:
                    row[pos[(b, a)]] = ctx.sub(row[pos[(b, a)]], coeff)
        row[pos[(i, j)]] = ctx.sub(row[pos[(i, j)]], ctx.one)
        rows.append(row)
    basis = la.nullspace(ctx, rows)
    if not basis:
        raise ValueError("no invariant symplectic form")
    # deterministic search for an invertible combination
    for count in range(1, len(basis) + 1):
        for combo in itertools.combinations(range(len(basis)), count):
            vec = [ctx.zero] * len(pairs)
            for idx in combo:
                vec = [ctx.add(a, b) for a, b in zip(vec, basis[idx])]
            G = gram_from(vec)
            if la.det(ctx, G) != ctx.zero:
                return G
    raise ValueError("no invertible invariant form found")  # pragma: no cover


def symplectic_basis(ctx, G):
    """P with P^T G P in standard block-antidiagonal form, for invertible
    antisymmetric G."""
    n = len(G)

    def form(u, v):
        return la.vec_dot(ctx, u, la.mat_vec(ctx, G, v))

    remaining = [row[:] for row in la.identity(ctx, n)]
    es, fs = [], []
    while remaining:
        e = remaining[0]
        f = None
        for cand in remaining[1:]:
            c = form(e, cand)
            if c != ctx.zero:
                f = [ctx.mul(ctx.inv(c), x) for x in cand]
                break
        if f is None:  # pragma: no cover - G invertible prevents this
            raise ValueError("degenerate form")
        es.append(e)
        fs.append(f)
        projected = []
        for x in remaining:
            cf = form(f, x)
            ce = form(e, x)
            y = [
                ctx.add(xi, ctx.sub(ctx.mul(cf, ei), ctx.mul(ce, fi)))
                for xi, ei, fi in zip(x, e, f)
            ]
            if any(v != ctx.zero for v in y):
                projected.append(y)
        if projected:
            red, pivots = la.rref(ctx, projected)
            remaining = [red[i] for i in range(len(pivots))]
        else:
            remaining = []
    cols = es + fs
    return la.transpose(cols)


def _norm_one_block_generator(space: SympSpace, d: int):
    """Generator of the norm-one group of GF(q^(2d)) / GF(q^d) realized as a
    2d x 2d symplectic matrix in standard local coordinates."""
    ctx = space.ctx
    big = FieldCtx(ctx.p, ctx.m * 2 * d)
    emb = gfq.subfield_embedding(ctx, big)
    Q = ctx.q**d
    c = big.pow(big.generator, Q - 1)  # order exactly Q + 1
    # minimal polynomial of c over GF(q)
    h = [big.one]
    conj = c
    for _ in range(2 * d):
        h = gfq.poly_mul(big, h, [big.neg(conj), big.one])
        conj = big.pow(conj, ctx.q)
    assert conj == c
    h_small = [emb.down(coeff) for coeff in h]
    C = _companion(ctx, h_small)
    G = _invariant_symplectic_form(ctx, C)
    P = symplectic_basis(ctx, G)
    Pinv = la.inv(ctx, P)
    local = la.mat_mul(ctx, Pinv, la.mat_mul(ctx, C, P))
    return local, Q + 1


def _normalize_kind(space: SympSpace, kind):
    out = []
    for entry in kind:
        if isinstance(entry, str):
            name, degree = entry, 1
            for prefix in ("split", "inert", "irreducible", "irr"):
                if entry.startswith(prefix) and entry[len(prefix):].isdigit():
                    name, degree = prefix, int(entry[len(prefix):])
                    break
        elif isinstance(entry, dict):
            name, degree = entry["type"], int(entry.get("degree", 1))
        else:
            name, degree = entry[0], int(entry[1])
        if name == "irr":
            name = "irreducible"
        if name not in ("split", "inert", "irreducible"):
            raise ValueError(f"unknown block type {name!r}")
        if name == "inert" and degree != 1:
            raise ValueError("inert blocks have degree 1; use 'irreducible'")
        if degree < 1:
            raise ValueError("block degree must be >= 1")
        out.append((name, degree))
    if sum(2 * d for _, d in out) != space.dim:
        raise ValueError("block dimensions do not sum to 2N")
    return out


def build_maximal_torus(space: SympSpace, kind) -> Torus:
    """Maximal torus of the prescribed symplectic type.

    ``kind`` is a list of block descriptors: 'split', 'inert',
    'irreducible<d>', ('split', d), or {'type': ..., 'degree': ...}.
    """
    blocks = _normalize_kind(space, kind)
    ctx = space.ctx
    generators, orders, infos = [], [], []
    next_pair = 0
    for name, d in blocks:
        pairs = tuple(range(next_pair, next_pair + d))
        next_pair += d
        if name == "split":
            local, order = _split_block_generator(space, d)
        else:
            local, order = _norm_one_block_generator(space, d)
        g = _scatter_block(space, local, pairs)
        assert_symplectic(space, g, f"{name} block generator")
        _assert_order(ctx, g, order)
        e = la.zeros(ctx, space.dim, space.dim)
        for i in pairs:
            e[i][i] = ctx.one
            e[space.N + i][space.N + i] = ctx.one
        generators.append(la.freeze(g))
        orders.append(order)
        infos.append(BlockInfo(name, d, order, pairs, la.freeze(e)))
    return Torus(space, generators, orders, infos)


def _assert_order(ctx, g, order):
    ident = la.identity(ctx, len(g))
    if la.mat_pow(ctx, g, order) != ident:
        raise AssertionError("generator order too large")
    for r, _ in factorize(order):
        if la.mat_pow(ctx, g, order // r) == ident:
            raise AssertionError("generator order too small")


# -- centralizer tori ---------------------------------------------------------


def _poly_compose_mod(ctx, u, s, mod):
    """u(s) mod ``mod`` by Horner."""
    acc = []
    for c in reversed(u):
        acc = gfq.poly_mod(ctx, gfq.poly_add(ctx, gfq.poly_mul(ctx, acc, s), [c]), mod)
    return acc


def _poly_inverse_mod(ctx, u, mod):
    d, a, _ = gfq.poly_extgcd(ctx, u, mod)
    if gfq.poly_deg(d) != 0:
        raise ZeroDivisionError("not invertible in the quotient ring")
    return gfq.poly_mod(ctx, a, mod)


def _crt_lift(ctx, charpoly, targets):
    """Polynomial congruent to targets[f] mod f for each factor f, and to 1
    mod every other factor of charpoly."""
    acc = []
    for f, val in targets.items():
        f = list(f)
        M = gfq.poly_divmod(ctx, charpoly, f)[0]
        Minv = _poly_inverse_mod(ctx, gfq.poly_mod(ctx, M, f), f)
        term = gfq.poly_mul(ctx, gfq.poly_mul(ctx, M, Minv), val)
        acc = gfq.poly_add(ctx, acc, term)
    return gfq.poly_mod(ctx, acc, charpoly)


def _order_test(ctx, c, order, mod):
    one = [ctx.one]
    if gfq.poly_sub(ctx, gfq.poly_pow_mod(ctx, c, order, mod), one):
        return False
    for r, _ in factorize(order):
        if not gfq.poly_sub(ctx, gfq.poly_pow_mod(ctx, c, order // r, mod), one):
            return False
    return True


def _pair_factor_classes(ctx, factors):
    """Group the distinct irreducible factors into self-dual singletons and
    dual pairs under f -> reciprocal of f."""
    polys = [tuple(f) for f, _ in factors]
    seen = set()
    classes = []
    lookup = set(polys)
    for f in polys:
        if f in seen:
            continue
        fd = tuple(gfq.reciprocal_dual(ctx, list(f)))
        if fd == f:
            if gfq.poly_deg(list(f)) == 1:
                raise ValueError(
                    "eigenvalue +1 or -1: element is not regular inside Sp"
                )
            classes.append(("I", f, None))
            seen.add(f)
        else:
            if fd not in lookup:
                raise ValueError("factor set is not closed under duality")
            rep, other = (f, fd) if gfq.poly_to_key(ctx, list(f)) <= gfq.poly_to_key(ctx, list(fd)) else (fd, f)
            if rep in seen:
                continue
            classes.append(("II", rep, other))
            seen.add(rep)
            seen.add(other)
    return classes


def centralizer_torus(space: SympSpace, A) -> Torus:
    """The full commutant of a regular symplectic element inside Sp, as a
    torus of norm-one elements of the algebra GF(q)[A]."""
    ctx = space.ctx
    A = la.thaw(A)
    assert_symplectic(space, A, "centralizer input")
    cp = la.charpoly(ctx, A)
    dcp = gfq.poly_deriv(ctx, cp)
    if gfq.poly_deg(gfq.poly_gcd(ctx, cp, dcp)) != 0:
        raise ValueError("degenerate centralizer: characteristic polynomial not squarefree")
    factors = gfq.factor_poly(ctx, cp)
    classes = _pair_factor_classes(ctx, factors)
    generators, orders, infos = [], [], []
    x = [ctx.zero, ctx.one]
    for typ, f, partner in classes:
        f = list(f)
        if typ == "I":
            twod = gfq.poly_deg(f)
            d = twod // 2
            Q = ctx.q**d
            c = None
            for enc in range(2, ctx.q**twod):
                r = _poly_from_encoding(ctx, enc, twod)
                cand = gfq.poly_pow_mod(ctx, r, Q - 1, f)
                if _order_test(ctx, cand, Q + 1, f):
                    c = cand
                    break
            if c is None:  # pragma: no cover
                raise RuntimeError("no norm-one generator found")
            lift = _crt_lift(ctx, cp, {tuple(f): c})
            order = Q + 1
            name = "inert" if d == 1 else "irreducible"
        else:
            partner = list(partner)
            d = gfq.poly_deg(f)
            order = ctx.q**d - 1
            gamma = None
            for enc in range(2, ctx.q**d):
                r = _poly_from_encoding(ctx, enc, d)
                if _order_test(ctx, gfq.poly_mod(ctx, r, f), order, f):
                    gamma = gfq.poly_mod(ctx, r, f)
                    break
            if gamma is None:  # pragma: no cover
                raise RuntimeError("no unit generator found")
            xinv = _poly_inverse_mod(ctx, x, partner)
            theta_gamma = _poly_compose_mod(ctx, gamma, xinv, partner)
            w = _poly_inverse_mod(ctx, theta_gamma, partner)
            lift = _crt_lift(ctx, cp, {tuple(f): gamma, tuple(partner): w})
            name = "split"
        g = la.mat_eval_poly(ctx, lift, A)
        assert_symplectic(space, g, "centralizer generator")
        _assert_order(ctx, g, order)
        # idempotent cutting out the block subspace
        idem_targets = {tuple(f): [ctx.one]}
        zero_elsewhere = {}
        for other, _ in factors:
            key = tuple(other)
            if key == tuple(f) or (partner is not None and key == tuple(partner)):
                idem_targets[key] = [ctx.one]
            else:
                zero_elsewhere[key] = [ctx.zero]
        idem_poly = _crt_lift_general(ctx, cp, {**idem_targets, **zero_elsewhere})
        e = la.mat_eval_poly(ctx, idem_poly, A)
        generators.append(la.freeze(g))
        orders.append(order)
        infos.append(BlockInfo(name, d, order, None, la.freeze(e)))
    torus = Torus(space, generators, orders, infos)
    if not torus.contains(A):
        raise AssertionError("input element missing from its own centralizer torus")
    return torus


def _crt_lift_general(ctx, charpoly, targets):
    """Polynomial with the prescribed residue mod every factor (all factors
    must be listed)."""
    acc = []
    for f, val in targets.items():
        if not val:
            continue
        f = list(f)
        M = gfq.poly_divmod(ctx, charpoly, f)[0]
        Minv = _poly_inverse_mod(ctx, gfq.poly_mod(ctx, M, f), f)
        term = gfq.poly_mul(ctx, gfq.poly_mul(ctx, M, Minv), val)
        acc = gfq.poly_add(ctx, acc, term)
    return gfq.poly_mod(ctx, acc, charpoly)


def _poly_from_encoding(ctx, enc, max_deg):
    coeffs = []
    while enc:
        coeffs.append(ctx.from_int(enc % ctx.q))
        enc //= ctx.q
    coeffs = coeffs[:max_deg]
    return gfq.poly_trim(ctx, coeffs)


def centralizer_algebra(space: SympSpace, mats):
    """Basis of the algebra of matrices commuting with every matrix in
    ``mats``, as a list of matrices."""
    ctx = space.ctx
    n = space.dim
    rows = []
    for g in mats:
        g = la.thaw(g)
        for i in range(n):
            for j in range(n):
                row = [ctx.zero] * (n * n)
                for k in range(n):
                    row[k * n + j] = ctx.add(row[k * n + j], g[i][k])
                    row[i * n + k] = ctx.sub(row[i * n + k], g[k][j])
                rows.append(row)
    basis = la.nullspace(ctx, rows)
    return [[vec[i * n : (i + 1) * n] for i in range(n)] for vec in basis]


# -- module structure ----------------------------------------------------------


class BlockField:
    """The field K_alpha realized as a commutative matrix subalgebra acting
    on one block of V, with arithmetic in coordinates over the base field.

    Elements are coordinate tuples with respect to a fixed basis of matrices
    whose first member is the block unit (the idempotent)."""

    def __init__(self, space, basis_mats, unit):
        ctx = space.ctx
        self.space = space
        self.ctx = ctx
        self.d = len(basis_mats)
        if la.freeze(basis_mats[0]) != la.freeze(unit):
            basis_mats = [unit] + [b for b in basis_mats if la.freeze(b) != la.freeze(unit)]
            basis_mats = self._independent(basis_mats)
        self.basis = basis_mats
        assert len(self.basis) == self.d
        n = space.dim
        self._bvec = la.transpose([[m[i][j] for i in range(n) for j in range(n)] for m in self.basis])
        self.unit_coords = tuple([ctx.one] + [ctx.zero] * (self.d - 1))
        # structure constants: kappa_i kappa_j in coordinates
        self.table = []
        for i in range(self.d):
            row = []
            for j in range(self.d):
                prod = la.mat_mul(ctx, self.basis[i], self.basis[j])
                row.append(self.coords(prod))
            self.table.append(row)
        # trace of multiplication on K_alpha = half the trace on the block
        half = ctx.inv(ctx.el(2))
        self.trace_row = [ctx.mul(half, la.trace(ctx, b)) for b in self.basis]
        self.size = ctx.q**self.d

    def _independent(self, mats):
        ctx = self.ctx
        vecs = [[m[i][j] for i in range(self.space.dim) for j in range(self.space.dim)] for m in mats]
        _, pivots = la.rref(ctx, la.transpose(vecs))
        return [mats[i] for i in pivots]

    def coords(self, mat):
        flat = [mat[i][j] for i in range(self.space.dim) for j in range(self.space.dim)]
        sol = la.solve(self.ctx, self._bvec, flat)
        if sol is None:
            raise ValueError("matrix does not lie in the block field")
        return tuple(sol)

    def mat(self, coords):
        ctx = self.ctx
        n = self.space.dim
        out = la.zeros(ctx, n, n)
        for c, b in zip(coords, self.basis):
            if c != ctx.zero:
                for i in range(n):
                    for j in range(n):
                        out[i][j] = ctx.add(out[i][j], ctx.mul(c, b[i][j]))
        return out

    # coordinate arithmetic

    def add(self, u, v):
        ctx = self.ctx
        return tuple(ctx.add(a, b) for a, b in zip(u, v))

    def sub(self, u, v):
        ctx = self.ctx
        return tuple(ctx.sub(a, b) for a, b in zip(u, v))

    def neg(self, u):
        ctx = self.ctx
        return tuple(ctx.neg(a) for a in u)

    def scale(self, c, u):
        ctx = self.ctx
        return tuple(ctx.mul(c, a) for a in u)

    @property
    def zero(self):
        return tuple([self.ctx.zero] * self.d)

    @property
    def one(self):
        return self.unit_coords

    def mul(self, u, v):
        ctx = self.ctx
        out = [ctx.zero] * self.d
        for i, ui in enumerate(u):
            if ui == ctx.zero:
                continue
            for j, vj in enumerate(v):
                if vj == ctx.zero:
                    continue
                c = ctx.mul(ui, vj)
                t = self.table[i][j]
                for k in range(self.d):
                    if t[k] != ctx.zero:
                        out[k] = ctx.add(out[k], ctx.mul(c, t[k]))
        return tuple(out)

    def mult_matrix(self, u):
        """d x d matrix of multiplication by u on coordinates."""
        cols = []
        for j in range(self.d):
            ej = tuple(self.ctx.one if k == j else self.ctx.zero for k in range(self.d))
            cols.append(list(self.mul(u, ej)))
        return la.transpose(cols)

    def inv(self, u):
        sol = la.solve(self.ctx, self.mult_matrix(u), list(self.unit_coords))
        if sol is None:
            raise ZeroDivisionError("block field element not invertible")
        return tuple(sol)

    def pow(self, u, e):
        if e < 0:
            return self.pow(self.inv(u), -e)
        out = self.unit_coords
        base = u
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def trace_to_base(self, u):
        """Tr_{K_alpha / GF(q)} as a base field element."""
        ctx = self.ctx
        acc = ctx.zero
        for c, t in zip(u, self.trace_row):
            acc = ctx.add(acc, ctx.mul(c, t))
        return acc

    def legendre(self, u):
        if u == self.zero:
            raise ValueError("Legendre character undefined at zero")
        s = self.pow(u, (self.size - 1) // 2)
        if s == self.unit_coords:
            return 1
        assert s == self.neg(self.unit_coords)
        return -1

    def psi_bar(self, u):
        return self.ctx.psi(self.trace_to_base(u))

    def elements(self):
        for combo in itertools.product(range(self.ctx.q), repeat=self.d):
            yield tuple(self.ctx.from_int(c) for c in combo)

    def as_field_ctx(self):
        """An isomorphic absolute FieldCtx plus coordinate maps both ways."""
        ctx = self.ctx
        abs_deg = ctx.m * self.d
        if abs_deg == ctx.m:
            # K_alpha is the base field itself
            to_ctx = lambda u: ctx.mul(u[0], ctx.one) if False else u[0]
            from_ctx = lambda y: (y,)
            return ctx, (lambda u: u[0]), (lambda y: (y,))
        big = FieldCtx(ctx.p, abs_deg)
        emb = gfq.subfield_embedding(ctx, big)
        # primitive element of K_alpha over the base field
        theta = None
        for enc in range(1, self.size):
            cand = tuple(ctx.from_int((enc // ctx.q**i) % ctx.q) for i in range(self.d))
            powers = [self.unit_coords]
            for _ in range(self.d - 1):
                powers.append(self.mul(powers[-1], cand))
            if len(la.rref(ctx, la.transpose([list(pw) for pw in powers]))[1]) == self.d:
                theta = cand
                theta_powmat = la.transpose([list(pw) for pw in powers])
                break
        if theta is None:  # pragma: no cover
            raise RuntimeError("no primitive element in block field")
        # minimal polynomial of theta over GF(q)
        top = self.pow(theta, self.d)
        rhs = la.solve(ctx, theta_powmat, list(top))
        minpoly = [ctx.neg(c) for c in rhs] + [ctx.one]
        lifted = [emb.up(c) for c in minpoly]
        root = gfq.poly_roots(big, lifted)[0]

        def to_ctx(u):
            a = la.solve(ctx, theta_powmat, list(u))
            acc = big.zero
            cur = big.one
            for c in a:
                acc = big.add(acc, big.mul(emb.up(c), cur))
                cur = big.mul(cur, root)
            return acc

        # invert the GF(p)-linear map coordinates -> big field
        p = ctx.p
        cols = []
        for i in range(self.d):
            for jslot in range(ctx.m):
                base_coeff = ctx.el([0] * jslot + [1])
                u = tuple(base_coeff if k == i else ctx.zero for k in range(self.d))
                cols.append(big.serialize(to_ctx(u)))
        mat_rows = [[cols[c][r] for c in range(abs_deg)] for r in range(abs_deg)]

        def from_ctx(y):
            target = big.serialize(y)
            aug = [mat_rows[r] + [target[r]] for r in range(abs_deg)]
            sol = gfq._solve_mod_p(aug, abs_deg, p)
            if sol is None:
                raise ValueError("element not in the block field image")
            out = []
            for i in range(self.d):
                out.append(ctx.el(sol[i * ctx.m : (i + 1) * ctx.m]))
            return tuple(out)

        return big, to_ctx, from_ctx


class ModBlock:
    """One summand of the module structure: the subspace, its field, the
    distinguished K-basis (E, F) with omega_bar(E, F) = 1, and the K-valued
    form in coordinates."""

    def __init__(self, space, idempotent, bf, v_basis, gram, gram_inv, name):
        self.space = space
        self.idempotent = idempotent
        self.bf = bf
        self.v_basis = v_basis
        self._gram = gram
        self._gram_inv = gram_inv
        self.name = name
        self.degree = bf.d
        ctx = space.ctx
        E = v_basis[0]
        F = None
        for cand in v_basis[1:]:
            c = self.omega_bar(E, cand)
            if c != bf.zero:
                F = self._apply(bf.inv(c), cand)
                break
        if F is None:  # pragma: no cover - nondegeneracy of omega_bar
            raise ValueError("no symplectic partner in block")
        self.E = E
        self.F = F
        assert self.omega_bar(self.E, self.F) == bf.one

    def _apply(self, coords, v):
        return la.mat_vec(self.space.ctx, self.bf.mat(coords), v)

    def project(self, v):
        return la.mat_vec(self.space.ctx, la.thaw(self.idempotent), v)

    def omega_bar(self, u, v):
        """K_alpha-valued symplectic form, in coordinates."""
        ctx = self.space.ctx
        rhs = []
        for kb in self.bf.basis:
            rhs.append(self.space.omega(la.mat_vec(ctx, kb, u), v))
        return tuple(la.mat_vec(ctx, self._gram_inv, rhs))

    def coords_sl2(self, v):
        """(x, y) with v = x E + y F, for v in the block."""
        x = self.omega_bar(v, self.F)
        y = self.omega_bar(self.E, v)
        return x, y

    def from_coords(self, x, y):
        ctx = self.space.ctx
        return [ctx.add(a, b) for a, b in zip(self._apply(x, self.E), self._apply(y, self.F))]

    def element_as_sl2(self, g):
        """The 2 x 2 matrix over K_alpha of a block-preserving K-linear map."""
        ctx = self.space.ctx
        gE = la.mat_vec(ctx, g, self.E)
        gF = la.mat_vec(ctx, g, self.F)
        a, c = self.coords_sl2(gE)
        b, d = self.coords_sl2(gF)
        return ((a, b), (c, d))


class SympModuleStructure:
    """The commutative algebra K = Z(T, End V)^theta with its block
    decomposition, block fields, and the K-linear form omega_bar lifting
    omega through the trace."""

    def __init__(self, torus, blocks, algebra_dim):
        self.torus = torus
        self.space = torus.space
        self.blocks = blocks
        self.algebra_dim = algebra_dim

    @property
    def rank(self) -> int:
        return len(self.blocks)

    def components(self, v):
        return [blk.project(v) for blk in self.blocks]

    def embed_sl2(self, g_blocks):
        """Global matrix of a tuple of 2 x 2 matrices over the block fields
        acting via the (E, F) bases."""
        ctx = self.space.ctx
        n = self.space.dim
        cols = []
        for j in range(n):
            w = [ctx.one if i == j else ctx.zero for i in range(n)]
            out = [ctx.zero] * n
            for blk, gb in zip(self.blocks, g_blocks):
                ((a, b), (c, d)) = gb
                x, y = blk.coords_sl2(blk.project(w))
                nx = blk.bf.add(blk.bf.mul(a, x), blk.bf.mul(b, y))
                ny = blk.bf.add(blk.bf.mul(c, x), blk.bf.mul(d, y))
                piece = blk.from_coords(nx, ny)
                out = [ctx.add(u, v) for u, v in zip(out, piece)]
            cols.append(out)
        return la.transpose(cols)

    def sl2_generators(self):
        """Generators of prod SL(2, K_alpha) as block tuples, for embedding
        tests: elementary unipotents over a K-basis plus the Weyl element."""
        gens = []
        for i, blk in enumerate(self.blocks):
            bf = blk.bf
            for k in range(bf.d):
                kappa = tuple(bf.ctx.one if t == k else bf.ctx.zero for t in range(bf.d))
                for mat2 in (
                    ((bf.one, kappa), (bf.zero, bf.one)),
                    ((bf.one, bf.zero), (kappa, bf.one)),
                ):
                    gens.append(self._one_block(i, mat2))
            weyl = ((bf.zero, bf.one), (bf.neg(bf.one), bf.zero))
            gens.append(self._one_block(i, weyl))
        return gens

    def _one_block(self, i, mat2):
        out = []
        for j, blk in enumerate(self.blocks):
            bf = blk.bf
            if j == i:
                out.append(mat2)
            else:
                out.append(((bf.one, bf.zero), (bf.zero, bf.one)))
        return tuple(out)

    def torus_element_blocks(self, g):
        """Block 2 x 2 matrices over the K_alpha of a torus element."""
        g = la.thaw(g)
        return tuple(blk.element_as_sl2(g) for blk in self.blocks)


def _span_matrices(ctx, coeffs_list, mats, n):
    out = []
    for coeffs in coeffs_list:
        M = la.zeros(ctx, n, n)
        for c, B in zip(coeffs, mats):
            if c != ctx.zero:
                for i in range(n):
                    for j in range(n):
                        M[i][j] = ctx.add(M[i][j], ctx.mul(c, B[i][j]))
        out.append(M)
    return out


def _algebra_min_poly(ctx, unit, kappa, n):
    """Minimal polynomial of kappa within a subalgebra whose identity is
    ``unit`` (monic, constant term first)."""
    vecs = []
    cur = unit
    for _ in range(n * n + 1):
        vecs.append([cur[i][j] for i in range(n) for j in range(n)])
        if len(vecs) > 1:
            sol = la.solve(ctx, la.transpose(vecs[:-1]), vecs[-1])
            if sol is not None:
                return [ctx.neg(c) for c in sol] + [ctx.one]
        cur = la.mat_mul(ctx, cur, kappa)
    raise RuntimeError("no relative minimal polynomial")  # pragma: no cover


def _mat_eval_poly_with_unit(ctx, f, A, unit):
    n = len(A)
    acc = la.zeros(ctx, n, n)
    for c in reversed(f):
        acc = la.mat_mul(ctx, acc, A)
        if c != ctx.zero:
            for i in range(n):
                for j in range(n):
                    acc[i][j] = ctx.add(acc[i][j], ctx.mul(c, unit[i][j]))
    return acc


def _primitive_idempotents(ctx, unit, basis, n):
    """Primitive idempotents of a commutative semisimple matrix algebra, by
    repeatedly splitting along reducible relative minimal polynomials.  A
    piece is certified a field by an element whose minimal polynomial is
    irreducible of the full piece dimension; some certificate always exists
    in a product of fields, so the deterministic scan terminates."""
    work = [(unit, basis)]
    out = []
    while work:
        e, bas = work.pop()
        d = len(bas)
        if d == 1:
            out.append(e)
            continue
        decided = False
        for enc in range(1, ctx.q**d):
            coeffs = [ctx.from_int((enc // ctx.q**i) % ctx.q) for i in range(d)]
            kappa = _span_matrices(ctx, [coeffs], bas, n)[0]
            mp = _algebra_min_poly(ctx, e, kappa, n)
            deg = gfq.poly_deg(mp)
            factors = gfq.factor_poly(ctx, mp)
            if len(factors) == 1 and factors[0][1] == 1:
                if deg == d:
                    out.append(e)  # the piece is a field
                    decided = True
                    break
                continue
            assert all(mult == 1 for _, mult in factors), "algebra not semisimple"
            for f, _ in factors:
                idem_poly = _crt_lift_general(
                    ctx,
                    mp,
                    {tuple(g): ([ctx.one] if g == f else [ctx.zero]) for g, _ in factors},
                )
                ei = _mat_eval_poly_with_unit(ctx, idem_poly, kappa, e)
                assert la.mat_mul(ctx, ei, ei) == ei, "idempotent failed"
                sub = _restrict_basis(ctx, ei, bas, n)
                work.append((ei, sub))
            decided = True
            break
        if not decided:  # pragma: no cover - certificates are dense
            raise RuntimeError("could not decide algebra piece")
    return out


def _restrict_basis(ctx, e, bas, n):
    prods = [la.mat_mul(ctx, e, B) for B in bas]
    vecs = []
    out = []
    for m in prods:
        flat = [m[i][j] for i in range(n) for j in range(n)]
        if any(x != ctx.zero for x in flat):
            trial = vecs + [flat]
            if len(la.rref(ctx, trial)[1]) == len(trial):
                vecs = trial
                out.append(m)
    return out


def module_structure(torus: Torus) -> SympModuleStructure:
    """Compute the canonical decomposition of V under the torus together
    with the block fields and the trace-compatible K-linear form.

    The commutant algebra is split into its primitive idempotents; the
    symplectic transpose pairs them into blocks (a fixed idempotent is an
    inert or irreducible block, a swapped pair is a split block), and the
    fixed subalgebra of each block is its field K_alpha."""
    space = torus.space
    ctx = space.ctx
    n = space.dim
    alg = centralizer_algebra(space, torus.generators)
    if len(alg) != n:
        raise ValueError(
            f"torus does not determine a module structure: centralizer algebra "
            f"has dimension {len(alg)}, expected {n} (torus not maximal, or its "
            f"point group too small over this field)"
        )
    unit = la.identity(ctx, n)
    prim = _primitive_idempotents(ctx, unit, alg, n)
    merged = []
    used = set()
    for e in prim:
        key = la.freeze(e)
        if key in used:
            continue
        te = symplectic_transpose(space, e)
        tkey = la.freeze(te)
        if tkey == key:
            merged.append(e)
            used.add(key)
        else:
            if tkey not in {la.freeze(x) for x in prim}:
                raise AssertionError("transpose of a primitive idempotent escaped")
            merged.append(la.mat_add(ctx, e, te))
            used.add(key)
            used.add(tkey)
    blocks = []
    total_k_dim = 0
    for e in merged:
        v_basis = la.column_space_basis(ctx, e)
        if len(v_basis) % 2:
            raise AssertionError("odd-dimensional block")
        # K_alpha: the theta-fixed part of e * A
        A_alpha = _restrict_basis(ctx, e, alg, n)
        theta_of = [symplectic_transpose(space, B) for B in A_alpha]
        rows = []
        for r in range(n * n):
            i, j = divmod(r, n)
            rows.append(
                [ctx.sub(theta_of[k][i][j], A_alpha[k][i][j]) for k in range(len(A_alpha))]
            )
        fixed_coeffs = la.nullspace(ctx, rows)
        K_alpha = _span_matrices(ctx, fixed_coeffs, A_alpha, n)
        if 2 * len(K_alpha) != len(A_alpha):
            raise AssertionError("block fixed algebra has the wrong dimension")
        total_k_dim += len(K_alpha)
        bf = BlockField(space, _independent_with_unit(space, ctx, e, K_alpha), e)
        gram = [
            [bf.trace_to_base(bf.mul(_unit_vec(bf, i), _unit_vec(bf, j))) for j in range(bf.d)]
            for i in range(bf.d)
        ]
        gram_inv = la.inv(ctx, gram)
        name = _block_type(ctx, torus, e, bf)
        blocks.append(ModBlock(space, la.freeze(e), bf, v_basis, gram, gram_inv, name))
    if total_k_dim != space.N:
        raise ValueError(
            f"fixed subalgebra has total dimension {total_k_dim}, expected {space.N}"
        )
    blocks.sort(key=lambda blk: _block_support_start(ctx, blk))
    ms = SympModuleStructure(torus, blocks, len(alg))
    _validate_module_structure(ms)
    return ms


def _block_support_start(ctx, blk):
    """First coordinate index the block subspace touches, for a stable
    block ordering."""
    return min(
        next(i for i, x in enumerate(v) if x != ctx.zero) for v in blk.v_basis
    )


def _unit_vec(bf, i):
    return tuple(bf.ctx.one if k == i else bf.ctx.zero for k in range(bf.d))


def _independent_with_unit(space, ctx, unit, mats):
    out = [unit]
    n = space.dim
    vecs = [[unit[i][j] for i in range(n) for j in range(n)]]
    for m in mats:
        flat = [m[i][j] for i in range(n) for j in range(n)]
        trial = vecs + [flat]
        if len(la.rref(ctx, trial)[1]) == len(trial):
            out.append(m)
            vecs = trial
    return out


def _block_type(ctx, torus, e, bf):
    """Type of a block, read off the order of the restricted torus: the
    norm-one group of a quadratic extension has order q^d + 1, a split block
    restricts to GF(q^d)^* of order q^d - 1."""
    d = bf.d
    restrictions = set()
    for gkey in torus.elements:
        gb = la.mat_mul(ctx, la.thaw(e), la.thaw(gkey))
        restrictions.add(la.freeze(gb))
    block_order = len(restrictions)
    if block_order == ctx.q**d - 1:
        return "split"
    if block_order == ctx.q**d + 1:
        return "inert" if d == 1 else "irreducible"
    raise AssertionError(f"unexpected block torus order {block_order}")


def _validate_module_structure(ms: SympModuleStructure):
    space = ms.space
    ctx = space.ctx
    n = space.dim
    basis = la.identity(ctx, n)
    # Tr(omega_bar) recovers omega on every basis pair
    for i in range(n):
        for j in range(n):
            u, v = basis[i], basis[j]
            acc = ctx.zero
            for blk in ms.blocks:
                ob = blk.omega_bar(blk.project(u), blk.project(v))
                acc = ctx.add(acc, blk.bf.trace_to_base(ob))
            if acc != space.omega(u, v):
                raise AssertionError("trace of omega_bar does not recover omega")
    # omega_bar is invariant under every torus generator
    for gkey in ms.torus.generators:
        g = la.thaw(gkey)
        for blk in ms.blocks:
            for u in blk.v_basis:
                for v in blk.v_basis:
                    lhs = blk.omega_bar(la.mat_vec(ctx, g, u), la.mat_vec(ctx, g, v))
                    if lhs != blk.omega_bar(u, v):
                        raise AssertionError("omega_bar is not torus-invariant")
    # V_alpha is free of rank 2 over K_alpha via the (E, F) basis
    for blk in ms.blocks:
        spanning = []
        for k in range(blk.bf.d):
            kb = blk.bf.basis[k]
            spanning.append(la.mat_vec(ctx, kb, blk.E))
            spanning.append(la.mat_vec(ctx, kb, blk.F))
        if len(la.rref(ctx, spanning)[1]) != len(blk.v_basis):
            raise AssertionError("(E, F) is not a K-basis of the block")


# -- symplectic rank -----------------------------------------------------------


def rank_from_charpoly(ctx, cp):
    """Block descriptors and symplectic rank read off a squarefree
    characteristic polynomial: factor mod p, pair every irreducible factor
    with its reciprocal dual, count the classes."""
    dcp = gfq.poly_deriv(ctx, cp)
    if gfq.poly_deg(gfq.poly_gcd(ctx, cp, dcp)) != 0:
        raise ValueError("characteristic polynomial is not squarefree")
    factors = gfq.factor_poly(ctx, cp)
    classes = _pair_factor_classes(ctx, factors)
    blocks = []
    for typ, f, _ in classes:
        if typ == "I":
            d = gfq.poly_deg(list(f)) // 2
            blocks.append(BlockInfo("inert" if d == 1 else "irreducible", d, ctx.q**d + 1))
        else:
            d = gfq.poly_deg(list(f))
            blocks.append(BlockInfo("split", d, ctx.q**d - 1))
    return blocks, len(blocks)


def symplectic_rank(torus: Torus, use_full_structure=False):
    """(block descriptors, r).  The cheap path factors the characteristic
    polynomial of a regular torus element; when the torus has no regular
    element (tiny fields), the full module structure is built instead."""
    space = torus.space
    ctx = space.ctx
    if not use_full_structure:
        for gkey in torus.elements:
            g = la.thaw(gkey)
            cp = la.charpoly(ctx, g)
            dcp = gfq.poly_deriv(ctx, cp)
            if gfq.poly_deg(gfq.poly_gcd(ctx, cp, dcp)) == 0:
                try:
                    return rank_from_charpoly(ctx, cp)
                except ValueError:
                    continue
    ms = module_structure(torus)
    blocks = [
        BlockInfo(blk.name, blk.degree, ctx.q**blk.degree + (1 if blk.name != "split" else -1))
        for blk in ms.blocks
    ]
    return blocks, len(blocks)
