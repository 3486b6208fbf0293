"""Dense exact linear algebra over a FieldCtx (or any ring exposing
zero/one/add/sub/neg/mul, plus inv for field-only routines).

Matrices are lists of row lists; vectors are flat lists.  ``freeze`` turns a
matrix into nested tuples for hashing and dictionary keys.
"""

from __future__ import annotations


class IntRing:
    """Ring interface over the plain integers (for characteristic
    polynomials of lattice automorphisms)."""

    zero = 0
    one = 1

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def mul(a, b):
        return a * b


INT_RING = IntRing()


def freeze(mat):
    return tuple(tuple(row) for row in mat)


def thaw(mat):
    return [list(row) for row in mat]


def identity(ctx, n):
    return [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]


def zeros(ctx, nrows, ncols):
    return [[ctx.zero] * ncols for _ in range(nrows)]


def mat_add(ctx, A, B):
    return [[ctx.add(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(ctx, A, B):
    return [[ctx.sub(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_neg(ctx, A):
    return [[ctx.neg(a) for a in row] for row in A]


def mat_scale(ctx, c, A):
    return [[ctx.mul(c, a) for a in row] for row in A]


def transpose(A):
    return [list(col) for col in zip(*A)]


def mat_mul(ctx, A, B):
    n, k = len(A), len(B)
    m = len(B[0])
    Bt = list(zip(*B))
    out = []
    for i in range(n):
        row = A[i]
        out_row = []
        for j in range(m):
            col = Bt[j]
            acc = ctx.zero
            for t in range(k):
                acc = ctx.add(acc, ctx.mul(row[t], col[t]))
            out_row.append(acc)
        out.append(out_row)
    return out


def mat_vec(ctx, A, v):
    out = []
    for row in A:
        acc = ctx.zero
        for a, x in zip(row, v):
            acc = ctx.add(acc, ctx.mul(a, x))
        out.append(acc)
    return out


def vec_dot(ctx, u, v):
    acc = ctx.zero
    for a, b in zip(u, v):
        acc = ctx.add(acc, ctx.mul(a, b))
    return acc


def mat_pow(ctx, A, e: int):
    n = len(A)
    result = identity(ctx, n)
    base = [row[:] for row in A]
    if e < 0:
        base = inv(ctx, base)
        e = -e
    while e:
        if e & 1:
            result = mat_mul(ctx, result, base)
        base = mat_mul(ctx, base, base)
        e >>= 1
    return result


def mat_eval_poly(ctx, f, A):
    """f(A) for a coefficient list f (constant term first)."""
    n = len(A)
    acc = zeros(ctx, n, n)
    for c in reversed(f):
        acc = mat_mul(ctx, acc, A)
        for i in range(n):
            acc[i][i] = ctx.add(acc[i][i], c)
    return acc


def trace(ctx, A):
    acc = ctx.zero
    for i in range(len(A)):
        acc = ctx.add(acc, A[i][i])
    return acc


def rref(ctx, M):
    """Reduced row echelon form (a copy) and the pivot column list."""
    R = [row[:] for row in M]
    nrows = len(R)
    ncols = len(R[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if R[i][c] != ctx.zero:
                pivot = i
                break
        if pivot is None:
            continue
        R[r], R[pivot] = R[pivot], R[r]
        inv_p = ctx.inv(R[r][c])
        R[r] = [ctx.mul(inv_p, x) for x in R[r]]
        for i in range(nrows):
            if i != r and R[i][c] != ctx.zero:
                f = R[i][c]
                R[i] = [ctx.sub(a, ctx.mul(f, b)) for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return R, pivots


def rank(ctx, M):
    return len(rref(ctx, M)[1])


def inv(ctx, A):
    n = len(A)
    aug = [list(A[i]) + identity(ctx, n)[i] for i in range(n)]
    R, pivots = rref(ctx, aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in R[:n]]


def det(ctx, A):
    """Determinant by elimination with row pivoting."""
    n = len(A)
    M = [row[:] for row in A]
    d = ctx.one
    for c in range(n):
        pivot = None
        for i in range(c, n):
            if M[i][c] != ctx.zero:
                pivot = i
                break
        if pivot is None:
            return ctx.zero
        if pivot != c:
            M[c], M[pivot] = M[pivot], M[c]
            d = ctx.neg(d)
        d = ctx.mul(d, M[c][c])
        inv_p = ctx.inv(M[c][c])
        for i in range(c + 1, n):
            if M[i][c] != ctx.zero:
                f = ctx.mul(M[i][c], inv_p)
                M[i] = [ctx.sub(a, ctx.mul(f, b)) for a, b in zip(M[i], M[c])]
    return d


def solve(ctx, A, b):
    """One solution of A x = b, or None if inconsistent."""
    ncols = len(A[0])
    aug = [list(row) + [bv] for row, bv in zip(A, b)]
    R, pivots = rref(ctx, aug)
    pivots = [c for c in pivots if c < ncols]
    for i in range(len(pivots), len(R)):
        if R[i][-1] != ctx.zero:
            return None
    x = [ctx.zero] * ncols
    for i, c in enumerate(pivots):
        x[c] = R[i][-1]
    return x


def nullspace(ctx, A):
    """Basis of the right kernel, one vector per free column."""
    ncols = len(A[0])
    R, pivots = rref(ctx, A)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [ctx.zero] * ncols
        v[free] = ctx.one
        for i, c in enumerate(pivots):
            v[c] = ctx.neg(R[i][free])
        basis.append(v)
    return basis


def column_space_basis(ctx, A):
    """The original columns of A sitting at the pivot positions."""
    _, pivots = rref(ctx, A)
    cols = transpose(A)
    return [cols[c] for c in pivots]


def charpoly(ctx, A):
    """Characteristic polynomial det(xI - A) by the division-free Berkowitz
    algorithm; coefficients constant term first, leading coefficient one.

    Works over any commutative ring (FieldCtx or INT_RING).
    """
    n = len(A)
    if n == 0:
        return [ctx.one]
    # polys[k]: char poly (leading coeff first) of the k x k leading block
    poly = [ctx.one, ctx.neg(A[0][0])]
    for k in range(2, n + 1):
        a = A[k - 1][k - 1]
        R = A[k - 1][: k - 1]
        C = [A[i][k - 1] for i in range(k - 1)]
        M = [row[: k - 1] for row in A[: k - 1]]
        # Toeplitz column: [1, -a, -R C, -R M C, -R M^2 C, ...]
        t = [ctx.one, ctx.neg(a)]
        cur = C
        for _ in range(k - 1):
            t.append(ctx.neg(vec_dot(ctx, R, cur)))
            cur = mat_vec(ctx, M, cur)
        new = [ctx.zero] * (k + 1)
        for i in range(k + 1):
            acc = ctx.zero
            for j in range(len(poly)):
                sh = i - j
                if 0 <= sh < len(t):
                    acc = ctx.add(acc, ctx.mul(t[sh], poly[j]))
            new[i] = acc
        poly = new
    return list(reversed(poly))


def matrix_min_poly(ctx, A):
    """Minimal polynomial via the first linear dependency among powers of A,
    coefficients constant term first, monic."""
    n = len(A)
    vecs = []  # flattened powers of A
    cur = identity(ctx, n)
    for _ in range(n * n + 1):
        vecs.append([x for row in cur for x in row])
        # first dependency: solve vecs[:-1]^T c = vecs[-1]
        if len(vecs) > 1:
            c = solve(ctx, transpose(vecs[:-1]), vecs[-1])
            if c is not None:
                return [ctx.neg(ci) for ci in c] + [ctx.one]
        cur = mat_mul(ctx, cur, A)
    raise RuntimeError("no minimal polynomial found")  # pragma: no cover
