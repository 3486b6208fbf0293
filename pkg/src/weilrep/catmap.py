"""The quantized torus automorphism at hbar = 1/p: genericity tests for
integer symplectic matrices, Hecke tori mod p, eigenstate and statistical
bound experiments, and the prime-sweep statistics of the symplectic rank.

Every experiment works prime by prime and is pure in its inputs, so sweeps
parallelize over p and reports merge by simple concatenation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import fqlin as la
from . import gfq
from .gfq import FieldCtx
from .heiwei import WeilRep
from .spectra import decompose
from .symp import SympSpace, centralizer_torus, rank_from_charpoly
from .symp import _crt_lift_general  # factor idempotents for the span test

#: a strongly generic element of Sp(4, Z): characteristic polynomial
#: x^4 - 2x^3 - 2x^2 - 2x + 1, irreducible over Q, whose trace resolvent
#: y^2 - 2y - 4 has nonsquare discriminant 20, so the rank statistics follow
#: the order-two Galois group (validated by check_genericity at run time)
CAT4_DEFAULT = (
    (0, 0, 1, 0),
    (0, 1, -2, 0),
    (-1, -1, 0, 2),
    (0, -1, 1, 1),
)

#: the classical two-dimensional cat map
CAT2_DEFAULT = ((2, 1), (1, 1))


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for k in range(2, int(n**0.5) + 1):
        if sieve[k]:
            sieve[k * k :: k] = False
    return [int(p) for p in np.flatnonzero(sieve)]


def _int_J(N: int):
    J = [[0] * (2 * N) for _ in range(2 * N)]
    for i in range(N):
        J[i][N + i] = 1
        J[N + i][i] = -1
    return J


def is_integer_symplectic(mat) -> bool:
    n = len(mat)
    if n % 2:
        return False
    J = _int_J(n // 2)
    lhs = la.mat_mul(la.INT_RING, la.mat_mul(la.INT_RING, la.transpose(mat), J), mat)
    return lhs == J


# -- rational polynomial helpers ------------------------------------------------


def _qpoly_trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def _qpoly_divmod(f, g):
    f = [Fraction(c) for c in f]
    g = [Fraction(c) for c in g]
    q = [Fraction(0)] * max(len(f) - len(g) + 1, 0)
    while len(f) >= len(g) and any(f):
        f = _qpoly_trim(f)
        if len(f) < len(g):
            break
        c = f[-1] / g[-1]
        sh = len(f) - len(g)
        q[sh] = c
        for i, gc in enumerate(g):
            f[sh + i] -= c * gc
        f = f[:-1]
    return q, _qpoly_trim(f)


def _qpoly_gcd(f, g):
    f, g = _qpoly_trim(f), _qpoly_trim(g)
    while g:
        f, g = g, _qpoly_divmod(f, g)[1]
    if f:
        lead = f[-1]
        f = [c / lead for c in f]
    return f


def int_poly_derivative(f):
    return [i * c for i, c in enumerate(f)][1:]


def is_squarefree_over_q(f) -> bool:
    return len(_qpoly_gcd(f, int_poly_derivative(f))) <= 1


def _int_roots(f):
    """Integer roots of a monic integer polynomial (all rational roots are
    integers dividing the constant term)."""
    c0 = f[0]
    if c0 == 0:
        return [0]
    roots = []
    for d in range(1, abs(c0) + 1):
        if abs(c0) % d:
            continue
        for r in (d, -d):
            if sum(c * r**i for i, c in enumerate(f)) == 0:
                roots.append(r)
    return roots


def factor_over_Q(f):
    """Monic integer polynomial of degree <= 4 into monic irreducible
    integer factors (Gauss: rational factors of monic integer polynomials
    clear to integer ones)."""
    f = [int(c) for c in _qpoly_trim(f)]
    if f[-1] != 1:
        raise ValueError("factor_over_Q expects a monic polynomial")
    deg = len(f) - 1
    if deg == 0:
        return []
    if deg == 1:
        return [f]
    roots = _int_roots(f)
    if roots:
        r = roots[0]
        q, rem = _qpoly_divmod(f, [-r, 1])
        assert not rem
        return sorted([[-r, 1]] + factor_over_Q([int(c) for c in q]))
    if deg == 2 or deg == 3:
        return [f]
    if deg != 4:
        raise NotImplementedError("exact rational factorization only up to degree 4")
    e0, e1, e2, e3 = f[0], f[1], f[2], f[3]
    for b in _divisors_signed(e0):
        if e0 % b:
            continue
        d = e0 // b
        # (x^2 + a x + b)(x^2 + c x + d): a + c = e3, b + d + ac = e2,
        # ad + bc = e1, bd = e0
        if b == d:
            # a, c are the roots of t^2 - e3 t + (e2 - 2b)
            disc = e3 * e3 - 4 * (e2 - 2 * b)
            if disc < 0 or not _is_square(disc):
                continue
            s = math.isqrt(disc)
            for a in ((e3 + s) // 2, (e3 - s) // 2):
                c = e3 - a
                if (e3 + s) % 2 == 0 and a * d + b * c == e1 and b + d + a * c == e2:
                    return sorted([[b, a, 1], [d, c, 1]])
        else:
            num = e1 - e3 * b
            den = d - b
            if num % den:
                continue
            a = num // den
            c = e3 - a
            if b + d + a * c == e2 and a * d + b * c == e1:
                return sorted([[b, a, 1], [d, c, 1]])
    return [f]


def _divisors_signed(n):
    out = []
    for d in range(1, abs(n) + 1):
        if abs(n) % d == 0:
            out.extend((d, -d))
    return out


def _is_square(n):
    return n >= 0 and math.isqrt(n) ** 2 == n


def _reciprocal_int(f):
    if f[0] == 0:
        raise ValueError("zero constant term")
    rev = list(reversed(f))
    if rev[-1] < 0:
        rev = [-c for c in rev]
    # normalize to monic over Q; factors of monic reciprocal polys stay monic
    if rev[-1] != 1:
        if any(c % rev[-1] for c in rev):
            return None
        rev = [c // rev[-1] for c in rev]
    return rev


@dataclass
class LatticeAutomorphism:
    """An element of Sp(2N, Z) with its integral characteristic polynomial
    and genericity flags."""

    mat: tuple
    charpoly: list[int] = field(default_factory=list)
    regular: bool = False
    strongly_generic: bool = False
    generic: bool = False

    def __post_init__(self):
        mat = [list(row) for row in self.mat]
        if not is_integer_symplectic(mat):
            raise ValueError("matrix is not integer symplectic")
        self.mat = tuple(tuple(int(x) for x in row) for row in mat)
        self.charpoly = la.charpoly(la.INT_RING, mat)
        flags = check_genericity_from_charpoly(self.charpoly)
        self.regular = flags["regular"]
        self.strongly_generic = flags["strongly_generic"]
        self.generic = flags["generic"]

    @property
    def N(self) -> int:
        return len(self.mat) // 2

    def mod_p(self, space: SympSpace):
        ctx = space.ctx
        return [[ctx.el(x) for x in row] for row in self.mat]


def check_genericity(mat) -> dict:
    """Genericity flags of an integer symplectic matrix: regular means
    squarefree characteristic polynomial over Q; strongly generic means
    irreducible over Q; generic means regular with every rational
    irreducible factor equal to its own reciprocal (no invariant rational
    isotropic subspace)."""
    A = LatticeAutomorphism(tuple(tuple(row) for row in mat))
    return {
        "regular": A.regular,
        "strongly_generic": A.strongly_generic,
        "generic": A.generic,
        "charpoly": A.charpoly,
    }


def check_genericity_from_charpoly(cp) -> dict:
    regular = is_squarefree_over_q(cp)
    factors = factor_over_Q(cp) if regular else None
    strongly = bool(regular and factors is not None and len(factors) == 1)
    generic = False
    if regular:
        generic = all(_reciprocal_int(g) == g for g in factors)
    return {"regular": regular, "strongly_generic": strongly, "generic": generic}


# -- per-prime experiment core ---------------------------------------------------


def skip_reason(A: LatticeAutomorphism, p: int) -> str | None:
    if p == 2:
        return "p = 2 (odd characteristic only)"
    if p == 3 and A.N == 1:
        return "p = 3 with dim V = 2 (linearization not unique)"
    ctx = FieldCtx(p)
    cp = [ctx.el(c) for c in A.charpoly]
    cp = gfq.poly_trim(ctx, cp)
    dcp = gfq.poly_deriv(ctx, cp)
    if gfq.poly_deg(gfq.poly_gcd(ctx, cp, dcp)) != 0:
        return "p divides disc(charpoly)"
    return None


class HeckeContext:
    """Everything one prime's experiments share: the Hecke torus, the
    eigenstate matrix with character bookkeeping, the batched Wigner table,
    and the admissibility and support masks over the exponent window."""

    def __init__(self, A: LatticeAutomorphism, p: int, xi_max: int | None = None):
        self.A = A
        self.p = p
        self.N = A.N
        ctx = FieldCtx(p)
        self.space = SympSpace(ctx, A.N)
        self.ctx = ctx
        Amod = A.mod_p(self.space)
        self.torus = centralizer_torus(self.space, Amod)
        self.A_mod = la.freeze(Amod)
        self.rep = WeilRep(self.space)
        self.dec = decompose(self.rep, self.torus)
        states = []
        self.state_char = []
        self.state_mult = []
        for chi in self.dec.characters:
            basis = self.dec.bases[chi.exponents]
            m = self.dec.multiplicity(chi)
            for k in range(m):
                states.append(basis[:, k])
                self.state_char.append(chi)
                self.state_mult.append(m)
        self.states = np.stack(states, axis=1)
        self.wigner = self.rep.wigner_batch(self.states)
        self.rank = len(self.torus.blocks)
        # exponent window
        if xi_max is None:
            xi_max = p
        self.xi_max = xi_max
        n = 2 * A.N
        grids = np.meshgrid(*([np.arange(xi_max)] * n), indexing="ij")
        XI = np.stack([g.ravel() for g in grids], axis=1)
        Vmod = XI % p
        nonzero = Vmod.any(axis=1)
        self.xi = XI[nonzero]
        self.vmod = Vmod[nonzero]
        qpow = p ** np.arange(A.N, dtype=np.int64)
        a_idx = (self.vmod[:, : A.N] * qpow).sum(axis=1)
        b_idx = (self.vmod[:, A.N :] * qpow).sum(axis=1)
        self.v_index = a_idx * (p**A.N) + b_idx
        self.admissible = self._span_mask()
        self.block_masks, self.block_factors = self._support_masks()
        # per-xi assembled bound: product over supporting blocks of
        # 2 sqrt(p^(N_alpha)) / |T_alpha|
        bounds = np.ones(len(self.vmod))
        for mask, circ in zip(self.block_masks.T, self.block_factors):
            bounds = np.where(mask, bounds * circ, bounds)
        self.xi_bound = bounds

    def _span_mask(self):
        """The orbit of xi spans V iff its component in every irreducible
        constituent is nonzero; constituents are cut by the idempotents of
        the individual irreducible factors of the characteristic polynomial."""
        ctx = self.ctx
        cp = gfq.poly_trim(ctx, [ctx.el(c) for c in self.A.charpoly])
        factors = gfq.factor_poly(ctx, cp)
        ok = np.ones(len(self.vmod), dtype=bool)
        for f, _ in factors:
            targets = {
                tuple(g): ([ctx.one] if g == f else [ctx.zero]) for g, _ in factors
            }
            e = la.mat_eval_poly(ctx, _crt_lift_general(ctx, cp, targets), la.thaw(self.A_mod))
            E = np.array(e, dtype=np.int64)
            comp = (self.vmod @ E.T) % self.p
            ok &= comp.any(axis=1)
        return ok

    def _support_masks(self):
        masks = []
        factors = []
        for blk in self.torus.blocks:
            E = np.array(la.thaw(blk.idempotent), dtype=np.int64)
            comp = (self.vmod @ E.T) % self.p
            masks.append(comp.any(axis=1))
            factors.append(2 * math.sqrt(self.p**blk.degree) / blk.order)
        return np.stack(masks, axis=1), factors


def hecke_que_experiment(A: LatticeAutomorphism, p: int, xi_max: int | None = None):
    """Check, for one prime, every Hecke eigenstate against the assembled
    per-block bound over the exponent window.  Returns a summary row."""
    reason = skip_reason(A, p)
    if reason is not None:
        return {"p": p, "skipped": reason}
    hc = HeckeContext(A, p, xi_max)
    adm = hc.admissible
    W = np.abs(hc.wigner[:, hc.v_index[adm]])
    bound = hc.xi_bound[adm]
    mults = np.array(hc.state_mult)
    ratios_sharp = W / (mults[:, None] * bound[None, :])
    ratios_plain = W / bound[None, :]
    scaled = W * math.sqrt(p**hc.N)
    row = {
        "p": p,
        "skipped": None,
        "r_p": hc.rank,
        "torus_order": hc.torus.order,
        "torus": hc.torus.descriptor_string(),
        "n_eigenstates": hc.states.shape[1],
        "n_xi": len(hc.vmod),
        "n_xi_excluded": int((~adm).sum()),
        "max_ratio": float(ratios_sharp.max()),
        "max_ratio_plain": float(ratios_plain.max()),
        "violations": int((ratios_sharp > 1 + 1e-9).sum()),
        "max_scaled_wigner": float(scaled.max()),
    }
    return row


def statistical_state_experiment(A: LatticeAutomorphism, p: int, xi_max: int | None = None):
    """The same sweep at the level of the density operators D of the
    eigenspaces of the quantized automorphism."""
    reason = skip_reason(A, p)
    if reason is not None:
        return {"p": p, "skipped": reason}
    hc = HeckeContext(A, p, xi_max)
    # group characters by their value on A: these cut the eigenspaces
    exps_A = hc.torus.index[hc.A_mod]
    L = math.lcm(*hc.torus.orders)
    groups = {}
    for s, chi in enumerate(hc.state_char):
        phase = sum(
            e * j * (L // n)
            for e, j, n in zip(chi.exponents, exps_A, hc.torus.orders)
        ) % L
        groups.setdefault(phase, []).append(s)
    adm = hc.admissible
    bound = hc.xi_bound[adm]
    max_ratio = 0.0
    violations = 0
    trace_dev = 0.0
    for phase, state_ids in groups.items():
        m_lambda = len(state_ids)
        vals = hc.wigner[state_ids][:, hc.v_index[adm]].sum(axis=0) / m_lambda
        ratios = np.abs(vals) / bound
        max_ratio = max(max_ratio, float(ratios.max()))
        violations += int((ratios > 1 + 1e-9).sum())
        # Tr(D) = (1/m) sum of <phi|phi> = 1 up to roundoff
        norms = np.linalg.norm(hc.states[:, state_ids], axis=0) ** 2
        trace_dev = max(trace_dev, abs(norms.sum() / m_lambda - 1.0))
    return {
        "p": p,
        "skipped": None,
        "r_p": hc.rank,
        "torus_order": hc.torus.order,
        "n_eigenspaces": len(groups),
        "max_ratio": max_ratio,
        "violations": violations,
        "trace_deviation": trace_dev,
    }


def observable_bound_check(A: LatticeAutomorphism, p: int, observables=None):
    """Triangle-inequality form of the equidistribution statement for a few
    fixed trigonometric polynomials f = sum of a_xi xi: every Hecke state
    satisfies |<phi|pi(f)phi> - a_0| <= sum over xi != 0 of |a_xi| bound_xi."""
    reason = skip_reason(A, p)
    if reason is not None:
        return {"p": p, "skipped": reason}
    hc = HeckeContext(A, p)
    if observables is None:
        observables = default_observables(A.N)
    index_of = {tuple(x): k for k, x in enumerate(map(tuple, hc.xi))}
    rows = []
    for obs in observables:
        a0 = complex(obs.get((0,) * (2 * A.N), 0.0))
        acc = np.full(hc.states.shape[1], a0, dtype=np.complex128)
        rhs = 0.0
        usable = True
        for xi, coeff in obs.items():
            if not any(x % p for x in xi):
                continue
            k = index_of.get(tuple(x % p for x in xi))
            if k is None or not hc.admissible[k]:
                usable = False
                break
            acc += coeff * hc.wigner[:, hc.v_index[k]]
            rhs += abs(coeff) * hc.xi_bound[k]
        if not usable:
            rows.append({"observable": _obs_name(obs), "skipped": "inadmissible exponent"})
            continue
        lhs = np.abs(acc - a0).max()
        rows.append(
            {
                "observable": _obs_name(obs),
                "max_deviation": float(lhs),
                "bound": rhs,
                "ok": bool(lhs <= rhs + 1e-9),
            }
        )
    return {"p": p, "skipped": None, "rows": rows}


def _obs_name(obs):
    return "+".join(
        f"{c:.3g}*e({','.join(str(x) for x in xi)})" for xi, c in sorted(obs.items())
    )


def default_observables(N: int):
    """Three real trigonometric polynomials with small frequencies."""
    zero = (0,) * (2 * N)
    e1 = tuple([1] + [0] * (2 * N - 1))
    e2 = tuple([0] * (2 * N - 1) + [1])
    mix = tuple([1] * (2 * N))
    minus = lambda xi: tuple(-x for x in xi)
    return [
        {e1: 0.5, minus(e1): 0.5},
        {zero: 1.0, e2: 0.5, minus(e2): 0.5},
        {mix: 0.5, minus(mix): 0.5, e1: 0.25, minus(e1): 0.25},
    ]


# -- rank statistics --------------------------------------------------------------


def rank_density_sweep(A: LatticeAutomorphism, max_prime: int):
    """Empirical frequencies of the symplectic rank over all usable odd
    primes up to max_prime, from characteristic polynomial factorization
    alone (no representation is built)."""
    if not A.regular:
        raise ValueError("rank sweep needs a regular element")
    counts: dict[int, int] = {}
    half_counts: dict[int, int] = {}
    skipped = []
    used = 0
    half_limit = max_prime // 2
    for p in primes_up_to(max_prime):
        if p == 2:
            continue
        ctx = FieldCtx(p)
        cp = gfq.poly_trim(ctx, [ctx.el(c) for c in A.charpoly])
        dcp = gfq.poly_deriv(ctx, cp)
        if gfq.poly_deg(gfq.poly_gcd(ctx, cp, dcp)) != 0:
            skipped.append(p)
            continue
        _, r = rank_from_charpoly(ctx, cp)
        counts[r] = counts.get(r, 0) + 1
        if p <= half_limit:
            half_counts[r] = half_counts.get(r, 0) + 1
        used += 1
    freqs = {r: c / used for r, c in sorted(counts.items())}
    half_used = sum(half_counts.values())
    half_freqs = {r: c / half_used for r, c in sorted(half_counts.items())} if half_used else {}
    return {
        "max_prime": max_prime,
        "n_primes": used,
        "skipped": skipped,
        "counts": counts,
        "freqs": freqs,
        "half_freqs": half_freqs,
    }
