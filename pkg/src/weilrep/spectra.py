"""Characters of tori, eigenspace decomposition of the representation
space, multiplicities, projectors, and Wigner matrix coefficients.

A character of a torus with cyclic factor orders (n_1, ..., n_r) is stored
as one exponent per factor; its value on the element with exponent tuple
(j_1, ..., j_r) is the root of unity with phase sum e_k j_k / n_k.
Projectors are built by averaging Weil operators against the conjugate
character; multiplicities are the (integer) traces of the projectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .heiwei import WeilRep
from .symp import Torus


@dataclass(frozen=True)
class TorusCharacter:
    torus: Torus
    exponents: tuple

    def value_at_exponents(self, exps) -> complex:
        phase = 0.0
        for e, j, n in zip(self.exponents, exps, self.torus.orders):
            phase += e * j / n
        return complex(np.exp(2j * np.pi * phase))

    def __call__(self, g) -> complex:
        return self.value_at_exponents(self.torus.index[g])

    def values(self) -> np.ndarray:
        """Values over the full element enumeration, in order."""
        acc = np.zeros(len(self.torus.exponents))
        for k, (e, n) in enumerate(zip(self.exponents, self.torus.orders)):
            js = np.array([exp[k] for exp in self.torus.exponents])
            acc = acc + e * js / n
        return np.exp(2j * np.pi * acc)

    def is_trivial(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def is_quadratic(self) -> bool:
        """All values in {+1, -1} but not all +1."""
        vals = self.values()
        real = np.all(np.abs(vals.imag) < 1e-12) and np.all(
            np.abs(np.abs(vals.real) - 1) < 1e-12
        )
        return bool(real and np.any(vals.real < 0))


def torus_characters(torus: Torus) -> list[TorusCharacter]:
    """The full character group, ordered lexicographically in exponents."""
    return [
        TorusCharacter(torus, exps)
        for exps in itertools.product(*[range(n) for n in torus.orders])
    ]


def sigma_character(torus: Torus) -> TorusCharacter | None:
    """The unique quadratic character of a cyclic torus of even order,
    identified by its values."""
    if len(torus.orders) == 1 and torus.orders[0] % 2 == 0:
        chi = TorusCharacter(torus, (torus.orders[0] // 2,))
        assert chi.is_quadratic()
        return chi
    return None


def sigma_block_character(torus: Torus, alpha: int) -> TorusCharacter | None:
    """The quadratic character of the alpha-th cyclic block, trivial on the
    other blocks."""
    n = torus.orders[alpha]
    if n % 2:
        return None
    exps = tuple(n // 2 if k == alpha else 0 for k in range(len(torus.orders)))
    chi = TorusCharacter(torus, exps)
    assert chi.is_quadratic()
    return chi


@dataclass
class EigenDecomposition:
    rep: WeilRep
    torus: Torus
    characters: list[TorusCharacter]
    multiplicities: dict = field(default_factory=dict)
    projectors: dict = field(default_factory=dict)
    bases: dict = field(default_factory=dict)

    def multiplicity(self, chi: TorusCharacter) -> int:
        return self.multiplicities[chi.exponents]

    def eigenstates(self):
        """(character, unit eigenvector) pairs over all nonzero spaces."""
        for chi in self.characters:
            basis = self.bases[chi.exponents]
            for k in range(basis.shape[1]):
                yield chi, basis[:, k]


def decompose(rep: WeilRep, torus: Torus) -> EigenDecomposition:
    """Projectors P_chi = |T|^-1 sum over g of conj(chi(g)) rho(g), their
    integer traces as multiplicities, and orthonormal eigenbases from the
    projector columns.  The averaging loops are independent per character
    (here batched through one matrix product)."""
    if rep.dim > 343:
        raise ValueError(f"dimension {rep.dim} exceeds the supported bound 343")
    chars = torus_characters(torus)
    ops = np.stack([rep.weil_op(g) for g in torus.elements])
    X = np.stack([chi.values() for chi in chars])
    P_all = np.einsum("ct,txy->cxy", X.conj(), ops) / torus.order
    dec = EigenDecomposition(rep, torus, chars)
    total = 0
    for chi, P in zip(chars, P_all):
        tr = P.trace()
        mult = int(round(tr.real))
        if abs(tr - mult) > 0.01:
            raise RuntimeError(
                f"projector trace {tr} is not an integer: internal inconsistency"
            )
        dec.multiplicities[chi.exponents] = mult
        dec.projectors[chi.exponents] = P
        dec.bases[chi.exponents] = _orthonormal_range(P, mult)
        total += mult
    if total != rep.dim:
        raise RuntimeError(
            f"multiplicities sum to {total}, expected {rep.dim}"
        )
    return dec


def _orthonormal_range(P: np.ndarray, mult: int) -> np.ndarray:
    """Modified Gram-Schmidt on the ``mult`` largest projector columns."""
    if mult == 0:
        return np.zeros((P.shape[0], 0), dtype=np.complex128)
    norms = np.linalg.norm(P, axis=0)
    order = np.argsort(-norms)
    basis = []
    for idx in order:
        v = P[:, idx].copy()
        for b in basis:
            v -= (b.conj() @ v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) == mult:
            break
    if len(basis) != mult:  # pragma: no cover - projector rank equals trace
        raise RuntimeError("projector rank deficient against its trace")
    return np.stack(basis, axis=1)


def wigner(rep: WeilRep, phi, v) -> complex:
    """Matrix coefficient <phi | pi(v, 0) phi> of a unit vector."""
    return rep.wigner(phi, v)


def multiplicity_table_rows(dec: EigenDecomposition):
    """CSV rows (p, m, N, torus_descriptor, chi_exponents, multiplicity)."""
    sp = dec.torus.space
    desc = dec.torus.descriptor_string()
    rows = []
    for chi in dec.characters:
        rows.append(
            (
                sp.ctx.p,
                sp.ctx.m,
                sp.N,
                desc,
                ";".join(str(e) for e in chi.exponents),
                dec.multiplicities[chi.exponents],
            )
        )
    return rows


def expected_multiplicity(torus: Torus, chi: TorusCharacter) -> int:
    """The predicted dimension: product over blocks of 1 for a non-quadratic
    factor, 2 for the quadratic character of a split block, 0 for the
    quadratic character of an inert or irreducible block."""
    m = 1
    for k, block in enumerate(torus.blocks):
        n = torus.orders[k]
        e = chi.exponents[k]
        if n % 2 == 0 and e == n // 2:
            m *= 2 if block.name == "split" else 0
        else:
            m *= 1
    return m
