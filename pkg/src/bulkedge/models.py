"""Symmetry-compatible tight-binding Hamiltonians as crossed-product elements.

The honeycomb lattice is packed onto Z^2 with a two-site (A, B) cell. Nearest
neighbours of A(n) are B(n), B(n - e1), B(n - e2); next-nearest hops connect
equal sublattices across the cell vectors.  Disorder is an on-site scalar per
(cell, sublattice), which preserves time reversal in the doubled model.
"""

from dataclasses import dataclass, field

import numpy as np

from . import crossed as cr
from .clifford import KODegree
from .crossed import Block, Cocycle, Const, CrossedElement, SiteDiag
from .disorder import DisorderSpace
from .errors import StructureError, SymmetryError


@dataclass(frozen=True)
class ModelParams:
    """Named parameters; gaps are verified at runtime, never assumed."""

    t: float = 1.0
    t2: float = 0.0
    phi: float = 0.0
    M: float = 0.0
    rashba: float = 0.0
    W: float = 0.0
    mu: float = 0.0


# next-nearest-neighbour vectors picking up the +phi phase on the A sublattice
_NNN_PLUS = ((-1, 0), (0, 1), (1, -1))
# bond angles of the three A-B links (cell, +e1, +e2), used by the Rashba template
_NN_BONDS = (((0, 0), 0.5 * np.pi), ((1, 0), 0.5 * np.pi + 2 * np.pi / 3),
             ((0, 1), 0.5 * np.pi - 2 * np.pi / 3))


def haldane(params: ModelParams, space: DisorderSpace) -> CrossedElement:
    """Haldane Hamiltonian with staggered mass and on-site disorder (d=2, nu=2)."""
    if space.d != 2:
        raise StructureError("haldane model needs a two-dimensional space")
    if space.channels < 2:
        raise StructureError("haldane disorder needs one channel per sublattice")
    coc = Cocycle(d=2)
    t, t2, phi, M = params.t, params.t2, params.phi, params.M
    up = t2 * np.exp(1j * phi)
    dn = t2 * np.exp(-1j * phi)
    dt = np.complex128
    terms = {
        ((0, 0), 0): Const([[M, t], [t, -M]], dt),
        ((1, 0), 0): Const([[dn, t], [0.0, up]], dt),
        ((-1, 0), 0): Const([[up, 0.0], [t, dn]], dt),
        ((0, 1), 0): Const([[up, t], [0.0, dn]], dt),
        ((0, -1), 0): Const([[dn, 0.0], [t, up]], dt),
        ((1, -1), 0): Const([[up, 0.0], [0.0, dn]], dt),
        ((-1, 1), 0): Const([[dn, 0.0], [0.0, up]], dt),
    }
    if params.W != 0.0:
        disorder = SiteDiag(channels=(0, 1), scale=1.0, dtype=dt)
        terms[((0, 0), 0)] = cr.Sum((terms[((0, 0), 0)], disorder))
    h = CrossedElement(d=2, nu=2, field="complex", cocycle=coc, space=space,
                       terms=terms).pruned()
    if not cr.symbolically_equal(h.adjoint(), h):
        raise StructureError("haldane assembly is not self-adjoint")
    return h


def atomic_limit(params: ModelParams, space: DisorderSpace) -> CrossedElement:
    """Decoupled-site insulator: the staggered mass only, no hopping."""
    return haldane(ModelParams(t=0.0, t2=0.0, M=params.M or 1.0, W=params.W), space)


def rashba_template(space: DisorderSpace, r: float) -> CrossedElement:
    """Nearest-neighbour spin-mixing block, antisymmetrized so transpose(g) = -g."""
    coc = Cocycle(d=2)
    dt = np.complex128
    terms = {}
    for (m, angle) in _NN_BONDS:
        terms[(m, 0)] = Const([[0.0, 1j * r * np.exp(1j * angle)], [0.0, 0.0]], dt)
    raw = CrossedElement(d=2, nu=2, field="complex", cocycle=coc, space=space, terms=terms)
    return (raw - raw.transpose()).scale(0.5)


@dataclass(frozen=True)
class SymmetryData:
    """Anti-unitary and chiral symmetry flags with their operator matrices.

    Anti-unitary operators are stored as the unitary part; composition with
    entrywise conjugation is implied.  'even'/'odd' refer to the square of the
    full anti-unitary operator being +1 or -1.
    """

    trs: str = "none"        # none | even | odd
    phs: str = "none"
    chiral: str = "none"     # none | present
    trs_matrix: np.ndarray = None
    phs_matrix: np.ndarray = None
    chiral_matrix: np.ndarray = None
    fieldmode: str = field(default=None)

    def __post_init__(self):
        for name, val in (("trs", self.trs), ("phs", self.phs)):
            if val not in ("none", "even", "odd"):
                raise SymmetryError(f"{name} flag must be none/even/odd, got {val!r}")
        if self.chiral not in ("none", "present"):
            raise SymmetryError(f"chiral flag must be none/present, got {self.chiral!r}")
        if self.fieldmode is None:
            mode = "real" if (self.trs != "none" or self.phs != "none") else "complex"
            object.__setattr__(self, "fieldmode", mode)
        for flag, mat, parity in ((self.trs, self.trs_matrix, self.trs),
                                  (self.phs, self.phs_matrix, self.phs)):
            if flag != "none" and mat is not None:
                sq = np.asarray(mat) @ np.asarray(mat).conj()
                want = np.eye(sq.shape[0]) * (1.0 if parity == "even" else -1.0)
                if not np.allclose(sq, want, atol=1e-12):
                    raise SymmetryError(f"anti-unitary square is not {parity}")
        if self.chiral == "present" and self.chiral_matrix is not None:
            sq = np.asarray(self.chiral_matrix) @ np.asarray(self.chiral_matrix)
            if not np.allclose(sq, np.eye(sq.shape[0]), atol=1e-12):
                raise SymmetryError("chiral operator must square to +1")


# Table rows: (trs, phs, chiral) -> degree.  Combinations with both anti-unitary
# symmetries force the chiral flag (their product); a chiral flag with exactly
# one anti-unitary symmetry present is inconsistent.
_REAL_ROWS = {
    ("even", "none", "none"): 0,
    ("even", "even", "present"): 1,
    ("none", "even", "none"): 2,
    ("odd", "even", "present"): 3,
    ("odd", "none", "none"): 4,
    ("odd", "odd", "present"): 5,
    ("none", "odd", "none"): 6,
    ("even", "odd", "present"): 7,
}


def classify(sym: SymmetryData) -> KODegree:
    """Symmetry flags to the K-theory degree of the bulk invariant."""
    key = (sym.trs, sym.phs, sym.chiral)
    if sym.trs == "none" and sym.phs == "none":
        return KODegree(j=0 if sym.chiral == "none" else 1, field="complex")
    if key in _REAL_ROWS:
        return KODegree(j=_REAL_ROWS[key], field="real")
    if sym.trs != "none" and sym.phs != "none":
        raise SymmetryError("both anti-unitary symmetries present: chiral flag is forced")
    raise SymmetryError("chiral flag inconsistent with a single anti-unitary symmetry")


def kane_mele(h: CrossedElement, rashba: float, space: DisorderSpace,
              g: CrossedElement = None):
    """Doubled Hamiltonian [[h, g], [g*, conj(h)]] with odd time reversal.

    The lower-left block is the adjoint of g; time-reversal invariance is
    equivalent to transpose(g) = -g, which the default template satisfies by
    construction.  A custom g violating the constraint is rejected.
    """
    if h.field != "complex" or h.nu != 2:
        raise StructureError("kane_mele expects a complex rank-2 bulk block")
    if g is None:
        g = rashba_template(space, rashba)
    if not cr.symbolically_equal(g.transpose().scale(-1.0), g):
        raise SymmetryError("rashba block must satisfy transpose(g) = -g")
    hbar = h.conjugate()
    gadj = g.adjoint()
    terms = {}
    blocks = {"h": h, "g": g, "ga": gadj, "hb": hbar}
    keys = set()
    for el in blocks.values():
        keys |= set(el.terms)
    for (n, k) in keys:
        pick = lambda el: el.terms.get((n, k))
        terms[(n, k)] = Block(
            [[pick(h), pick(g)], [pick(gadj), pick(hbar)]],
            sizes=(2, 2), dtype=np.complex128)
    hkm = CrossedElement(d=2, nu=4, field="complex", cocycle=h.cocycle, space=space,
                         terms=terms)
    r_t = np.kron(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.eye(2))
    sym = SymmetryData(trs="odd", trs_matrix=r_t)
    return hkm, sym


def trs_operator_on(geom_sites: int, sym: SymmetryData) -> np.ndarray:
    """The unitary part of the anti-unitary symmetry, extended over the lattice."""
    nu = sym.trs_matrix.shape[0]
    return np.kron(np.eye(geom_sites // nu), sym.trs_matrix)
