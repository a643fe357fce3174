"""Exterior-algebra representations of the two Clifford families used everywhere else.

The generators ``gamma[j]`` square to +1 and ``rho[j]`` square to -1; both act on
the exterior algebra over R^d (dimension 2^d) by wedge +/- contraction.  All
matrices carry exact integer entries in {-1, 0, 1} so that every algebraic
relation can be tested with exact arithmetic.  Floating point enters only when a
representation is assembled downstream.

Basis convention: subsets of {1..d} as ascending tuples, sorted
lexicographically, e.g. for d=2: (), (1,), (1,2), (2,).  This fixes every matrix
bit-exactly.  Flipping the orientation of the basis would globally negate the
odd-d signs reported by :func:`orientation_sign`.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import SizeLimitError

MAX_DIMENSION = 12


def _subset_basis(d):
    """Ascending-tuple subsets of {1..d} in lexicographic order."""
    subsets = []
    for r in range(d + 1):
        subsets.extend(combinations(range(1, d + 1), r))
    return sorted(subsets)


@dataclass(frozen=True)
class CliffordBimodule:
    """Commuting graded actions of the (+1)- and (-1)-square generator families.

    Attributes:
        d: number of generators in each family.
        gamma: list of d integer matrices, (gamma_j)^2 = +1, self-adjoint.
        rho: list of d integer matrices, (rho_j)^2 = -1, anti-self-adjoint.
        grading: diagonal +/-1 matrix, parity of the exterior degree.
    """

    d: int
    gamma: tuple
    rho: tuple
    grading: np.ndarray

    @property
    def dim(self):
        return 2 ** self.d


def build_exterior_rep(d: int) -> CliffordBimodule:
    """Generator matrices from wedge and contraction on the exterior algebra.

    gamma_j w = e_j ^ w + i(e_j) w  and  rho_j w = e_j ^ w - i(e_j) w, expressed
    in the lexicographic subset basis.  Entries are exact integers.
    """
    if not 1 <= d <= MAX_DIMENSION:
        raise SizeLimitError(f"dimension {d} outside supported range 1..{MAX_DIMENSION}")
    basis = _subset_basis(d)
    index = {s: i for i, s in enumerate(basis)}
    n = len(basis)
    gamma = [np.zeros((n, n), dtype=np.int64) for _ in range(d)]
    rho = [np.zeros((n, n), dtype=np.int64) for _ in range(d)]
    for col, subset in enumerate(basis):
        for j in range(1, d + 1):
            # Sign from moving e_j past the elements of the subset below j;
            # identical for wedge and contraction.
            sign = (-1) ** sum(1 for s in subset if s < j)
            if j in subset:
                target = tuple(s for s in subset if s != j)
                gamma[j - 1][index[target], col] = sign
                rho[j - 1][index[target], col] = -sign
            else:
                target = tuple(sorted(subset + (j,)))
                gamma[j - 1][index[target], col] = sign
                rho[j - 1][index[target], col] = sign
    grading = np.diag(np.array([(-1) ** len(s) for s in basis], dtype=np.int64))
    return CliffordBimodule(d=d, gamma=tuple(gamma), rho=tuple(rho), grading=grading)


def orientation_sign(sigma) -> int:
    """Sign of a permutation, read off the permuted volume element.

    ``sigma`` maps 1-based positions to 1-based images (sigma[i] is the image of
    i+1).  The product rho^{sigma(1)} ... rho^{sigma(d)} equals +/- rho^1...rho^d;
    the scalar is returned.  It coincides with the parity of sigma.
    """
    sigma = tuple(sigma)
    d = len(sigma)
    if sorted(sigma) != list(range(1, d + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{d}")
    rep = build_exterior_rep(d)
    canonical = np.eye(rep.dim, dtype=np.int64)
    permuted = np.eye(rep.dim, dtype=np.int64)
    for j in range(1, d + 1):
        canonical = canonical @ rep.rho[j - 1]
        permuted = permuted @ rep.rho[sigma[j - 1] - 1]
    row, col = np.argwhere(canonical != 0)[0]
    if permuted[row, col] == 0:
        raise ValueError("permuted generator product is not proportional to the volume element")
    return int(permuted[row, col] // canonical[row, col])


def cyclic_shift(d):
    """The permutation j -> j-1 (cyclically), whose sign is (-1)^(d-1)."""
    return tuple(((j - 2) % d) + 1 for j in range(1, d + 1))


def graded_tensor(rep_a: CliffordBimodule, rep_b: CliffordBimodule) -> CliffordBimodule:
    """Graded tensor product with Koszul signs.

    First-factor generators act as g (x) 1, second-factor ones as grading (x) g.
    The result satisfies all bimodule relations for d = d_a + d_b.  With the
    kron index flattening the construction is strictly associative.
    """
    d = rep_a.d + rep_b.d
    if d > MAX_DIMENSION:
        raise SizeLimitError(f"combined dimension {d} exceeds {MAX_DIMENSION}")
    eye_b = np.eye(rep_b.dim, dtype=np.int64)
    gamma = [np.kron(g, eye_b) for g in rep_a.gamma]
    gamma += [np.kron(rep_a.grading, g) for g in rep_b.gamma]
    rho = [np.kron(r, eye_b) for r in rep_a.rho]
    rho += [np.kron(rep_a.grading, r) for r in rep_b.rho]
    grading = np.kron(rep_a.grading, rep_b.grading)
    return CliffordBimodule(d=d, gamma=tuple(gamma), rho=tuple(rho), grading=grading)


@dataclass(frozen=True)
class KODegree:
    """Degree label for index values: mod 8 in real mode, mod 2 in complex mode."""

    j: int
    field: str  # 'real' | 'complex'

    def __post_init__(self):
        if self.field not in ("real", "complex"):
            raise ValueError(f"unknown field {self.field!r}")
        object.__setattr__(self, "j", self.j % self.modulus)

    @property
    def modulus(self):
        return 8 if self.field == "real" else 2


def abs_degree(j: KODegree, d: int) -> KODegree:
    """Degree of the pairing output: j - d, reduced modulo the field period."""
    return KODegree(j=j.j - d, field=j.field)
