"""Fundamental cycles, the extension cycle, and the product module with its
explicit intertwiner.

The bulk cycle pairs the lattice position operators with the (+1)-square
Clifford generators, D = sum_j X_j (x) gamma_j, on (window) (x) exterior
algebra.  The extension cycle is the one-dimensional cycle of the split axis.
The product of extension and edge cycle, assembled on the tensor window, is
carried onto the bulk window by an explicit unitary; after relabelling the
Clifford generators by a cyclic shift (parity (-1)^(d-1)) it is exactly the
bulk Dirac operator.
"""

from dataclasses import dataclass

import numpy as np

from . import crossed as cr
from .clifford import CliffordBimodule, build_exterior_rep, cyclic_shift, graded_tensor, orientation_sign
from .crossed import CrossedElement
from .disorder import DisorderConfig
from .errors import StructureError
from .rep import LatticeGeometry, LatticeOperator, represent


@dataclass
class KCycle:
    """Dirac operator, grading and left Clifford data over a lattice window."""

    d: int
    geometry: LatticeGeometry
    clifford: CliffordBimodule
    dirac: np.ndarray
    grading: np.ndarray

    def act(self, a: CrossedElement, omega: DisorderConfig) -> np.ndarray:
        """Left action of the algebra, commuting with the Clifford factor."""
        return np.kron(represent(a, omega, self.geometry).matrix,
                       np.eye(self.clifford.dim))

    def left_clifford(self, j: int) -> np.ndarray:
        """1 (x) rho_j, the j-th (-1)-square generator on the tensor space."""
        return np.kron(np.eye(self.geometry.n_sites),
                       self.clifford.rho[j - 1].astype(float))


def assemble_bulk_cycle(geom: LatticeGeometry, cliff: CliffordBimodule) -> KCycle:
    """D = sum_j X_j (x) gamma_j with the exterior grading (open windows only)."""
    if geom.boundary == "periodic":
        raise StructureError("fundamental cycles need position operators (open window)")
    if cliff.d != geom.d:
        raise StructureError(f"Clifford dimension {cliff.d} != lattice dimension {geom.d}")
    n = geom.n_sites
    dim_l = cliff.dim
    dirac = np.zeros((n * dim_l, n * dim_l))
    for j in range(geom.d):
        dirac += np.kron(np.diag(geom.site_positions(j)), cliff.gamma[j].astype(float))
    grading = np.kron(np.eye(n), cliff.grading.astype(float))
    return KCycle(d=geom.d, geometry=geom, clifford=cliff, dirac=dirac, grading=grading)


def resolvent_half_inverse(cycle: KCycle) -> np.ndarray:
    """(1 + D^2)^(-1/2); D^2 is checked to be exactly diagonal first."""
    d2 = cycle.dirac @ cycle.dirac
    off = d2 - np.diag(np.diag(d2))
    if np.any(off):
        raise StructureError("D^2 is not diagonal; cycle assembly is broken")
    return np.diag(1.0 / np.sqrt(1.0 + np.diag(d2)))


def bounded_transform(cycle: KCycle) -> LatticeOperator:
    """F = D (1 + D^2)^(-1/2): a self-adjoint strict contraction at finite volume."""
    F = cycle.dirac @ resolvent_half_inverse(cycle)
    geom = cycle.geometry
    tensor_geom = LatticeGeometry(d=geom.d, sizes=geom.sizes, boundary=geom.boundary,
                                  nu=geom.nu * cycle.clifford.dim, coords=geom.coords.copy(),
                                  origin=geom.origin)
    return LatticeOperator(geometry=tensor_geom, matrix=F, hermitian=True)


@dataclass
class ExtensionCycle:
    """The cycle of the split axis: D = N (x) gamma_ext and P = chi_[0,inf)(N).

    The zero mode of N belongs to the positive projection.  ``labels`` are the
    absolute lattice coordinates of the layers (used for the algebra twist);
    ``window`` holds the centred positions entering the Dirac operator.
    """

    window: np.ndarray          # centred positions of the split axis
    labels: np.ndarray          # absolute layer coordinates, same order
    clifford: CliffordBimodule  # one-dimensional
    dirac: np.ndarray
    projection: np.ndarray

    @classmethod
    def from_axis(cls, positions, labels=None) -> "ExtensionCycle":
        n = np.asarray(positions, dtype=float)
        lab = n.astype(int) if labels is None else np.asarray(labels, dtype=int)
        cl1 = build_exterior_rep(1)
        dirac = np.kron(np.diag(n), cl1.gamma[0].astype(float))
        proj = np.diag((n >= 0.0).astype(float))
        return cls(window=n, labels=lab, clifford=cl1, dirac=dirac, projection=proj)


def extension_cycle_for(geom: LatticeGeometry) -> ExtensionCycle:
    """Extension cycle whose window matches the split (last) axis of a bulk window."""
    raw = sorted(set(int(v) for v in geom.coords[:, geom.d - 1]))
    centred = np.array(raw, dtype=float) - geom.origin[geom.d - 1]
    return ExtensionCycle.from_axis(centred, labels=raw)


@dataclass
class ProductCycle:
    """The product module of extension and edge cycle on the tensor window."""

    d: int
    ext: ExtensionCycle
    edge: KCycle
    clifford: CliffordBimodule  # graded tensor, product basis
    dirac: np.ndarray
    grading: np.ndarray

    def left_action(self, c: CrossedElement, omega: DisorderConfig) -> np.ndarray:
        """Action of an edge-algebra element: layer k sees the k-fold twisted element.

        c(delta_k (x) xi) = delta_k (x) alpha_d^{-k}(c) xi; the twist is computed
        symbolically, so magnetic phases are exact.
        """
        n_edge = self.edge.geometry.n_sites
        dim_l = self.clifford.dim
        blocks = np.zeros((len(self.ext.window) * n_edge * dim_l,) * 2,
                          dtype=np.complex128)
        for i, k in enumerate(self.ext.labels):
            twisted = restrict_edge(cr.alpha_last(c, -int(k)))
            mat = np.kron(represent(twisted, omega, self.edge.geometry).matrix,
                          np.eye(dim_l))
            s = i * n_edge * dim_l
            blocks[s:s + n_edge * dim_l, s:s + n_edge * dim_l] = mat
        return blocks

    def split_shift(self) -> np.ndarray:
        """The action of the split-axis generator: a pure shift of the layer index."""
        m = len(self.ext.window)
        shift = np.zeros((m, m))
        for i in range(m - 1):
            shift[i + 1, i] = 1.0
        return np.kron(shift, np.eye(self.edge.geometry.n_sites * self.clifford.dim))


def restrict_edge(c: CrossedElement) -> CrossedElement:
    """Reinterpret an element not translating in the split axis as an edge element.

    Coefficients keep seeing the full configuration space (cdim is preserved),
    so layer twists commute with edge representation.
    """
    terms = {}
    for (n, k), coeff in c.terms.items():
        if n[-1] != 0:
            raise StructureError("element translates in the split axis; not an edge element")
        terms[(n[:-1], k)] = coeff
    edge_coc = cr.Cocycle(d=c.d - 1, flux=c.cocycle.flux)
    return CrossedElement(d=c.d - 1, nu=c.nu, field=c.field, cocycle=edge_coc,
                          space=c.space, terms=terms, cdim=c.cdim)


def connection_correction(j: int, c: CrossedElement) -> CrossedElement:
    """The coefficient-side correction [X_j, c] of the lifted position operator."""
    return cr.position_commutator(j, c)


def assemble_product_module(ext: ExtensionCycle, edge: KCycle) -> ProductCycle:
    """Dirac of the product: N (x) 1 (x) G_1 + sum_j X_j (x) G_{j+1}.

    G are the graded-tensor generators (extension factor first), so the second
    factor's generators carry the extension grading, exactly the Koszul-sign
    form of the lifted operator.  On basis states with trivial left coefficient
    the lifted position operators reduce to plain ones; coefficient corrections
    are exposed via :func:`connection_correction`.
    """
    if edge.clifford.d != edge.d:
        raise StructureError("edge cycle carries a mismatched Clifford factor")
    cliff = graded_tensor(ext.clifford, edge.clifford)
    d = cliff.d
    n_edge = edge.geometry.n_sites
    m = len(ext.window)
    dim_l = cliff.dim
    dirac = np.kron(np.kron(np.diag(ext.window), np.eye(n_edge)),
                    cliff.gamma[0].astype(float))
    for j in range(edge.d):
        dirac += np.kron(np.kron(np.eye(m), np.diag(edge.geometry.site_positions(j))),
                         cliff.gamma[j + 1].astype(float))
    grading = np.kron(np.eye(m * n_edge), cliff.grading.astype(float))
    return ProductCycle(d=d, ext=ext, edge=edge, clifford=cliff, dirac=dirac,
                        grading=grading)


def _clifford_relabel_matrix(d: int) -> np.ndarray:
    """Basis map from Lambda^1 (x) Lambda^(d-1) to Lambda^d with ext -> 1, j -> j+1.

    The map sends a product basis vector to the ascending wedge; since the new
    first index is the smallest, every reordering sign is +1 and the matrix is
    a permutation.
    """
    from itertools import combinations

    def subsets(k):
        out = []
        for r in range(k + 1):
            out.extend(combinations(range(1, k + 1), r))
        return sorted(out)

    sub1 = subsets(1)
    sub_edge = subsets(d - 1)
    sub_bulk = subsets(d)
    index_bulk = {s: i for i, s in enumerate(sub_bulk)}
    W = np.zeros((2 ** d, 2 ** d))
    for ia, sa in enumerate(sub1):
        for ib, sb in enumerate(sub_edge):
            target = tuple(sorted(([1] if sa else []) + [j + 1 for j in sb]))
            W[index_bulk[target], ia * len(sub_edge) + ib] = 1.0
    return W


@dataclass
class IntertwinerResult:
    unitary: np.ndarray
    relabel_parity: int
    target_dirac: np.ndarray


def product_intertwiner(ext: ExtensionCycle, edge: KCycle,
                        bulk: KCycle) -> IntertwinerResult:
    """Unitary carrying the product module onto the bulk window.

    Site part: delta_k (x) delta_n -> delta_(n, k).  Clifford part: the
    relabelling permutation ext -> 1, j -> j+1.  Conjugation maps the product
    Dirac to X_d (x) gamma_1 + sum_j X_j (x) gamma_{j+1}; the residual cyclic
    relabelling to the bulk cycle has parity (-1)^(d-1), computed from the
    permuted volume element, never hard-coded.
    """
    d = bulk.d
    geom = bulk.geometry
    if edge.geometry.nu != geom.nu:
        raise StructureError("edge and bulk internal ranks differ")
    edge_index = edge.geometry.cell_index()
    win = list(ext.window)
    win_index = {v: i for i, v in enumerate(win)}
    bulk_centered_last = geom.centered(d - 1)
    nu = geom.nu
    dim_l = 2 ** d
    n_edge_cells = edge.geometry.n_cells
    size = geom.n_sites * dim_l
    if len(win) * n_edge_cells * nu * dim_l != size:
        raise StructureError("product and bulk truncations do not match")
    W = _clifford_relabel_matrix(d)
    U = np.zeros((size, size))
    for bc in range(geom.n_cells):
        coords = tuple(geom.coords[bc])
        k_val = bulk_centered_last[bc]
        if k_val not in win_index:
            raise StructureError("bulk window and extension window are inconsistent")
        ce = edge_index.get(coords[:-1])
        if ce is None:
            raise StructureError("bulk window does not project onto the edge window")
        ki = win_index[k_val]
        for s in range(nu):
            prod_site = (ki * n_edge_cells + ce) * nu + s
            bulk_site = bc * nu + s
            U[bulk_site * dim_l:(bulk_site + 1) * dim_l,
              prod_site * dim_l:(prod_site + 1) * dim_l] = W
    # target: X_d (x) gamma^1 + sum_{j<d} X_j (x) gamma^{j+1} on the bulk window
    cl = bulk.clifford
    target = np.kron(np.diag(geom.site_positions(d - 1)), cl.gamma[0].astype(float))
    for j in range(d - 1):
        target += np.kron(np.diag(geom.site_positions(j)), cl.gamma[j + 1].astype(float))
    parity = orientation_sign(cyclic_shift(d))
    return IntertwinerResult(unitary=U, relabel_parity=parity, target_dirac=target)
