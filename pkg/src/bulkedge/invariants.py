"""Index pairings: Fermi projections, integer and mod-2 real-space indices,
edge unitaries and conductance, and the disorder-averaged trace.

Sign and orientation conventions are fixed once for the whole package: the
phase operator winds counterclockwise around the origin, edge quantities are
referred to the boundary orientation induced by the bulk, and with these
choices the clean topological Haldane point reports +1 on both sides.
"""

from dataclasses import dataclass, field

import numpy as np

from .clifford import KODegree
from .errors import (GapClosedError, InconclusiveIndexError, StructureError,
                     SymmetryError, WindowError)
from .rep import LatticeGeometry, LatticeOperator


@dataclass
class FermiProjection:
    matrix: np.ndarray
    occupied: np.ndarray      # orthonormal columns spanning the range
    eigenvalues: np.ndarray
    mu: float
    gap: float


@dataclass
class IndexValue:
    """Tagged index result.  ``kind`` is integer / z2 / unsupported."""

    degree: KODegree
    kind: str
    value: object = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        allowed = {"integer", "z2", "unsupported"}
        if self.kind not in allowed:
            raise StructureError(f"index kind must be one of {allowed}")


@dataclass(frozen=True)
class EdgeWindow:
    """Open interval inside the bulk gap, plus the half-space depth."""

    lo: float
    hi: float
    depth: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise WindowError(f"window ({self.lo}, {self.hi}) is empty")

    @property
    def volume(self):
        return self.hi - self.lo


def validate_edge_window(window: EdgeWindow, bulk_eigenvalues, mu: float) -> None:
    """The window must contain mu and avoid the bulk spectrum entirely."""
    if not window.lo < mu < window.hi:
        raise WindowError(f"mu={mu} not inside window ({window.lo}, {window.hi})")
    ev = np.asarray(bulk_eigenvalues)
    inside = ev[(ev > window.lo) & (ev < window.hi)]
    if inside.size:
        raise WindowError(
            f"window ({window.lo}, {window.hi}) intersects the bulk spectrum "
            f"(e.g. eigenvalue {inside[0]:.6f})")


def verify_bulk_gap(model, omega, sizes, mu: float, gap_min: float) -> float:
    """Distance of the torus spectrum from mu; refuses when below gap_min.

    Open windows of a topological model host in-gap boundary states by design,
    so the gap precondition is checked on the wrapped (edge-free) geometry.
    """
    from .rep import grid_geometry, represent  # local import to avoid a cycle

    geom = grid_geometry(sizes, "periodic", nu=model.nu)
    w = np.linalg.eigvalsh(represent(model, omega, geom).matrix)
    gap = float(np.min(np.abs(w - mu)))
    if gap < gap_min:
        raise GapClosedError(
            f"bulk spectrum reaches {gap:.3e} of mu={mu} (< gap_min={gap_min})",
            offending_eigenvalue=float(w[np.argmin(np.abs(w - mu))]))
    return gap


def fermi_projection(H: LatticeOperator, mu: float, gap_min: float = 1e-3) -> FermiProjection:
    """Spectral projection below mu; refuses when the gap around mu is closed."""
    M = H.matrix
    if np.max(np.abs(M - M.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(M))):
        raise StructureError("fermi_projection expects a hermitian operator")
    w, v = np.linalg.eigh(M)
    dist = np.abs(w - mu)
    nearest = np.argmin(dist)
    if dist[nearest] < gap_min:
        raise GapClosedError(
            f"eigenvalue {w[nearest]:.6f} lies within gap_min={gap_min} of mu={mu}",
            offending_eigenvalue=float(w[nearest]))
    occ = v[:, w < mu]
    gap = float(np.min(w[w > mu]) - np.max(w[w < mu])) if np.any(w > mu) and np.any(w < mu) else np.inf
    return FermiProjection(matrix=occ @ occ.conj().T, occupied=occ, eigenvalues=w,
                           mu=mu, gap=gap)


def _phase_operator(geom: LatticeGeometry) -> np.ndarray:
    """Diagonal of (X1 + i X2)/|X1 + i X2|; requires no site at the origin."""
    if geom.d != 2:
        raise StructureError("the phase construction is two-dimensional only")
    z = geom.site_positions(0) + 1j * geom.site_positions(1)
    r = np.abs(z)
    if np.min(r) < 0.25:
        raise StructureError(
            "a site sits at the origin; use an even window (half-integer centre)")
    return z / r


def chern_index(P: FermiProjection, geom: LatticeGeometry, window_radius=None) -> IndexValue:
    """Integer index of the projected phase operator, localized at its vortex.

    The relative index of the projections P and F* P F concentrates +C at the
    phase vortex (the origin) and -C at the truncation boundary; the windowed
    trace of the cubed difference reads off the vortex contribution.  The plain
    trace vanishes identically at finite volume, and odd powers >= 3 make the
    cancellation of the non-topological spectrum local, so the window sum
    converges to the index with a small residual in a gapped phase.
    """
    if geom.boundary != "open":
        raise StructureError("chern_index needs an open-boundary geometry")
    F = _phase_operator(geom)
    K = P.matrix - (F.conj()[:, None] * P.matrix) * F[None, :]
    if window_radius is None:
        window_radius = min(geom.sizes) / 3.0
    inside = (np.abs(geom.site_positions(0)) <= window_radius) \
        & (np.abs(geom.site_positions(1)) <= window_radius)
    K3 = K @ K @ K
    # The counterclockwise phase puts -C at the vortex of a Chern-C Fermi sea;
    # the sign is absorbed here so the readout equals the Berry Chern number.
    marker = -float(np.real(np.sum(np.diag(K3)[inside])))
    value = int(np.rint(marker))
    residual = abs(marker - value)
    if residual >= 0.1:
        raise InconclusiveIndexError(
            f"windowed index trace {marker:.4f} is {residual:.3f} from an integer; "
            "increase the window size L")
    return IndexValue(degree=KODegree(0, "complex"), kind="integer", value=value,
                      diagnostics={"marker": marker, "residual": residual,
                                   "window_radius": window_radius})


def compressed_phase_singular_values(P: FermiProjection, geom: LatticeGeometry):
    """Singular values of the phase operator compressed to the Fermi sea."""
    F = _phase_operator(geom)
    V = P.occupied
    M = V.conj().T @ (F[:, None] * V)
    return np.linalg.svd(M, compute_uv=False)[::-1]  # ascending


def phase_kernel_count(P: FermiProjection, geom: LatticeGeometry) -> int:
    """Unsigned near-kernel dimension of the compressed phase (index cross-check).

    In a gapped phase the kernel cluster sits exponentially below the slow
    boundary modes and its size equals |C|; the adaptive cut separates the two.
    """
    svs = compressed_phase_singular_values(P, geom)
    cut, _ratio = _adaptive_kernel_cut(svs)
    return cut


def _adaptive_kernel_cut(svs, ceiling=0.5, ratio_min=10.0):
    """Count of near-kernel singular values by the largest multiplicative gap.

    Kernel candidates lie below ``ceiling``; the kernel is the largest prefix
    whose top value stays a factor ratio_min under the ceiling and is separated
    from the first excluded value by at least ratio_min.  A small value that is
    neither clearly kernel nor clearly separated makes the readout ambiguous.
    """
    svs = np.sort(np.asarray(svs))
    cands = svs[svs < ceiling]
    m = len(cands)
    cap = ceiling / ratio_min
    for c in range(m, 0, -1):
        after = cands[c] if c < m else ceiling
        before = max(cands[c - 1], 1e-300)
        if cands[c - 1] <= cap and after / before >= ratio_min:
            return c, after / before
    if m and cands[0] <= cap:
        raise InconclusiveIndexError(
            f"ambiguous kernel cut: smallest singular value {cands[0]:.3e} has no "
            f"separated cluster (ratio_min={ratio_min})")
    return 0, (cands[0] / cap) if m else np.inf


def verify_projection_trs(P: FermiProjection, trs_site_matrix, tol=1e-8):
    dev = np.max(np.abs(trs_site_matrix @ P.matrix.conj() @ trs_site_matrix.conj().T - P.matrix))
    if dev > tol:
        raise SymmetryError(f"projection breaks odd time reversal by {dev:.3e}")
    return dev


def z2_index(P: FermiProjection, sym, geom: LatticeGeometry,
             kramers_tol: float = 1e-6) -> IndexValue:
    """Mod-2 kernel dimension of the compressed phase operator under odd TRS.

    At finite volume the anti-unitary symmetry pairs every singular value (the
    near-kernel contains both the kernel and cokernel partners of the infinite
    system), so the kernel dimension is the number of Kramers pairs in the
    near-kernel cluster; its parity is the invariant.  Degeneracy of the
    non-kernel values is verified and an uneven kernel cluster is refused.
    """
    from .models import trs_operator_on  # local import to avoid a cycle

    if sym.trs != "odd":
        raise SymmetryError("z2_index requires odd time reversal")
    R = trs_operator_on(geom.n_sites, sym)
    verify_projection_trs(P, R)
    svs = compressed_phase_singular_values(P, geom)
    cut, ratio = _adaptive_kernel_cut(svs)
    if cut % 2 != 0:
        raise SymmetryError(
            f"near-kernel cluster has odd size {cut}; Kramers doubling violated")
    paired = svs[cut:]
    worst = 0.0
    for i in range(0, len(paired) - 1, 2):
        split = (paired[i + 1] - paired[i]) / max(paired[i + 1], 1e-300)
        worst = max(worst, split)
    if worst > kramers_tol:
        raise SymmetryError(
            f"non-kernel singular values split by {worst:.3e} > {kramers_tol}")
    pairs = cut // 2
    return IndexValue(degree=KODegree(2, "real"), kind="z2", value=pairs % 2,
                      diagnostics={"kernel_svs": svs[:cut].tolist(),
                                   "first_excluded": float(svs[cut]) if cut < len(svs) else None,
                                   "separation_ratio": ratio,
                                   "kramers_worst_split": worst,
                                   "kernel_pairs": pairs})


def index_for_degree(degree: KODegree, P: FermiProjection, sym, geom) -> IndexValue:
    """Dispatch on the pairing degree; degrees without a numeric readout are marked."""
    if degree.field == "complex" and degree.j == 0:
        return chern_index(P, geom)
    if degree.field == "real" and degree.j in (1, 2):
        return z2_index(P, sym, geom)
    if degree.field == "real" and degree.j == 0:
        return chern_index(P, geom)
    return IndexValue(degree=degree, kind="unsupported",
                      diagnostics={"reason": "no numeric readout in this degree"})


def edge_unitary(H_half: LatticeOperator, window: EdgeWindow,
                 bulk_eigenvalues=None, mu=None) -> LatticeOperator:
    """exp(-2 pi i (H - lo)/(hi - lo)) on the window's spectral subspace, 1 elsewhere."""
    if bulk_eigenvalues is not None:
        validate_edge_window(window, bulk_eigenvalues, mu if mu is not None else
                             0.5 * (window.lo + window.hi))
    w, v = np.linalg.eigh(H_half.matrix)
    phases = np.ones(len(w), dtype=np.complex128)
    sel = (w > window.lo) & (w < window.hi)
    phases[sel] = np.exp(-2j * np.pi * (w[sel] - window.lo) / window.volume)
    U = (v * phases[None, :]) @ v.conj().T
    dev = np.max(np.abs(U @ U.conj().T - np.eye(len(w))))
    if dev > 1e-10:
        raise StructureError(f"edge unitary deviates from unitarity by {dev:.3e}")
    op = LatticeOperator(geometry=H_half.geometry, matrix=U)
    return op


def edge_conductance(U: LatticeOperator, geom: LatticeGeometry = None,
                     margin: int = 8, collar: int = None) -> float:
    """Conductance of the edge states, in units of e^2/h.

    Trace per unit length along the edge (axis 1, a centred window of length
    L1 - 2*margin) times the transverse trace.  The transverse sum runs over a
    boundary collar: on the infinite half-space it would run over everything,
    but a finite strip has a second, artificial cut whose counter-propagating
    states must not be summed, and the collar keeps only the physical edge.
    collar defaults to half the strip height.
    """
    geom = geom or U.geometry
    L1 = geom.sizes[0]
    if margin >= L1 / 2:
        raise WindowError(f"margin {margin} swallows the whole edge window (L1={L1})")
    last = geom.coords[:, -1]
    if collar is None:
        collar = int(last.min() + (last.max() - last.min()) // 2)
    X1 = geom.site_positions(0)
    half_span = L1 / 2.0 - margin
    window = (np.abs(X1) <= half_span) & (np.repeat(last, geom.nu) <= collar)
    count_cols = len(np.unique(geom.coords[np.abs(geom.centered(0)) <= half_span, 0]))
    # diag of U* i [X1, U] = i (diag(U* X1 U) - X1); the parenthesis is real, and
    # its windowed mean is minus the winding of the edge states per unit length.
    core = np.einsum("ij,ji->i", U.matrix.conj().T, X1[:, None] * U.matrix)
    sigma = np.sum(np.real(core)[window] - X1[window]) / count_cols
    return float(sigma)


def semifinite_trace(operators, space, nu: int = 1, count=None) -> float:
    """Disorder-weighted average of the per-internal-dimension matrix trace.

    Normalized so a rank-one frame projection (a single cell's internal block)
    has trace one, matching a unit trace on the coefficient algebra.  All
    reductions use correctly-rounded summation, so the result is reproducible
    and exactly invariant under reordering (e.g. permutation conjugation).
    """
    import math

    mats = list(operators)
    if not mats:
        raise StructureError("semifinite trace over an empty sample set")
    if count is None:
        count = len(mats)
    w = list(space.weights[:count])
    total = math.fsum(w)
    return math.fsum((wi / total) * math.fsum(np.real(np.diag(m))) / nu
                     for wi, m in zip(w, mats[:count]))
