"""Concrete lattice representations: truncated windows, position operators, compressions.

Site enumeration is row-major over the cell coordinates (last axis fastest) with
the internal index innermost.  Positions are measured from the window centre
(L-1)/2 per axis, so even windows put sites at half-integer coordinates and no
site sits at the origin; odd windows have integer positions.
"""

import struct
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .crossed import CrossedElement, ToeplitzElement
from .disorder import DisorderConfig, shift
from .errors import ConfigError, StructureError, WindowError

_FIELD_CODES = {"real": 0, "complex": 1}
_FIELD_NAMES = {v: k for k, v in _FIELD_CODES.items()}


@dataclass(frozen=True)
class LatticeGeometry:
    d: int
    sizes: tuple
    boundary: str  # 'open' | 'periodic' | 'half'
    nu: int = 1
    coords: np.ndarray = field(default=None, repr=False)
    origin: tuple = None

    def __post_init__(self):
        if self.boundary not in ("open", "periodic", "half"):
            raise StructureError(f"unknown boundary {self.boundary!r}")
        if self.coords is None:
            grid = np.array(list(product(*[range(L) for L in self.sizes])), dtype=np.int64)
            object.__setattr__(self, "coords", grid)
        self.coords.setflags(write=False)
        if self.origin is None:
            object.__setattr__(self, "origin", tuple((L - 1) / 2.0 for L in self.sizes))

    @property
    def n_cells(self):
        return self.coords.shape[0]

    @property
    def n_sites(self):
        return self.n_cells * self.nu

    def cell_index(self):
        return {tuple(c): i for i, c in enumerate(self.coords)}

    def centered(self, axis):
        """Centered coordinate of every cell along one 0-based axis."""
        return self.coords[:, axis].astype(float) - self.origin[axis]

    def site_positions(self, axis):
        return np.repeat(self.centered(axis), self.nu)


def grid_geometry(sizes, boundary="open", nu=1):
    return LatticeGeometry(d=len(sizes), sizes=tuple(int(L) for L in sizes),
                           boundary=boundary, nu=nu)


@dataclass
class LatticeOperator:
    geometry: LatticeGeometry
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        n = self.geometry.n_sites
        if self.matrix.shape != (n, n):
            raise StructureError(
                f"matrix shape {self.matrix.shape} does not match geometry ({n} sites)")
        if self.hermitian:
            dev = np.max(np.abs(self.matrix - self.matrix.conj().T))
            if dev >= 1e-12 * max(1.0, np.max(np.abs(self.matrix))):
                raise StructureError(f"operator flagged hermitian but deviation is {dev:.3e}")

    @property
    def dim(self):
        return self.matrix.shape[0]


def _check_flux_quantized(a, geom):
    coc = a.cocycle
    if coc.p % coc.q == 0 or geom.d < 2:
        return
    total = coc.flux * geom.sizes[0] * geom.sizes[1]
    if total.denominator != 1:
        raise ConfigError(
            f"flux {coc.flux} * {geom.sizes[0]}x{geom.sizes[1]} is not an integer; "
            "periodic wrapping would be multivalued")


def _periodic_hop(x, n, sizes, coc):
    """Target cell and exact phase exponent for a wrapped hop x -> x + n.

    Implemented as the generator walk (last axis first), with the boundary
    twist on the axis-2 seam, then shifted by -p*n_1*n_2 so that on the infinite
    lattice the exponent reduces to the algebra's cocycle beta(x, n) = p x_2 n_1.
    """
    p = coc.p
    pos = list(x)
    exp = 0
    d = len(sizes)
    for axis in range(d - 1, -1, -1):
        steps = n[axis]
        direction = 1 if steps > 0 else -1
        for _ in range(abs(steps)):
            if axis == 0 and d >= 2:
                exp += direction * p * pos[1]
                pos[0] = (pos[0] + direction) % sizes[0]
            elif axis == 1:
                if direction > 0 and pos[1] == sizes[1] - 1:
                    exp -= p * sizes[1] * pos[0]
                    pos[1] = 0
                elif direction < 0 and pos[1] == 0:
                    exp += p * sizes[1] * pos[0]
                    pos[1] = sizes[1] - 1
                else:
                    pos[1] += direction
            else:
                pos[axis] = (pos[axis] + direction) % sizes[axis]
    if d >= 2:
        exp -= p * n[0] * n[1]
    return tuple(pos), exp


def represent(a: CrossedElement, omega: DisorderConfig, geom: LatticeGeometry) -> LatticeOperator:
    """Evaluation representation pi_omega on the truncated window.

    Open and half-space boundaries truncate hops that exit the window
    (Dirichlet); periodic boundaries wrap with a consistent magnetic phase and
    require the total flux through the torus to be an integer.  The on-site
    environment seen at cell x is the configuration shifted by x.
    """
    if a.d != geom.d:
        raise StructureError(f"element dimension {a.d} != geometry dimension {geom.d}")
    if a.nu != geom.nu:
        raise StructureError(f"element rank {a.nu} != geometry rank {geom.nu}")
    if omega.space is not a.space:
        raise StructureError("configuration does not belong to the element's sample space")
    periodic = geom.boundary == "periodic"
    if periodic:
        _check_flux_quantized(a, geom)
    nu = geom.nu
    index = geom.cell_index()
    coc = a.cocycle
    M = np.zeros((geom.n_sites, geom.n_sites), dtype=a.dtype)
    pad = (0,) * (a.cdim - a.d)
    for (n, k), coeff in sorted(a.terms.items()):
        for ci, x in enumerate(map(tuple, geom.coords)):
            if periodic:
                y, extra = _periodic_hop(x, n, geom.sizes, coc)
            else:
                y = tuple(xi + ni for xi, ni in zip(x, n))
                extra = coc.exponent(x, n)
            ti = index.get(y)
            if ti is None:
                continue
            val = coc.phase(k + extra) * coeff.eval(shift(omega, x + pad))
            M[ti * nu:(ti + 1) * nu, ci * nu:(ci + 1) * nu] += np.asarray(val, dtype=a.dtype)
    return LatticeOperator(geometry=geom, matrix=M)


def position_operator(j: int, geom: LatticeGeometry, origin=None) -> LatticeOperator:
    """Diagonal coordinate operator along 1-based axis j, relative to the window centre."""
    if geom.boundary == "periodic":
        raise StructureError("position is ill-defined on a periodic wrap")
    if not 1 <= j <= geom.d:
        raise StructureError(f"axis {j} out of range 1..{geom.d}")
    off = geom.origin[j - 1] if origin is None else origin
    vals = np.repeat(geom.coords[:, j - 1].astype(float) - off, geom.nu)
    return LatticeOperator(geometry=geom, matrix=np.diag(vals), hermitian=True)


def translation_matrix(geom: LatticeGeometry, n) -> np.ndarray:
    """Partial isometry shifting the window by n (open boundary, trivial phase)."""
    index = geom.cell_index()
    nu = geom.nu
    T = np.zeros((geom.n_sites, geom.n_sites))
    for ci, x in enumerate(map(tuple, geom.coords)):
        y = tuple(xi + ni for xi, ni in zip(x, n))
        ti = index.get(y)
        if ti is not None:
            T[ti * nu:(ti + 1) * nu, ci * nu:(ci + 1) * nu] = np.eye(nu)
    return T


def interior_mask(geom: LatticeGeometry, margin: int) -> np.ndarray:
    """Boolean site mask excluding cells within ``margin`` of any open face."""
    ok = np.ones(geom.n_cells, dtype=bool)
    for axis in range(geom.d):
        if geom.boundary == "periodic":
            continue
        lo = geom.coords[:, axis].min()
        hi = geom.coords[:, axis].max()
        ok &= (geom.coords[:, axis] >= lo + margin) & (geom.coords[:, axis] <= hi - margin)
    return np.repeat(ok, geom.nu)


def half_space_compress(op: LatticeOperator, s: int) -> LatticeOperator:
    """Restriction to cells with last coordinate <= s; geometry becomes half-space."""
    geom = op.geometry
    if geom.boundary != "open":
        raise StructureError("compression expects an open-boundary operator")
    last = geom.coords[:, -1]
    if s < last.min() or s > last.max():
        raise WindowError(f"depth {s} outside the lattice range {last.min()}..{last.max()}")
    keep_cells = np.where(last <= s)[0]
    sites = np.concatenate([np.arange(c * geom.nu, (c + 1) * geom.nu) for c in keep_cells])
    sub = op.matrix[np.ix_(sites, sites)]
    new_geom = LatticeGeometry(
        d=geom.d, sizes=geom.sizes[:-1] + (int(s) + 1,), boundary="half", nu=geom.nu,
        coords=geom.coords[keep_cells].copy(), origin=geom.origin)
    return LatticeOperator(geometry=new_geom, matrix=sub, hermitian=op.hermitian)


def represent_toeplitz(t: ToeplitzElement, omega, geom: LatticeGeometry) -> LatticeOperator:
    """Half-space representation: the isometry acts as the truncated last-axis shift.

    Exact relations of the extension hold on the infinite half-space; a finite
    window adds artifacts at the far (large-coordinate) face, so comparisons
    should exclude a margin there.
    """
    proto = t.proto
    e_last = tuple(0 if i < geom.d - 1 else 1 for i in range(geom.d))
    V = translation_matrix(geom, e_last)
    if proto.nu != geom.nu:
        raise StructureError("rank mismatch")
    bottom = np.repeat(geom.coords[:, -1] == geom.coords[:, -1].min(), geom.nu)
    P0 = np.diag(bottom.astype(float))
    M = np.zeros((geom.n_sites, geom.n_sites), dtype=proto.dtype)
    for k, c in sorted(t.unitary.items()):
        W = np.linalg.matrix_power(V if k >= 0 else V.T, abs(k))
        M += W @ represent(c, omega, geom).matrix
    for (va, vb), c in sorted(t.corrections.items()):
        piece = np.linalg.matrix_power(V, va) @ P0 @ represent(c, omega, geom).matrix
        M += piece @ np.linalg.matrix_power(V.T, vb)
    return LatticeOperator(geometry=geom, matrix=M)


def save_operator(op: LatticeOperator, path):
    """Row-major 64-bit little-endian dump with a (rows, cols, field) header.

    Complex matrices are stored as interleaved (re, im) pairs per entry.
    """
    m = op.matrix
    fcode = 1 if np.iscomplexobj(m) else 0
    with open(path, "wb") as fh:
        fh.write(struct.pack("<qqq", m.shape[0], m.shape[1], fcode))
        if fcode:
            inter = np.empty(m.shape + (2,), dtype="<f8")
            inter[..., 0] = m.real
            inter[..., 1] = m.imag
            fh.write(inter.tobytes(order="C"))
        else:
            fh.write(m.astype("<f8").tobytes(order="C"))


def load_matrix(path):
    with open(path, "rb") as fh:
        rows, cols, fcode = struct.unpack("<qqq", fh.read(24))
        if fcode not in _FIELD_NAMES:
            raise ConfigError(f"unknown field code {fcode}")
        raw = np.frombuffer(fh.read(), dtype="<f8")
    if fcode:
        raw = raw.reshape(rows, cols, 2)
        return raw[..., 0] + 1j * raw[..., 1]
    return raw.reshape(rows, cols).copy()
