"""Independent verification oracles for clean, translation-invariant models.

These work in momentum space directly from the hopping data of an element and
share no code with the real-space index machinery they cross-check.  Every
oracle refuses disordered or magnetically twisted input.
"""

from dataclasses import dataclass

import numpy as np

from .crossed import CrossedElement
from .disorder import DisorderConfig
from .errors import OracleRefusal


def _clean_blocks(a: CrossedElement):
    """Hop blocks of a clean element, keyed by displacement; refuses disorder."""
    if not a.cocycle.is_trivial:
        raise OracleRefusal("momentum-space oracles need a trivial twisting cocycle")
    probe = DisorderConfig(a.space, 0, (0,) * a.space.d)
    blocks = {}
    for (n, k), coeff in sorted(a.terms.items()):
        if not coeff.translation_invariant:
            raise OracleRefusal("oracle refuses disordered input (clean model required)")
        val = a.cocycle.phase(k) * coeff.eval(probe)
        blocks[n] = blocks.get(n, 0) + np.asarray(val, dtype=np.complex128)
    return blocks


def bloch_matrix(a: CrossedElement, k) -> np.ndarray:
    """H(k) = sum_n exp(i k . n) B_n for a clean element."""
    blocks = _clean_blocks(a)
    H = np.zeros((a.nu, a.nu), dtype=np.complex128)
    for n, B in blocks.items():
        H += np.exp(1j * np.dot(k, n)) * B
    return H


def bloch_gap(a: CrossedElement, mu: float, nk: int = 48):
    """Minimum distance of the Bloch spectrum from mu over an nk x nk grid."""
    blocks = _clean_blocks(a)
    ks = 2.0 * np.pi * np.arange(nk) / nk
    gap = np.inf
    for kx in ks:
        for ky in ks:
            H = np.zeros((a.nu, a.nu), dtype=np.complex128)
            for n, B in blocks.items():
                H += np.exp(1j * (kx * n[0] + ky * n[1])) * B
            ev = np.linalg.eigvalsh(H)
            gap = min(gap, np.min(np.abs(ev - mu)))
    return gap


@dataclass
class OracleResult:
    value: float
    convergence: dict


def berry_chern(a: CrossedElement, mu: float = 0.0, nk: int = 48,
                gap_floor: float = 1e-6) -> OracleResult:
    """Chern number of the Fermi sea by the plaquette Berry-phase method.

    Gauge invariant by construction: the lattice field strength is the angle of
    the product of link overlaps around each plaquette; the total divided by
    2 pi is an integer once every plaquette angle is well inside (-pi, pi).
    """
    blocks = _clean_blocks(a)
    ks = 2.0 * np.pi * np.arange(nk) / nk
    occ = None
    frames = np.empty((nk, nk), dtype=object)
    for i, kx in enumerate(ks):
        for j, ky in enumerate(ks):
            H = np.zeros((a.nu, a.nu), dtype=np.complex128)
            for n, B in blocks.items():
                H += np.exp(1j * (kx * n[0] + ky * n[1])) * B
            w, v = np.linalg.eigh(H)
            if np.min(np.abs(w - mu)) < gap_floor:
                raise OracleRefusal("spectrum touches mu on the grid; gap closed")
            nocc = int(np.sum(w < mu))
            if occ is None:
                occ = nocc
            elif nocc != occ:
                raise OracleRefusal("band filling changes across the zone; gap closed at mu")
            frames[i, j] = v[:, :occ]
    total = 0.0
    max_plaquette = 0.0
    for i in range(nk):
        for j in range(nk):
            ux = np.linalg.det(frames[i, j].conj().T @ frames[(i + 1) % nk, j])
            uy = np.linalg.det(frames[(i + 1) % nk, j].conj().T @ frames[(i + 1) % nk, (j + 1) % nk])
            vx = np.linalg.det(frames[i, (j + 1) % nk].conj().T @ frames[(i + 1) % nk, (j + 1) % nk])
            vy = np.linalg.det(frames[i, j].conj().T @ frames[i, (j + 1) % nk])
            phase = np.angle(ux * uy / (vx * vy))
            total += phase
            max_plaquette = max(max_plaquette, abs(phase))
    value = total / (2.0 * np.pi)
    return OracleResult(value=value, convergence={
        "grid": nk, "max_plaquette_angle": max_plaquette,
        "integer_residual": abs(value - round(value))})


def cylinder_bands(a: CrossedElement, nk: int, depth: int, k_range=(0.0, 2.0 * np.pi)):
    """k-resolved spectra of the model on a cylinder open across ``depth`` rows.

    Returns (ks, energies[nk, m], bottom_weight[nk, m]) where the weight is the
    probability in the lower half of the strip.
    """
    blocks = _clean_blocks(a)
    nu = a.nu
    dim = depth * nu
    ks = np.linspace(k_range[0], k_range[1], nk, endpoint=False) if k_range[1] - k_range[0] > np.pi \
        else np.linspace(k_range[0], k_range[1], nk)
    energies = np.zeros((len(ks), dim))
    bottom = np.zeros((len(ks), dim))
    half = depth // 2
    for i, k in enumerate(ks):
        H = np.zeros((dim, dim), dtype=np.complex128)
        for n, B in blocks.items():
            ph = np.exp(1j * k * n[0])
            for row in range(depth):
                tgt = row + n[1]
                if 0 <= tgt < depth:
                    H[tgt * nu:(tgt + 1) * nu, row * nu:(row + 1) * nu] += ph * B
        w, v = np.linalg.eigh(H)
        energies[i] = w
        dens = np.abs(v) ** 2
        bottom[i] = dens[: half * nu].sum(axis=0)
    return np.asarray(ks), energies, bottom


def _strip_states(energies, bottom, mu, strip, weight_min):
    """Per-k lists of (energy, bottom_weight) within the +-strip around mu."""
    out = []
    for e_row, b_row in zip(energies, bottom):
        sel = np.abs(e_row - mu) < strip
        out.append([(e, b) for e, b in zip(e_row[sel], b_row[sel]) if b > weight_min])
    return out


def _signed_crossings(ks, states, mu):
    """Signed mu-crossings of edge states matched by energy proximity between grid points."""
    total = 0
    for i in range(len(ks) - 1):
        for e0, _b in states[i]:
            if not states[i + 1]:
                continue
            e1 = min((e for e, _ in states[i + 1]), key=lambda e: abs(e - e0))
            if (e0 - mu) < 0.0 <= (e1 - mu):
                total += 1
            elif (e0 - mu) >= 0.0 > (e1 - mu):
                total -= 1
    return total


def edge_chirality(a: CrossedElement, mu: float = 0.0, nk: int = 400, depth: int = 30,
                   weight_min: float = 0.5) -> OracleResult:
    """Net chirality of one edge: signed count of mu-crossings over the full circle.

    Crossings are counted on the bottom edge against increasing k; the sign is
    flipped so that the boundary carries the orientation induced by the bulk
    (outward normal first) and the value equals the Chern number of the
    occupied bands.
    """
    gap = bloch_gap(a, mu, nk=24)
    if gap <= 0.0:
        raise OracleRefusal("bulk gap closed; edge counting undefined")
    ks, energies, bottom = cylinder_bands(a, nk, depth)
    strip = min(0.45 * gap, 0.2)
    states = _strip_states(energies, bottom, mu, strip, weight_min)
    value = -_signed_crossings(ks, states, mu)
    return OracleResult(value=float(value), convergence={
        "grid": nk, "depth": depth, "bulk_gap": gap, "strip": strip})


def kramers_edge_parity(a: CrossedElement, mu: float, nk: int = 400, depth: int = 30,
                        weight_min: float = 0.5) -> OracleResult:
    """Parity of Kramers pairs of edge states crossing mu, counted over (0, pi).

    Time reversal maps k to -k, so each pair crosses once in the open half
    circle; the count mod 2 is the torsion edge invariant.  mu must avoid the
    time-reversal-invariant momenta crossings (generic mu inside the gap).
    """
    gap = bloch_gap(a, mu, nk=24)
    if gap <= 0.0:
        raise OracleRefusal("bulk gap closed; edge counting undefined")
    eps = np.pi / nk
    ks, energies, bottom = cylinder_bands(a, nk, depth, k_range=(eps, np.pi - eps))
    strip = min(0.45 * gap, 0.2)
    states = _strip_states(energies, bottom, mu, strip, weight_min)
    crossings = 0
    for i in range(len(ks) - 1):
        for e0, _b in states[i]:
            if not states[i + 1]:
                continue
            e1 = min((e for e, _ in states[i + 1]), key=lambda e: abs(e - e0))
            if (e0 - mu) * (e1 - mu) < 0.0:
                crossings += 1
    return OracleResult(value=float(crossings % 2), convergence={
        "grid": nk, "depth": depth, "bulk_gap": gap, "crossings": crossings, "strip": strip})
