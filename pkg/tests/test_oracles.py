import numpy as np
import pytest

from bulkedge.crossed import Cocycle, generator
from bulkedge.disorder import DisorderSpace
from bulkedge.errors import OracleRefusal
from bulkedge.models import ModelParams, haldane, kane_mele
from bulkedge.oracles import (berry_chern, bloch_gap, bloch_matrix, cylinder_bands,
                              edge_chirality, kramers_edge_parity)


def _clean(params):
    sp = DisorderSpace(kind="point", d=2, channels=2)
    return haldane(params, sp)


def test_bloch_matrix_hermitian():
    h = _clean(ModelParams(t=1.0, t2=0.13, phi=0.8, M=0.2))
    rng = np.random.default_rng(1)
    for _ in range(10):
        k = rng.uniform(0, 2 * np.pi, size=2)
        H = bloch_matrix(h, k)
        assert np.max(np.abs(H - H.conj().T)) < 1e-13


def test_berry_chern_phases():
    topo = _clean(ModelParams(t=1.0, t2=0.1, phi=np.pi / 2, M=0.0))
    res = berry_chern(topo, 0.0, nk=30)
    assert round(res.value) == 1 and res.convergence["integer_residual"] < 1e-8
    assert res.convergence["max_plaquette_angle"] < np.pi / 2
    triv = _clean(ModelParams(t=1.0, t2=0.0, M=0.5))
    assert round(berry_chern(triv, 0.0, nk=30).value) == 0
    flipped = _clean(ModelParams(t=1.0, t2=0.1, phi=-np.pi / 2, M=0.0))
    assert round(berry_chern(flipped, 0.0, nk=30).value) == -1


def test_oracles_refuse_disorder_and_flux():
    sp = DisorderSpace(kind="iid", d=2, channels=2, count=2, seed=1, W=0.4)
    dirty = haldane(ModelParams(t=1.0, t2=0.1, phi=np.pi / 2, W=0.4), sp)
    with pytest.raises(OracleRefusal):
        berry_chern(dirty, 0.0, nk=6)
    clean_sp = DisorderSpace(kind="point", d=2)
    from fractions import Fraction
    twisted = generator(clean_sp, Cocycle(d=2, flux=Fraction(1, 3)), 1)
    with pytest.raises(OracleRefusal):
        bloch_matrix(twisted, (0.0, 0.0))


def test_berry_chern_refuses_when_gap_closes():
    metal = _clean(ModelParams(t=1.0, t2=0.0, M=0.0))  # gapless at K
    with pytest.raises(OracleRefusal):
        berry_chern(metal, 0.0, nk=30)


def test_edge_chirality_matches_chern():
    topo = _clean(ModelParams(t=1.0, t2=0.1, phi=np.pi / 2, M=0.0))
    res = edge_chirality(topo, 0.0, nk=200, depth=20)
    assert res.value == 1.0
    triv = _clean(ModelParams(t=1.0, t2=0.0, M=0.5))
    assert edge_chirality(triv, 0.0, nk=120, depth=16).value == 0.0


def test_kramers_parity_phases():
    sp = DisorderSpace(kind="point", d=2, channels=2)
    topo, _ = kane_mele(haldane(ModelParams(t=1.0, t2=0.1, phi=np.pi / 2, M=0.0), sp),
                        0.0, sp)
    assert kramers_edge_parity(topo, 0.05, nk=200, depth=20).value == 1.0
    triv, _ = kane_mele(haldane(ModelParams(t=1.0, t2=0.1, phi=np.pi / 2, M=1.2), sp),
                        0.1, sp)
    assert kramers_edge_parity(triv, 0.05, nk=200, depth=20).value == 0.0


def test_cylinder_bands_shape_and_weights():
    h = _clean(ModelParams(t=1.0, t2=0.1, phi=np.pi / 2, M=0.0))
    ks, energies, bottom = cylinder_bands(h, 40, 12)
    assert energies.shape == (40, 24) and bottom.shape == (40, 24)
    assert np.all((bottom >= -1e-12) & (bottom <= 1 + 1e-12))
    assert bloch_gap(h, 0.0, nk=12) > 0.4
