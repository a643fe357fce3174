import numpy as np
import pytest

from bulkedge.disorder import DisorderSpace, average, shift, splitmix64
from bulkedge.errors import StructureError


def test_splitmix64_pinned_vectors():
    # cross-implementation anchors for the site-value generator
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(1) == 0x910A2DEC89025CC1
    assert splitmix64(0xDEADBEEF) == 0x4ADFB90F68C9EB9B


def test_shift_identity_and_composition():
    sp = DisorderSpace(kind="iid", d=2, channels=1, count=2, seed=3, W=1.0)
    om = sp.samples()[0]
    assert shift(om, (0, 0)) == om
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = tuple(int(v) for v in rng.integers(-5, 6, size=2))
        m = tuple(int(v) for v in rng.integers(-5, 6, size=2))
        a = shift(shift(om, n), m)
        b = shift(om, tuple(x + y for x, y in zip(n, m)))
        assert a == b
        for x in [(0, 0), (1, -2), (3, 3)]:
            assert a.value(x) == b.value(x)


def test_shift_translates_window():
    sp = DisorderSpace(kind="iid", d=1, channels=1, count=1, seed=9, W=2.0)
    om = sp.samples()[0]
    moved = shift(om, (1,))
    for x in range(-4, 5):
        assert moved.value((x,)) == om.value((x + 1,))


def test_average_constant_and_point():
    sp = DisorderSpace(kind="point", d=2, channels=1)
    mean, err = average(lambda om: 3.25, sp)
    assert mean == 3.25 and err == 0.0
    mean, _ = average(lambda om: om.value((0, 0)), sp)
    assert mean == 0.0


def test_average_law_of_large_numbers():
    W = 1.0
    sp = DisorderSpace(kind="iid", d=1, channels=1, count=2000, seed=42, W=W)

    def site_mean_shifted(om):
        # values are uniform in [-W/2, W/2]; shift to [0, W] so the target is W/2
        vals = [om.value((x,)) + W / 2 for x in range(16)]
        return float(np.mean(vals))

    mean, err = average(site_mean_shifted, sp)
    assert err > 0
    assert abs(mean - W / 2) < 4 * err


def test_measure_invariance_under_shift():
    sp = DisorderSpace(kind="iid", d=2, channels=1, count=1500, seed=7, W=1.0)

    def f(om):
        return om.value((0, 0)) * om.value((1, 0))

    base, err0 = average(f, sp)
    for n in [(1, 0), (0, -2), (3, 3)]:
        shifted, err1 = average(lambda om: f(shift(om, n)), sp)
        assert abs(shifted - base) < 3 * (err0 + err1)


def test_determinism_bit_exact():
    a = DisorderSpace(kind="iid", d=2, channels=2, count=5, seed=123, W=0.7)
    b = DisorderSpace(kind="iid", d=2, channels=2, count=5, seed=123, W=0.7)
    for sa, sb in zip(a.samples(), b.samples()):
        for x in [(-3, 2), (0, 0), (5, -5)]:
            for c in range(2):
                assert sa.value(x, c) == sb.value(x, c)
    c = DisorderSpace(kind="iid", d=2, channels=2, count=5, seed=124, W=0.7)
    assert any(c.samples()[0].value((0, 0), ch) != a.samples()[0].value((0, 0), ch)
               for ch in range(2))


def test_quasiperiodic_values():
    lam = 0.8
    sp = DisorderSpace(kind="quasiperiodic", d=1, channels=1, count=2, seed=5, lam=lam)
    om = sp.samples()[0]
    vals = [om.value((x,)) for x in range(50)]
    assert max(np.abs(vals)) <= lam + 1e-12
    # shift acts exactly as a window translation
    assert shift(om, (7,)).value((3,)) == om.value((10,))


def test_space_validation():
    with pytest.raises(StructureError):
        DisorderSpace(kind="nope", d=1)
    with pytest.raises(StructureError):
        DisorderSpace(kind="point", d=1, count=3)
    with pytest.raises(StructureError):
        average(lambda om: 1.0, DisorderSpace(kind="iid", d=1, count=2, seed=0), count=5)
