import numpy as np
import pytest

from bulkedge.crossed import Coefficient, Const, CrossedElement
from bulkedge.disorder import DisorderSpace, _site_hash


class IntSiteDiag(Coefficient):
    """Deterministic integer-valued site function (lazy, any offset).

    Keeps randomized symbolic identities exact: integer matrices make every
    float operation exact while still exercising the shift action.
    """

    __slots__ = ("nu", "salt")
    translation_invariant = False

    def __init__(self, nu, salt):
        super().__init__()
        self.nu = nu
        self.salt = salt

    def _evaluate(self, cfg):
        vals = []
        for i in range(self.nu):
            h = _site_hash(self.salt, (cfg.base, i) + cfg.offset)
            vals.append(float(h % 5) - 2.0)
        return np.diag(vals).astype(complex)


def random_element(rng, space, cocycle, nu=1, max_terms=4, hop=2, site_fraction=0.5):
    """Random finitely-supported element with integer-valued coefficients."""
    terms = {}
    for _ in range(rng.integers(1, max_terms + 1)):
        n = tuple(int(v) for v in rng.integers(-hop, hop + 1, size=cocycle.d))
        if rng.random() < site_fraction:
            coeff = IntSiteDiag(nu, int(rng.integers(0, 2 ** 31)))
        else:
            mat = rng.integers(-2, 3, size=(nu, nu)).astype(complex)
            if not np.any(mat):
                mat[0, 0] = 1.0
            coeff = Const(mat, np.complex128)
        key = (n, 0)
        terms[key] = coeff if key not in terms else coeff
    return CrossedElement(d=cocycle.d, nu=nu, field="complex", cocycle=cocycle,
                          space=space, terms=terms)


@pytest.fixture
def point_space_2d():
    return DisorderSpace(kind="point", d=2, channels=2)


@pytest.fixture
def iid_space_2d():
    return DisorderSpace(kind="iid", d=2, channels=2, count=3, seed=5, W=1.0)
