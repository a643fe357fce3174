"""Exact symbolic arithmetic in the twisted crossed product and its Toeplitz extension.

Elements are finite sums of translation words times coefficient functions on the
disorder space,

    a = sum_n  U_n * zeta^k * B_n,      U_n = S_1^{n_1} ... S_d^{n_d},

with the generator relations  S_i b = alpha_i(b) S_i  and
S_i S_j = theta_ij S_j S_i.  The twisting cocycle is the scalar Landau-gauge
arrangement: with flux = p/q (magnetic phase 2*pi*p/q between axes 1 and 2),

    theta(a, b) = zeta^{beta(a,b)},   beta(a, b) = p * a_2 * b_1,  zeta = e^{2 pi i / q},

which is lower-triangular so that theta(., e_d) = 1 and the last generator
stays untwisted (the Toeplitz split needs this).  Phases are tracked as integer
exponents mod q, so every identity of the symbolic layer is exact integer
arithmetic; numbers only appear when a coefficient is evaluated at a sample.

Term maps are keyed by (multi-index, phase exponent).  Keying on the exponent
rather than folding zeta^k into the coefficient keeps equality checking exact:
identities rearranged by associativity or the adjoint produce the same keys
with identical accumulated coefficients.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import cmath
import numpy as np

from .disorder import DisorderConfig, DisorderSpace, shift
from .errors import StructureError


# ---------------------------------------------------------------------------
# Cocycle


@lru_cache(maxsize=None)
def _zeta_table(q):
    # Fill the upper half by conjugation so that zeta^(q-m) == conj(zeta^m)
    # bit-exactly; adjoint identities then hold without rounding.  The half
    # turn is pinned to -1 exactly for the same reason.
    table = [complex(1.0)] * q
    for k in range(1, (q + 1) // 2):
        table[k] = cmath.exp(2j * cmath.pi * k / q)
    if q % 2 == 0:
        table[q // 2] = complex(-1.0)
    for k in range(q // 2 + 1, q):
        table[k] = table[q - k].conjugate()
    return tuple(table)


@dataclass(frozen=True)
class Cocycle:
    """Scalar twisting cocycle, rational flux of 2*pi*flux between axes 1 and 2."""

    d: int
    flux: Fraction = Fraction(0)

    def __post_init__(self):
        # A flux label on a one-dimensional algebra is inert (no pair of axes to
        # twist) but keeps the phase ring intact across edge restrictions.
        object.__setattr__(self, "flux", Fraction(self.flux))

    @property
    def q(self):
        return self.flux.denominator

    @property
    def p(self):
        return self.flux.numerator

    @property
    def is_trivial(self):
        return self.p % self.q == 0

    @property
    def is_real(self):
        # zeta in {1, -1}: admissible in real mode
        return self.q in (1, 2)

    def exponent(self, a, b):
        """beta(a, b): the integer exponent of theta(a, b)."""
        if self.d < 2 or self.p == 0:
            return 0
        return self.p * a[1] * b[0]

    def phase(self, k):
        if self.q == 1:
            return 1.0
        if self.q == 2:
            return 1.0 if k % 2 == 0 else -1.0
        return _zeta_table(self.q)[k % self.q]


# ---------------------------------------------------------------------------
# Coefficient functions (lazy, memoized expression nodes)


class Coefficient:
    """Matrix-valued function on the disorder space, evaluated lazily per config."""

    __slots__ = ("_cache",)

    def __init__(self):
        self._cache = {}

    def eval(self, cfg: DisorderConfig) -> np.ndarray:
        key = cfg.key
        hit = self._cache.get(key)
        if hit is None:
            hit = self._evaluate(cfg)
            hit.setflags(write=False)
            self._cache[key] = hit
        return hit

    def _evaluate(self, cfg):
        raise NotImplementedError

    # Translation-invariant nodes evaluate to the same matrix at every config;
    # only those may be pruned by value (a site-dependent function that happens
    # to vanish on the listed samples must be kept).
    translation_invariant = False


class Const(Coefficient):
    __slots__ = ("matrix",)
    translation_invariant = True

    def __init__(self, matrix, dtype):
        super().__init__()
        m = np.array(matrix, dtype=dtype)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StructureError("coefficient matrices must be square")
        m.setflags(write=False)
        self.matrix = m

    def _evaluate(self, cfg):
        return self.matrix.copy()


class SiteDiag(Coefficient):
    """Diagonal on-site potential: entry (i, i) is scale * omega(0, channels[i])."""

    __slots__ = ("channels", "scale", "dtype")

    def __init__(self, channels, scale, dtype):
        super().__init__()
        self.channels = tuple(channels)
        self.scale = scale
        self.dtype = dtype

    def _evaluate(self, cfg):
        vals = [self.scale * cfg.value((0,) * cfg.space.d, c) for c in self.channels]
        return np.diag(np.array(vals)).astype(self.dtype)


class Table(Coefficient):
    """Explicit values per config key; optional constant fallback."""

    __slots__ = ("values", "constant")

    def __init__(self, values, constant=None):
        super().__init__()
        self.values = {k: np.asarray(v) for k, v in values.items()}
        self.constant = None if constant is None else np.asarray(constant)

    @property
    def translation_invariant(self):
        return self.constant is not None and not self.values

    def _evaluate(self, cfg):
        if cfg.key in self.values:
            return self.values[cfg.key].copy()
        if self.constant is not None:
            return self.constant.copy()
        raise StructureError(
            f"coefficient table has no value at config {cfg.key}; "
            "materialize a larger shift closure or rebuild from the model definition"
        )


class Shifted(Coefficient):
    """alpha^m applied to a coefficient: (alpha^m f)(omega) = f(alpha^{-m} omega)."""

    __slots__ = ("base", "m")

    def __init__(self, base, m):
        super().__init__()
        self.base = base
        self.m = tuple(m)

    @property
    def translation_invariant(self):
        return self.base.translation_invariant

    def _evaluate(self, cfg):
        return self.base.eval(shift(cfg, tuple(-x for x in self.m))).copy()


class Prod(Coefficient):
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        super().__init__()
        self.left = left
        self.right = right

    @property
    def translation_invariant(self):
        return self.left.translation_invariant and self.right.translation_invariant

    def _evaluate(self, cfg):
        return self.left.eval(cfg) @ self.right.eval(cfg)


class Sum(Coefficient):
    __slots__ = ("parts",)

    def __init__(self, parts):
        super().__init__()
        self.parts = tuple(parts)

    @property
    def translation_invariant(self):
        return all(p.translation_invariant for p in self.parts)

    def _evaluate(self, cfg):
        acc = self.parts[0].eval(cfg).copy()
        for p in self.parts[1:]:
            acc = acc + p.eval(cfg)
        return acc


class Adj(Coefficient):
    __slots__ = ("base",)

    def __init__(self, base):
        super().__init__()
        self.base = base

    @property
    def translation_invariant(self):
        return self.base.translation_invariant

    def _evaluate(self, cfg):
        return self.base.eval(cfg).conj().T.copy()


class Conj(Coefficient):
    __slots__ = ("base",)

    def __init__(self, base):
        super().__init__()
        self.base = base

    @property
    def translation_invariant(self):
        return self.base.translation_invariant

    def _evaluate(self, cfg):
        return self.base.eval(cfg).conj().copy()


class Scaled(Coefficient):
    __slots__ = ("base", "factor")

    def __init__(self, base, factor):
        super().__init__()
        self.base = base
        self.factor = factor

    @property
    def translation_invariant(self):
        return self.base.translation_invariant

    def _evaluate(self, cfg):
        return self.factor * self.base.eval(cfg)


class Block(Coefficient):
    """Block matrix of coefficient nodes (entries may be None for zero blocks)."""

    __slots__ = ("blocks", "sizes", "dtype")

    def __init__(self, blocks, sizes, dtype):
        super().__init__()
        self.blocks = tuple(tuple(row) for row in blocks)
        self.sizes = tuple(sizes)
        self.dtype = dtype

    @property
    def translation_invariant(self):
        return all(
            b.translation_invariant for row in self.blocks for b in row if b is not None
        )

    def _evaluate(self, cfg):
        rows = []
        for i, row in enumerate(self.blocks):
            cols = []
            for j, b in enumerate(row):
                if b is None:
                    cols.append(np.zeros((self.sizes[i], self.sizes[j]), dtype=self.dtype))
                else:
                    cols.append(b.eval(cfg).astype(self.dtype))
            rows.append(cols)
        return np.block(rows)


# ---------------------------------------------------------------------------
# Crossed-product elements


def _dtype_for(field):
    if field == "real":
        return np.float64
    if field == "complex":
        return np.complex128
    raise StructureError(f"unknown field {field!r}")


@dataclass(frozen=True)
class CrossedElement:
    """Finite sum over (multi-index, phase exponent) keys, coefficients on the right.

    ``d`` is the rank of the translation group; ``cdim`` the dimension of the
    configuration space the coefficients live over (differs from d only for
    edge-restricted elements, whose coefficients still see the full space).
    """

    d: int
    nu: int
    field: str
    cocycle: Cocycle
    space: DisorderSpace
    terms: dict
    cdim: int = None

    def __post_init__(self):
        if self.cdim is None:
            object.__setattr__(self, "cdim", self.d)
        norm = {}
        q = self.cocycle.q
        for (n, k), coeff in self.terms.items():
            key = (tuple(int(x) for x in n), int(k) % q)
            if len(key[0]) != self.d:
                raise StructureError(f"multi-index {n} has wrong length for d={self.d}")
            if key in norm:
                norm[key] = Sum((norm[key], coeff))
            else:
                norm[key] = coeff
        object.__setattr__(self, "terms", norm)

    @property
    def dtype(self):
        return _dtype_for(self.field)

    def is_zero(self):
        return not self.terms

    def support(self):
        return sorted({n for n, _ in self.terms})

    def hop_range(self):
        return max((max(abs(x) for x in n) for n, _ in self.terms), default=0)

    # -- ring operations ----------------------------------------------------

    def _check_compatible(self, other):
        if (
            self.d != other.d
            or self.nu != other.nu
            or self.field != other.field
            or self.cocycle != other.cocycle
            or self.space is not other.space
            or self.cdim != other.cdim
        ):
            raise StructureError("crossed elements live in different algebras")

    def __add__(self, other):
        self._check_compatible(other)
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = Sum((terms[key], coeff)) if key in terms else coeff
        return self._replace_terms(terms)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, factor):
        return self._replace_terms(
            {key: Scaled(c, factor) for key, c in self.terms.items()}
        )

    def __mul__(self, other):
        """Twisted convolution: U_n b . U_m c = zeta^{beta(m,n)} U_{n+m} alpha^{-m}(b) c."""
        self._check_compatible(other)
        beta = self.cocycle.exponent
        terms = {}
        for (n, ka), ca in sorted(self.terms.items()):
            for (m, kb), cb in sorted(other.terms.items()):
                key = (
                    tuple(a + b for a, b in zip(n, m)),
                    (ka + kb + beta(m, n)) % self.cocycle.q,
                )
                piece = Prod(Shifted(ca, self._pad(tuple(-x for x in m))), cb)
                terms[key] = Sum((terms[key], piece)) if key in terms else piece
        return self._replace_terms(terms, prune=True)

    def adjoint(self):
        """(U_n zeta^k b)^* = zeta^{beta(n,n)-k} U_{-n} alpha^n(b^*)."""
        beta = self.cocycle.exponent
        terms = {}
        for (n, k), c in self.terms.items():
            key = (tuple(-x for x in n), (beta(n, n) - k) % self.cocycle.q)
            piece = Shifted(Adj(c), self._pad(n))
            terms[key] = Sum((terms[key], piece)) if key in terms else piece
        return self._replace_terms(terms)

    def conjugate(self):
        """Entrywise complex conjugation; defined for real-valued cocycles only."""
        if not self.cocycle.is_real:
            raise StructureError("conjugation maps flux p to -p; only +/-1 cocycles supported")
        return self._replace_terms(
            {(n, (-k) % self.cocycle.q): Conj(c) for (n, k), c in self.terms.items()}
        )

    def transpose(self):
        return self.adjoint().conjugate()

    def _pad(self, n):
        # coefficient shifts act on the configuration space (cdim axes)
        return tuple(n) + (0,) * (self.cdim - self.d)

    def _replace_terms(self, terms, prune=False):
        if prune:
            terms = {key: c for key, c in terms.items() if not _is_zero_coefficient(c, self.space)}
        return CrossedElement(
            d=self.d, nu=self.nu, field=self.field, cocycle=self.cocycle,
            space=self.space, terms=terms, cdim=self.cdim,
        )

    def pruned(self):
        return self._replace_terms(dict(self.terms), prune=True)

    # -- materialization ----------------------------------------------------

    def coefficient_at(self, n, cfg):
        """Sum of zeta^k * coefficient over phase keys at multi-index n."""
        n = tuple(n)
        acc = np.zeros((self.nu, self.nu), dtype=self.dtype)
        for (m, k), c in sorted(self.terms.items()):
            if m == n:
                acc = acc + np.asarray(self.cocycle.phase(k) * c.eval(cfg), dtype=self.dtype)
        return acc


def _is_zero_coefficient(coeff, space, radius=2):
    """Value-based zero test used for pruning.

    Translation-invariant coefficients are decided by a single probe.  Site
    dependent ones are probed on every listed sample shifted through a small
    ball; under the materialized-sample-space semantics a function vanishing on
    that set is treated as zero.  The probes are deterministic, so pruning is
    reproducible; an accidental zero of a genuinely nonzero function on all
    probes would require exact floating cancellations at every point.
    """
    probe = DisorderConfig(space, 0, (0,) * space.d)
    if coeff.translation_invariant:
        return not np.any(coeff.eval(probe))
    from itertools import product as _product

    for base in range(space.count):
        for off in _product(range(-radius, radius + 1), repeat=space.d):
            cfg = DisorderConfig(space, base, off)
            if np.any(coeff.eval(cfg)):
                return False
    return True


# -- constructors -----------------------------------------------------------


def zero_element(space, cocycle, nu=1, field="complex"):
    return CrossedElement(d=cocycle.d, nu=nu, field=field, cocycle=cocycle,
                          space=space, terms={})


def from_coefficient(coeff, space, cocycle, nu=1, field="complex"):
    d = cocycle.d
    return CrossedElement(d=d, nu=nu, field=field, cocycle=cocycle, space=space,
                          terms={((0,) * d, 0): coeff})


def constant(matrix, space, cocycle, field="complex"):
    m = np.asarray(matrix)
    return from_coefficient(Const(m, _dtype_for(field)), space, cocycle,
                            nu=m.shape[0], field=field)


def identity(space, cocycle, nu=1, field="complex"):
    return constant(np.eye(nu), space, cocycle, field=field)


def generator(space, cocycle, axis, power=1, nu=1, field="complex"):
    """S_axis^power as an element (1-based axis).

    Negative powers use (S_axis^{-1}) = S_axis^*; the phase is handled by the
    adjoint so that generator(axis, -1) == generator(axis, 1).adjoint().
    """
    d = cocycle.d
    if not 1 <= axis <= d:
        raise StructureError(f"axis {axis} out of range 1..{d}")
    e = identity(space, cocycle, nu=nu, field=field)
    if power == 0:
        return e
    n = tuple(power if i == axis - 1 else 0 for i in range(d))
    one = Const(np.eye(nu), _dtype_for(field))
    if power > 0:
        return CrossedElement(d=d, nu=nu, field=field, cocycle=cocycle, space=space,
                              terms={(n, 0): one})
    pos = generator(space, cocycle, axis, -power, nu=nu, field=field)
    return pos.adjoint()


def symbolically_equal(a: CrossedElement, b: CrossedElement) -> bool:
    """Exact term-map equality: coefficients compared bit for bit at every listed
    sample, with a key missing on one side standing for the zero coefficient."""
    a._check_compatible(b)
    samples = a.space.samples()
    zero = np.zeros((a.nu, a.nu), dtype=a.dtype)
    for key in set(a.terms) | set(b.terms):
        ca, cb = a.terms.get(key), b.terms.get(key)
        for cfg in samples:
            va = zero if ca is None else ca.eval(cfg)
            vb = zero if cb is None else cb.eval(cfg)
            if not np.array_equal(va, vb):
                return False
    return True


def toeplitz_equal(a: "ToeplitzElement", b: "ToeplitzElement") -> bool:
    """Exact normal-form equality of extension-algebra elements."""
    zero = zero_element(a.proto.space, a.proto.cocycle, nu=a.proto.nu, field=a.proto.field)
    for k in set(a.unitary) | set(b.unitary):
        if not symbolically_equal(a.unitary.get(k, zero), b.unitary.get(k, zero)):
            return False
    for k in set(a.corrections) | set(b.corrections):
        if not symbolically_equal(a.corrections.get(k, zero), b.corrections.get(k, zero)):
            return False
    return True


# ---------------------------------------------------------------------------
# Conditional expectation and position commutators


@dataclass
class CoefficientElement:
    """Materialized coefficient: one matrix per listed sample point."""

    values: dict  # sample key -> matrix
    nu: int
    field: str

    def matrices(self):
        return [self.values[k] for k in sorted(self.values)]


def conditional_expectation(a: CrossedElement) -> CoefficientElement:
    """Projection onto the zero-translation coefficient, Phi_0."""
    zero = (0,) * a.d
    values = {}
    for cfg in a.space.samples():
        values[cfg.key] = a.coefficient_at(zero, cfg)
    return CoefficientElement(values=values, nu=a.nu, field=a.field)


def position_commutator(j: int, a: CrossedElement) -> CrossedElement:
    """[X_j, a]: each word U_n b is scaled by its displacement n_j."""
    if not 1 <= j <= a.d:
        raise StructureError(f"axis {j} out of range 1..{a.d}")
    terms = {}
    for (n, k), c in a.terms.items():
        if n[j - 1] != 0:
            terms[(n, k)] = Scaled(c, float(n[j - 1]))
    return a._replace_terms(terms)


# ---------------------------------------------------------------------------
# Serialization (CLI persistence / audit surface)


def _matrix_to_json(m):
    m = np.asarray(m)
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def _matrix_from_json(obj, dtype):
    m = np.array(obj["re"], dtype=np.complex128) + 1j * np.array(obj["im"])
    return m.astype(dtype)


def to_json(a: CrossedElement) -> dict:
    """Phase exponents are folded into per-sample coefficient values.

    Site-dependent coefficients serialize by their values on the listed samples
    only; deserialized elements can be evaluated away from those samples only
    when the values are constant across the space.
    """
    samples = a.space.samples()
    by_n = {}
    for (n, k), c in a.pruned().terms.items():
        for cfg in samples:
            val = np.asarray(a.cocycle.phase(k) * c.eval(cfg), dtype=a.dtype)
            if n in by_n and cfg.key in by_n[n]:
                by_n[n][cfg.key] = by_n[n][cfg.key] + val
            else:
                by_n.setdefault(n, {})[cfg.key] = val
    terms = []
    for n in sorted(by_n):
        terms.append({
            "n": list(n),
            "coeff": [_matrix_to_json(by_n[n][cfg.key]) for cfg in samples],
        })
    return {
        "d": a.d,
        "nu": a.nu,
        "field": a.field,
        "flux": [a.cocycle.p, a.cocycle.q],
        "terms": terms,
    }


def from_json(obj: dict, space: DisorderSpace) -> CrossedElement:
    cocycle = Cocycle(d=obj["d"], flux=Fraction(obj["flux"][0], obj["flux"][1]))
    dtype = _dtype_for(obj["field"])
    samples = space.samples()
    terms = {}
    for entry in obj["terms"]:
        n = tuple(entry["n"])
        mats = [_matrix_from_json(mj, dtype) for mj in entry["coeff"]]
        if all(np.array_equal(m, mats[0]) for m in mats):
            coeff = Const(mats[0], dtype)
        else:
            coeff = Table({cfg.key: m for cfg, m in zip(samples, mats)})
        terms[(n, 0)] = coeff
    return CrossedElement(d=obj["d"], nu=obj["nu"], field=obj["field"],
                          cocycle=cocycle, space=space, terms=terms)


# ---------------------------------------------------------------------------
# Toeplitz extension in the last direction


def alpha_last(c: CrossedElement, k: int) -> CrossedElement:
    """alpha_d^k(c) = S_d^k c S_d^{-k}, computed in the crossed algebra."""
    if k == 0:
        return c
    s = generator(c.space, c.cocycle, c.d, power=k, nu=c.nu, field=c.field)
    return (s * c) * s.adjoint()


def _check_edge_supported(c: CrossedElement):
    for (n, _k) in c.terms:
        if n[-1] != 0:
            raise StructureError("Toeplitz coefficients must not translate in the split axis")


@dataclass(frozen=True)
class ToeplitzElement:
    """Normal form  sum_k W(k) c_k  +  sum_{a,b} V^a p c_{a,b} (V*)^b  with V the isometry.

    ``unitary`` maps k to c_k (k > 0 meaning V^k c_k, k < 0 meaning (V*)^{|k|} c_k);
    ``corrections`` maps (a, b) >= (0, 0) to the coefficient between p and (V*)^b.
    All coefficients are crossed elements supported in the first d-1 axes.
    """

    unitary: dict
    corrections: dict
    proto: CrossedElement  # zero element fixing algebra metadata

    def __post_init__(self):
        for c in list(self.unitary.values()) + list(self.corrections.values()):
            _check_edge_supported(c)
        object.__setattr__(self, "unitary",
                           {k: v for k, v in self.unitary.items() if not v.pruned().is_zero()})
        object.__setattr__(self, "corrections",
                           {k: v for k, v in self.corrections.items() if not v.pruned().is_zero()})

    def _zero(self):
        return zero_element(self.proto.space, self.proto.cocycle,
                            nu=self.proto.nu, field=self.proto.field)

    def __add__(self, other):
        unitary = dict(self.unitary)
        for k, c in other.unitary.items():
            unitary[k] = unitary[k] + c if k in unitary else c
        corrections = dict(self.corrections)
        for k, c in other.corrections.items():
            corrections[k] = corrections[k] + c if k in corrections else c
        return ToeplitzElement(unitary, corrections, self.proto)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, factor):
        return ToeplitzElement({k: c.scale(factor) for k, c in self.unitary.items()},
                               {k: c.scale(factor) for k, c in self.corrections.items()},
                               self.proto)

    def __mul__(self, other):
        acc_u, acc_c = {}, {}

        def add_u(k, c):
            acc_u[k] = acc_u[k] + c if k in acc_u else c

        def add_c(a, b, c):
            acc_c[(a, b)] = acc_c[(a, b)] + c if (a, b) in acc_c else c

        for j, cj in sorted(self.unitary.items()):
            for k, ck in sorted(other.unitary.items()):
                coeff = alpha_last(cj, -k) * ck
                add_u(j + k, coeff)
                if j > 0 and k < 0:
                    # V^j (V*)^m = W(j-m) - sum_r V^{j-r} p (V*)^{m-r}
                    m = -k
                    for r in range(1, min(j, m) + 1):
                        add_c(j - r, m - r, alpha_last(coeff, -(m - r)).scale(-1.0))
            for (a, b), ck in sorted(other.corrections.items()):
                new_a = j + a
                if new_a >= 0:
                    add_c(new_a, b, alpha_last(cj, -a) * ck)
        for (a, b), cj in sorted(self.corrections.items()):
            for k, ck in sorted(other.unitary.items()):
                new_b = b - k
                if new_b >= 0:
                    add_c(a, new_b, cj * alpha_last(ck, -new_b))
            for (a2, b2), ck in sorted(other.corrections.items()):
                if a2 == b:
                    add_c(a, b2, cj * ck)
        return ToeplitzElement(acc_u, acc_c, self.proto)

    def adjoint(self):
        unitary = {}
        for k, c in self.unitary.items():
            unitary[-k] = alpha_last(c.adjoint(), k)
        corrections = {}
        for (a, b), c in self.corrections.items():
            key = (b, a)
            corrections[key] = corrections[key] + c.adjoint() if key in corrections else c.adjoint()
        return ToeplitzElement(unitary, corrections, self.proto)

    def in_boundary_ideal(self):
        return not self.unitary


def toeplitz_isometry(space, cocycle, nu=1, field="complex"):
    """The lift of the last-axis generator: the isometry V with V* V = 1, V V* = 1 - p."""
    one = identity(space, cocycle, nu=nu, field=field)
    return ToeplitzElement({1: one}, {}, zero_element(space, cocycle, nu=nu, field=field))


def toeplitz_identity(space, cocycle, nu=1, field="complex"):
    one = identity(space, cocycle, nu=nu, field=field)
    return ToeplitzElement({0: one}, {}, zero_element(space, cocycle, nu=nu, field=field))


def toeplitz_projection(space, cocycle, nu=1, field="complex"):
    """p = 1 - V V*, the boundary-layer projection."""
    one = identity(space, cocycle, nu=nu, field=field)
    return ToeplitzElement({}, {(0, 0): one}, zero_element(space, cocycle, nu=nu, field=field))


def toeplitz_lift(a: CrossedElement) -> ToeplitzElement:
    """Lift through the normal form sum_k S_d^k c_k, replacing S_d by the isometry."""
    zero = zero_element(a.space, a.cocycle, nu=a.nu, field=a.field)
    unitary = {}
    for (n, k), c in a.terms.items():
        kd = n[-1]
        cn = n[:-1] + (0,)
        piece = CrossedElement(d=a.d, nu=a.nu, field=a.field, cocycle=a.cocycle,
                               space=a.space, terms={(cn, k): c}, cdim=a.cdim)
        unitary[kd] = unitary[kd] + piece if kd in unitary else piece
    return ToeplitzElement(unitary, {}, zero)


def toeplitz_quotient(t: ToeplitzElement) -> CrossedElement:
    """The quotient map: V goes back to S_d, the p-ideal is killed."""
    proto = t.proto
    acc = zero_element(proto.space, proto.cocycle, nu=proto.nu, field=proto.field)
    for k, c in sorted(t.unitary.items()):
        s = generator(proto.space, proto.cocycle, proto.d, power=k,
                      nu=proto.nu, field=proto.field) if k else None
        acc = acc + (s * c if s is not None else c)
    return acc
