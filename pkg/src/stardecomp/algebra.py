"""Finite-dimensional real *-algebras given by structure constants.

An algebra of dimension ``d`` is stored as a tensor ``mul`` with
``e_i e_j = sum_k mul[i, j, k] e_k``, a unit vector, and an involution matrix
whose column ``i`` holds the coordinates of ``e_i^*``.  The catalog below
fixes an explicit ordered basis for every algebra that appears in the
decomposition tables.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AlgebraError, NotAUnit, UnknownAlgebra

_RANK_TOL = 1e-9


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def orthonormal_span(vectors: np.ndarray, tol: float = _RANK_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) for the column span of ``vectors``."""
    vectors = np.asarray(vectors, dtype=float)
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0))
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((vectors.shape[0], 0))
    return u[:, s > tol * max(1.0, s[0])]


def null_space(a: np.ndarray, rtol: float = 1e-10, atol: float = 0.0) -> np.ndarray:
    """Orthonormal basis of the right null space; singular values below
    ``max(rtol * largest, atol)`` count as zero."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    ncols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(ncols)
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] <= atol:
        return np.eye(ncols)
    rank = int(np.sum(s > max(rtol * s[0], atol)))
    return vt[rank:].T.copy()


class StarAlgebra:
    """A finite-dimensional associative real algebra with involution."""

    def __init__(self, name: str, mul, unit, invol, basis_labels: Sequence[str] | None = None):
        mul = np.asarray(mul, dtype=float)
        if mul.ndim != 3 or mul.shape[0] != mul.shape[1] or mul.shape[1] != mul.shape[2]:
            raise AlgebraError(f"mul table must have shape (d, d, d), got {mul.shape}")
        d = mul.shape[0]
        unit = np.asarray(unit, dtype=float)
        invol = np.asarray(invol, dtype=float)
        if unit.shape != (d,) or invol.shape != (d, d):
            raise AlgebraError("unit/invol shapes do not match the dimension")
        if basis_labels is None:
            basis_labels = [f"e{i}" for i in range(d)]
        if len(basis_labels) != d:
            raise AlgebraError("need one label per basis element")
        self.name = name
        self.dim = d
        self.mul = _frozen(mul)
        self.unit = _frozen(unit)
        self.invol = _frozen(invol)
        self.basis_labels = tuple(basis_labels)
        # trace of left multiplication by each basis element
        self._traces = _frozen(np.einsum("ijj->i", self.mul))

    def __repr__(self):
        return f"StarAlgebra({self.name!r}, dim={self.dim})"

    def __eq__(self, other):
        if not isinstance(other, StarAlgebra):
            return NotImplemented
        return (self.dim == other.dim and np.array_equal(self.mul, other.mul)
                and np.array_equal(self.unit, other.unit)
                and np.array_equal(self.invol, other.invol))

    def __hash__(self):
        return hash((self.name, self.dim))

    @property
    def is_integral(self) -> bool:
        tables = (self.mul, self.unit, self.invol)
        return all(np.array_equal(t, np.round(t)) for t in tables)

    # -- coordinate-level operations ------------------------------------
    def product(self, a, b) -> np.ndarray:
        return np.einsum("i,j,ijk->k", a, b, self.mul)

    def star(self, a) -> np.ndarray:
        return self.invol @ np.asarray(a, dtype=float)

    def left_matrix(self, a) -> np.ndarray:
        """Matrix of ``x -> a x`` in the algebra basis."""
        return np.einsum("i,ijk->kj", a, self.mul)

    def right_matrix(self, a) -> np.ndarray:
        """Matrix of ``x -> x a``."""
        return np.einsum("j,ijk->ki", a, self.mul)

    def trace(self, a) -> float:
        return float(self._traces @ a)

    def element(self, coords) -> "AlgebraElement":
        return AlgebraElement(self, coords)

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, self.unit)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, np.zeros(self.dim))

    def basis_element(self, label_or_index) -> "AlgebraElement":
        i = label_or_index
        if isinstance(i, str):
            i = self.basis_labels.index(i)
        v = np.zeros(self.dim)
        v[i] = 1.0
        return AlgebraElement(self, v)

    def hermitian_basis(self) -> np.ndarray:
        """Columns spanning the self-adjoint elements."""
        return orthonormal_span(np.eye(self.dim) + self.invol)

    # -- serialization ---------------------------------------------------
    def to_json(self, ideals: Mapping[str, "StarIdeal"] | None = None) -> dict:
        out = {
            "name": self.name,
            "dim": self.dim,
            "basis": list(self.basis_labels),
            "unit": self.unit.tolist(),
            "mul": self.mul.tolist(),
            "invol": self.invol.tolist(),
        }
        if ideals:
            out["ideals"] = {k: [g.coords.tolist() for g in v.generators] for k, v in ideals.items()}
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> tuple["StarAlgebra", dict]:
        try:
            alg = cls(obj["name"], obj["mul"], obj["unit"], obj["invol"], obj.get("basis"))
        except KeyError as exc:
            raise AlgebraError(f"algebra JSON is missing field {exc}") from None
        if "dim" in obj and int(obj["dim"]) != alg.dim:
            raise AlgebraError("declared dim does not match the tables")
        ideals = {name: ideal_from_generators(alg, [alg.element(g) for g in gens])
                  for name, gens in obj.get("ideals", {}).items()}
        return alg, ideals


class AlgebraElement:
    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: StarAlgebra, coords):
        coords = np.array(coords, dtype=float)
        if coords.shape != (algebra.dim,):
            raise AlgebraError(f"expected {algebra.dim} coordinates, got shape {coords.shape}")
        coords.setflags(write=False)
        self.algebra = algebra
        self.coords = coords

    def _check(self, other):
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraError("elements belong to different algebras")

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check(other)
        return AlgebraElement(self.algebra, self.coords + other.coords)

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check(other)
        return AlgebraElement(self.algebra, self.coords - other.coords)

    def __neg__(self):
        return AlgebraElement(self.algebra, -self.coords)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return AlgebraElement(self.algebra, self.algebra.product(self.coords, other.coords))
        if np.isscalar(other):
            return AlgebraElement(self.algebra, self.coords * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return AlgebraElement(self.algebra, self.coords * float(other))
        return NotImplemented

    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, self.algebra.star(self.coords))

    def inverse(self, tol: float = 1e-12) -> "AlgebraElement":
        chi = self.algebra.left_matrix(self.coords)
        s = np.linalg.svd(chi, compute_uv=False)
        if s[-1] <= tol * max(1.0, s[0]):
            raise NotAUnit(f"element {self.coords.tolist()} is not invertible")
        return AlgebraElement(self.algebra, np.linalg.solve(chi, self.algebra.unit))

    def regular_representation(self) -> np.ndarray:
        return self.algebra.left_matrix(self.coords)

    def allclose(self, other, atol=1e-12) -> bool:
        return bool(np.allclose(self.coords, other.coords, rtol=0.0, atol=atol))

    def __repr__(self):
        terms = [f"{c:g}*{lab}" for c, lab in zip(self.coords, self.algebra.basis_labels) if c != 0]
        return f"<{self.algebra.name}: {' + '.join(terms) or '0'}>"


def regular_representation(a: AlgebraElement) -> np.ndarray:
    return a.regular_representation()


@dataclass(frozen=True)
class StarIdeal:
    """A two-sided *-ideal: generators plus an orthonormal basis of its span."""

    algebra: StarAlgebra
    generators: tuple
    basis: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def residual(self, coords) -> float:
        coords = np.asarray(coords, dtype=float)
        return float(np.max(np.abs(coords - self.projector @ coords), initial=0.0))

    def contains(self, element, tol: float = 1e-12) -> bool:
        coords = element.coords if isinstance(element, AlgebraElement) else element
        return self.residual(coords) <= tol


def ideal_from_generators(algebra: StarAlgebra, gens: Sequence[AlgebraElement]) -> StarIdeal:
    """Smallest subspace containing ``gens`` that is closed under two-sided
    multiplication by the algebra and under the involution."""
    if not gens:
        raise AlgebraError("an ideal needs at least one generator")
    d = algebra.dim
    lefts = [algebra.left_matrix(np.eye(d)[i]) for i in range(d)]
    rights = [algebra.right_matrix(np.eye(d)[i]) for i in range(d)]
    span = orthonormal_span(np.column_stack([g.coords for g in gens]))
    while True:
        images = [span, algebra.invol @ span]
        images += [m @ span for m in lefts] + [m @ span for m in rights]
        grown = orthonormal_span(np.hstack(images))
        if grown.shape[1] == span.shape[1]:
            break
        span = grown
    span = _tidy_basis(span)
    span.setflags(write=False)
    return StarIdeal(algebra, tuple(gens), span)


def _tidy_basis(span: np.ndarray) -> np.ndarray:
    # Prefer coordinate axes when the span is a coordinate subspace, so
    # catalog ideals come out as e.g. span{X, X^2} rather than a rotation.
    d, m = span.shape
    if m == 0:
        return span
    proj = span @ span.T
    axes = [i for i in range(d) if abs(proj[i, i] - 1.0) < 1e-12]
    if len(axes) == m:
        return np.eye(d)[:, axes]
    return span


class InvolutionClass(str, Enum):
    standard = "standard"
    nonstandard = "nonstandard"
    not_local = "not_local"


@dataclass(frozen=True)
class Classification:
    radical: np.ndarray
    is_local: bool
    involution: InvolutionClass
    quotient_dim: int


def radical_basis(algebra: StarAlgebra) -> np.ndarray:
    """Jacobson radical as the kernel of the trace form ``tr(chi(xy))``.

    Over a field of characteristic zero this kernel is exactly the largest
    nilpotent ideal.
    """
    form = np.einsum("ijm,m->ij", algebra.mul, algebra._traces)
    basis = null_space(form, rtol=1e-10)
    return _tidy_basis(basis)


_index_cache: dict = {}


def nilpotency_index(algebra: StarAlgebra) -> int:
    """Smallest m with J^m = 0 for the radical J (1 for semisimple algebras)."""
    key = (algebra.name, algebra.mul.tobytes())
    if key in _index_cache:
        return _index_cache[key]
    rad = radical_basis(algebra)
    power, m = rad, 1
    while power.shape[1]:
        prods = np.einsum("ia,jb,ijk->kab", power, rad, algebra.mul).reshape(algebra.dim, -1)
        power = orthonormal_span(prods)
        m += 1
        if m > algebra.dim + 1:  # cannot happen for a genuine radical
            break
    _index_cache[key] = m
    return m


def _quotient(algebra: StarAlgebra, rad: np.ndarray):
    """Structure constants of A/J on an orthonormal complement of J."""
    d = algebra.dim
    comp = null_space(rad.T) if rad.shape[1] else np.eye(d)
    comp = _tidy_basis(comp)
    q = comp.shape[1]
    frame = np.hstack([comp, rad])
    inv = np.linalg.inv(frame)
    prods = np.einsum("ia,jb,ijk->abk", comp, comp, algebra.mul)
    qmul = np.einsum("ck,abk->abc", inv[:q], prods)
    qunit = (inv @ algebra.unit)[:q]
    qinvol = (inv @ (algebra.invol @ comp))[:q]
    return qmul, qunit, qinvol


def _spectral_classes(eigs: np.ndarray, tol: float) -> int:
    reps: list[complex] = []
    for z in eigs:
        if not any(abs(z - r) < tol or abs(z - np.conj(r)) < tol for r in reps):
            reps.append(z)
    return len(reps)


def radical_and_classify(algebra: StarAlgebra, samples: int = 16) -> Classification:
    rad = radical_basis(algebra)
    q = algebra.dim - rad.shape[1]
    qmul, qunit, qinvol = _quotient(algebra, rad)
    is_local = q in (1, 2, 4)
    if is_local and q > 1:
        # A division algebra generates a field from every element, so each
        # left multiplication has a single conjugate class of eigenvalues.
        rng = np.random.default_rng(0)
        probes = list(np.eye(q)) + list(rng.standard_normal((samples, q)))
        for b in probes:
            chi = np.einsum("i,ijk->kj", b, qmul)
            eigs = np.linalg.eigvals(chi)
            scale = 1.0 + np.max(np.abs(eigs))
            if _spectral_classes(eigs, 1e-7 * scale) > 1:
                is_local = False
                break
    if not is_local:
        kind = InvolutionClass.not_local
    elif q == 1:
        kind = InvolutionClass.standard
    else:
        # standard iff the involution is the canonical conjugation z -> 2 Re(z) - z
        traces = np.einsum("ijj->i", qmul)
        conj = (2.0 / q) * np.outer(qunit, traces) - np.eye(q)
        kind = (InvolutionClass.standard if np.allclose(conj, qinvol, atol=1e-9)
                else InvolutionClass.nonstandard)
    rad = rad.copy()
    rad.setflags(write=False)
    return Classification(rad, is_local, kind, q)


def check_axioms(algebra: StarAlgebra, tol: float = 1e-12) -> dict:
    """Per-axiom maximal violation; exact comparison for integer tables."""
    c = algebra.mul
    d = algebra.dim
    eye = np.eye(d)
    left = np.einsum("ijm,mkl->ijkl", c, c)
    right = np.einsum("jkm,iml->ijkl", c, c)
    u = algebra.unit
    unit_left = np.einsum("i,ijk->jk", u, c) - eye
    unit_right = np.einsum("j,ijk->ik", u, c) - eye
    J = algebra.invol
    lhs = np.einsum("lk,ijk->ijl", J, c)  # (e_i e_j)^*
    rhs = np.einsum("aj,bi,abl->ijl", J, J, c)  # e_j^* e_i^*
    violations = {
        "associative": float(np.max(np.abs(left - right))),
        "unit": float(max(np.max(np.abs(unit_left)), np.max(np.abs(unit_right)))),
        "involutive": float(np.max(np.abs(J @ J - eye))),
        "anti_multiplicative": float(np.max(np.abs(lhs - rhs))),
        "fixes_unit": float(np.max(np.abs(J @ u - u))),
    }
    limit = 0.0 if algebra.is_integral else tol
    report = {name: {"violation": v, "passed": v <= limit} for name, v in violations.items()}
    report["passed"] = all(r["passed"] for r in report.values())
    report["max_violation"] = max(violations.values())
    return report


def tensor_product(a1: StarAlgebra, i1: StarIdeal, a2: StarAlgebra, i2: StarIdeal,
                   name: str | None = None) -> tuple[StarAlgebra, StarIdeal]:
    """Tensor product of *-algebras together with the ideal generated by I1 (x) I2."""
    d1, d2 = a1.dim, a2.dim
    mul = np.einsum("ack,bdl->abcdkl", a1.mul, a2.mul).reshape(d1 * d2, d1 * d2, d1 * d2)
    unit = np.kron(a1.unit, a2.unit)
    invol = np.kron(a1.invol, a2.invol)
    labels = [f"{x}*{y}" for x in a1.basis_labels for y in a2.basis_labels]
    alg = StarAlgebra(name or f"{a1.name}(x){a2.name}", mul, unit, invol, labels)
    gens = [alg.element(np.kron(b1, b2)) for b1 in i1.basis.T for b2 in i2.basis.T]
    return alg, ideal_from_generators(alg, gens)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def _table(labels: Sequence[str], rules: Mapping[tuple[str, str], Mapping[str, float]]) -> np.ndarray:
    idx = {lab: i for i, lab in enumerate(labels)}
    d = len(labels)
    mul = np.zeros((d, d, d))
    for (a, b), out in rules.items():
        for lab, coef in out.items():
            mul[idx[a], idx[b], idx[lab]] = coef
    return mul


def _with_one(labels, rules):
    """Add the rules 1*x = x*1 = x for the first label."""
    one = labels[0]
    full = dict(rules)
    for lab in labels:
        full[(one, lab)] = {lab: 1}
        full[(lab, one)] = {lab: 1}
    return _table(labels, full)


def _diag_invol(signs) -> np.ndarray:
    return np.diag(np.asarray(signs, dtype=float))


def _perm_invol(images: Sequence[tuple[int, float]]) -> np.ndarray:
    """images[i] = (j, s) means e_i^* = s e_j."""
    d = len(images)
    J = np.zeros((d, d))
    for i, (j, s) in enumerate(images):
        J[j, i] = s
    return J


def _real():
    return ["1"], _with_one(["1"], {}), [1.0]


def _complex():
    labels = ["1", "i"]
    return labels, _with_one(labels, {("i", "i"): {"1": -1}}), [1.0, 0.0]


def _jet(order):
    labels = ["1"] + ["X" if p == 1 else f"X^{p}" for p in range(1, order)]
    rules = {}
    for p in range(1, order):
        for q in range(1, order):
            if p + q < order:
                rules[(labels[p], labels[q])] = {labels[p + q]: 1}
    return labels, _with_one(labels, rules), [1.0] + [0.0] * (order - 1)


def _twojet():
    labels = ["1", "X", "Y"]
    return labels, _with_one(labels, {}), [1.0, 0.0, 0.0]


def _biquad():
    labels = ["1", "X", "Y", "XY"]
    rules = {("X", "Y"): {"XY": 1}, ("Y", "X"): {"XY": 1}}
    return labels, _with_one(labels, rules), [1.0, 0.0, 0.0, 0.0]


def _quaternion():
    labels = ["1", "i", "j", "k"]
    rules = {
        ("i", "i"): {"1": -1}, ("j", "j"): {"1": -1}, ("k", "k"): {"1": -1},
        ("i", "j"): {"k": 1}, ("j", "i"): {"k": -1},
        ("j", "k"): {"i": 1}, ("k", "j"): {"i": -1},
        ("k", "i"): {"j": 1}, ("i", "k"): {"j": -1},
    }
    return labels, _with_one(labels, rules), [1.0, 0.0, 0.0, 0.0]


def _double():
    labels = ["e1", "e2"]
    mul = _table(labels, {("e1", "e1"): {"e1": 1}, ("e2", "e2"): {"e2": 1}})
    return labels, mul, [1.0, 1.0]


def _sylvester():
    # (R+R) + R d with d^2 = 0 and d(x,y) = (y,x)d = x d, i.e. d = e2 d e1.
    labels = ["e1", "e2", "d"]
    rules = {("e1", "e1"): {"e1": 1}, ("e2", "e2"): {"e2": 1},
             ("e2", "d"): {"d": 1}, ("d", "e1"): {"d": 1}}
    return labels, _table(labels, rules), [1.0, 1.0, 0.0]


def _svd():
    # (a,b) + d(a',b') with d(x,y) = (y,x)d and d^2 = 0; basis f1 = d e1 = e2 d,
    # f2 = d e2 = e1 d.
    labels = ["e1", "e2", "de1", "de2"]
    rules = {("e1", "e1"): {"e1": 1}, ("e2", "e2"): {"e2": 1},
             ("e2", "de1"): {"de1": 1}, ("de1", "e1"): {"de1": 1},
             ("e1", "de2"): {"de2": 1}, ("de2", "e2"): {"de2": 1}}
    return labels, _table(labels, rules), [1.0, 1.0, 0.0, 0.0]


def _takagi():
    # (a + b i) + d(a' + b' i) with d i = -i d, d^2 = 0.
    labels = ["1", "i", "d", "di"]
    rules = {("i", "i"): {"1": -1},
             ("d", "i"): {"di": 1}, ("i", "d"): {"di": -1},
             ("i", "di"): {"d": 1}, ("di", "i"): {"d": -1}}
    return labels, _with_one(labels, rules), [1.0, 0.0, 0.0, 0.0]


def _m2r():
    labels = ["E11", "E12", "E21", "E22"]
    rules = {}
    for a in (1, 2):
        for b in (1, 2):
            for c in (1, 2):
                rules[(f"E{a}{b}", f"E{b}{c}")] = {f"E{a}{c}": 1}
    return labels, _table(labels, rules), [1.0, 0.0, 0.0, 1.0]


# name -> (factory, involution, {ideal name: generator labels})
_CATALOG = {
    "real": (_real, _diag_invol([1]), {"one": ["1"]}),
    "complex_conj": (_complex, _diag_invol([1, -1]), {"one": ["1"]}),
    "complex_id": (_complex, _diag_invol([1, 1]), {"one": ["1"]}),
    "dual_id": (lambda: _jet(2), _diag_invol([1, 1]), {"one": ["1"], "X": ["X"]}),
    "dual_conj": (lambda: _jet(2), _diag_invol([1, -1]), {"one": ["1"], "X": ["X"]}),
    "double": (_double, _perm_invol([(1, 1), (0, 1)]), {"one": ["e1", "e2"]}),
    "sylvester3": (_sylvester, _perm_invol([(1, 1), (0, 1), (2, 1)]),
                   {"one": ["e1", "e2"], "delta": ["d"]}),
    "symplectic3": (_sylvester, _perm_invol([(1, 1), (0, 1), (2, -1)]),
                    {"one": ["e1", "e2"], "delta": ["d"]}),
    "jet3_id": (lambda: _jet(3), _diag_invol([1, 1, 1]), {"one": ["1"], "X": ["X"]}),
    "jet3_conj": (lambda: _jet(3), _diag_invol([1, -1, 1]), {"one": ["1"], "X": ["X"]}),
    "twojet_xy_mixed": (_twojet, _diag_invol([1, 1, -1]), {"one": ["1"], "X_Y": ["X", "Y"]}),
    "twojet_xy_sym": (_twojet, _diag_invol([1, 1, 1]), {"one": ["1"], "X_Y": ["X", "Y"]}),
    "twojet_xy_skew": (_twojet, _diag_invol([1, -1, -1]), {"one": ["1"], "X_Y": ["X", "Y"]}),
    # e1, e2 fixed; delta fixed, so d(a',b') -> d(b',a').
    "svd4": (_svd, _perm_invol([(0, 1), (1, 1), (3, 1), (2, 1)]),
             {"one": ["e1", "e2"], "delta": ["de1", "de2"]}),
    "takagi4": (_takagi, _diag_invol([1, -1, 1, 1]), {"one": ["1"], "delta": ["d"]}),
    "takagi4_skew": (_takagi, _diag_invol([1, -1, -1, -1]), {"one": ["1"], "delta": ["d"]}),
    "m2r_adjugate": (_m2r, _perm_invol([(3, 1), (1, -1), (2, -1), (0, 1)]),
                     {"one": ["E11", "E22"]}),
    "biquad4": (_biquad, _diag_invol([1, -1, 1, -1]), {"one": ["1"], "X": ["X"]}),
    "quat_std": (_quaternion, _diag_invol([1, -1, -1, -1]), {"one": ["1"]}),
    "quat_nonstd": (_quaternion, _diag_invol([1, -1, 1, 1]), {"one": ["1"]}),
}

# tensor products of catalog triples: name -> (left, ideal, right, ideal)
_TENSORS = {
    "svd4_double": ("svd4", "delta", "double", "one"),
    "svd4_complex_id": ("svd4", "delta", "complex_id", "one"),
}

CATALOG_NAMES = tuple(_CATALOG) + tuple(_TENSORS)

_cache: dict[str, tuple[StarAlgebra, dict]] = {}


def build_catalog_algebra(name: str) -> tuple[StarAlgebra, dict[str, StarIdeal]]:
    if name in _cache:
        return _cache[name]
    if name in _TENSORS:
        left, li, right, ri = _TENSORS[name]
        a1, i1 = build_catalog_algebra(left)
        a2, i2 = build_catalog_algebra(right)
        alg, ideal = tensor_product(a1, i1[li], a2, i2[ri], name)
        _cache[name] = (alg, {"one": ideal_from_generators(alg, [alg.one()]), li: ideal})
        return _cache[name]
    if name not in _CATALOG:
        raise UnknownAlgebra(name)
    factory, invol, ideal_gens = _CATALOG[name]
    labels, mul, unit = factory()
    alg = StarAlgebra(name, mul, unit, invol, labels)
    ideals = {}
    for iname, gen_labels in ideal_gens.items():
        if iname == "one":
            gens = [alg.one()]
        else:
            gens = [alg.basis_element(lab) for lab in gen_labels]
            if name in ("svd4",):
                # the generator is delta = d e1 + d e2
                gens = [alg.element(sum(g.coords for g in gens))]
        ideals[iname] = ideal_from_generators(alg, gens)
    _cache[name] = (alg, ideals)
    return alg, ideals


def resolve_algebra(spec) -> tuple[StarAlgebra, dict[str, StarIdeal]]:
    """Accept a catalog name, a JSON object, or a path to an algebra JSON file."""
    if isinstance(spec, StarAlgebra):
        return spec, {"one": ideal_from_generators(spec, [spec.one()])}
    if isinstance(spec, Mapping):
        alg, ideals = StarAlgebra.from_json(spec)
        ideals.setdefault("one", ideal_from_generators(alg, [alg.one()]))
        return alg, ideals
    if isinstance(spec, str) and spec in CATALOG_NAMES:
        return build_catalog_algebra(spec)
    if isinstance(spec, str) and spec.endswith(".json"):
        with open(spec) as fh:
            return resolve_algebra(json.load(fh))
    raise UnknownAlgebra(str(spec))


def catalog_algebras() -> Iterable[tuple[StarAlgebra, dict[str, StarIdeal]]]:
    return (build_catalog_algebra(name) for name in CATALOG_NAMES)
