"""Square matrices over a *-algebra.

Entries are kept as a real array of shape ``(n, n, d)``: ``coords[i, j]`` is
the coordinate vector of entry ``(i, j)``.  The real realization replaces
each entry by its left-multiplication matrix, giving an ``(n d) x (n d)``
real matrix acting on ``A^n``.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .algebra import AlgebraElement, StarAlgebra, StarIdeal, null_space, resolve_algebra
from .errors import AlgebraError, ShapeError

DEFAULT_TOL = 1e-9


class StarMatrix:
    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: StarAlgebra, coords):
        coords = np.array(coords, dtype=float)
        if coords.ndim != 3 or coords.shape[0] != coords.shape[1] or coords.shape[2] != algebra.dim:
            raise ShapeError(f"expected shape (n, n, {algebra.dim}), got {coords.shape}")
        coords.setflags(write=False)
        self.algebra = algebra
        self.coords = coords

    # -- constructors ----------------------------------------------------
    @classmethod
    def identity(cls, algebra: StarAlgebra, n: int) -> "StarMatrix":
        c = np.zeros((n, n, algebra.dim))
        c[np.arange(n), np.arange(n)] = algebra.unit
        return cls(algebra, c)

    @classmethod
    def zero(cls, algebra: StarAlgebra, n: int) -> "StarMatrix":
        return cls(algebra, np.zeros((n, n, algebra.dim)))

    @classmethod
    def from_real(cls, algebra: StarAlgebra, m, element=None) -> "StarMatrix":
        """Real matrix ``m`` times a fixed algebra element (the unit by default)."""
        m = np.asarray(m, dtype=float)
        e = algebra.unit if element is None else np.asarray(
            element.coords if isinstance(element, AlgebraElement) else element, dtype=float)
        return cls(algebra, m[:, :, None] * e[None, None, :])

    @classmethod
    def from_entries(cls, algebra: StarAlgebra, entries: Sequence[Sequence]) -> "StarMatrix":
        rows = [[e.coords if isinstance(e, AlgebraElement) else e for e in row] for row in entries]
        return cls(algebra, np.array(rows, dtype=float))

    @classmethod
    def unrealize(cls, algebra: StarAlgebra, real) -> "StarMatrix":
        """Inverse of :meth:`realize` on the image of the realization.

        Block ``(i, j)`` equals ``chi(a_ij)`` and ``chi(a) 1 = a``, so reading
        each block against the unit recovers the entry.
        """
        d = algebra.dim
        n = real.shape[0] // d
        blocks = np.asarray(real).reshape(n, d, n, d)
        return cls(algebra, np.einsum("ikjm,m->ijk", blocks, algebra.unit))

    # -- basic properties --------------------------------------------------
    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def __getitem__(self, ij) -> AlgebraElement:
        i, j = ij
        return AlgebraElement(self.algebra, self.coords[i, j])

    def __repr__(self):
        return f"StarMatrix({self.algebra.name}, n={self.n})"

    def _compatible(self, other: "StarMatrix"):
        if not isinstance(other, StarMatrix):
            raise TypeError(f"expected StarMatrix, got {type(other).__name__}")
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraError("matrices live over different algebras")
        if other.n != self.n:
            raise ShapeError(f"size mismatch: {self.n} vs {other.n}")

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        self._compatible(other)
        return StarMatrix(self.algebra, self.coords + other.coords)

    def __sub__(self, other):
        self._compatible(other)
        return StarMatrix(self.algebra, self.coords - other.coords)

    def __neg__(self):
        return StarMatrix(self.algebra, -self.coords)

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return StarMatrix(self.algebra, self.coords * float(scalar))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return StarMatrix(self.algebra, self.coords / float(scalar))

    def __matmul__(self, other):
        self._compatible(other)
        return StarMatrix(self.algebra, matmul_coords(self.coords, other.coords, self.algebra.mul))

    def adjoint(self) -> "StarMatrix":
        return StarMatrix(self.algebra, np.einsum("kl,jil->ijk", self.algebra.invol, self.coords))

    @property
    def H(self) -> "StarMatrix":
        return self.adjoint()

    def left_scale(self, element) -> "StarMatrix":
        """Entrywise left multiplication ``a_ij -> c a_ij`` by an algebra element."""
        c = element.coords if isinstance(element, AlgebraElement) else np.asarray(element, float)
        chi = self.algebra.left_matrix(c)
        return StarMatrix(self.algebra, self.coords @ chi.T)

    def direct_sum(self, other: "StarMatrix") -> "StarMatrix":
        if other.algebra != self.algebra:
            raise AlgebraError("matrices live over different algebras")
        n, m, d = self.n, other.n, self.algebra.dim
        c = np.zeros((n + m, n + m, d))
        c[:n, :n] = self.coords
        c[n:, n:] = other.coords
        return StarMatrix(self.algebra, c)

    def norm(self) -> float:
        return float(np.max(np.abs(self.coords), initial=0.0))

    def distance(self, other: "StarMatrix") -> float:
        self._compatible(other)
        return float(np.max(np.abs(self.coords - other.coords), initial=0.0))

    def realize(self) -> np.ndarray:
        return realize_coords(self.coords, self.algebra.mul)

    def vec(self) -> np.ndarray:
        return self.coords.reshape(-1)

    # -- serialization -------------------------------------------------------
    def to_json(self, inline_algebra: bool = False) -> dict:
        alg = self.algebra.to_json() if inline_algebra else self.algebra.name
        return {"algebra": alg, "n": self.n, "entries": self.coords.tolist()}

    @classmethod
    def from_json(cls, obj: Mapping, algebra: StarAlgebra | None = None) -> "StarMatrix":
        try:
            if algebra is None:
                algebra, _ = resolve_algebra(obj["algebra"])
            coords = np.array(obj["entries"], dtype=float)
        except KeyError as exc:
            raise ShapeError(f"matrix JSON is missing field {exc}") from None
        except ValueError as exc:
            raise ShapeError(f"malformed entries: {exc}") from None
        if "n" in obj and coords.shape[:1] != (int(obj["n"]),):
            raise ShapeError("declared n does not match the entries")
        return cls(algebra, coords)


def matmul_coords(a: np.ndarray, b: np.ndarray, mul: np.ndarray) -> np.ndarray:
    # (AB)_il = sum_j A_ij B_jl, with the algebra product contracted first
    t = np.tensordot(a, mul, axes=([2], [0]))  # i j b k
    return np.tensordot(t, b, axes=([1, 2], [0, 2])).transpose(0, 2, 1)


def realize_coords(coords: np.ndarray, mul: np.ndarray) -> np.ndarray:
    n, _, d = coords.shape
    blocks = np.tensordot(coords, mul, axes=([2], [0]))  # i j m k  -> chi[k, m]
    return blocks.transpose(0, 3, 1, 2).reshape(n * d, n * d)


def realize(m: StarMatrix) -> np.ndarray:
    return m.realize()


def hermitian_residual(m: StarMatrix) -> tuple[float, tuple[int, int, int]]:
    """Max coordinate deviation of ``M - M^*`` and where it occurs."""
    diff = np.abs(m.coords - m.adjoint().coords)
    if diff.size == 0:
        return 0.0, (0, 0, 0)
    idx = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return float(diff[idx]), tuple(int(i) for i in idx)


def predicates(m: StarMatrix, ideal: StarIdeal | None = None, tol: float = DEFAULT_TOL) -> dict:
    if tol <= 0:
        raise ValueError("tol must be positive")
    eye = StarMatrix.identity(m.algebra, m.n)
    adj = m.adjoint()
    herm = m.distance(adj)
    unit = max((m @ adj).distance(eye), (adj @ m).distance(eye))
    flags = {"hermitian": herm <= tol, "unitary": unit <= tol}
    if ideal is not None:
        off = m.coords.reshape(-1, m.algebra.dim) @ (np.eye(m.algebra.dim) - ideal.projector)
        flags["ideal_valued"] = float(np.max(np.abs(off), initial=0.0)) <= tol
    return flags


def random_hermitian(algebra: StarAlgebra, ideal: StarIdeal, n: int, seed) -> StarMatrix:
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n, ideal.dim))
    raw = StarMatrix(algebra, g @ ideal.basis.T)
    return StarMatrix(algebra, 0.5 * (raw.coords + raw.adjoint().coords))


def random_matrix(algebra: StarAlgebra, n: int, rng) -> StarMatrix:
    return StarMatrix(algebra, rng.standard_normal((n, n, algebra.dim)))


def adjoint_operator(algebra: StarAlgebra, n: int) -> np.ndarray:
    """Real matrix of ``X -> X^*`` on flattened coordinates."""
    d = algebra.dim
    op = np.zeros((n, n, d, n, n, d))
    for i in range(n):
        for j in range(n):
            op[i, j, :, j, i, :] = algebra.invol
    return op.reshape(n * n * d, n * n * d)


def hermitian_subspace_dim(algebra: StarAlgebra, n: int) -> int:
    """Dimension of the hermitian matrices, from the linear system ``X = X^*``."""
    size = n * n * algebra.dim
    return null_space(np.eye(size) - adjoint_operator(algebra, n)).shape[1]
