"""Real-coefficient functional calculus for matrices over a *-algebra.

A function is applied to ``K`` by Hermite interpolation on the spectrum of
its real realization: we pick a polynomial ``p`` with real coefficients whose
values and derivatives agree with the target at every eigenvalue cluster,
then evaluate ``p(K)`` by Horner's rule inside ``M_n(A)``.  Interpolation
nodes come in conjugate pairs, which is what keeps the coefficients real.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg

from .algebra import (AlgebraElement, InvolutionClass, StarAlgebra, nilpotency_index,
                      radical_and_classify)
from .errors import (AlgebraError, ClusterCollision, IllConditioned, NegativeSpectrum,
                     NotAUnit, NumericalFailure)
from .starmat import StarMatrix

VANDERMONDE_COND_LIMIT = 1e13
# raw interpolant residual accepted before refinement; anything larger means
# the derivative orders were too low for the Jordan structure
ACCEPT_RESIDUAL = 1e-6


@dataclass(frozen=True)
class Cluster:
    eigenvalues: tuple
    total_multiplicity: int
    conjugate_closed: bool
    # (center, multiplicity) for each gap-connected piece of the cluster
    components: tuple

    @property
    def center(self) -> complex:
        return complex(np.mean(self.eigenvalues))


@dataclass(frozen=True)
class SpectralClusters:
    clusters: tuple
    source_dim: int
    gap: float

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def nodes(self, orders: Callable[[int], int] | None = None):
        """Interpolation nodes as (center, derivative count) pairs."""
        out = []
        for c in self.clusters:
            for z, m in c.components:
                out.append((z, m if orders is None else orders(m)))
        return out


def default_gap(eigs: np.ndarray, index: int = 1) -> float:
    """Scale-aware clustering gap.

    ``index`` bounds the Jordan block size coming from the radical; computed
    defective eigenvalues of index m spread by about ``eps**(1/m)``.
    """
    rho = float(np.max(np.abs(eigs), initial=0.0))
    rel = max(1e-6, 10.0 * np.finfo(float).eps ** (1.0 / index))
    return rel * (rho + 1.0)


def algebra_gap(R: np.ndarray, algebra: StarAlgebra) -> float:
    return default_gap(np.linalg.eigvals(R), nilpotency_index(algebra))


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def _groups(uf: _UnionFind, n: int) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    return list(groups.values())


def cluster_eigenvalues(eigs: Sequence[complex], gap: float | None = None) -> SpectralClusters:
    eigs = np.asarray(eigs, dtype=complex)
    n = eigs.size
    if gap is None:
        gap = default_gap(eigs)
    if gap <= 0:
        raise ValueError("gap must be positive")
    close = np.abs(eigs[:, None] - eigs[None, :]) < gap
    near = _UnionFind(n)
    for i, j in zip(*np.nonzero(np.triu(close, 1))):
        near.union(int(i), int(j))
    pieces = _groups(near, n)
    piece_of = {i: p for p, members in enumerate(pieces) for i in members}

    # conjugate pieces belong to the same cluster
    closed = _UnionFind(len(pieces))
    for i in range(n):
        partner = int(np.argmin(np.abs(eigs - np.conj(eigs[i]))))
        closed.union(piece_of[i], piece_of[partner])

    clusters = []
    for group in _groups(closed, len(pieces)):
        members = sorted((i for p in group for i in pieces[p]), key=lambda i: (eigs[i].real, eigs[i].imag))
        comps = []
        for p in group:
            z = complex(np.mean(eigs[pieces[p]]))
            m = len(pieces[p])
            if abs(z.imag) <= gap:
                comps.append((complex(z.real, 0.0), m))
            elif z.imag > 0:
                comps.append((z, m))
        # lower half-plane pieces mirror the upper ones exactly
        comps += [(z.conjugate(), m) for z, m in comps if z.imag != 0.0]
        comps.sort(key=lambda zm: (zm[0].real, zm[0].imag))
        total = len(members)
        if sum(m for _, m in comps) != total:
            raise ClusterCollision("conjugate pieces of a cluster have unequal multiplicity")
        clusters.append(Cluster(tuple(complex(e) for e in eigs[members]), total, True, tuple(comps)))
    clusters.sort(key=lambda c: (min(z.real for z, _ in c.components),
                                 min(abs(z.imag) for z, _ in c.components)))
    return SpectralClusters(tuple(clusters), n, float(gap))


def eigen_clusters(R: np.ndarray, gap: float | None = None) -> SpectralClusters:
    """Eigenvalues of a real matrix grouped into conjugate-closed clusters."""
    R = np.asarray(R, dtype=float)
    if gap is not None and gap <= 0:
        raise ValueError("gap must be positive")
    try:
        eigs = np.linalg.eigvals(R)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from None
    if not np.all(np.isfinite(eigs)):
        raise NumericalFailure("eigensolver returned non-finite values")
    return cluster_eigenvalues(eigs, gap)


# ---------------------------------------------------------------------------
# Hermite interpolation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HermitePlan:
    """Real polynomial ``p(x) = sum_k coefficients[k] * ((x - shift) / scale)**k``."""

    nodes: tuple  # (value, derivative count)
    coefficients: np.ndarray
    shift: float
    scale: float
    condition: float

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x, derivative: int = 0):
        poly = np.polynomial.Polynomial(self.coefficients)
        if derivative:
            poly = poly.deriv(derivative)
        return poly((np.asarray(x) - self.shift) / self.scale) / self.scale ** derivative

    def evaluate(self, K: StarMatrix) -> StarMatrix:
        n, A = K.n, K.algebra
        eye = StarMatrix.identity(A, n)
        t = (K - self.shift * eye) / self.scale
        acc = self.coefficients[-1] * eye
        for a in self.coefficients[-2::-1]:
            acc = acc @ t + a * eye
        return acc


def _sqrt_derivative(z: complex, j: int) -> complex:
    coef = 1.0
    for i in range(j):
        coef *= 0.5 - i
    return coef * np.sqrt(z) ** (1 - 2 * j)


def hermite_plan(nodes: Sequence[tuple[complex, int]],
                 target: Callable[[complex, int], complex]) -> HermitePlan:
    """Solve the confluent Vandermonde system for a real interpolant.

    ``target(z, j)`` returns the j-th derivative of the function at ``z``.
    Nodes must be closed under conjugation; only the upper half-plane copy
    of each complex pair contributes equations (real and imaginary parts).
    """
    zs = np.array([z for z, _ in nodes], dtype=complex)
    shift = float(np.mean(zs.real)) if zs.size else 0.0
    scale = float(np.max(np.abs(zs - shift), initial=0.0))
    scale = scale if scale > 0 else 1.0
    size = sum(m for _, m in nodes)
    rows, rhs = [], []
    k = np.arange(size)
    for z, m in nodes:
        if z.imag < 0:
            continue
        t = (z - shift) / scale
        for j in range(m):
            falling = np.array([factorial(kk) / factorial(kk - j) if kk >= j else 0.0 for kk in k])
            powers = np.where(k >= j, t ** np.maximum(k - j, 0), 0.0)
            row = falling * powers
            val = target(z, j) * scale ** j
            if z.imag == 0.0:
                rows.append(row.real)
                rhs.append(complex(val).real)
            else:
                rows.append(row.real)
                rhs.append(complex(val).real)
                rows.append(row.imag)
                rhs.append(complex(val).imag)
    V = np.array(rows, dtype=float).reshape(len(rows), size)
    if V.shape[0] != size:
        raise ClusterCollision("interpolation nodes are not closed under conjugation")
    cond = float(np.linalg.cond(V)) if size else 1.0
    if not np.isfinite(cond) or cond > VANDERMONDE_COND_LIMIT:
        raise IllConditioned(f"confluent Vandermonde condition {cond:.3g} exceeds limit")
    coeffs = np.linalg.solve(V, np.array(rhs)) if size else np.zeros(1)
    return HermitePlan(tuple((complex(z), int(m)) for z, m in nodes), coeffs, shift, scale, cond)


def _order_levels(max_mult: int) -> list[int]:
    levels, level = [], 1
    while level < max_mult:
        levels.append(level)
        level *= 2
    levels.append(max_mult)
    return levels


def _check_separation(clusters: SpectralClusters):
    nodes = [z for z, _ in clusters.nodes()]
    for a in range(len(nodes)):
        for b in range(a + 1, len(nodes)):
            if abs(nodes[a] - nodes[b]) < clusters.gap:
                raise ClusterCollision("interpolation nodes closer than the clustering gap")


def _is_hermitian(K: StarMatrix, tol: float = 1e-10) -> bool:
    return K.distance(K.adjoint()) <= tol * (1.0 + K.norm())


def polish_idempotent(E: StarMatrix, hermitian: bool, max_iter: int = 40,
                      project: Callable[[StarMatrix], StarMatrix] | None = None) -> StarMatrix:
    """Newton refinement ``E <- 3E^2 - 2E^3`` towards the nearest idempotent.

    ``project`` (optional) maps back into a subalgebra after each step.
    """
    best, best_res = E, (E @ E).distance(E)
    for _ in range(max_iter):
        if best_res < 1e-15:
            break
        E2 = E @ E
        E = 3.0 * E2 - 2.0 * (E2 @ E)
        if project is not None:
            E = project(E)
        if hermitian:
            E = 0.5 * (E + E.adjoint())
        res = (E @ E).distance(E)
        if res < best_res:
            best, best_res = E, res
        elif res > 0.5 * best_res and best_res < 1e-12:
            break
    return best


def hermite_indicator(K: StarMatrix, selected: Iterable[int], clusters: SpectralClusters | None = None,
                      gap: float | None = None, refine: bool = True) -> StarMatrix:
    """Spectral projector ``p(K)`` onto the selected conjugate-closed clusters.

    ``p`` has real coefficients, equals 1 (with vanishing derivatives) on the
    selected clusters and 0 on the others.
    """
    if clusters is None:
        R = K.realize()
        clusters = eigen_clusters(R, gap if gap is not None else algebra_gap(R, K.algebra))
    selected = set(int(s) for s in selected)
    if not selected <= set(range(len(clusters))):
        raise ValueError("selected cluster index out of range")
    n, A = K.n, K.algebra
    if not selected:
        return StarMatrix.zero(A, n)
    if len(selected) == len(clusters):
        return StarMatrix.identity(A, n)
    _check_separation(clusters)
    chosen = {z for i in selected for z, _ in clusters.clusters[i].components}
    hermitian = _is_hermitian(K)

    def indicator(z, j):
        return (1.0 if z in chosen else 0.0) if j == 0 else 0.0

    max_mult = max(m for _, m in clusters.nodes())
    E, res = None, np.inf
    for level in _order_levels(max_mult):
        plan = hermite_plan(clusters.nodes(lambda m: min(m, level)), indicator)
        E = plan.evaluate(K)
        res = (E @ E).distance(E) / max(1.0, E.norm())
        if res <= ACCEPT_RESIDUAL:
            break
    if res > ACCEPT_RESIDUAL:
        raise IllConditioned(f"interpolated indicator is not idempotent (residual {res:.3g})")
    if refine:
        E = polish_idempotent(E, hermitian)
    return E


def riesz_projector(K: StarMatrix, selected: Iterable[int], clusters: SpectralClusters) -> StarMatrix:
    """Spectral projector onto the selected clusters from an ordered real Schur form.

    Used when the interpolation system is too ill-conditioned.  With
    ``T = [[T11, T12], [0, T22]]`` the projector is ``[[I, Y], [0, 0]]`` where
    ``T11 Y - Y T22 = T12``; it is a polynomial in ``chi(K)`` and hence lies in
    the image of the realization.
    """
    selected = set(int(i) for i in selected)
    R = K.realize()
    centers = [(z, i) for i, c in enumerate(clusters.clusters) for z, _ in c.components]

    def pick(re, im):
        z = complex(re, im)
        return min(centers, key=lambda ci: abs(ci[0] - z))[1] in selected

    T, Z, sdim = scipy.linalg.schur(R, output="real", sort=pick)
    m = R.shape[0]
    Pi = np.zeros((m, m))
    Pi[:sdim, :sdim] = np.eye(sdim)
    if 0 < sdim < m:
        Pi[:sdim, sdim:] = scipy.linalg.solve_sylvester(T[:sdim, :sdim], -T[sdim:, sdim:], T[:sdim, sdim:])
    return StarMatrix.unrealize(K.algebra, Z @ Pi @ Z.T)


# ---------------------------------------------------------------------------
# Square roots, inverses and polar factors
# ---------------------------------------------------------------------------

def inverse(M: StarMatrix, tol: float = 1e-12) -> StarMatrix:
    R = M.realize()
    s = np.linalg.svd(R, compute_uv=False)
    if s.size and s[-1] <= tol * max(1.0, s[0]):
        raise NotAUnit("matrix is not invertible (singular realization)")
    return StarMatrix.unrealize(M.algebra, np.linalg.inv(R))


def _negative_axis_check(clusters: SpectralClusters):
    for z, _ in clusters.nodes():
        if z.imag == 0.0 and z.real <= clusters.gap:
            raise NegativeSpectrum(f"eigenvalue {z.real:.6g} lies on the closed negative real axis")


def sqrt_unit(x: StarMatrix, gap: float | None = None, refine: bool = True) -> StarMatrix:
    """Principal square root ``p(x)`` with ``p`` a real Hermite interpolant of sqrt."""
    R = x.realize()
    sv = np.linalg.svd(R, compute_uv=False)
    if sv.size and sv[-1] <= 1e-12 * max(1.0, sv[0]):
        raise NotAUnit("square root requires a unit")
    clusters = eigen_clusters(R, gap if gap is not None else algebra_gap(R, x.algebra))
    _negative_axis_check(clusters)
    _check_separation(clusters)

    def root(z, j):
        return _sqrt_derivative(z, j)

    max_mult = max(m for _, m in clusters.nodes())
    scale = max(1.0, x.norm())
    s, res = None, np.inf
    for level in _order_levels(max_mult):
        plan = hermite_plan(clusters.nodes(lambda m: min(m, level)), root)
        s = plan.evaluate(x)
        res = (s @ s).distance(x) / scale
        if res <= ACCEPT_RESIDUAL:
            break
    if res > ACCEPT_RESIDUAL:
        raise IllConditioned(f"interpolated square root is inaccurate (residual {res:.3g})")
    if refine:
        s = _polish_sqrt(s, x)
    return s


def _polish_sqrt(s: StarMatrix, x: StarMatrix, max_iter: int = 6) -> StarMatrix:
    # Newton's iteration for the square root; stays in the commutative algebra
    # generated by x because every iterate is a rational function of x.
    hermitian = _is_hermitian(x)
    best, best_res = s, (s @ s).distance(x)
    for _ in range(max_iter):
        if best_res < 1e-15 * max(1.0, x.norm()):
            break
        s = 0.5 * (s + inverse(s) @ x)
        if hermitian:
            s = 0.5 * (s + s.adjoint())
        res = (s @ s).distance(x)
        if res < best_res:
            best, best_res = s, res
        else:
            break
    return best


def polar(M: StarMatrix, gap: float | None = None) -> tuple[StarMatrix, StarMatrix]:
    """``M = U P`` with ``P = sqrt(M^* M)`` hermitian and ``U`` unitary."""
    inverse(M)  # raises NotAUnit early
    P = sqrt_unit(M.adjoint() @ M, gap)
    U = M @ inverse(P)
    return U, P


# ---------------------------------------------------------------------------
# Orthonormal bases of free submodules
# ---------------------------------------------------------------------------

def column_inner(algebra: StarAlgebra, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``v^* w = sum_i v_i^* w_i`` for columns stored as (n, d) arrays."""
    vs = v @ algebra.invol.T
    return np.einsum("ia,ib,abk->k", vs, w, algebra.mul)


def column_times(algebra: StarAlgebra, v: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Right multiplication of every entry of the column by the element ``a``."""
    return np.einsum("ia,b,abk->ik", v, a, algebra.mul)


def _element_sqrt(algebra: StarAlgebra, g: np.ndarray) -> np.ndarray:
    s = sqrt_unit(StarMatrix(algebra, g[None, None, :]))
    return s.coords[0, 0]


def orthonormalize_image(vectors: Sequence, algebra: StarAlgebra | None = None,
                         check_hypothesis: bool = True) -> list[np.ndarray]:
    """Orthonormal basis ``v'_i^* v'_j = delta_ij`` of the module spanned by ``vectors``.

    Each step normalizes ``w`` by ``sqrt(w^* w)^{-1}`` and removes the
    component along previous vectors with the idempotent map
    ``x -> v' v'^* x``.
    """
    cols = []
    for v in vectors:
        if isinstance(v, StarMatrix):
            raise TypeError("pass columns as (n, d) arrays or lists of AlgebraElement")
        if len(v) and isinstance(v[0], AlgebraElement):
            algebra = algebra or v[0].algebra
            v = np.array([e.coords for e in v])
        cols.append(np.array(v, dtype=float))
    if algebra is None:
        raise AlgebraError("algebra could not be inferred from the vectors")
    if check_hypothesis and radical_and_classify(algebra).involution is not InvolutionClass.standard:
        raise AlgebraError("orthonormalization needs a local algebra with standard involution")
    out: list[np.ndarray] = []
    for v in cols:
        w = v
        for _ in range(2):  # re-orthogonalize once for stability
            for u in out:
                w = w - column_times(algebra, u, column_inner(algebra, u, w))
        g = column_inner(algebra, w, w)
        try:
            s = _element_sqrt(algebra, g)
            s_inv = algebra.element(s).inverse().coords
        except NotAUnit:
            raise NotAUnit("v^* v is not a unit; the vectors do not span a free summand") from None
        out.append(column_times(algebra, w, s_inv))
    return out
