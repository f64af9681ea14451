"""Maximal families of orthogonal self-adjoint idempotents commuting with H.

For hermitian orthogonal idempotents summing to the identity,
``H = sum P_i H P_i`` holds exactly when every ``P_i`` commutes with ``H``.
The engine therefore works inside the commutant of ``H``: it starts from the
identity and keeps splitting projectors with spectral projectors of random
self-adjoint elements of the corner algebras ``P C P``, until repeated
attempts on every block fail.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import null_space, orthonormal_span
from .errors import ClusterCollision, DecompositionFailed, IllConditioned, NotAUnit
from .specfun import cluster_eigenvalues, hermite_indicator, polish_idempotent, riesz_projector
from .starmat import StarMatrix

DEFAULT_MAX_TRIALS = 32
# relative clustering gap for split attempts; defective eigenvalues computed
# in floating point spread by roughly eps**(1/index), which must stay inside one cluster
SPLIT_GAP = 1e-4


def left_operator(A: StarMatrix) -> np.ndarray:
    """Real matrix of ``X -> A X`` on flattened coordinates."""
    n, d = A.n, A.algebra.dim
    t = np.tensordot(A.coords, A.algebra.mul, axes=([2], [0]))  # i j b k
    op = np.einsum("lq,ijbk->ilkjqb", np.eye(n), t)
    return op.reshape(n * n * d, n * n * d)


def right_operator(B: StarMatrix) -> np.ndarray:
    """Real matrix of ``X -> X B`` on flattened coordinates."""
    n, d = B.n, B.algebra.dim
    t = np.einsum("jlb,abk->jalk", B.coords, B.algebra.mul)
    op = np.einsum("ip,jalk->ilkpja", np.eye(n), t)
    return op.reshape(n * n * d, n * n * d)


def commutator_operator(H: StarMatrix) -> np.ndarray:
    return right_operator(H) - left_operator(H)


@dataclass(frozen=True)
class CommutantBasis:
    H: StarMatrix
    basis: np.ndarray = field(repr=False)  # orthonormal columns, flattened coordinates
    hermitian_basis: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def _mat(self, v) -> StarMatrix:
        H = self.H
        return StarMatrix(H.algebra, v.reshape(H.n, H.n, H.algebra.dim))

    def matrices(self) -> list[StarMatrix]:
        return [self._mat(v) for v in self.basis.T]

    def hermitian_matrices(self) -> list[StarMatrix]:
        return [self._mat(v) for v in self.hermitian_basis.T]

    def project(self, X: StarMatrix) -> StarMatrix:
        v = X.vec()
        return self._mat(self.basis @ (self.basis.T @ v))

    def random_hermitian(self, rng) -> StarMatrix:
        g = rng.standard_normal(self.hermitian_basis.shape[1])
        return self._mat(self.hermitian_basis @ g)


def commutant(H: StarMatrix, rtol: float = 1e-10) -> CommutantBasis:
    """Null space of ``X -> XH - HX`` and its self-adjoint part."""
    # real scalars are central, so the scale of H (not of the operator) sets the floor
    basis = null_space(commutator_operator(H), rtol=rtol, atol=rtol * H.norm())
    n, d = H.n, H.algebra.dim
    herm = []
    for v in basis.T:
        X = StarMatrix(H.algebra, v.reshape(n, n, d))
        herm.append((0.5 * (X + X.adjoint())).vec())
    hb = orthonormal_span(np.column_stack(herm)) if herm else np.zeros((n * n * d, 0))
    basis.setflags(write=False)
    hb.setflags(write=False)
    return CommutantBasis(H, basis, hb)


# ---------------------------------------------------------------------------

def _rank_real(P: StarMatrix, tol: float = 1e-8) -> int:
    s = np.linalg.svd(P.realize(), compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))


def _corner_hermitian_dim(P: StarMatrix, C: CommutantBasis) -> int:
    cols = [(P @ X @ P).vec() for X in C.hermitian_matrices()]
    if not cols:
        return 0
    return orthonormal_span(np.column_stack(cols), tol=1e-9).shape[1]


def split_block(H: StarMatrix, P: StarMatrix, C: CommutantBasis, seed=None, rng=None,
                gap: float | None = None):
    """One randomized attempt to split ``P`` into ``E + (P - E)``.

    Returns ``None`` when the sampled corner element has a single
    conjugate-closed eigenvalue cluster on ``P``.  Propagates
    :class:`ClusterCollision` / :class:`IllConditioned`; callers resample.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    A, n = H.algebra, H.n
    eye = StarMatrix.identity(A, n)
    X = C.random_hermitian(rng)
    Z = P @ X @ P
    K = 0.5 * (Z + Z.adjoint())
    rest = eye - P
    has_rest = rest.norm() > 1e-12
    R = K.realize()
    rho = float(np.max(np.sum(np.abs(R), axis=1), initial=0.0))
    shift = 2.0 * (rho + 1.0)
    Kp = K + shift * rest if has_rest else K
    eigs = np.linalg.eigvals(Kp.realize())
    if gap is None:
        gap = SPLIT_GAP * (rho + 1.0)
    clusters = cluster_eigenvalues(eigs, gap)
    inner = [i for i, c in enumerate(clusters.clusters)
             if not (has_rest and any(abs(z - shift) < 0.5 * shift for z, _ in c.components))]
    if len(inner) < 2:
        return None
    chosen = inner[: len(inner) // 2]
    try:
        E = hermite_indicator(Kp, chosen, clusters, refine=False)
    except IllConditioned:
        E = riesz_projector(Kp, chosen, clusters)

    def into_corner(Y):
        return P @ C.project(Y) @ P

    E = polish_idempotent(into_corner(E), hermitian=True, project=into_corner)
    E = 0.5 * (E + E.adjoint())
    F = P - E
    scale = 1.0 + H.norm()
    ok = ((E @ E).distance(E) <= 1e-10
          and (P @ E).distance(E) <= 1e-10
          and (E @ H).distance(H @ E) <= 1e-10 * scale
          and E.norm() > 1e-6 and F.norm() > 1e-6)
    if not ok:
        raise IllConditioned("split candidate failed validation after refinement")
    return E, F


@dataclass(frozen=True)
class DecompositionConfig:
    tol: float = 1e-9
    max_trials: int = DEFAULT_MAX_TRIALS
    seed: int = 0

    def to_json(self) -> dict:
        return {"tol": self.tol, "max_trials": self.max_trials, "seed": self.seed}


@dataclass(frozen=True)
class ProjectorDecomposition:
    H: StarMatrix
    projectors: tuple
    residuals: dict
    trials_at_fixpoint: int
    config: DecompositionConfig

    @property
    def k(self) -> int:
        return len(self.projectors)

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "k": self.k,
            "projectors": [P.to_json() for P in self.projectors],
            "residuals": self.residuals,
            "trials_at_fixpoint": self.trials_at_fixpoint,
            "seed": self.config.seed,
            "config": self.config.to_json(),
        }


def family_residuals(H: StarMatrix, projectors: Sequence[StarMatrix]) -> dict:
    A, n = H.algebra, H.n
    eye = StarMatrix.identity(A, n)
    total = StarMatrix.zero(A, n)
    recon = StarMatrix.zero(A, n)
    orth = selfadj = comm = 0.0
    nonzero = np.inf
    scale = 1.0 + H.norm()
    for i, P in enumerate(projectors):
        total = total + P
        recon = recon + P @ H @ P
        selfadj = max(selfadj, P.distance(P.adjoint()))
        comm = max(comm, (P @ H).distance(H @ P) / scale)
        nonzero = min(nonzero, P.norm())
        for j, Q in enumerate(projectors):
            target = P if i == j else StarMatrix.zero(A, n)
            orth = max(orth, (P @ Q).distance(target))
    return {
        "completeness": total.distance(eye),
        "orthogonality": orth,
        "selfadjointness": selfadj,
        "commutation": comm,
        "reconstruction": recon.distance(H) / scale,
        "min_norm": float(nonzero) if projectors else 0.0,
    }


def _block_rng(seed: int, path: tuple):
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=path))


def maximal_projector_decomposition(H: StarMatrix, tol: float = 1e-9,
                                    max_trials: int = DEFAULT_MAX_TRIALS, seed: int = 0,
                                    C: CommutantBasis | None = None,
                                    cfg: DecompositionConfig | None = None) -> ProjectorDecomposition:
    """Split the identity into hermitian idempotents commuting with ``H``.

    Each block draws from its own seed stream keyed by its position in the
    split tree, so raising ``max_trials`` can only refine the result.
    """
    if cfg is None:
        cfg = DecompositionConfig(tol=tol, max_trials=max_trials, seed=seed)
    if cfg.max_trials < 1 or cfg.tol <= 0:
        raise ValueError("need max_trials >= 1 and tol > 0")
    if H.distance(H.adjoint()) > cfg.tol * (1.0 + H.norm()):
        raise ValueError("H must be hermitian")
    if C is None:
        C = commutant(H)
    pending = [((), StarMatrix.identity(H.algebra, H.n))]
    done: list[tuple[tuple, StarMatrix]] = []
    while pending:
        path, P = pending.pop()
        if _corner_hermitian_dim(P, C) <= 1:
            done.append((path, P))
            continue
        rng = _block_rng(cfg.seed, path)
        failures, result = 0, None
        while failures < cfg.max_trials:
            try:
                result = split_block(H, P, C, rng=rng)
            except (ClusterCollision, IllConditioned, NotAUnit, np.linalg.LinAlgError):
                result = None
            if result is not None:
                break
            failures += 1
        if result is None:
            done.append((path, P))
        else:
            E, F = result
            pending.append((path + (1,), F))
            pending.append((path + (0,), E))
    done.sort(key=lambda item: item[0])
    projectors = tuple(P for _, P in done)
    residuals = family_residuals(H, projectors)
    worst = max(v for key, v in residuals.items() if key != "min_norm")
    if worst > cfg.tol or residuals["min_norm"] <= cfg.tol:
        raise DecompositionFailed(f"projector family residual {worst:.3g} exceeds tol {cfg.tol:g}",
                                  residuals)
    return ProjectorDecomposition(H, projectors, residuals, cfg.max_trials, cfg)


@dataclass(frozen=True)
class BlockData:
    rank_real: int
    compressed: StarMatrix
    scalar: float | None
    element: np.ndarray | None  # c with P H P = c P entrywise, when it exists


def block_data(H: StarMatrix, P: StarMatrix, tol: float = 1e-8) -> BlockData:
    compressed = P @ H @ P
    scale = 1.0 + H.norm()
    p, c = P.vec(), compressed.vec()
    lam = float(p @ c / (p @ p)) if p @ p > 0 else 0.0
    scalar = lam if (compressed - lam * P).norm() <= tol * scale else None
    cols = np.column_stack([P.left_scale(e).vec() for e in np.eye(H.algebra.dim)])
    coef, *_ = np.linalg.lstsq(cols, c, rcond=None)
    element = coef if np.max(np.abs(cols @ coef - c), initial=0.0) <= tol * scale else None
    return BlockData(_rank_real(P), compressed, scalar, element)
