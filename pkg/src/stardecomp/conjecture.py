"""Instance-wise testing of the uniqueness conjecture.

Given two maximal decompositions ``{P_i}`` and ``{Q_i}`` of the same ``H``,
we look for a permutation ``sigma`` and a unitary ``U`` with ``U H U^* = H``
and ``U Q_i U^* = P_sigma(i)``.  For a fixed ``sigma`` the intertwiners
``S`` (``SH = HS``, ``S Q_i = P_sigma(i) S``) form a linear space; a generic
invertible one is turned into a unitary by ``U = S (S^* S)^{-1/2}``.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import StarAlgebra, StarIdeal, null_space, orthonormal_span
from .decomp import (CommutantBasis, DecompositionConfig, block_data, commutant,
                     commutator_operator, left_operator, maximal_projector_decomposition,
                     right_operator)
from .errors import (DecompositionFailed, IllConditioned, NegativeSpectrum, NotAUnit,
                     NumericalFailure, SearchFailure)
from .specfun import inverse, sqrt_unit
from .starmat import StarMatrix, random_hermitian

COND_LIMIT = 1e8
MAX_PERMUTATIONS = 5040

# matrix rings over division *-algebras: the conjecture is a theorem here
PROVEN_ALGEBRAS = frozenset({"real", "complex_conj", "complex_id", "quat_std", "quat_nonstd"})


@dataclass(frozen=True)
class IntertwinerCertificate:
    sigma: tuple  # sigma[i] = index of the P matched with Q_i
    U: StarMatrix
    residuals: dict
    attempts: int

    def to_json(self) -> dict:
        return {"sigma": list(self.sigma), "U": self.U.to_json(),
                "residuals": self.residuals, "attempts": self.attempts}


def _block_key(H, P):
    data = block_data(H, P)
    return data.rank_real, data.scalar


def candidate_permutations(H: StarMatrix, Ps: Sequence[StarMatrix], Qs: Sequence[StarMatrix],
                           scalar_tol: float = 1e-6):
    """Bijections sigma with matching real rank (and block scalar, when both exist)."""
    kp = [_block_key(H, P) for P in Ps]
    kq = [_block_key(H, Q) for Q in Qs]
    scale = 1.0 + H.norm()

    def compatible(i, j):
        (rq, sq), (rp, sp) = kq[i], kp[j]
        if rq != rp or (sq is None) != (sp is None):
            return False
        return sq is None or abs(sq - sp) <= scalar_tol * scale

    allowed = [[j for j in range(len(Ps)) if compatible(i, j)] for i in range(len(Qs))]
    # try the identity-like assignment first, then lexicographic order
    allowed = [sorted(opts, key=lambda j, i=i: (j != i, j)) for i, opts in enumerate(allowed)]

    def extend(prefix, used):
        i = len(prefix)
        if i == len(Qs):
            yield tuple(prefix)
            return
        for j in allowed[i]:
            if j not in used:
                yield from extend(prefix + [j], used | {j})

    return itertools.islice(extend([], frozenset()), MAX_PERMUTATIONS)


def verify_certificate(H: StarMatrix, Ps, Qs, cert: IntertwinerCertificate, tol: float = 1e-6) -> dict:
    """Recompute all certificate residuals from the real realizations."""
    U = cert.U.realize()
    Us = cert.U.adjoint().realize()
    eye = np.eye(U.shape[0])
    Hr = H.realize()
    scale = 1.0 + H.norm()
    unitarity = max(np.max(np.abs(Us @ U - eye)), np.max(np.abs(U @ Us - eye)))
    h_conj = np.max(np.abs(U @ Hr @ Us - Hr)) / scale
    blocks = [float(np.max(np.abs(U @ Q.realize() @ Us - Ps[cert.sigma[i]].realize())))
              for i, Q in enumerate(Qs)]
    report = {"unitarity": float(unitarity), "h_conjugation": float(h_conj),
              "per_block_conjugation": blocks}
    report["passed"] = bool(max([unitarity, h_conj] + blocks) <= tol)
    return report


def _vec_to_mat(H: StarMatrix, v) -> StarMatrix:
    return StarMatrix(H.algebra, v.reshape(H.n, H.n, H.algebra.dim))


def _sample_block(H, Q, basis, rng, eye):
    """Random intertwiner on one block together with sqrt(S^*S) on that block."""
    S = _vec_to_mat(H, basis @ rng.standard_normal(basis.shape[1]))
    G = S.adjoint() @ S
    g = G.norm()
    if g == 0.0:
        raise NotAUnit("zero intertwiner sample")
    S = S / np.sqrt(g)
    G = G / g
    Gfull = G + (eye - Q)
    R = Gfull.realize()
    if np.linalg.cond(R) > COND_LIMIT ** 2:
        raise NotAUnit("block intertwiner is not invertible")
    # polar step is legitimate because S^*S commutes with Q and H
    if (G @ Q).distance(Q @ G) > 1e-8 or (G @ H).distance(H @ G) > 1e-8 * (1.0 + H.norm()):
        raise NumericalFailure("S^*S does not commute with the block data")
    return S, sqrt_unit(Gfull)


def _polish_unitary(U: StarMatrix, steps: int = 6) -> StarMatrix:
    # Newton-Schulz; U^*U commutes with H and every Q_i, so intertwining survives
    eye = StarMatrix.identity(U.algebra, U.n)
    for _ in range(steps):
        D = U.adjoint() @ U - eye
        if D.norm() < 1e-15 or D.norm() > 0.5:
            break
        U = U @ (eye - 0.5 * D)
    return U


def intertwiner_search(H: StarMatrix, Ps: Sequence[StarMatrix], Qs: Sequence[StarMatrix],
                       tol: float = 1e-6, retries: int = 16, seed=0) -> IntertwinerCertificate:
    if len(Ps) != len(Qs):
        raise ValueError("decompositions have different sizes; report k mismatch upstream")
    rng = np.random.default_rng(seed)
    A, n = H.algebra, H.n
    eye = StarMatrix.identity(A, n)
    base = commutator_operator(H)
    best: dict = {}
    best_worst = np.inf
    attempts = 0
    for sigma in candidate_permutations(H, Ps, Qs):
        rows = [base] + [right_operator(Q) - left_operator(Ps[sigma[i]]) for i, Q in enumerate(Qs)]
        sol = null_space(np.vstack(rows), rtol=1e-10)
        if sol.shape[1] == 0:
            continue
        mats = [_vec_to_mat(H, v) for v in sol.T]
        # S = sum_i S Q_i and each S Q_i is itself a solution: sample per block
        block_bases = []
        for Q in Qs:
            span = orthonormal_span(np.column_stack([(M @ Q).vec() for M in mats]))
            block_bases.append(span)
        if any(b.shape[1] == 0 for b in block_bases):
            continue
        for _ in range(max(1, retries)):
            attempts += 1
            pieces = []
            for Q, basis in zip(Qs, block_bases):
                for _try in range(max(1, retries)):
                    try:
                        pieces.append(_sample_block(H, Q, basis, rng, eye))
                        break
                    except (NotAUnit, NegativeSpectrum, IllConditioned, NumericalFailure,
                            np.linalg.LinAlgError):
                        continue
                else:
                    break
            if len(pieces) != len(Qs):
                break  # some block has no usable intertwiner under this sigma
            S = StarMatrix.zero(A, n)
            T = StarMatrix.zero(A, n)
            for Q, (Si, Ti) in zip(Qs, pieces):
                S = S + Si
                T = T + Q @ Ti @ Q
            if np.linalg.cond(S.realize()) > COND_LIMIT:
                continue
            try:
                U = _polish_unitary(S @ inverse(T))
            except NotAUnit:
                continue
            cert = IntertwinerCertificate(tuple(sigma), U, {}, attempts)
            report = verify_certificate(H, Ps, Qs, cert, tol)
            worst = max([report["unitarity"], report["h_conjugation"]] + report["per_block_conjugation"])
            if worst < best_worst:
                best_worst, best = worst, dict(report, sigma=list(sigma))
            if report["passed"]:
                residuals = {k: v for k, v in report.items() if k != "passed"}
                return IntertwinerCertificate(tuple(sigma), U, residuals, attempts)
    raise SearchFailure("no verified intertwiner found", best, attempts)


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------

@dataclass
class CampaignReport:
    algebra: str
    ideal: str
    n: int
    trials: int
    seed: int
    k_histogram: dict = field(default_factory=dict)
    k_agreements: int = 0
    successes: int = 0
    failures: list = field(default_factory=list)
    proven: bool = False

    @property
    def k_agreement_rate(self) -> float:
        return self.k_agreements / self.trials

    @property
    def certificate_success_rate(self) -> float:
        return self.successes / self.trials

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "algebra": self.algebra,
            "ideal": self.ideal,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "proven": self.proven,
            "k_histogram": {str(k): v for k, v in sorted(self.k_histogram.items())},
            "k_agreement_rate": self.k_agreement_rate,
            "certificate_success_rate": self.certificate_success_rate,
            "failures": sorted(self.failures, key=lambda f: f["trial"]),
        }


def trial_seeds(seed: int, trial: int) -> list[int]:
    """Four independent sub-seeds (instance, run 1, run 2, search) for one trial."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial),))
    return [int(x) for x in ss.generate_state(4)]


def _failure_entry(trial, seeds, kind, H, Ps, Qs, residuals):
    return {
        "trial": trial,
        "seed": seeds[0],
        "kind": kind,
        "H": H.to_json(inline_algebra=True),
        "Ps": [P.to_json(inline_algebra=True) for P in Ps],
        "Qs": [Q.to_json(inline_algebra=True) for Q in Qs],
        "best_residuals": residuals,
    }


def verify_instance(H: StarMatrix, tol: float = 1e-6, max_trials: int = 32, retries: int = 16,
                    seeds: Sequence[int] = (0, 1, 2), engine_tol: float = 1e-9) -> dict:
    """Two independent decompositions of H plus an intertwiner search."""
    C = commutant(H)
    out: dict = {"k": None, "status": None}
    try:
        d1 = maximal_projector_decomposition(H, cfg=DecompositionConfig(engine_tol, max_trials, seeds[0]), C=C)
        d2 = maximal_projector_decomposition(H, cfg=DecompositionConfig(engine_tol, max_trials, seeds[1]), C=C)
    except DecompositionFailed as exc:
        out.update(status="decomposition_failed", residuals=exc.diagnostics, Ps=[], Qs=[])
        return out
    out.update(k=(d1.k, d2.k), Ps=list(d1.projectors), Qs=list(d2.projectors))
    if d1.k != d2.k:
        out.update(status="k_mismatch", residuals={"k_run1": d1.k, "k_run2": d2.k})
        return out
    try:
        cert = intertwiner_search(H, d1.projectors, d2.projectors, tol=tol, retries=retries, seed=seeds[2])
    except SearchFailure as exc:
        out.update(status="search_failure", residuals=exc.best_residuals)
        return out
    out.update(status="verified", certificate=cert, residuals=cert.residuals)
    return out


def _run_trial(args):
    algebra, ideal, n, trial, seed, tol, max_trials, retries = args
    seeds = trial_seeds(seed, trial)
    H = random_hermitian(algebra, ideal, n, seeds[0])
    res = verify_instance(H, tol, max_trials, retries, seeds[1:])
    entry = None
    if res["status"] != "verified":
        entry = _failure_entry(trial, seeds, res["status"], H, res["Ps"], res["Qs"],
                               _jsonable(res.get("residuals", {})))
    return trial, res["k"], res["status"], entry


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def stress_campaign(algebra: StarAlgebra, ideal: StarIdeal, n: int, trials: int, tol: float = 1e-6,
                    max_trials: int = 32, retries: int = 16, seed: int = 0, jobs: int = 1,
                    ideal_name: str = "one") -> CampaignReport:
    if trials < 1:
        raise ValueError("a campaign needs at least one trial")
    report = CampaignReport(algebra.name, ideal_name, n, trials, seed,
                            proven=algebra.name in PROVEN_ALGEBRAS and ideal_name == "one")
    work = [(algebra, ideal, n, t, seed, tol, max_trials, retries) for t in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial, work))
    else:
        results = [_run_trial(w) for w in work]
    for trial, k, status, entry in sorted(results, key=lambda r: r[0]):
        if k is not None:
            report.k_histogram[k[0]] = report.k_histogram.get(k[0], 0) + 1
            if k[0] == k[1]:
                report.k_agreements += 1
        if status == "verified":
            report.successes += 1
        else:
            report.failures.append(entry)
    return report
