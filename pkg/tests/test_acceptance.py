"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` (or as part of the whole
suite) and look for the ``ACCEPTANCE`` lines.
"""
import json

import numpy as np
import pytest

from stardecomp.algebra import (CATALOG_NAMES, InvolutionClass, build_catalog_algebra, check_axioms,
                                radical_and_classify)
from stardecomp.catalog import (get_entry, jordan_instance, list_entries, random_input,
                                run_entry, tame_table_rows)
from stardecomp.cli import main
from stardecomp.conjecture import stress_campaign
from stardecomp.errors import CatalogMismatch, NegativeSpectrum
from stardecomp.specfun import polar, sqrt_unit
from stardecomp.starmat import StarMatrix, random_matrix

CAMPAIGN_SEED = 2024
CAMPAIGN_TRIALS = 100
WILD_TRIALS = 20


@pytest.fixture
def announce(capsys):
    def emit(number, passed, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} ({detail})")
        assert passed, detail
    return emit


def _try(entry, x, cfg=None):
    try:
        return run_entry(entry, x, cfg, harness=False)
    except CatalogMismatch as exc:
        return {"mismatch": str(exc)}


def test_criterion_1_axioms(announce):
    worst, bad = 0.0, []
    for name in CATALOG_NAMES:
        A, _ = build_catalog_algebra(name)
        rep = check_axioms(A)
        worst = max(worst, rep["max_violation"])
        if rep["max_violation"] != 0.0:
            bad.append(name)
    announce(1, not bad, f"{len(CATALOG_NAMES)} algebras, max violation {worst:g}, failing {bad}")


def test_criterion_2_spectral(announce):
    failures, checked_k = [], 0
    for i in range(100):
        entry = get_entry("spectral/real" if i % 2 == 0 else "spectral/complex")
        n = 2 + (i // 2) % 4
        x = random_input(entry, n, seed=1000 + i)
        rep = _try(entry, x)
        if "mismatch" in rep:
            failures.append((i, rep["mismatch"]))
            continue
        z = x.payload[0]
        ev = np.linalg.eigvalsh(z)
        if np.min(np.diff(ev)) > 1e-6:
            checked_k += 1
            if rep["k"] != n:
                failures.append((i, f"k={rep['k']}"))
        got = []
        for v in rep["classical_summary"]["values"]:
            got.append(v if not isinstance(v, list) else v[0])
        err = np.max(np.abs(np.sort(got) - ev))
        if err > 1e-7:
            failures.append((i, f"scalar error {err:g}"))
        if rep["residuals"]["reconstruction"] > 1e-8:
            failures.append((i, f"reconstruction {rep['residuals']['reconstruction']:g}"))
    announce(2, not failures, f"100 instances, k=n checked on {checked_k}, failures {failures[:3]}")


def test_criterion_3_jordan(announce):
    rng = np.random.default_rng(33)
    entry = get_entry("jnf/double")
    failures, complex_cases = [], 0
    for i in range(50):
        n = 2 + i % 3
        blocks, left = [], n
        while left:
            if left >= 2 and rng.random() < 0.25:
                m = int(rng.integers(1, left // 2 + 1))
                blocks.append((complex(rng.integers(-2, 3), rng.integers(1, 3)), m))
                left -= 2 * m
                complex_cases += 1
                continue
            m = int(rng.integers(1, left + 1))
            # repeated eigenvalues on purpose so sizes interact
            blocks.append((float(rng.integers(-1, 2)), m))
            left -= m
        x = jordan_instance(blocks, seed=i)
        rep = _try(entry, x)
        want = sorted(2 * m if isinstance(lam, complex) else m for lam, m in blocks)
        if "mismatch" in rep or rep["classical_summary"]["block_sizes"] != want:
            failures.append((i, blocks))
    announce(3, not failures, f"50 instances ({complex_cases} complex blocks), failures {failures[:3]}")


def test_criterion_4_svd_takagi(announce):
    failures = []
    for name, key in (("svd", "singular_values"), ("takagi", "takagi_values")):
        entry = get_entry(name)
        for i in range(50):
            x = random_input(entry, 2 + i % 2, seed=4000 + i)
            rep = _try(entry, x)
            if "mismatch" in rep:
                failures.append((name, i, rep["mismatch"]))
                continue
            want = np.linalg.svd(x.payload[0], compute_uv=False)
            got = np.sort(rep["classical_summary"][key])[::-1]
            if got.size != want.size or np.max(np.abs(got - want)) > 1e-6:
                failures.append((name, i, got, want))
    announce(4, not failures, f"50 svd + 50 takagi, failures {failures[:3]}")


def test_criterion_5_sylvester(announce):
    failures, deficient = [], 0
    for name in ("sylvester", "sylvester/skew"):
        entry = get_entry(name)
        for i in range(100):
            n = 2 + i % 4
            x = random_input(entry, n, seed=5000 + i)
            S = x.payload[0]
            ev = np.linalg.eigvalsh(S) if name == "sylvester" else None
            rank = np.linalg.matrix_rank(S, tol=1e-8 * (1 + np.max(np.abs(S))))
            deficient += rank < n
            rep = _try(entry, x)
            if "mismatch" in rep:
                failures.append((name, i))
                continue
            summary = rep["classical_summary"]
            if name == "sylvester":
                cut = 1e-8 * (1 + np.max(np.abs(ev)))
                want = [int(np.sum(ev > cut)), int(np.sum(ev < -cut)), int(np.sum(np.abs(ev) <= cut))]
                ok = summary["inertia"] == want
            else:
                ok = (summary["rank_half"], summary["nullity"]) == (rank // 2, n - rank)
            if not ok:
                failures.append((name, i))
    announce(5, not failures, f"100 symmetric + 100 skew ({deficient} rank deficient), failures {failures[:3]}")


def _fd_derivatives(h, h1, t=1e-5):
    f = (lambda m: np.linalg.eigvalsh(m)) if np.allclose(h1, h1.T) else (lambda m: np.sort(np.linalg.eigvals(m).real))
    return (f(h + t * h1) - f(h - t * h1)) / (2 * t)


def test_criterion_6_perturbation(announce):
    failures, worst, counts = [], 0.0, {}
    for name in ("perturbation/dual_id", "perturbation/dual_conj"):
        entry = get_entry(name)
        seed, done = 6000, 0
        while done < 50:
            seed += 1
            x = random_input(entry, 2 + seed % 3, seed=seed)
            h, h1 = x.payload[0], x.payload[1]
            ev = np.linalg.eigvalsh(h)
            if np.min(np.diff(ev)) <= 1e-3:
                continue
            done += 1
            rep = _try(entry, x)
            if "mismatch" in rep:
                failures.append((name, seed))
                continue
            blocks = sorted(rep["classical_summary"]["block_coefficients"], key=lambda c: c[0])
            first = np.array([c[1] for c in blocks])
            err = float(np.max(np.abs(first - _fd_derivatives(h, h1))))
            worst = max(worst, err)
            if err > 1e-4:
                failures.append((name, seed, err))
        counts[name] = done
    announce(6, not failures, f"{counts}, worst first-order error {worst:.2e}, failures {failures[:3]}")


def _campaign_rows():
    rows = [(e.id, *e.resolve()) for e in tame_table_rows()]
    for name in ("quat_std", "quat_nonstd"):
        A, ideals = build_catalog_algebra(name)
        rows.append((f"proven/{name}", A, ideals["one"]))
    return rows


def test_criterion_7_campaigns(announce, tmp_path):
    bad, lines = [], []
    for row, A, ideal in _campaign_rows():
        for n in (2, 3):
            rep = stress_campaign(A, ideal, n, CAMPAIGN_TRIALS, tol=1e-6, seed=CAMPAIGN_SEED)
            if rep.k_agreement_rate != 1.0 or rep.certificate_success_rate != 1.0:
                bad.append((row, n, rep.proven, rep.k_agreement_rate, rep.certificate_success_rate))
                (tmp_path / f"{row.replace('/', '_')}_{n}.json").write_text(json.dumps(rep.to_json()))
    wild = [e for e in list_entries() if e.tame is False]
    for e in wild:
        A, ideal = e.resolve()
        rep = stress_campaign(A, ideal, 2, WILD_TRIALS, seed=CAMPAIGN_SEED)
        statuses = {f["status"] for f in rep.to_json()["failures"]}
        lines.append(f"{e.id}: k {rep.k_histogram}, agreement {rep.k_agreement_rate:.2f}, "
                     f"certificates {rep.certificate_success_rate:.2f}")
        if "decomposition_failed" in statuses:
            bad.append((e.id, "decomposition invariant"))
    rows = len(_campaign_rows())
    detail = f"{rows} rows x n in (2, 3) x {CAMPAIGN_TRIALS} trials, failing {bad[:4]}; wild: " + "; ".join(lines)
    announce(7, not bad, detail)


def _standard_local():
    out = []
    for name in CATALOG_NAMES:
        A, _ = build_catalog_algebra(name)
        c = radical_and_classify(A)
        if c.is_local and c.involution is InvolutionClass.standard:
            out.append(A)
    return out


def test_criterion_8_functional_calculus(announce):
    algebras = _standard_local()
    rng = np.random.default_rng(88)
    worst_sqrt = worst_unit = 0.0
    for i in range(500):
        A = algebras[i % len(algebras)]
        n = 1 + i % 3
        M = StarMatrix.identity(A, n) + 0.3 * random_matrix(A, n, rng)
        x = M.adjoint() @ M
        s = sqrt_unit(x)
        worst_sqrt = max(worst_sqrt, (s @ s).distance(x))
        U, P = polar(M)
        worst_unit = max(worst_unit, (U.adjoint() @ U).distance(StarMatrix.identity(A, n)))
    R, _ = build_catalog_algebra("real")
    try:
        sqrt_unit(StarMatrix.from_real(R, [[-1.0]]))
        raised = False
    except NegativeSpectrum:
        raised = True
    ok = worst_sqrt <= 1e-8 and worst_unit <= 1e-7 and raised
    announce(8, ok, f"500 instances over {[A.name for A in algebras]}, sqrt residual {worst_sqrt:.1e}, "
                    f"unitarity {worst_unit:.1e}, NegativeSpectrum raised {raised}")


def test_criterion_9_determinism(announce, tmp_path):
    H = tmp_path / "h.json"
    H.write_text(json.dumps({"entries": [[[2, 0], [1, 1], [0, 0]], [[1, -1], [3, 0], [0, 2]],
                                         [[0, 0], [0, -2], [1, 0]]]}))
    U = tmp_path / "u.json"
    U.write_text(json.dumps({"entries": [[[1.5, 0.2], [0.3, 0.0]], [[0.1, -0.4], [1.2, 0.0]]]}))
    commands = [["decompose", "complex_conj", str(H)], ["verify", "complex_conj", str(H)],
                ["catalog", "sylvester", "--trials", "3"], ["sqrt", "dual_id", str(tmp_path / "d.json")],
                ["polar", "complex_conj", str(U)], ["campaign", "double", "-n", "2", "--trials", "5"]]
    (tmp_path / "d.json").write_text(json.dumps({"entries": [[[4, 1]]]}))
    differing = []
    for cmd in commands:
        blobs = []
        for rep in range(2):
            out = tmp_path / f"out{rep}.json"
            code = main(cmd + ["--seed", "11", "--out", str(out), "--quarantine", str(tmp_path / "q")])
            blobs.append((code, out.read_bytes()))
        if blobs[0] != blobs[1]:
            differing.append(cmd[0])
    announce(9, not differing, f"{len(commands)} subcommands run twice, differing {differing}")
