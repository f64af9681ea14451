import dataclasses

import numpy as np
import pytest

from stardecomp.algebra import build_catalog_algebra
from stardecomp.conjecture import (IntertwinerCertificate, intertwiner_search, stress_campaign,
                                   verify_certificate, verify_instance)
from stardecomp.decomp import _rank_real, block_data, maximal_projector_decomposition
from stardecomp.errors import SearchFailure
from stardecomp.starmat import StarMatrix, random_hermitian


def real():
    return build_catalog_algebra("real")


def test_identical_families():
    A, ideals = real()
    H = random_hermitian(A, ideals["one"], 3, 1)
    Ps = maximal_projector_decomposition(H).projectors
    cert = intertwiner_search(H, Ps, Ps)
    assert cert.sigma == (0, 1, 2)
    ident = IntertwinerCertificate((0, 1, 2), StarMatrix.identity(A, 3), {}, 0)
    assert verify_certificate(H, Ps, Ps, ident)["passed"]
    # any found U must preserve each block
    for P in Ps:
        assert (cert.U @ P).distance(P @ cert.U) <= 1e-8


def test_rotated_projectors():
    A, _ = real()
    H = StarMatrix.identity(A, 2)
    Ps = [StarMatrix.from_real(A, np.diag([1.0, 0.0])), StarMatrix.from_real(A, np.diag([0.0, 1.0]))]
    c = s = np.sqrt(0.5)
    u = np.array([[c, -s], [s, c]])
    Qs = [StarMatrix.from_real(A, u @ P.coords[:, :, 0] @ u.T) for P in Ps]
    cert = intertwiner_search(H, Ps, Qs)
    report = verify_certificate(H, Ps, Qs, cert)
    assert report["passed"]
    U = cert.U.coords[:, :, 0]
    assert np.allclose(U.T @ U, np.eye(2), atol=1e-9)


def test_spectral_pairing():
    A, ideals = real()
    H = random_hermitian(A, ideals["one"], 4, 12)
    Ps = maximal_projector_decomposition(H, seed=1).projectors
    Qs = maximal_projector_decomposition(H, seed=2).projectors
    cert = intertwiner_search(H, Ps, Qs, seed=3)
    for i, Q in enumerate(Qs):
        assert abs(block_data(H, Q).scalar - block_data(H, Ps[cert.sigma[i]]).scalar) <= 1e-8
    assert max(cert.residuals["per_block_conjugation"]) <= 1e-7


def test_verify_detects_perturbation_and_wrong_sigma():
    A, ideals = real()
    H = StarMatrix.from_real(A, np.diag([1.0, 2.0, 4.0]))
    Ps = maximal_projector_decomposition(H).projectors
    cert = intertwiner_search(H, Ps, Ps)
    assert verify_certificate(H, Ps, Ps, cert)["passed"]
    c = np.array(cert.U.coords)
    c[0, 1, 0] += 1e-3
    bad = dataclasses.replace(cert, U=StarMatrix(A, c))
    rep = verify_certificate(H, Ps, Ps, bad)
    assert not rep["passed"]
    assert max(rep["unitarity"], rep["h_conjugation"], *rep["per_block_conjugation"]) >= 1e-4
    swapped = dataclasses.replace(cert, sigma=(1, 0, 2))
    rep = verify_certificate(H, Ps, Ps, swapped)
    assert not rep["passed"] and max(rep["per_block_conjugation"]) >= 0.99


def test_search_failure_carries_residuals():
    A, ideals = real()
    H = random_hermitian(A, ideals["one"], 3, 4)
    Ps = maximal_projector_decomposition(H).projectors
    with pytest.raises(SearchFailure) as info:
        intertwiner_search(H, Ps, Ps, tol=1e-30, retries=2)
    assert info.value.attempts > 0 and "unitarity" in info.value.best_residuals


@pytest.mark.parametrize("row", [("double", "one"), ("sylvester3", "one"), ("svd4", "delta"),
                                 ("m2r_adjugate", "one"), ("quat_nonstd", "one")])
def test_certificate_soundness_and_transport(row):
    A, ideals = build_catalog_algebra(row[0])
    for seed in range(3):
        H = random_hermitian(A, ideals[row[1]], 3, seed)
        res = verify_instance(H, seeds=(seed, seed + 50, seed + 99))
        assert res["status"] == "verified"
        cert = res["certificate"]
        Ps, Qs = res["Ps"], res["Qs"]
        assert verify_certificate(H, Ps, Qs, cert, 1e-6)["passed"]
        tol = 1e-6
        for i, Q in enumerate(Qs):
            P = Ps[cert.sigma[i]]
            assert _rank_real(Q) == _rank_real(P)
            lhs = cert.U @ (Q @ H @ Q) @ cert.U.adjoint()
            assert lhs.distance(P @ H @ P) <= 2 * tol * (1 + H.norm())


def test_campaign_determinism_and_validation():
    A, ideals = build_catalog_algebra("double")
    a = stress_campaign(A, ideals["one"], 2, 6, seed=9)
    b = stress_campaign(A, ideals["one"], 2, 6, seed=9)
    assert a.to_json() == b.to_json()
    assert a.k_agreement_rate == 1.0
    assert a.successes + len(a.failures) == a.trials
    with pytest.raises(ValueError):
        stress_campaign(A, ideals["one"], 2, 0)


def test_campaign_real_rows():
    A, ideals = real()
    rep = stress_campaign(A, ideals["one"], 3, 20, seed=1)
    assert rep.proven
    assert rep.k_agreement_rate == 1.0 and rep.certificate_success_rate == 1.0
    assert rep.k_histogram == {3: 20}
