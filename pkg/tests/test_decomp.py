import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stardecomp.algebra import build_catalog_algebra, null_space
from stardecomp.decomp import (DecompositionConfig, block_data, commutant, commutator_operator,
                               family_residuals, maximal_projector_decomposition, split_block)
from stardecomp.errors import DecompositionFailed
from stardecomp.specfun import eigen_clusters, hermite_indicator
from stardecomp.starmat import StarMatrix, random_hermitian


def alg(name):
    return build_catalog_algebra(name)[0]


def jordan_double(a):
    D = alg("double")
    a = np.asarray(a, float)
    return StarMatrix(D, np.stack([a, a.T], axis=2))


def test_commutant_examples():
    R = alg("real")
    assert commutant(StarMatrix.identity(R, 2)).dim == 4
    assert commutant(StarMatrix.from_real(R, np.diag([1.0, 2.0]))).dim == 2
    H = jordan_double([[1.0, 1.0], [0.0, 1.0]])
    C = commutant(H)
    assert C.dim == null_space(commutator_operator(H)).shape[1] == 4
    for X in C.matrices():
        assert (X @ H).distance(H @ X) <= 1e-9 * (1 + H.norm())
    for X in C.hermitian_matrices():
        assert X.distance(X.adjoint()) <= 1e-12


def test_commutant_of_noisy_scalar():
    # a scalar matrix plus roundoff still commutes with everything
    R = alg("real")
    H = StarMatrix.from_real(R, [[3.0, 1e-16], [-2e-16, 3.0]])
    assert commutant(H).dim == 4


def test_split_examples():
    R = alg("real")
    H = StarMatrix.from_real(R, np.diag([1.0, 2.0]))
    C = commutant(H)
    for seed in range(5):
        E, F = split_block(H, StarMatrix.identity(R, 2), C, seed=seed)
        parts = sorted([E, F], key=lambda P: -P.coords[0, 0, 0])
        assert parts[0].distance(StarMatrix.from_real(R, np.diag([1.0, 0.0]))) <= 1e-10
    one = StarMatrix.identity(R, 1)
    assert split_block(one, one, commutant(one), seed=0) is None
    H = jordan_double([[2.0, 1.0], [0.0, 2.0]])
    C = commutant(H)
    assert all(split_block(H, StarMatrix.identity(H.algebra, 2), C, seed=s) is None for s in range(10))


def test_decomposition_examples():
    R, ideals = build_catalog_algebra("real")
    H = random_hermitian(R, ideals["one"], 4, 3)
    D = maximal_projector_decomposition(H, seed=1)
    assert D.k == 4
    assert all(block_data(H, P).rank_real == 1 for P in D.projectors)
    Z = StarMatrix.zero(R, 2)
    assert maximal_projector_decomposition(Z).k == 2
    S = alg("sylvester3")
    c = np.zeros((3, 3, 3))
    c[:, :, 2] = np.diag([2.0, -3.0, 0.0])
    assert maximal_projector_decomposition(StarMatrix(S, c)).k == 3


def test_block_data_examples():
    R, ideals = build_catalog_algebra("real")
    H = random_hermitian(R, ideals["one"], 3, 9)
    D = maximal_projector_decomposition(H)
    scalars = sorted(block_data(H, P).scalar for P in D.projectors)
    np.testing.assert_allclose(scalars, np.linalg.eigvalsh(H.coords[:, :, 0]), atol=1e-9)
    Z = StarMatrix.zero(R, 2)
    assert all(block_data(Z, P).scalar == 0.0 for P in maximal_projector_decomposition(Z).projectors)
    J = jordan_double([[5.0, 1.0], [0.0, 5.0]])
    data = block_data(J, StarMatrix.identity(J.algebra, 2))
    assert data.scalar is None and data.rank_real == 4


def test_bad_inputs():
    R = alg("real")
    with pytest.raises(ValueError):
        maximal_projector_decomposition(StarMatrix.from_real(R, [[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        maximal_projector_decomposition(StarMatrix.identity(R, 2), max_trials=0)
    with pytest.raises(DecompositionFailed):
        maximal_projector_decomposition(StarMatrix.from_real(R, np.diag([1.0, 2.0])), tol=1e-40)


def test_sum_equivalence_on_random_families():
    # sum P H P = H iff each P commutes with H, for complete orthogonal families
    R, ideals = build_catalog_algebra("real")
    rng = np.random.default_rng(0)
    for _ in range(10):
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        Ps = [StarMatrix.from_real(R, np.outer(Q[:, i], Q[:, i])) for i in range(4)]
        H_comm = StarMatrix.from_real(R, Q @ np.diag(rng.standard_normal(4)) @ Q.T)
        H_other = random_hermitian(R, ideals["one"], 4, int(rng.integers(1 << 30)))
        for H, expect in ((H_comm, True), (H_other, False)):
            res = family_residuals(H, Ps)
            assert (res["reconstruction"] <= 1e-9) == expect
            assert (res["commutation"] <= 1e-9) == expect


def test_complement_increases_k():
    R = alg("real")
    H = StarMatrix.from_real(R, np.diag([1.0, 2.0, 3.0]))
    partial = [StarMatrix.from_real(R, np.diag([1.0, 0, 0])), StarMatrix.from_real(R, np.diag([0, 1.0, 0]))]
    P0 = StarMatrix.identity(R, 3) - partial[0] - partial[1]
    res = family_residuals(H, partial + [P0])
    assert max(v for key, v in res.items() if key != "min_norm") <= 1e-12
    assert res["min_norm"] > 0.5


def test_idempotent_stability():
    A, ideals = build_catalog_algebra("complex_conj")
    H = random_hermitian(A, ideals["one"], 3, 2)
    for E in maximal_projector_decomposition(H).projectors:
        cl = eigen_clusters(E.realize(), 1e-6)
        one = [i for i, c in enumerate(cl.clusters) if abs(c.center - 1) < 0.5]
        assert hermite_indicator(E, one, cl).distance(E) <= 1e-8


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([("double", "one"), ("sylvester3", "one"), ("m2r_adjugate", "one"),
                        ("twojet_xy_sym", "X_Y"), ("dual_conj", "X")]),
       st.integers(2, 3), st.integers(0, 2 ** 31))
def test_monotone_and_reproducible(row, n, seed):
    A, ideals = build_catalog_algebra(row[0])
    H = random_hermitian(A, ideals[row[1]], n, seed)
    ks = [maximal_projector_decomposition(H, max_trials=m, seed=seed).k for m in (1, 4, 32)]
    assert ks == sorted(ks)
    a = maximal_projector_decomposition(H, seed=seed)
    b = maximal_projector_decomposition(H, seed=seed)
    assert a.k == b.k
    assert all(np.array_equal(p.coords, q.coords) for p, q in zip(a.projectors, b.projectors))


def test_report_json():
    R, ideals = build_catalog_algebra("real")
    D = maximal_projector_decomposition(random_hermitian(R, ideals["one"], 2, 0), cfg=DecompositionConfig(seed=4))
    obj = D.to_json()
    assert obj["schema"] == "v1" and obj["k"] == 2 and obj["seed"] == 4
    assert set(obj["residuals"]) >= {"completeness", "orthogonality", "selfadjointness", "commutation",
                                     "reconstruction"}
