import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stardecomp.algebra import InvolutionClass, build_catalog_algebra, radical_and_classify
from stardecomp.errors import AlgebraError, NegativeSpectrum, NotAUnit
from stardecomp.specfun import (algebra_gap, column_inner, eigen_clusters, hermite_indicator, hermite_plan,
                                orthonormalize_image, polar, sqrt_unit)
from stardecomp.starmat import StarMatrix, predicates, random_hermitian, random_matrix


def alg(name):
    return build_catalog_algebra(name)[0]


def test_cluster_examples():
    R = alg("real")
    cl = eigen_clusters(StarMatrix.from_real(R, np.diag([1.0, 2.0, 3.0])).realize(), 1e-6)
    assert len(cl) == 3 and all(c.total_multiplicity == 1 for c in cl)
    cl = eigen_clusters(np.array([[0.0, -1.0], [1.0, 0.0]]), 1e-6)
    assert len(cl) == 1 and cl.clusters[0].conjugate_closed and cl.clusters[0].total_multiplicity == 2
    S = alg("sylvester3")
    H = StarMatrix(S, np.zeros((3, 3, 3)))
    c = np.array(H.coords)
    c[:, :, 2] = np.diag([2.0, -3.0, 0.0])
    realization = StarMatrix(S, c).realize()
    cl = eigen_clusters(realization, 1e-6)
    eigs = np.linalg.eigvals(realization)
    assert sum(c.total_multiplicity for c in cl) == 9
    assert len(cl) == len(np.unique(np.round(eigs, 6)))


def test_hermite_plan_matches_nodes():
    nodes = [(complex(1.0), 2), (complex(2.0, 1.0), 1), (complex(2.0, -1.0), 1)]
    plan = hermite_plan(nodes, lambda z, j: np.exp(z) if j < 2 else 0.0)
    assert np.all(np.isreal(plan.coefficients))
    for z, m in nodes:
        for j in range(m):
            assert abs(plan(z, j) - np.exp(z)) <= 1e-8


def test_indicator_examples():
    R = alg("real")
    K = StarMatrix.from_real(R, np.diag([1.0, 2.0]))
    cl = eigen_clusters(K.realize(), 1e-6)
    low = min(range(len(cl)), key=lambda i: cl.clusters[i].center.real)
    E = hermite_indicator(K, [low], cl)
    assert E.distance(StarMatrix.from_real(R, np.diag([1.0, 0.0]))) <= 1e-12
    assert hermite_indicator(K, range(len(cl)), cl).distance(StarMatrix.identity(R, 2)) == 0.0


def test_indicator_matches_eigh_projector():
    A, ideals = build_catalog_algebra("complex_conj")
    K = random_hermitian(A, ideals["one"], 3, 4)
    Z = K.coords[:, :, 0] + 1j * K.coords[:, :, 1]
    w, V = np.linalg.eigh(Z)
    cl = eigen_clusters(K.realize(), 1e-6)
    pick = min(range(len(cl)), key=lambda i: cl.clusters[i].center.real)
    E = hermite_indicator(K, [pick], cl)
    P = np.outer(V[:, 0], V[:, 0].conj())
    assert np.max(np.abs(E.coords[:, :, 0] + 1j * E.coords[:, :, 1] - P)) <= 1e-7


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["real", "complex_conj", "complex_id", "dual_id", "dual_conj", "quat_std",
                        "quat_nonstd", "jet3_id", "jet3_conj", "biquad4", "takagi4"]),
       st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_indicator_properties(name, n, seed):
    A, ideals = build_catalog_algebra(name)
    K = random_hermitian(A, ideals["one"], n, seed)
    R = K.realize()
    cl = eigen_clusters(R, algebra_gap(R, A))
    if len(cl) < 2:
        return
    sel = list(range(len(cl) // 2))
    E = hermite_indicator(K, sel, cl)
    F = hermite_indicator(K, [i for i in range(len(cl)) if i not in sel], cl)
    assert E.distance(E.adjoint()) <= 1e-8
    assert (E @ E).distance(E) <= 1e-8
    assert (E @ K).distance(K @ E) <= 1e-8 * (1 + K.norm())
    assert (E + F).distance(StarMatrix.identity(A, n)) <= 1e-8


def test_sqrt_examples():
    D = alg("dual_id")
    s = sqrt_unit(StarMatrix(D, [[[1.0, 1.0]]]))
    np.testing.assert_allclose(s.coords, [[[1.0, 0.5]]], atol=1e-12)
    Q = alg("quat_nonstd")
    assert sqrt_unit(StarMatrix.identity(Q, 2)).distance(StarMatrix.identity(Q, 2)) <= 1e-12
    x0 = StarMatrix(Q, [[[0.9, 0.3, -0.4, 0.2]]])
    x = x0.adjoint() @ x0
    s = sqrt_unit(x)
    assert (s @ s).distance(x) <= 1e-8


def test_sqrt_errors():
    R = alg("real")
    with pytest.raises(NegativeSpectrum):
        sqrt_unit(StarMatrix.from_real(R, [[-1.0]]))
    with pytest.raises(NotAUnit):
        sqrt_unit(StarMatrix.from_real(R, [[1.0, 0.0], [0.0, 0.0]]))


def test_sqrt_of_square_keeps_spectrum():
    A, ideals = build_catalog_algebra("complex_conj")
    H = random_hermitian(A, ideals["one"], 3, 8)
    s = H @ H + StarMatrix.identity(A, 3)  # positive definite
    r = sqrt_unit(s @ s)
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(r.realize()).real),
                               np.sort(np.linalg.eigvals(s.realize()).real), atol=1e-8)


def test_polar_examples():
    R = alg("real")
    c, s = np.cos(0.7), np.sin(0.7)
    rot = StarMatrix.from_real(R, [[c, -s], [s, c]])
    U, P = polar(rot)
    assert U.distance(rot) <= 1e-9 and P.distance(StarMatrix.identity(R, 2)) <= 1e-9
    U, P = polar(2.0 * StarMatrix.identity(R, 2))
    assert U.distance(StarMatrix.identity(R, 2)) <= 1e-12 and P.distance(2.0 * StarMatrix.identity(R, 2)) <= 1e-12
    C = alg("complex_conj")
    M = random_matrix(C, 3, np.random.default_rng(2))
    U, P = polar(M)
    Z = M.coords[:, :, 0] + 1j * M.coords[:, :, 1]
    u, sv, vh = np.linalg.svd(Z)
    Uo = u @ vh
    assert np.max(np.abs(U.coords[:, :, 0] + 1j * U.coords[:, :, 1] - Uo)) <= 1e-7
    assert predicates(U, tol=1e-7)["unitary"]
    assert (U @ P).distance(M) <= 1e-8
    assert P.distance(P.adjoint()) <= 1e-7


def test_orthonormalize_examples():
    R = alg("real")
    out = orthonormalize_image([np.array([[3.0]])], R)
    np.testing.assert_allclose(out[0], [[1.0]])
    D = alg("dual_id")
    e1, e2 = np.array([[1.0, 0], [0, 0]]), np.array([[0.0, 0], [1, 0]])
    out = orthonormalize_image([e1, e2], D)
    np.testing.assert_allclose(out[0], e1)
    np.testing.assert_allclose(out[1], e2)
    v1 = np.array([[1.0, 0.0], [0.0, 1.0]])  # (1, X)
    v2 = np.array([[0.0, 0.0], [1.0, 0.0]])  # (0, 1)
    out = orthonormalize_image([v1, v2], D)
    for i, a in enumerate(out):
        for j, b in enumerate(out):
            want = D.unit if i == j else np.zeros(2)
            assert np.max(np.abs(column_inner(D, a, b) - want)) <= 1e-10
    # the span is preserved: the change of basis is invertible over the algebra
    old = np.column_stack([StarMatrix(D, np.stack([v1, v2], 1)).realize()])
    new = StarMatrix(D, np.stack(out, 1)).realize()
    assert np.linalg.matrix_rank(np.linalg.lstsq(new, old, rcond=None)[0]) == 4


def test_orthonormalize_hypothesis_and_nonunit():
    C = alg("complex_id")
    assert radical_and_classify(C).involution is InvolutionClass.nonstandard
    with pytest.raises(AlgebraError):
        orthonormalize_image([np.array([[1.0, 0.0]])], C)
    D = alg("dual_id")
    with pytest.raises(NotAUnit):
        orthonormalize_image([np.array([[0.0, 1.0]])], D)  # (X): X^* X = 0
