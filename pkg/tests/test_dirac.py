import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracspin import dirac
from diracspin.dirac import DiracMorphism
from diracspin.errors import DimensionMismatch, NonLagrangianResult, NotStrong
from diracspin.instances import random_morphism, random_skew, random_strong_pair, random_structure
from diracspin.linear_core import BilinearPairing, isotropic_check, span

seeds = st.integers(0, 2**32 - 1)


def _lagrangian(D):
    ok, _ = isotropic_check(D.E, BilinearPairing.canonical(D.n))
    return ok and D.E.dim == D.n


def test_vectors_and_covectors_are_dirac():
    for n in range(1, 5):
        assert _lagrangian(dirac.vectors(n))
        assert _lagrangian(dirac.covectors(n))
        assert dirac.parity(dirac.vectors(n)) == ("odd" if n % 2 else "even")
        assert dirac.parity(dirac.covectors(n)) == "even"


def test_certify_rejects_non_lagrangian():
    e = np.eye(4)
    with pytest.raises(NonLagrangianResult):
        dirac.from_frame(e[:, [0, 2]], 2)
    with pytest.raises(NonLagrangianResult):
        dirac.from_frame(e[:, [0]], 2)
    with pytest.raises(DimensionMismatch):
        dirac.from_frame(e[:, :2], 3)


def test_morphism_validates_omega():
    with pytest.raises(ValueError):
        DiracMorphism(np.eye(2), np.ones((2, 2)))
    with pytest.raises(DimensionMismatch):
        DiracMorphism(np.eye(2), np.zeros((3, 3)))


def test_morphism_dict_round_trip():
    m = random_morphism(np.random.default_rng(3), 3, 2)
    back = DiracMorphism.from_dict(m.to_dict())
    assert np.array_equal(back.theta, m.theta) and np.array_equal(back.omega, m.omega)


def test_contraction_uses_first_slot():
    omega = np.array([[0.0, 2.0], [-2.0, 0.0]])
    m = DiracMorphism(np.eye(2), omega)
    # ω(e1, e2) = 2, so ι_{e1} ω = 2 e2*
    assert np.array_equal(m.contract(np.array([1.0, 0.0])), np.array([0.0, 2.0]))


def test_identity_morphism_fixes_every_structure():
    rng = np.random.default_rng(0)
    for n in range(1, 6):
        D = random_structure(rng, n)
        assert dirac.same_structure(dirac.forward_image(DiracMorphism.identity(n), D), D)


def test_forward_image_of_vectors_is_graph_of_form():
    # (v, 0) ∈ V relates to (v, α') exactly when ι_v ω + α' = 0
    omega = random_skew(np.random.default_rng(1), 4)
    m = DiracMorphism(np.eye(4), -omega)
    assert dirac.same_structure(dirac.forward_image(m, dirac.vectors(4)), dirac.graph_of_form(omega))


def test_forward_image_of_covectors_is_covectors():
    m = random_morphism(np.random.default_rng(2), 3, 5)
    assert dirac.same_structure(dirac.forward_image(m, dirac.covectors(3)), dirac.covectors(5))


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_forward_image_is_lagrangian_and_keeps_parity(seed, n, k):
    rng = np.random.default_rng(seed)
    m, D = random_strong_pair(rng, n, k)
    img = dirac.forward_image(m, D)
    assert _lagrangian(img)
    assert dirac.parity(img) == dirac.parity(D)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_backward_image_is_always_lagrangian(seed, n, k):
    rng = np.random.default_rng(seed)
    m = random_morphism(rng, n, k, rank=int(rng.integers(0, min(n, k) + 1)))
    assert _lagrangian(dirac.backward_image(m, random_structure(rng, k)))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 5), st.integers(1, 5), st.integers(1, 5))
def test_forward_images_compose(seed, n, k, l):
    rng = np.random.default_rng(seed)
    m1, D = random_strong_pair(rng, n, k)
    m2 = random_morphism(rng, k, l)
    img1 = dirac.forward_image(m1, D)
    if not dirac.is_strong(m2, img1):
        return
    two_step = dirac.forward_image(m2, img1)
    assert dirac.same_structure(dirac.forward_image(dirac.compose(m2, m1), D), two_step, tol=1e-7)


def test_compose_rejects_mismatch():
    with pytest.raises(DimensionMismatch):
        dirac.compose(DiracMorphism.identity(2), DiracMorphism.identity(3))


def test_kernel_and_strongness():
    # Θ = 0 onto a point: ker = graph of ω, so V is strong iff ω is nondegenerate
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    to_point = DiracMorphism(np.zeros((0, 2)), omega)
    assert dirac.kernel_of(to_point).dim == 2
    assert dirac.is_strong(to_point, dirac.vectors(2))
    assert not dirac.is_strong(DiracMorphism(np.zeros((0, 2)), np.zeros((2, 2))), dirac.vectors(2))
    # V* meets every graph {(v, ι_v ω)} only at zero
    assert dirac.is_strong(DiracMorphism(np.zeros((0, 2)), np.zeros((2, 2))), dirac.covectors(2))


def test_relation_residual_vanishes_on_related_pairs():
    rng = np.random.default_rng(4)
    m = random_morphism(rng, 3, 2)
    v, ap = rng.standard_normal(3), rng.standard_normal(2)
    x = np.concatenate([v, m.contract(v) + m.theta.T @ ap])
    y = np.concatenate([m.theta @ v, ap])
    assert dirac.relation_residual(m, x, y) < 1e-14
    y[0] += 1.0
    assert dirac.relation_residual(m, x, y) > 0.5


def test_standard_path_endpoints():
    rng = np.random.default_rng(5)
    m, D = random_strong_pair(rng, 3, 2)
    start = dirac.standard_path(m, D, 0.0)
    end = dirac.standard_path(m, D, 1.0)
    assert dirac.same_structure(start, dirac.product(D, dirac.covectors(2)))
    assert dirac.same_structure(end, dirac.product(dirac.covectors(3), dirac.forward_image(m, D)))


def test_standard_path_needs_strong_morphism():
    m = DiracMorphism(np.zeros((1, 2)), np.zeros((2, 2)))
    with pytest.raises(NotStrong):
        dirac.standard_path(m, dirac.vectors(2), 0.5)


def test_paths_stay_lagrangian_in_the_interior():
    rng = np.random.default_rng(6)
    m1, D = random_strong_pair(rng, 2, 3)
    m2, _ = random_strong_pair(rng, 3, 2)
    while not dirac.is_strong(m2, dirac.forward_image(m1, D)):
        m2, _ = random_strong_pair(rng, 3, 2)
    for t in np.linspace(0, 1, 7):
        assert _lagrangian(dirac.standard_path(m1, D, t))
        assert _lagrangian(dirac.normalized_path(D, t))
    for t, tp in [(0.2, 0.3), (0.5, 0.5), (0.0, 1.0), (0.0, 0.0)]:
        assert _lagrangian(dirac.two_param_path(m1, m2, D, t, tp))
    with pytest.raises(ValueError):
        dirac.two_param_path(m1, m2, D, 0.7, 0.7)


def test_two_parameter_path_edge_matches_one_parameter_path():
    rng = np.random.default_rng(7)
    m1, D = random_strong_pair(rng, 2, 2)
    m2 = DiracMorphism.identity(2)
    E = dirac.two_param_path(m1, m2, D, 0.4, 0.0)
    expected = dirac.product(dirac.standard_path(m1, D, 0.4), dirac.covectors(2))
    assert dirac.same_structure(E, expected)


def test_product_layout_puts_vectors_first():
    P = dirac.product(dirac.vectors(1), dirac.covectors(2))
    assert P.n == 3
    assert dirac.same_structure(P, dirac.from_frame(np.eye(6)[:, [0, 4, 5]], 3))


def test_structure_dict_round_trip():
    D = random_structure(np.random.default_rng(8), 4)
    assert dirac.same_structure(dirac.DiracStructure.from_dict(D.to_dict()), D)
