import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entconfusion import numkernel as nk
from entconfusion import qstate
from entconfusion.errors import DimensionError, FixtureError, NormError, ShapeError, StateError
from entconfusion.fixtures import load_golden


def test_max_entangled_d2():
    v = qstate.max_entangled(2).vec
    assert np.allclose(v, [1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)], atol=1e-15)


def test_max_entangled_d3():
    v = qstate.max_entangled(3).vec
    assert np.sum(np.abs(v) < 1e-15) == 6
    assert np.allclose(v[[0, 4, 8]], 1 / np.sqrt(3))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_max_entangled_schmidt_and_marginals(d):
    psi = qstate.max_entangled(d)
    s = nk.schmidt_decompose(psi.vec, (d, d))
    assert np.allclose(s.coefficients, 1 / np.sqrt(d), atol=1e-12)
    rho = psi.projector().mat
    for keep in "AB":
        assert np.abs(nk.partial_trace(rho, (d, d), keep) - np.eye(d) / d).max() < 1e-12


def test_max_entangled_bad_dim():
    with pytest.raises(DimensionError):
        qstate.max_entangled(1)


@pytest.mark.parametrize("dims", [(2, 2), (3, 3), (2, 3)])
def test_max_mixed(dims):
    rho = qstate.max_mixed(*dims)
    n = dims[0] * dims[1]
    assert np.allclose(rho.mat, np.eye(n) / n)
    assert abs(rho.purity() - 1 / n) < 1e-12


def test_cq_state():
    rho = qstate.canonical_state("cq")
    assert rho.dims == (3, 3)
    assert abs(np.trace(rho.mat) - 1) < 1e-12
    w = rho.eigenvalues()
    assert np.sum(w > 1e-10) == 3
    pt = nk.partial_transpose(rho.mat, (3, 3))
    assert np.linalg.eigvalsh(pt).min() > -1e-10


def test_horodecki_ppt_golden():
    rec = load_golden("horodecki_ppt")
    for key, exp in rec.expected.items():
        rho = qstate.canonical_state("horodecki_ppt", [float(key)])
        v = exp.value
        assert abs(rho.eigenvalues()[0] - v["min_eigenvalue"]) < exp.tolerance
        pt = np.linalg.eigvalsh(nk.partial_transpose(rho.mat, (3, 3)))
        assert abs(pt[0] - v["min_pt_eigenvalue"]) < exp.tolerance
        assert pt[0] >= -1e-10
        assert abs(np.trace(rho.mat).real - v["trace"]) < exp.tolerance


def test_horodecki_is_hermitian():
    m = qstate.horodecki_ppt(0.2).mat
    assert np.array_equal(m, m.conj().T)


def test_isotropic_alpha_one_is_pure():
    rho = qstate.canonical_state("isotropic", [2, 1.0])
    phi = qstate.max_entangled(2).projector().mat
    assert np.abs(rho.mat - phi).max() < 1e-12


@pytest.mark.parametrize(
    "name,params",
    [("nope", []), ("horodecki_ppt", [1.5]), ("horodecki_ppt", [0.0]), ("isotropic", [2, 1.2]),
     ("isotropic", [2, -0.5]), ("isotropic", [1.5, 0.3])],
)
def test_canonical_state_errors(name, params):
    with pytest.raises(FixtureError):
        qstate.canonical_state(name, params)


def test_fidelity_examples():
    phi = qstate.max_entangled(2)
    assert abs(qstate.fidelity_with_pure(phi.projector(), phi) - 1) < 1e-12
    assert abs(qstate.fidelity_with_pure(qstate.max_mixed(2, 2), phi) - 0.25) < 1e-12
    mix = 0.5 * phi.projector().mat + 0.5 * qstate.bell_minus().projector().mat
    assert abs(qstate.fidelity_with_pure(qstate.DensityMatrix(mix, (2, 2)), phi) - 0.5) < 1e-12


def test_fidelity_shape_error():
    with pytest.raises(ShapeError):
        qstate.fidelity_with_pure(qstate.max_mixed(3, 3), qstate.max_entangled(2))


@settings(max_examples=30, deadline=None)
@given(p=st.floats(0, 1), seed=st.integers(0, 2**32 - 1))
def test_fidelity_linear(p, seed):
    rng = np.random.default_rng(seed)
    r1, r2 = qstate.random_density((2, 2), rng), qstate.random_density((2, 2), rng)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    phi = qstate.PureState(v / np.linalg.norm(v), (2, 2))
    mix = qstate.DensityMatrix(p * r1.mat + (1 - p) * r2.mat, (2, 2))
    lhs = qstate.fidelity_with_pure(mix, phi)
    rhs = p * qstate.fidelity_with_pure(r1, phi) + (1 - p) * qstate.fidelity_with_pure(r2, phi)
    assert abs(lhs - rhs) < 1e-12


def test_density_matrix_validation_names_invariant():
    with pytest.raises(StateError, match="hermitian"):
        qstate.DensityMatrix(np.array([[0.5, 0.1, 0, 0], [0, 0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]), (2, 2))
    with pytest.raises(StateError, match="trace"):
        qstate.DensityMatrix(np.eye(4) / 2, (2, 2))
    with pytest.raises(StateError, match="psd"):
        qstate.DensityMatrix(np.diag([1.5, -0.5, 0, 0]), (2, 2))
    with pytest.raises(StateError, match="shape"):
        qstate.DensityMatrix(np.eye(3) / 3, (2, 2))


def test_pure_state_norm():
    with pytest.raises(NormError):
        qstate.PureState(np.array([1, 1, 0, 0]), (2, 2))


def test_json_round_trip():
    rho = qstate.random_density((2, 3), np.random.default_rng(1))
    back = qstate.DensityMatrix.from_json(rho.to_json())
    assert back.dims == (2, 3)
    assert np.array_equal(back.mat, rho.mat)


@pytest.mark.parametrize(
    "doc,word",
    [
        ("not json", "json"),
        (json.dumps({"dims": [2, 2]}), "schema"),
        (json.dumps({"dims": [2, 2], "matrix": [[1, 0], [0, 1]]}), "schema"),
        (json.dumps({"dims": [2], "matrix": [[[1, 0]]]}), "schema"),
        (json.dumps({"dims": [1, 1], "matrix": [[[2, 0]]]}), "trace"),
    ],
)
def test_json_rejects_malformed(doc, word):
    with pytest.raises(StateError, match=word):
        qstate.DensityMatrix.from_json(doc)


@pytest.mark.parametrize("name,params", [("cq", []), ("horodecki_ppt", [0.2]), ("horodecki_ppt", [0.9]),
                                         ("isotropic", [3, -0.125]), ("isotropic", [2, 0.5])])
def test_canonical_states_are_valid(name, params):
    rho = qstate.canonical_state(name, params)
    assert np.abs(rho.mat - rho.mat.conj().T).max() < 1e-12
    assert abs(np.trace(rho.mat).real - 1) < 1e-12
    assert rho.eigenvalues()[0] > -1e-10
