import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entconfusion import ffnn
from entconfusion.errors import DataError, ShapeError
from entconfusion.fixtures import load_golden


def numeric_grad(params, x, y, crossed, h=1e-5):
    g = np.zeros_like(params.flat)
    for k in range(params.flat.size):
        up, dn = params.copy(), params.copy()
        up.flat[k] += h
        dn.flat[k] -= h
        g[k] = (ffnn.loss(up, x, y, crossed) - ffnn.loss(dn, x, y, crossed)) / (2 * h)
    return g


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-300)


def clusters(rng, n=200, dim=16, sep=0.2):
    """Two separable blobs of probability-like vectors."""
    y = np.arange(n) % 2
    centers = rng.dirichlet(np.ones(dim), size=2)
    x = centers[y] + rng.normal(0, 0.01, (n, dim))
    x[:, 0] += sep * (2 * y - 1)
    return x, y


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("crossed", [False, True])
def test_gradient_matches_finite_differences(seed, crossed):
    rng = np.random.default_rng(seed)
    p = ffnn.init(6, 5, rng)
    p.b1[...] = rng.normal(0, 0.1, 5)
    x = rng.dirichlet(np.ones(6), size=8)
    y = rng.integers(0, 2, 8)
    analytic = ffnn.loss_and_grad(p, x, y, crossed)[1]
    assert rel_err(analytic, numeric_grad(p, x, y, crossed)) < 1e-5


def test_init_shapes_and_determinism():
    a = ffnn.init(16, 32, np.random.default_rng(1))
    b = ffnn.init(16, 32, np.random.default_rng(1))
    assert a.w1.shape == (32, 16) and a.w2.shape == (2, 32)
    assert a.b1.shape == (32,) and a.b2.shape == (2,)
    assert np.array_equal(a.flat, b.flat)
    assert np.all(a.b1 == 0) and np.all(a.b2 == 0)


def test_init_no_saturation():
    rng = np.random.default_rng(2)
    p = ffnn.init(16, 32, rng)
    out = ffnn.forward(p, rng.dirichlet(np.ones(16), size=100))
    assert np.all((out > 0.2) & (out < 0.8))


def test_forward_zero_weights():
    p = ffnn.FfnnParams(16, 8)
    out = ffnn.forward(p, np.full(16, 1 / 16))
    assert out.shape == (2,)
    assert np.allclose(out, [0.5, 0.5])


def test_softmax_shift_invariance():
    rng = np.random.default_rng(3)
    z = rng.normal(size=(5, 2))
    assert np.abs(ffnn.softmax(z) - ffnn.softmax(z + 17.3)).max() < 1e-12


def test_forward_shape_error():
    with pytest.raises(ShapeError):
        ffnn.forward(ffnn.FfnnParams(16, 8), np.zeros(9))


def test_tie_goes_to_label_zero():
    p = ffnn.FfnnParams(4, 3)
    assert load_golden("published_examples").value("tie_decision_label") == 0
    assert ffnn.predict(p, np.full((3, 4), 0.25)).tolist() == [0, 0, 0]


def test_accuracy_all_correct_and_empty():
    p = ffnn.FfnnParams(4, 3)
    x = np.full((5, 4), 0.25)
    assert ffnn.accuracy(p, x, np.zeros(5)) == 1.0
    with pytest.raises(DataError):
        ffnn.accuracy(p, x[:0], np.zeros(0))


def test_random_labels_half_accuracy():
    rng = np.random.default_rng(4)
    p = ffnn.init(16, 32, rng)
    x = rng.dirichlet(np.ones(16), size=1000)
    y = rng.integers(0, 2, 1000)
    assert abs(ffnn.accuracy(p, x, y) - 0.5) < 0.1


def test_crossed_wiring_flips_outputs():
    rng = np.random.default_rng(5)
    p = ffnn.init(8, 6, rng)
    x = rng.dirichlet(np.ones(8), size=50)
    y = rng.integers(0, 2, 50)
    assert np.array_equal(ffnn.predict(p, x, crossed=True), 1 - ffnn.predict(p, x))
    # crossed loss on labels y equals plain loss on flipped labels
    assert abs(ffnn.loss(p, x, y, crossed=True) - ffnn.loss(p, x, 1 - y)) < 1e-12


CFG = ffnn.TrainConfig(hidden_size=16, learning_rate=1e-2, weight_decay=0.0, batch_size=20, epochs=100)


def test_separable_clusters_reach_full_accuracy():
    rng = np.random.default_rng(6)
    x, y = clusters(rng)
    res = ffnn.train(ffnn.init(16, 16, rng), x[:140], y[:140], CFG, x[140:], y[140:], rng)
    assert res.best_accuracy == 1.0
    assert len(res.accuracy_trace) == 100 and 1 <= res.best_epoch <= 100


def test_first_epoch_reduces_loss():
    drops = []
    for seed in range(10):
        rng = np.random.default_rng(seed)
        x, y = clusters(rng)
        p = ffnn.init(16, 16, rng)
        before = ffnn.loss(p, x, y) / len(y)
        res = ffnn.train(p, x, y, CFG.with_(epochs=1), x, y, rng)
        drops.append(before - ffnn.loss(res.params, x, y) / len(y))
    assert np.median(drops) > 0


@pytest.mark.parametrize("label", [0, 1])
@pytest.mark.parametrize("crossed", [False, True])
def test_single_class_training(label, crossed):
    rng = np.random.default_rng(7)
    x = rng.dirichlet(np.ones(16), size=60)
    y = np.full(60, label)
    res = ffnn.train(ffnn.init(16, 8, rng), x[:40], y[:40], CFG.with_(epochs=5), x[40:], y[40:], rng, crossed)
    assert res.best_accuracy == 1.0
    assert np.all(ffnn.predict(res.params, x[40:], crossed) == label)


def test_training_is_deterministic():
    def run():
        rng = np.random.default_rng(8)
        x, y = clusters(rng)
        res = ffnn.train(ffnn.init(16, 16, rng), x[:140], y[:140], CFG.with_(epochs=10), x[140:], y[140:], rng)
        return res.accuracy_trace, res.loss_trace, res.params.flat

    a, b = run(), run()
    assert a[0] == b[0] and a[1] == b[1] and np.array_equal(a[2], b[2])


def test_train_does_not_mutate_input():
    rng = np.random.default_rng(9)
    x, y = clusters(rng)
    p = ffnn.init(16, 16, rng)
    before = p.flat.copy()
    ffnn.train(p, x, y, CFG.with_(epochs=2), x, y, rng)
    assert np.array_equal(p.flat, before)


@pytest.mark.parametrize("decay", ["l2", "l1"])
def test_weight_decay_shrinks_norm(decay):
    p = ffnn.init(4, 4, np.random.default_rng(10))
    opt = ffnn.Adam(p.flat.size, lr=1e-2, weight_decay=0.5, decay=decay)
    theta = p.flat.copy()
    norms = [np.linalg.norm(theta)]
    for _ in range(20):
        opt.step(theta, np.zeros_like(theta))
        norms.append(np.linalg.norm(theta))
    assert np.all(np.diff(norms) < 0)


def test_train_errors():
    p = ffnn.FfnnParams(4, 2)
    x = np.full((3, 4), 0.25)
    with pytest.raises(DataError):
        ffnn.train(p, x[:0], np.zeros(0), CFG, x, np.zeros(3), np.random.default_rng(0))
    with pytest.raises(DataError):
        ffnn.train(p, x, np.zeros(3), CFG, x[:0], np.zeros(0), np.random.default_rng(0))
    with pytest.raises(ValueError):
        ffnn.TrainConfig(0, 1e-3, 0, 10)
    with pytest.raises(ValueError):
        ffnn.TrainConfig(4, 1e-3, 0, 10, decay="l3")


@pytest.mark.parametrize("name", sorted(ffnn.PRESETS))
def test_presets_match_golden(name):
    rec = load_golden(name)
    cfg = ffnn.preset(name)
    assert cfg.input_size == rec.value("input")
    assert cfg.hidden_size == rec.value("hidden")
    assert rec.value("output") == 2
    assert cfg.learning_rate == rec.value("lr")
    assert cfg.weight_decay == rec.value("decay")
    assert cfg.data_size == rec.value("data")
    assert cfg.batch_size == rec.value("batch")
    assert cfg.epochs == rec.value("epochs")
    assert cfg.decay == "l2"


def test_unknown_preset():
    with pytest.raises(KeyError):
        ffnn.preset("table9")


def test_params_json_round_trip():
    p = ffnn.init(5, 3, np.random.default_rng(11))
    back = ffnn.FfnnParams.from_json(p.to_json())
    assert np.array_equal(back.flat, p.flat)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_outputs_are_distributions(seed):
    rng = np.random.default_rng(seed)
    p = ffnn.init(9, 7, rng)
    p.flat[...] *= rng.uniform(0.1, 20)
    out = ffnn.forward(p, rng.dirichlet(np.ones(9), size=10))
    assert np.all((out >= 0) & (out <= 1))
    assert np.abs(out.sum(axis=1) - 1).max() < 1e-12
