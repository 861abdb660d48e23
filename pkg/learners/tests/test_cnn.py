import numpy as np
import pytest
import torch

from taulearn import CnnModel, TauCnn, load_dataset, train_cnn
from taulearn.cnn import _masked


def test_net_shapes():
    net = TauCnn(3, 300)
    out = net(torch.zeros(7, 4, 300))
    assert out.shape == (7,)
    net5 = TauCnn(5, 300)
    assert net5(torch.zeros(2, 6, 300)).shape == (2,)


def test_untrained_net_predicts_zero():
    net = TauCnn(3, 300)
    with torch.no_grad():
        out = net(torch.randn(4, 4, 300))
    assert torch.allclose(out, torch.zeros(4))  # zero-init output layer


def test_masking_zeroes_padding():
    x = torch.ones(2, 3, 300)
    xt, mask = _masked(x, np.array([10, 300]), 300)
    assert xt[0, :, 10:].abs().sum() == 0
    assert xt[0, :, :10].sum() == 30
    assert mask[0, 0, :10].sum() == 10
    assert xt[1].sum() == 900


def test_constant_target_training(constant_tau_dataset):
    ds = load_dataset(constant_tau_dataset)
    model = train_cnn(ds, "sir", "uniform", epochs=3, patience=5, seed=0)
    pred = model.predict(ds, ds.runs("test"), 6.0)
    # standardized head starts at the mean and the target is constant
    assert np.allclose(pred, 0.45, atol=5e-3)


def test_per_t_model_fixed_horizon(synthetic_dataset):
    ds = load_dataset(synthetic_dataset)
    model = train_cnn(ds, "sir", "per-t", T=2.0, epochs=2, patience=5, seed=0)
    assert model.T == 2.0
    model.predict(ds, ds.runs("test"), 2.0)
    with pytest.raises(ValueError, match="per-t"):
        model.predict(ds, ds.runs("test"), 4.0)


def test_checkpoint_roundtrip(tmp_path, synthetic_dataset):
    ds = load_dataset(synthetic_dataset)
    model = train_cnn(ds, "all", "beta", epochs=2, patience=5, seed=1)
    path = tmp_path / "cnn.pt"
    model.save(path)
    back = CnnModel.load(path)
    test = ds.runs("test")
    a = model.predict(ds, test, 4.0)
    b = back.predict(ds, test, 4.0)
    assert np.allclose(a, b)
    assert back.columns == model.columns
    assert back.strategy == "beta"


def test_learns_synthetic_signal(tmp_path):
    """A modest run on clean synthetic curves must clearly beat the mean."""
    from conftest import write_synthetic_dataset

    path = write_synthetic_dataset(
        tmp_path / "ds", taus=(0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6), reps=10)
    ds = load_dataset(path)
    model = train_cnn(ds, "sir", "per-t", T=6.0, epochs=60, patience=60,
                      segments_per_run=6, seed=0)
    test = ds.runs("test")
    truth = np.array([float(m["tau"]) for m in test])
    pred = model.predict(ds, test, 6.0)
    rmse = np.sqrt(np.mean((pred - truth) ** 2))
    baseline = np.sqrt(np.mean((truth.mean() - truth) ** 2))
    assert rmse < 0.5 * baseline
