import json

import numpy as np
import pytest

import gefet


def test_dataset_shapes_and_determinism():
    xtr, ytr, xte, yte = gefet.generate_dataset("f2", 3, 20, 10, 0)
    assert xtr.shape == (20, 3)
    assert ytr.shape == (20,)
    assert xte.shape == (10, 3)
    assert yte.shape == (10,)
    xtr2, ytr2, _, _ = gefet.generate_dataset("f2", 3, 20, 10, 0)
    assert np.array_equal(xtr, xtr2)
    assert np.array_equal(ytr, ytr2)
    assert np.array_equal(ytr, gefet.eval_test_function("f2", xtr))
    assert "f1" in gefet.test_function_names()


def test_train_predict_roundtrip(tmp_path):
    xtr, ytr, xte, _ = gefet.generate_dataset("f2", 3, 30, 10, 1)
    cfg = gefet.config(
        method="gft",
        n_features=6,
        steps_gft=3,
        generator_hidden=16,
        generator_depth=1,
        seed=4,
    )
    result = gefet.train(cfg, xtr, ytr)
    pred = result.model.predict(xte)
    assert pred.shape == (10,)
    assert np.isfinite(pred).all()
    assert result.trace.shape == (4, 3)
    assert result.has_generator

    path = str(tmp_path / "model.json")
    gefet.save_model(path, result.model)
    back = gefet.load_model(path)
    assert back.activation == "fourier"
    assert np.array_equal(back.predict(xte), pred)

    again = gefet.train(cfg, xtr, ytr)
    assert np.array_equal(again.model.w, result.model.w)
    assert np.array_equal(again.model.beta, result.model.beta)


def test_config_validation():
    with pytest.raises(ValueError):
        gefet.train(gefet.config(method="nope"), np.zeros((3, 2)), np.zeros(3))
    with pytest.raises(AttributeError):
        gefet.config(stepz=3)
    with pytest.raises(ValueError):
        gefet.config(activation="tanh")


def test_lambda_selection_tie():
    xtr, ytr, _, _ = gefet.generate_dataset("f2", 3, 20, 5, 0)
    cfg = gefet.config(method="f-opt", n_features=4, steps_refine=0, tv_samples=5)
    assert gefet.select_lambda(cfg, xtr, ytr) == 0.0


def test_experiment_json():
    spec = {
        "function": "f2",
        "d": 3,
        "m_train": 20,
        "m_test": 10,
        "methods": ["f-opt", "krr"],
        "n": 4,
        "seeds": [0],
        "steps_refine": 0,
    }
    doc = json.loads(gefet.run_experiment_json(json.dumps(spec), 1))
    assert len(doc["cells"]) == 2
    for cell in doc["cells"]:
        assert cell["errors"] == []
        assert len(cell["per_seed_mse"]) == 1
        assert np.isfinite(cell["mean_mse"])
    with pytest.raises(ValueError):
        gefet.run_experiment_json('{"functon": "f1"}')


def test_kernel_ridge_constant():
    x = np.random.RandomState(0).rand(20, 2)
    y = np.full(20, 2.5)
    pred = gefet.kernel_ridge(x, y, x[:5], 1e-10)
    assert np.allclose(pred, 2.5, atol=1e-5)
