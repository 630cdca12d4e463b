from ._core import (
    InvalidConfig,
    ParseError,
    TrainConfig,
    TrainedModel,
    TrainResult,
    eval_test_function,
    generate_dataset,
    kernel_ridge,
    load_model,
    run_experiment_json,
    save_model,
    select_lambda,
    test_function_names,
    train,
)


def config(**kwargs):
    """TrainConfig from keyword arguments; unknown names raise."""
    cfg = TrainConfig()
    for key, value in kwargs.items():
        if not hasattr(cfg, key):
            raise AttributeError(f"TrainConfig has no field '{key}'")
        setattr(cfg, key, value)
    return cfg


__all__ = [
    "InvalidConfig",
    "ParseError",
    "TrainConfig",
    "TrainedModel",
    "TrainResult",
    "config",
    "eval_test_function",
    "generate_dataset",
    "kernel_ridge",
    "load_model",
    "run_experiment_json",
    "save_model",
    "select_lambda",
    "test_function_names",
    "train",
]
