"""Python bindings for the navth navigation benchmark."""

from ._core import (
    Env,
    NavthError,
    Scene,
    Server,
    evaluate_baseline,
    generate_scene,
    layouts,
    shortest_path_length,
    spl,
    target_categories,
)

__all__ = [
    "Env",
    "NavthError",
    "Scene",
    "Server",
    "evaluate_baseline",
    "generate_scene",
    "layouts",
    "shortest_path_length",
    "spl",
    "target_categories",
]
