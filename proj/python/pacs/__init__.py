"""Abductive query answering over premise sets.

Thin wrapper over the compiled core. The extension lives inside the
installed package; during in-tree development it is found on sys.path
next to the build directory instead.
"""

try:
    from ._pacs import (
        backbone_count,
        eval_dataset,
        is_satisfiable,
        model_count,
        render,
        score,
        simulate,
        truth_value,
    )
except ImportError:
    from _pacs import (
        backbone_count,
        eval_dataset,
        is_satisfiable,
        model_count,
        render,
        score,
        simulate,
        truth_value,
    )

__all__ = [
    "backbone_count",
    "eval_dataset",
    "is_satisfiable",
    "model_count",
    "render",
    "score",
    "simulate",
    "truth_value",
]
