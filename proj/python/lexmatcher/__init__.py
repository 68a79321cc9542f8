"""Dictionary-pivoted parallel-corpus curation toolkit."""

try:
    from ._lexmatcher import *  # noqa: F401,F403  (installed layout)
    from ._lexmatcher import __doc__ as _core_doc
except ImportError:  # pragma: no cover - build-tree layout
    from _lexmatcher import *  # noqa: F401,F403
    from _lexmatcher import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
