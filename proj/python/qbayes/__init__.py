"""Bayes-risk lower bounds for multiparameter quantum estimation on discretized priors."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import QbayesError, _bounds_report_json

__all__ = [name for name in dir() if not name.startswith("_")]


def bounds_report(model, selector="all", restarts=4, seed=1):
    """Bound report as a dict, same layout as the `qbayes bounds` JSON."""
    return _json.loads(_bounds_report_json(model, selector, restarts, seed))
