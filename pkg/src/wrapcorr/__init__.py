"""wrapcorr: fast robust correlation for high-dimensional data.

Robustness by marginal transformation: each variable is passed through a
bounded odd function (the wrapping transform by default) and ordinary
product-moment machinery runs on the transformed values. The result keeps
the three properties that matter at scale: positive semidefiniteness, the
independence property, and O(nd) transform cost.
"""

from . import distcor, fastddc, moments, psi, rpca, sim, theory, univariate

__all__ = [
    "distcor",
    "fastddc",
    "moments",
    "psi",
    "rpca",
    "sim",
    "theory",
    "univariate",
]
__version__ = "0.1.0"
