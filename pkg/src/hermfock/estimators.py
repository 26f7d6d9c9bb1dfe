"""scikit-learn style wrappers around the functional API.

The estimators hold physical parameters as constructor arguments, so they
work with ``get_params``/``set_params``, ``clone`` and pipelines. ``fit``
does the computation and stores results in trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .state import StateParams, photon_distribution, rho_matrix
from .unitary import BosonicParams, unitary_matrix

STATE_FEATURES = ("alpha_re", "alpha_im", "r", "theta", "nbar")


class GaussianUnitaryMatrix(BaseEstimator):
    """Fock block of ``S(z) D(alpha) R(phi)``.

    Parameters
    ----------
    alpha : complex
    phi, r, theta : float
    dim : int
        Size of the square block.

    Attributes
    ----------
    matrix_ : ndarray of shape (dim, dim)
    params_ : BosonicParams
    """

    def __init__(self, alpha=0j, phi=0.0, r=0.0, theta=0.0, dim=20):
        self.alpha = alpha
        self.phi = phi
        self.r = r
        self.theta = theta
        self.dim = dim

    def fit(self, X=None, y=None):
        self.params_ = BosonicParams(self.alpha, self.phi, self.r, self.theta)
        self.matrix_ = unitary_matrix(self.params_, self.dim)
        return self


class FockDensityMatrix(BaseEstimator):
    """Density matrix of a noisy Gaussian state on a ``dim x dim`` block.

    Parameters
    ----------
    alpha : complex
        Displacement.
    r, theta : float
        Squeeze modulus and phase.
    nbar : float
        Mean photon number of the thermal seed.
    dim : int
    method : {"auto", "factored", "series"}
        Passed to :func:`hermfock.rho_matrix`.

    Attributes
    ----------
    rho_ : ndarray of shape (dim, dim)
    trace_ : float
        Partial trace of the block.
    min_eigenvalue_ : float
    purity_ : float
        ``trace(rho_ @ rho_)`` on the block.
    params_ : StateParams
    """

    def __init__(self, alpha=0j, r=0.0, theta=0.0, nbar=0.0, dim=20, method="auto"):
        self.alpha = alpha
        self.r = r
        self.theta = theta
        self.nbar = nbar
        self.dim = dim
        self.method = method

    def fit(self, X=None, y=None):
        self.params_ = StateParams(self.alpha, self.r, self.theta, self.nbar)
        rho = rho_matrix(self.params_, self.dim, method=self.method)
        self.rho_ = rho
        self.trace_ = float(np.trace(rho).real)
        self.min_eigenvalue_ = float(np.linalg.eigvalsh(rho).min())
        self.purity_ = float(np.einsum("ij,ji->", rho, rho).real)
        return self

    def photon_probabilities(self) -> np.ndarray:
        check_is_fitted(self, "rho_")
        return np.real(np.diagonal(self.rho_)).copy()


class PhotonNumberTransformer(TransformerMixin, BaseEstimator):
    """Map state parameters to photon-number distributions.

    Each input row is ``[Re alpha, Im alpha, r, theta, nbar]``; the output
    row holds ``rho_{m,m}`` for ``m = 0..m_max``.

    Parameters
    ----------
    m_max : int
    method : {"auto", "factored", "series"}
    """

    def __init__(self, m_max=20, method="auto"):
        self.m_max = m_max
        self.method = method

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64)
        self._check_width(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        out = np.empty((X.shape[0], self.m_max + 1))
        for i, (are, aim, r, theta, nbar) in enumerate(X):
            params = StateParams(complex(are, aim), r, theta, nbar)
            out[i] = photon_distribution(params, self.m_max, method=self.method).probabilities
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_features_in_")
        return np.array([f"p{m}" for m in range(self.m_max + 1)], dtype=object)

    @staticmethod
    def _check_width(X):
        if X.shape[1] != len(STATE_FEATURES):
            raise ValueError(f"expected {len(STATE_FEATURES)} columns {STATE_FEATURES}, got {X.shape[1]}")
