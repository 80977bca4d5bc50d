"""scikit-learn style wrappers around the functional equalizer API.

``fit`` takes the beamspace channel (B x U) and ``transform`` takes received
vectors as rows (T x B), so an equalizer drops into code that expects the
usual estimator protocol (``get_params``/``set_params``/``clone``)::

    eq = BeamspaceEqualizer("EOMP", density=0.125, rho=N0).fit(H)
    s_hat = eq.transform(Y)          # T x U soft estimates
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_channel, check_complex_matrix, density_to_beams
from .equalizers import ALGORITHMS, apply_equalizer, build_equalizer
from .exceptions import DimensionError
from .numerics import beamspace_transform, inverse_beamspace_transform
from .simulator import demodulate, modulate

__all__ = ["BeamspaceTransform", "BeamspaceEqualizer", "QAM16Slicer"]


class BeamspaceTransform(TransformerMixin, BaseEstimator):
    """Unitary DFT across the array, applied to each row of a T x B matrix."""

    def fit(self, X, y=None):
        X = check_complex_matrix(X, "X")
        self.n_features_in_ = X.shape[1]
        return self

    def _check(self, X):
        check_is_fitted(self)
        X = check_complex_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise DimensionError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        return X

    def transform(self, X):
        return beamspace_transform(self._check(X), axis=1)

    def inverse_transform(self, X):
        return inverse_beamspace_transform(self._check(X), axis=1)


class BeamspaceEqualizer(TransformerMixin, BaseEstimator):
    """Beamspace LMMSE equalizer, exact or sparse.

    Parameters
    ----------
    algorithm : {"LMMSE", "COMP", "LC", "EOMP", "LE"}
    density : float in (0, 1]
        Fraction of beams kept; ``K = round(density * B)``, at least 1.
        Ignored for ``"LMMSE"``.
    rho : float
        Regularizer ``N0 / E_s``.
    n_beams : int, optional
        Overrides ``density`` with an explicit K.
    update : {"sherman-morrison", "cholesky"}
        Gram-inverse update used by COMP and EOMP.

    Attributes
    ----------
    equalizer_ : SparseEqualizer
    support_ : ndarray or None
    n_beams_ : int
        The K actually used.
    """

    def __init__(self, algorithm="LMMSE", density=1.0, rho=0.1, n_beams=None,
                 update="sherman-morrison"):
        self.algorithm = algorithm
        self.density = density
        self.rho = rho
        self.n_beams = n_beams
        self.update = update

    def fit(self, H, y=None):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        H = check_channel(H)
        B = H.shape[0]
        K = self.n_beams if self.n_beams is not None else density_to_beams(self.density, B)
        kwargs = {"update": self.update} if self.algorithm in ("COMP", "EOMP") else {}
        self.equalizer_ = build_equalizer(self.algorithm, H, self.rho, K, **kwargs)
        self.n_beams_ = self.equalizer_.K
        self.support_ = self.equalizer_.support
        self.n_features_in_ = B
        return self

    def transform(self, Y):
        """Symbol estimates for received beamspace vectors given as rows."""
        check_is_fitted(self)
        Y = np.atleast_2d(check_complex_matrix(np.atleast_2d(Y), "Y"))
        if Y.shape[1] != self.n_features_in_:
            raise DimensionError(f"expected {self.n_features_in_} beams, got {Y.shape[1]}")
        return apply_equalizer(self.equalizer_, Y.T).T

    def to_dense(self):
        check_is_fitted(self)
        return self.equalizer_.to_dense()


class QAM16Slicer(TransformerMixin, BaseEstimator):
    """Hard 16-QAM decisions; ``transform`` maps T x U estimates to T x 4U bits."""

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        X = np.atleast_2d(np.asarray(X))
        return demodulate(X.T).T

    def inverse_transform(self, bits):
        bits = np.atleast_2d(np.asarray(bits))
        return modulate(bits.T).T
