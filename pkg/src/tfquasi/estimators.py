"""scikit-learn compatible transformers over batches of 1-D signals.

Each row of ``X`` is one signal on Z_N, so ``X`` has shape ``(n_samples, N)``
and may be complex. The functional API remains the primary interface; these
classes wrap it for use in pipelines.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .gabor import GaborLattice, GaborSystem, gaussian_window
from .spaces import Exponent, ModSpec, modnorm
from .timefreq import istft, stft
from .weights import standard_weight

__all__ = ["GaborFrame", "STFTTransformer", "ModulationNorm"]


def _check_signals(X, N: int | None = None) -> np.ndarray:
    # check_array rejects complex input, so validate by hand
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of signals, got shape {X.shape}")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise ValueError("empty input")
    X = X.astype(complex)
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains NaN or infinity")
    if N is not None and X.shape[1] != N:
        raise ValueError(f"signals have length {X.shape[1]}, estimator was fitted with N={N}")
    return X


def _window(window, N):
    if window is None:
        return gaussian_window(N)
    window = np.asarray(window, dtype=complex)
    if window.shape != (N,):
        raise ValueError(f"window of shape {window.shape} does not match N={N}")
    return window


class GaborFrame(TransformerMixin, BaseEstimator):
    """Gabor coefficients ``<f, pi(ja, kb) phi>`` with dual-window reconstruction.

    ``fit`` only reads the signal length; it builds the system, checks the frame
    property (raising ``NotAFrameError`` otherwise) and stores the canonical dual.
    """

    def __init__(self, a: int = 2, b: int = 2, window=None):
        self.a = a
        self.b = b
        self.window = window

    def fit(self, X, y=None):
        X = _check_signals(X)
        N = X.shape[1]
        self.system_ = GaborSystem(_window(self.window, N), GaborLattice(self.a, self.b, N, 1))
        self.dual_window_ = self.system_.dual
        self.frame_bounds_ = self.system_.frame_bounds
        self.n_features_in_ = N
        return self

    def transform(self, X):
        check_is_fitted(self, "system_")
        X = _check_signals(X, self.n_features_in_)
        return X @ self.system_.atoms.conj().T

    def inverse_transform(self, C):
        check_is_fitted(self, "system_")
        C = np.atleast_2d(np.asarray(C, dtype=complex))
        if C.shape[1] != self.system_.lattice.size:
            raise ValueError(f"expected {self.system_.lattice.size} coefficients per row, got {C.shape[1]}")
        return C @ self.system_.dual_atoms


class STFTTransformer(TransformerMixin, BaseEstimator):
    """Flattened STFT ``V(x, xi)`` of each signal, row-major in ``(x, xi)``."""

    def __init__(self, window=None, magnitude: bool = False):
        self.window = window
        self.magnitude = magnitude

    def fit(self, X, y=None):
        X = _check_signals(X)
        self.n_features_in_ = X.shape[1]
        self.window_ = _window(self.window, self.n_features_in_)
        if not np.any(self.window_):
            raise ValueError("window must be nonzero")
        return self

    def transform(self, X):
        check_is_fitted(self, "window_")
        X = _check_signals(X, self.n_features_in_)
        out = np.stack([stft(f, self.window_).ravel() for f in X])
        return np.abs(out) if self.magnitude else out

    def inverse_transform(self, V):
        check_is_fitted(self, "window_")
        if self.magnitude:
            raise ValueError("magnitudes cannot be inverted")
        N = self.n_features_in_
        V = np.atleast_2d(np.asarray(V, dtype=complex))
        return np.stack([istft(v.reshape(N, N), self.window_) for v in V])


class ModulationNorm(TransformerMixin, BaseEstimator):
    """One column: the M^{p,q} quasi-norm of each signal under a standard weight."""

    def __init__(self, p="1", q=None, weight: str = "constant", weight_param: float = 0.0, window=None):
        self.p = p
        self.q = q
        self.weight = weight
        self.weight_param = weight_param
        self.window = window

    def fit(self, X, y=None):
        X = _check_signals(X)
        N = self.n_features_in_ = X.shape[1]
        p = Exponent(self.p)
        q = Exponent(self.q) if self.q is not None else p
        w = standard_weight(self.weight, N, 2, float(self.weight_param))
        self.spec_ = ModSpec(p, q, w, _window(self.window, N))
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        X = _check_signals(X, self.n_features_in_)
        return np.array([[modnorm(f, self.spec_)] for f in X])
