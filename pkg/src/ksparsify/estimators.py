"""Estimator-style wrappers around the peak engines and the sampler.

``fit`` takes a :class:`~ksparsify.model.DecomposableInstance` in place of a
feature matrix; fitted state lives in trailing-underscore attributes and
hyper-parameters round-trip through ``get_params`` / ``set_params``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_assignments, check_instance, check_open_unit, check_seed
from .peaks_curvature import approx_peaks
from .peaks_exact import PeakEstimates, exact_peaks, peaks_bounded_arity
from .sampler import run_trials, sample, verify_sparsifier

METHODS = ("exact", "curvature", "bounded-arity")


class PeakEstimator(BaseEstimator):
    """Compute peak contributions with one of the three engines.

    Parameters
    ----------
    method : {"exact", "curvature", "bounded-arity"}
    epsilon : float
        FPTAS error for the curvature engine.
    minimizer : str
        Minimiser for the bounded-arity engine (``"auto"``, ``"brute-force"``
        or ``"min-cut"``).
    force : bool
        Override enumeration size guards.
    """

    def __init__(self, method="exact", epsilon=0.5, minimizer="auto", force=False):
        self.method = method
        self.epsilon = epsilon
        self.minimizer = minimizer
        self.force = force

    def fit(self, X, y=None):
        inst = check_instance(X)
        if self.method == "exact":
            peaks = exact_peaks(inst, force=self.force)
        elif self.method == "curvature":
            peaks = approx_peaks(inst, check_open_unit("epsilon", self.epsilon))
        elif self.method == "bounded-arity":
            peaks = peaks_bounded_arity(inst, minimizer=self.minimizer, force=self.force)
        else:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        self.peaks_ = peaks
        self.values_ = peaks.values
        self.guarantee_factor_ = peaks.guarantee_factor
        self.n_components_ = len(inst)
        return self


class ImportanceSparsifier(TransformerMixin, BaseEstimator):
    """Sparsify ``F = sum f_i`` by importance sampling its components.

    After ``fit``, ``transform(A)`` evaluates the reweighted function
    ``F'(A) = sum w_i f_i(A)`` on an array of label vectors.

    Parameters
    ----------
    epsilon, delta : float
        Target relative error and failure probability, both in ``(0, 1)``.
    peaks : str, PeakEstimates or array-like
        Engine name passed to :class:`PeakEstimator`, or precomputed upper
        bounds on the peak contributions.
    fptas_epsilon : float
        FPTAS error when ``peaks="curvature"``.
    n_trials : int
        Independent samples drawn; the smallest one that passes the exhaustive
        check is kept.
    domain_size : float or None
        Domain size fed to the oversampling factor; ``(k+1)**n`` by default.
    random_state : int, list of int or None
    """

    def __init__(self, epsilon=0.5, delta=0.1, peaks="exact", fptas_epsilon=0.5, n_trials=1,
                 domain_size=None, random_state=0):
        self.epsilon = epsilon
        self.delta = delta
        self.peaks = peaks
        self.fptas_epsilon = fptas_epsilon
        self.n_trials = n_trials
        self.domain_size = domain_size
        self.random_state = random_state

    def _peaks(self, inst):
        if isinstance(self.peaks, str):
            return PeakEstimator(self.peaks, epsilon=self.fptas_epsilon).fit(inst).peaks_
        if isinstance(self.peaks, PeakEstimates):
            return self.peaks
        return PeakEstimates(np.asarray(self.peaks, dtype=float), "external")

    def fit(self, X, y=None):
        inst = check_instance(X)
        eps = check_open_unit("epsilon", self.epsilon)
        delta = check_open_unit("delta", self.delta)
        seed = check_seed(self.random_state)
        peaks = self._peaks(inst)
        if self.n_trials > 1:
            summary = run_trials(inst, peaks, eps, delta, int(self.n_trials), seed=seed,
                                 domain_size=self.domain_size)
            result = summary.best
            self.trials_ = summary
        else:
            result = sample(inst, peaks, eps, delta, seed=seed, domain_size=self.domain_size)
        self.instance_ = inst
        self.peaks_ = peaks
        self.sparsifier_ = result
        self.weights_ = result.w
        self.kappa_ = result.kappa
        self.kappa_i_ = result.kappa_i
        self.nnz_ = result.nnz
        self.support_ = np.flatnonzero(result.w)
        return self

    def transform(self, X):
        """``F'(A)`` for each row of ``X``."""
        check_is_fitted(self, "weights_")
        A = check_assignments(X, self.instance_.ground)
        comps = [self.instance_[i] for i in self.support_]
        w = self.weights_[self.support_]
        return np.array([sum(wi * f(row) for wi, f in zip(w, comps)) for row in A.tolist()])

    def check(self):
        """Exhaustive sparsifier check of the fitted weights."""
        check_is_fitted(self, "weights_")
        return verify_sparsifier(self.instance_, self.weights_, float(self.epsilon))

    def score(self, X=None, y=None):
        """Negative worst relative deviation ``-max |F'/F - 1|`` over the whole domain."""
        return -abs(self.check().worst_ratio - 1.0)
