"""scikit-learn style front end.

The integrators take no training data: ``fit`` runs the simulation and
``predict`` evaluates the resulting trajectory at arbitrary times (days).
All constructor arguments are exposed through ``get_params`` / ``set_params``,
so the estimators can be cloned and swept with the usual tooling.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .growth import GrowthParams
from .micro import MicroConfig, SurrogateChannelFlow
from .parareal import GrowthTable, PararealConfig, interpolate_growth, run
from .twoscale import serial_reference


def _column(X, name):
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"{name} must have a single column, got shape {X.shape}")
        X = X[:, 0]
    return X


class TwoScaleIntegrator(BaseEstimator):
    """Serial two-scale integration of the foam cell concentration."""

    def __init__(self, T_end=300.0, dt=0.3, c0=0.0, alpha=3e-8, sigma0=400.0,
                 delta_tau=0.02, relaxation_rate=2.0, v_mean=1.0, sigma_scale=1.0,
                 eps_p=1e-3, max_cycles=20, forcing="pulsatile"):
        self.T_end = T_end
        self.dt = dt
        self.c0 = c0
        self.alpha = alpha
        self.sigma0 = sigma0
        self.delta_tau = delta_tau
        self.relaxation_rate = relaxation_rate
        self.v_mean = v_mean
        self.sigma_scale = sigma_scale
        self.eps_p = eps_p
        self.max_cycles = max_cycles
        self.forcing = forcing

    def _micro(self):
        cfg = MicroConfig(delta_tau=self.delta_tau, relaxation_rate=self.relaxation_rate,
                          v_mean=self.v_mean, sigma_scale=self.sigma_scale, eps_p=self.eps_p,
                          max_cycles=self.max_cycles, forcing=self.forcing)
        return SurrogateChannelFlow(cfg, GrowthParams(alpha=self.alpha, sigma0=self.sigma0))

    def fit(self, X=None, y=None):
        seg = serial_reference(self._micro(), self.T_end, self.dt, self.c0)
        self.trajectory_ = seg
        self.times_ = np.asarray(seg.times)
        self.c_values_ = np.asarray(seg.c_values)
        self.micro_problems_ = seg.micro_problems
        return self

    def predict(self, X):
        """Concentration at times ``X`` (days), linear between grid points."""
        check_is_fitted(self, "c_values_")
        t = _column(X, "X")
        if np.any(t < self.times_[0]) or np.any(t > self.times_[-1]):
            raise ValueError("prediction times must lie inside the integrated interval")
        return np.interp(t, self.times_, self.c_values_)


class PararealIntegrator(TwoScaleIntegrator):
    """Parareal integration; exposes the cost ledger after ``fit``."""

    def __init__(self, P=10, variant="interpolation", eps_par=1e-3, relative_stop=False,
                 max_iterations=20, fixed_iterations=None, threads=1, T_end=300.0, dt=0.3,
                 c0=0.0, alpha=3e-8, sigma0=400.0, delta_tau=0.02, relaxation_rate=2.0,
                 v_mean=1.0, sigma_scale=1.0, eps_p=1e-3, max_cycles=20, forcing="pulsatile"):
        super().__init__(T_end=T_end, dt=dt, c0=c0, alpha=alpha, sigma0=sigma0,
                         delta_tau=delta_tau, relaxation_rate=relaxation_rate, v_mean=v_mean,
                         sigma_scale=sigma_scale, eps_p=eps_p, max_cycles=max_cycles,
                         forcing=forcing)
        self.P = P
        self.variant = variant
        self.eps_par = eps_par
        self.relative_stop = relative_stop
        self.max_iterations = max_iterations
        self.fixed_iterations = fixed_iterations
        self.threads = threads

    def fit(self, X=None, y=None, reference=None):
        cfg = PararealConfig(P=self.P, T_end=self.T_end, dt_fine=self.dt, eps_par=self.eps_par,
                             variant=self.variant, max_iterations=self.max_iterations,
                             relative_stop=self.relative_stop,
                             fixed_iterations=self.fixed_iterations, c0=self.c0,
                             threads=self.threads)
        result = run(cfg, self._micro(), reference=reference)
        times, cs = result.trajectory()
        self.result_ = result
        self.ledger_ = result.ledger
        self.k_par_ = result.k_par
        self.converged_ = result.converged
        self.interfaces_ = np.asarray(result.iterate.c_at_interfaces)
        self.times_ = np.asarray(times)
        self.c_values_ = np.asarray(cs)
        return self


class GrowthTableRegressor(RegressorMixin, BaseEstimator):
    """Piecewise-linear map from concentration to averaged growth rate.

    Fitting inserts the samples into an ordered :class:`GrowthTable`; repeated
    keys keep the sample seen last.
    """

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_2d=False, dtype=np.float64, y_numeric=True)
        X = _column(X, "X")
        table = GrowthTable(zip(X.tolist(), y.tolist()))
        if len(table) < 2:
            raise ValueError("need at least two distinct concentrations")
        self.table_ = table
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "table_")
        c = _column(X, "X")
        return np.array([interpolate_growth(self.table_, x) for x in c.tolist()])
