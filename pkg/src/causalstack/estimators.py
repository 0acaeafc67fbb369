"""Estimator-style wrappers so the pipeline composes with the usual
fit/transform/predict ecosystem.

All estimators consume pandas DataFrames whose columns are variable names;
the underlying functional modules do the actual work.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .discretize import discretize_dataset, discretize_sample, fit_scheme
from .inference import success_probability
from .parameters import fit_cpts
from .prevention import prevent
from .structure import pc_stable
from .variables import Dataset, GoalSpec, Provenance, VariableSet


def _as_dataset(X: pd.DataFrame, variables: VariableSet) -> Dataset:
    missing = [n for n in variables.names if n not in X.columns]
    if missing:
        raise ValueError(f"input is missing columns {missing}")
    frame = X[list(variables.names)].reset_index(drop=True)
    return Dataset(variables, frame, Provenance(generator="frame"))


class QuantileDiscretizer(BaseEstimator, TransformerMixin):
    """Equal-frequency interval discretization of continuous variables.

    fit learns the interval scheme from data, transform maps values to
    interval indices (booleans to 0/1), inverse_transform maps indices back
    to interval midpoints.
    """

    def __init__(self, variables: VariableSet, bins: Mapping[str, int] | int = 5):
        self.variables = variables
        self.bins = bins

    def fit(self, X: pd.DataFrame, y=None):
        self.scheme_ = fit_scheme(_as_dataset(X, self.variables), self.bins)
        return self

    def transform(self, X: pd.DataFrame) -> pd.DataFrame:
        if not hasattr(self, "scheme_"):
            raise NotFittedError("fit before transform")
        data = discretize_dataset(_as_dataset(X, self.variables), self.scheme_)
        return pd.DataFrame({n: data.column(n) for n in self.variables.names})

    def inverse_transform(self, X: pd.DataFrame) -> pd.DataFrame:
        if not hasattr(self, "scheme_"):
            raise NotFittedError("fit before inverse_transform")
        out = {}
        for spec in self.variables:
            col = X[spec.name].to_numpy()
            if spec.is_continuous:
                iv = self.scheme_.intervals[spec.name]
                out[spec.name] = np.array([iv.midpoint(int(i)) for i in col])
            else:
                out[spec.name] = col.astype(bool)
        return pd.DataFrame(out)


class CausalOutcomeModel(BaseEstimator):
    """Learns the full causal model from raw execution data and predicts
    goal success for new cause parametrizations.

    predict_proba returns the success probability per row; predict applies
    the goal's threshold.
    """

    def __init__(self, variables: VariableSet, goal: GoalSpec,
                 bins: Mapping[str, int] | int = 5, alpha: float = 0.05,
                 max_cond_size: int = 3, iss: float = 1.0,
                 independent_causes: bool = True):
        self.variables = variables
        self.goal = goal
        self.bins = bins
        self.alpha = alpha
        self.max_cond_size = max_cond_size
        self.iss = iss
        self.independent_causes = independent_causes

    def fit(self, X: pd.DataFrame, y=None):
        data = _as_dataset(X, self.variables)
        self.scheme_ = fit_scheme(data, self.bins)
        discrete = discretize_dataset(data, self.scheme_)
        self.graph_ = pc_stable(
            discrete, alpha=self.alpha, max_cond_size=self.max_cond_size,
            independent_causes=self.independent_causes,
        )
        self.model_ = fit_cpts(discrete, self.graph_, iss=self.iss)
        self._cache: dict = {}
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("fit before predicting")

    def _proba_one(self, assignment: Mapping[str, int]) -> float:
        key = tuple(sorted(assignment.items()))
        if key not in self._cache:
            self._cache[key] = success_probability(self.model_, assignment, self.goal)
        return self._cache[key]

    def predict_proba(self, X: pd.DataFrame) -> np.ndarray:
        self._check_fitted()
        causes = self.variables.cause_names
        out = np.empty(len(X))
        for i, (_, row) in enumerate(X.iterrows()):
            sample = {c: float(row[c]) for c in causes}
            out[i] = self._proba_one(discretize_sample(sample, self.scheme_))
        return out

    def predict(self, X: pd.DataFrame) -> np.ndarray:
        return self.predict_proba(X) >= self.goal.epsilon

    def prevent_one(self, sample: Mapping[str, float]):
        self._check_fitted()
        return prevent(sample, self.model_, self.goal, predictor=self._proba_one)


class FailureCorrection(BaseEstimator, TransformerMixin):
    """Row-wise failure prevention as a transform: cause parametrizations
    predicted to fail are replaced by the closest corrected ones, everything
    else passes through unchanged."""

    def __init__(self, estimator: CausalOutcomeModel):
        self.estimator = estimator

    def fit(self, X: pd.DataFrame, y=None):
        if not hasattr(self.estimator, "model_"):
            self.estimator.fit(X)
        return self

    def transform(self, X: pd.DataFrame) -> pd.DataFrame:
        causes = self.estimator.variables.cause_names
        rows = []
        for _, row in X.iterrows():
            sample = {c: float(row[c]) for c in causes}
            outcome = self.estimator.prevent_one(sample)
            rows.append([outcome.values[c] for c in causes])
        return pd.DataFrame(rows, columns=list(causes))
