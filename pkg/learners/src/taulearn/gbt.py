"""Gradient-boosted tree regression of tau, one model per horizon.

Fixed tuning: learning rate (eta) 0.2, 90 boosting rounds, row subsample
0.9, per-tree feature subsample 0.8, min_child_weight 0.7, depth 6.
sklearn's GradientBoostingRegressor is the tree booster here (xgboost is
not available on this environment's package index); min_child_weight is
vacuous under squared loss, where every sample has unit hessian.
"""

from __future__ import annotations

import pickle
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.ensemble import GradientBoostingRegressor

from .data import Dataset, feature_columns, gbt_matrix


@dataclass
class GbtHyperparams:
    eta: float = 0.2
    subsample: float = 0.9
    nrounds: int = 90
    colsample_bytree: float = 0.8
    min_child_weight: float = 0.7
    max_depth: int = 6


@dataclass
class GbtModel:
    """A fitted booster plus everything needed to rebuild its inputs."""

    booster: GradientBoostingRegressor
    subset: str
    columns: tuple[str, ...]
    T: float
    n_features: int

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            pickle.dump(self, fh)

    @staticmethod
    def load(path) -> "GbtModel":
        with open(path, "rb") as fh:
            model = pickle.load(fh)
        if not isinstance(model, GbtModel):
            raise ValueError(f"{path} is not a GbtModel checkpoint")
        return model

    def predict(self, dataset: Dataset, runs: list[dict],
                T: float | None = None) -> np.ndarray:
        if T is not None and T != self.T:
            raise ValueError(f"model was trained at T={self.T}, asked for T={T}")
        X, _ = gbt_matrix(dataset, runs, self.columns, self.T)
        if X.shape[1] != self.n_features:
            raise ValueError(
                f"feature width {X.shape[1]} != trained width {self.n_features}")
        return self.booster.predict(X)


def train_gbt(dataset: Dataset, subset: str, T: float,
              hp: GbtHyperparams | None = None, seed: int = 0) -> GbtModel:
    """Fit one booster on the train split at horizon T."""
    hp = hp or GbtHyperparams()
    columns = feature_columns(dataset, subset)
    train = dataset.runs("train")
    if not train:
        raise ValueError("training split is empty")
    X, y = gbt_matrix(dataset, train, columns, T)
    booster = GradientBoostingRegressor(
        learning_rate=hp.eta,
        n_estimators=hp.nrounds,
        subsample=hp.subsample,
        max_features=hp.colsample_bytree,
        max_depth=hp.max_depth,
        random_state=seed,
    )
    booster.fit(X, y)
    return GbtModel(booster=booster, subset=subset, columns=columns, T=T,
                    n_features=X.shape[1])
