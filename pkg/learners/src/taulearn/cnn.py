"""1-D convolutional regression of tau from variable-length initial segments.

Architecture: seven Conv1d layers with kernel size 4 and channel sequence
N_input, 16, 64, 256, 512, 1024, 128, 1, followed by two fully connected
layers (widths 64 and 1); LeakyReLU(0.2) activations; Adam at learning
rate 2e-5 on an MSE loss.  The first four convolutions use stride 2 so the
512->1024 layer runs at short length and desk-scale training stays
CPU-viable; kernel size and channel counts are unchanged.

Variable lengths are handled with one fixed-size input: series are
zero-padded to the full grid and a 0/1 validity mask is appended as an
extra input channel.  Targets are standardized with training-set statistics
(predictions are mapped back), and counts are scaled by the population
size, so the pinned small learning rate converges at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .data import (Dataset, Normalizer, channel_stack, feature_columns,
                   horizon_index, sample_length_indices)

CHANNELS = (16, 64, 256, 512, 1024, 128, 1)
KERNEL = 4
STRIDES = (2, 2, 2, 2, 1, 1, 1)
FC_HIDDEN = 64
LEARNING_RATE = 2e-5
LEAKY_SLOPE = 0.2


class TauCnn(nn.Module):
    """Input (batch, n_input + 1 mask channel, n_grid) -> tau estimate."""

    def __init__(self, n_input: int, n_grid: int = 300):
        super().__init__()
        self.n_input = n_input
        self.n_grid = n_grid
        act = nn.LeakyReLU(LEAKY_SLOPE)
        layers: list[nn.Module] = []
        prev = n_input + 1
        for width, stride in zip(CHANNELS, STRIDES):
            layers += [nn.Conv1d(prev, width, KERNEL, stride=stride), act]
            prev = width
        self.convs = nn.Sequential(*layers)
        with torch.no_grad():
            flat = self.convs(torch.zeros(1, n_input + 1, n_grid)).numel()
        self.head = nn.Sequential(nn.Flatten(), nn.Linear(flat, FC_HIDDEN), act,
                                  nn.Linear(FC_HIDDEN, 1))
        # Gradient flow through seven leaky layers is poor under the torch
        # default init; match the init gain to the actual activation slope.
        for mod in self.modules():
            if isinstance(mod, (nn.Conv1d, nn.Linear)):
                nn.init.kaiming_normal_(mod.weight, a=LEAKY_SLOPE,
                                        nonlinearity="leaky_relu")
                nn.init.zeros_(mod.bias)
        # Zero output layer: the untrained net predicts the target mean,
        # which the pinned small learning rate cannot cheaply relearn.
        nn.init.zeros_(self.head[-1].weight)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.convs(x)).squeeze(-1)


@dataclass
class CnnModel:
    """Trained network plus preprocessing state."""

    net: TauCnn
    subset: str
    columns: tuple[str, ...]
    strategy: str
    normalizer: Normalizer
    y_mean: float
    y_std: float
    T: float | None = None          # fixed horizon for per-t models

    def save(self, path) -> None:
        torch.save({
            "state_dict": self.net.state_dict(),
            "n_input": self.net.n_input,
            "n_grid": self.net.n_grid,
            "subset": self.subset,
            "columns": self.columns,
            "strategy": self.strategy,
            "scale": self.normalizer.scale,
            "y_mean": self.y_mean,
            "y_std": self.y_std,
            "T": self.T,
        }, path)

    @staticmethod
    def load(path) -> "CnnModel":
        blob = torch.load(path, weights_only=False)
        net = TauCnn(blob["n_input"], blob["n_grid"])
        net.load_state_dict(blob["state_dict"])
        net.eval()
        return CnnModel(net=net, subset=blob["subset"],
                        columns=tuple(blob["columns"]),
                        strategy=blob["strategy"],
                        normalizer=Normalizer(scale=blob["scale"]),
                        y_mean=blob["y_mean"], y_std=blob["y_std"],
                        T=blob["T"])

    def predict(self, dataset: Dataset, runs: list[dict], T: float) -> np.ndarray:
        if self.T is not None and T != self.T:
            raise ValueError(f"per-t model fixed at T={self.T}, asked for T={T}")
        X, _ = channel_stack(dataset, runs, self.columns)
        X = self.normalizer.apply(X)
        k = horizon_index(dataset, T)
        xt, mask = _masked(torch.from_numpy(X),
                           np.full(len(runs), k), X.shape[2])
        self.net.eval()
        with torch.no_grad():
            z = self.net(torch.cat([xt, mask], dim=1)).numpy()
        return z * self.y_std + self.y_mean


def _masked(X: torch.Tensor, lengths: np.ndarray, n_grid: int):
    """Zero out t > length and build the matching mask channel."""
    idx = torch.arange(n_grid)[None, None, :]
    keep = (idx < torch.as_tensor(lengths)[:, None, None]).float()
    return X * keep, keep


def train_cnn(
    dataset: Dataset,
    subset: str,
    strategy: str,
    T: float | None = None,
    epochs: int = 500,
    batch_size: int = 64,
    patience: int = 20,
    val_fraction: float = 0.1,
    segments_per_run: int = 4,
    seed: int = 0,
    verbose: bool = False,
) -> CnnModel:
    """Train one network on the train split.

    Each epoch re-draws `segments_per_run` segment lengths per training run
    according to the sampling strategy ("full", "uniform", "beta",
    "beta-skew"); strategy "per-t" trains at the single fixed horizon T.
    Early stopping monitors the validation MSE averaged over the report
    horizons (or at T for per-t models).
    """
    rng = np.random.default_rng(seed)
    torch.manual_seed(seed)
    if strategy == "per-t" and T is None:
        raise ValueError("per-t strategy needs a horizon T")
    columns = feature_columns(dataset, subset)
    train = dataset.runs("train")
    if not train:
        raise ValueError("training split is empty")
    n_grid = len(dataset.grid)
    n_pop = float(train[0]["n"])
    X_all, y_all = channel_stack(dataset, train, columns)
    norm = Normalizer.fit(X_all, columns, n_pop)
    X_all = norm.apply(X_all)
    y_mean = float(y_all.mean())
    y_std = float(y_all.std()) or 1.0
    z_all = (y_all - y_mean) / y_std

    n_val = max(1, int(round(val_fraction * len(train))))
    order = rng.permutation(len(train))
    val_idx, tr_idx = order[:n_val], order[n_val:]
    if len(tr_idx) == 0:
        tr_idx = val_idx
    X_tr = torch.from_numpy(X_all[tr_idx])
    z_tr = torch.from_numpy(z_all[tr_idx])
    X_val = torch.from_numpy(X_all[val_idx])
    z_val = torch.from_numpy(z_all[val_idx])

    if strategy == "per-t":
        val_lengths = [horizon_index(dataset, T)]
    else:
        val_lengths = [horizon_index(dataset, t)
                       for t in (1.0, 2.0, 4.0, 6.0, 10.0)
                       if round(t / dataset.dt) <= n_grid]

    net = TauCnn(len(columns), n_grid)
    optimizer = torch.optim.Adam(net.parameters(), lr=LEARNING_RATE)
    loss_fn = nn.MSELoss()

    def val_loss() -> float:
        net.eval()
        with torch.no_grad():
            total = 0.0
            for k in val_lengths:
                xt, mask = _masked(X_val, np.full(len(val_idx), k), n_grid)
                pred = net(torch.cat([xt, mask], dim=1))
                total += float(loss_fn(pred, z_val))
        return total / len(val_lengths)

    best = float("inf")
    best_state = {k: v.clone() for k, v in net.state_dict().items()}
    since_best = 0
    n_tr = len(tr_idx)
    for epoch in range(epochs):
        net.train()
        reps = np.tile(np.arange(n_tr), segments_per_run)
        rng.shuffle(reps)
        if strategy == "per-t":
            lengths = np.full(len(reps), horizon_index(dataset, T))
        else:
            lengths = sample_length_indices(strategy, len(reps), n_grid, rng)
        epoch_loss = 0.0
        for start in range(0, len(reps), batch_size):
            sel = reps[start:start + batch_size]
            xt, mask = _masked(X_tr[sel], lengths[start:start + batch_size], n_grid)
            pred = net(torch.cat([xt, mask], dim=1))
            loss = loss_fn(pred, z_tr[sel])
            if not torch.isfinite(loss):
                raise RuntimeError(
                    f"divergent loss at epoch {epoch} (strategy={strategy}, "
                    f"subset={subset}): {float(loss)!r}")
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_loss += loss.item() * len(sel)
        vl = val_loss()
        if verbose and epoch % 10 == 0:
            print(f"  epoch {epoch}: train {epoch_loss / len(reps):.4f} val {vl:.4f}")
        if vl < best - 1e-6:
            best = vl
            best_state = {k: v.clone() for k, v in net.state_dict().items()}
            since_best = 0
        else:
            since_best += 1
            if since_best >= patience:
                break
    net.load_state_dict(best_state)
    net.eval()
    return CnnModel(net=net, subset=subset, columns=columns, strategy=strategy,
                    normalizer=norm, y_mean=y_mean, y_std=y_std, T=T)
