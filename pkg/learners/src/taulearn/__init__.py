"""Learned infection-rate baselines over simulation dataset files."""

from .data import (Dataset, load_dataset, feature_columns, gbt_matrix,
                   channel_stack, Normalizer, sample_fractions,
                   fractions_to_grid, sample_length_indices, STRATEGIES)
from .gbt import GbtHyperparams, GbtModel, train_gbt
from .cnn import CnnModel, TauCnn, train_cnn
from .evaluate import (append_predictions, read_predictions, predict_to_file,
                       evaluate_predictions)

__version__ = "0.1.0"
