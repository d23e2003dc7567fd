"""Latent-belief classifiers: a from-scratch LSTM and a naive-Bayes baseline."""

from .network import (
    BeliefDistribution,
    ModelParams,
    backward,
    cross_entropy,
    forward,
    forward_batch,
    init_params,
    lstm_cell,
    softmax,
)
from .adam import AdamState, adam_step
from .training import TrainConfig, TrainReport, evaluate, read_corpus_file, train
from .bayes import NBModel, nb_predict, nb_train
from .model_io import BeliefModel, load_model, save_model
from .predict import LstmClassifier, NaiveBayesClassifier

DEFAULT_LABELS = ("curious", "confused", "neutral")

__all__ = [
    "AdamState",
    "BeliefDistribution",
    "BeliefModel",
    "DEFAULT_LABELS",
    "LstmClassifier",
    "ModelParams",
    "NBModel",
    "NaiveBayesClassifier",
    "TrainConfig",
    "TrainReport",
    "adam_step",
    "backward",
    "cross_entropy",
    "evaluate",
    "forward",
    "forward_batch",
    "init_params",
    "load_model",
    "lstm_cell",
    "nb_predict",
    "nb_train",
    "read_corpus_file",
    "save_model",
    "softmax",
    "train",
]
