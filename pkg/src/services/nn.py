"""
Feedforward ReLU networks on numpy with hand-written reverse mode: forward
pass, gradients with respect to inputs and parameters, seeded sampling of
random extractors and mini-batch SGD training of classifiers.
"""
import logging
from typing import Iterable

import numpy as np
from scipy.special import log_softmax, softmax

from src.conf import messages
from src.conf.exceptions import EmptySampleException, ShapeMismatchException
from src.schemas.datasets import LabeledDataset
from src.schemas.nn import ClassifierParams, MlpParams, ParamGrads

logger = logging.getLogger(__name__)


def sample_params(layer_dims: list[int], seed: int) -> MlpParams:
    """
    Draws weights i.i.d. from N(0, 2 / fan_in) and sets biases to zero.

    :param layer_dims: list[int]: [Fin, h1, ..., F]
    :param seed: int: Seed of the numpy Generator
    :return: MlpParams: Deterministic for a fixed seed
    """
    if len(layer_dims) < 2 or any(d < 1 for d in layer_dims):
        raise ShapeMismatchException(messages.INVALID_LAYER_DIMS.format(dims=layer_dims))
    rng = np.random.default_rng(seed)
    weights = [
        rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out))
        for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:])
    ]
    biases = [np.zeros(fan_out) for fan_out in layer_dims[1:]]
    return MlpParams(layer_dims=list(layer_dims), weights=weights, biases=biases)


def sample_classifier(
    input_width: int, hidden_dims: list[int], num_classes: int, seed: int
) -> ClassifierParams:
    params = sample_params([input_width, *hidden_dims, num_classes], seed)
    return ClassifierParams(
        layer_dims=params.layer_dims, weights=params.weights, biases=params.biases
    )


def _check_input(params: MlpParams, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.input_width:
        raise ShapeMismatchException(
            messages.SHAPE_MISMATCH.format(expected=f"(D, {params.input_width})", got=x.shape)
        )
    return x


def _forward_trace(
    weights: list[np.ndarray], biases: list[np.ndarray], x: np.ndarray
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Layer inputs and pre-activations, needed by the backward pass."""
    inputs, pre = [], []
    h = x
    last = len(weights) - 1
    for i, (w, b) in enumerate(zip(weights, biases)):
        inputs.append(h)
        z = h @ w + b
        pre.append(z)
        h = z if i == last else np.maximum(z, 0.0)
    return inputs, pre


def forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    x = _check_input(params, x)
    _, pre = _forward_trace(params.weights, params.biases, x)
    return pre[-1]


def hidden_features(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Activations of the last hidden layer (the probe embedding)."""
    x = _check_input(params, x)
    if len(params.weights) < 2:
        return x
    inputs, _ = _forward_trace(params.weights, params.biases, x)
    return inputs[-1]


def _backward(
    weights: list[np.ndarray],
    inputs: list[np.ndarray],
    pre: list[np.ndarray],
    upstream: np.ndarray,
) -> tuple[np.ndarray, list[np.ndarray], list[np.ndarray]]:
    grad_w = [np.empty(0)] * len(weights)
    grad_b = [np.empty(0)] * len(weights)
    delta = upstream
    for i in range(len(weights) - 1, -1, -1):
        if i != len(weights) - 1:
            # ReLU subgradient at exactly 0 is 0
            delta = delta * (pre[i] > 0)
        grad_w[i] = inputs[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        delta = delta @ weights[i].T
    return delta, grad_w, grad_b


def backward(
    params: MlpParams, x: np.ndarray, upstream_grad: np.ndarray
) -> tuple[np.ndarray, ParamGrads]:
    """
    Reverse-mode gradient of <upstream_grad, forward(params, x)> with respect
    to the input batch and to every weight and bias.
    """
    x = _check_input(params, x)
    upstream = np.asarray(upstream_grad, dtype=np.float64)
    expected = (x.shape[0], params.output_width)
    if upstream.shape != expected:
        raise ShapeMismatchException(
            messages.SHAPE_MISMATCH.format(expected=expected, got=upstream.shape)
        )
    inputs, pre = _forward_trace(params.weights, params.biases, x)
    grad_x, grad_w, grad_b = _backward(params.weights, inputs, pre, upstream)
    return grad_x, ParamGrads(weights=grad_w, biases=grad_b)


def backward_to_input(params: MlpParams, x: np.ndarray, upstream_grad: np.ndarray) -> np.ndarray:
    grad_x, _ = backward(params, x, upstream_grad)
    return grad_x


def _class_mask(num_outputs: int, allowed_classes: Iterable[int] | None) -> np.ndarray | None:
    if allowed_classes is None:
        return None
    mask = np.full(num_outputs, -np.inf)
    mask[list(allowed_classes)] = 0.0
    return mask


def _check_labels(data: LabeledDataset, num_classes: int) -> None:
    if data.n_records == 0:
        raise EmptySampleException(messages.EMPTY_DATASET)
    bad = data.labels[(data.labels < 0) | (data.labels >= num_classes)]
    if bad.size:
        raise ShapeMismatchException(
            messages.LABEL_OUT_OF_RANGE.format(label=int(bad[0]), num_classes=num_classes)
        )


def cross_entropy(
    params: ClassifierParams,
    data: LabeledDataset,
    allowed_classes: Iterable[int] | None = None,
) -> float:
    mask = _class_mask(params.output_width, allowed_classes)
    logits = forward(params, data.features)
    if mask is not None:
        logits = logits + mask
    log_probs = log_softmax(logits, axis=1)
    return float(-np.mean(log_probs[np.arange(data.n_records), data.labels]))


def train_classifier(
    params: ClassifierParams,
    data: LabeledDataset,
    epochs: int,
    lr: float,
    batch_size: int,
    seed: int,
    allowed_classes: Iterable[int] | None = None,
) -> ClassifierParams:
    """
    Minimizes softmax cross-entropy by mini-batch SGD on a private copy of the
    parameters. Logits of classes outside `allowed_classes` are masked to -inf.

    :param params: ClassifierParams: Starting point, left untouched
    :param data: LabeledDataset: Training records
    :param epochs: int: Passes over the data; 0 returns the parameters unchanged
    :param lr: float: SGD step size
    :param batch_size: int: Mini-batch size
    :param seed: int: Seed for the per-epoch shuffles
    :param allowed_classes: Iterable[int]: Output classes visible to the loss
    :return: ClassifierParams: The trained parameters
    """
    _check_labels(data, params.output_width)
    _check_input(params, data.features)
    if epochs == 0:
        return params
    mask = _class_mask(params.output_width, allowed_classes)
    weights = [w.copy() for w in params.weights]
    biases = [b.copy() for b in params.biases]
    rng = np.random.default_rng(seed)
    n = data.n_records
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            x, y = data.features[batch], data.labels[batch]
            inputs, pre = _forward_trace(weights, biases, x)
            logits = pre[-1] if mask is None else pre[-1] + mask
            upstream = softmax(logits, axis=1)
            upstream[np.arange(len(batch)), y] -= 1.0
            upstream /= len(batch)
            _, grad_w, grad_b = _backward(weights, inputs, pre, upstream)
            for i in range(len(weights)):
                weights[i] -= lr * grad_w[i]
                biases[i] -= lr * grad_b[i]
    trained = ClassifierParams(layer_dims=params.layer_dims, weights=weights, biases=biases)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "trained %d epochs on %d records, cross-entropy %.6g",
            epochs, n, cross_entropy(trained, data, allowed_classes),
        )
    return trained


def predict(
    params: ClassifierParams, x: np.ndarray, allowed_classes: Iterable[int] | None = None
) -> np.ndarray:
    logits = forward(params, x)
    mask = _class_mask(params.output_width, allowed_classes)
    if mask is not None:
        logits = logits + mask
    # argmax returns the lowest index among ties
    return np.argmax(logits, axis=1)


def accuracy(
    params: ClassifierParams,
    data: LabeledDataset,
    allowed_classes: Iterable[int] | None = None,
) -> float:
    if data.n_records == 0:
        raise EmptySampleException(messages.EMPTY_DATASET)
    return float(np.mean(predict(params, data.features, allowed_classes) == data.labels))
