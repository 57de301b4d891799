"""Child-sum tree LSTM with a softmax head and exact reverse-mode gradients.

Cell, per node with children k:

    h~   = sum_k h_k
    i    = sigmoid(W_i x + U_i h~ + b_i)
    f_k  = sigmoid(W_f x + U_f h_k + b_f)      (one forget gate per child)
    o    = sigmoid(W_o x + U_o h~ + b_o)
    u    = tanh(W_u x + U_u h~ + b_u)
    c    = i * u + sum_k f_k * c_k
    h    = o * tanh(c)

Leaves are the empty-children case (h~ = 0, no forget terms).  The root
hidden state feeds a six-way softmax.  All gradients are accumulated by an
explicit reverse traversal of the forward tape; no autodiff framework is
involved.  Everything runs in float64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tree import SpanningSubtree

N_LABELS = 6

GATE_NAMES = ("i", "f", "o", "u")
TENSOR_NAMES = (
    "W_i", "W_f", "W_o", "W_u",
    "U_i", "U_f", "U_o", "U_u",
    "b_i", "b_f", "b_o", "b_u",
    "W_y", "b_y",
)


class NumericError(ArithmeticError):
    """Non-finite value produced during forward or backward."""


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class TreeLstmParams:
    input_size: int
    hidden_size: int
    n_labels: int
    W_i: np.ndarray
    W_f: np.ndarray
    W_o: np.ndarray
    W_u: np.ndarray
    U_i: np.ndarray
    U_f: np.ndarray
    U_o: np.ndarray
    U_u: np.ndarray
    b_i: np.ndarray
    b_f: np.ndarray
    b_o: np.ndarray
    b_u: np.ndarray
    W_y: np.ndarray
    b_y: np.ndarray

    def tensors(self):
        for name in TENSOR_NAMES:
            yield name, getattr(self, name)

    def copy(self) -> "TreeLstmParams":
        kwargs = {name: arr.copy() for name, arr in self.tensors()}
        return TreeLstmParams(
            input_size=self.input_size,
            hidden_size=self.hidden_size,
            n_labels=self.n_labels,
            **kwargs,
        )

    def check_shapes(self):
        d, h, y = self.input_size, self.hidden_size, self.n_labels
        expected = _expected_shapes(d, h, y)
        for name, arr in self.tensors():
            if arr.shape != expected[name]:
                raise ValueError(
                    f"{name}: shape {arr.shape}, expected {expected[name]}"
                )


def _expected_shapes(d, h, y):
    shapes = {}
    for g in GATE_NAMES:
        shapes[f"W_{g}"] = (h, d)
        shapes[f"U_{g}"] = (h, h)
        shapes[f"b_{g}"] = (h,)
    shapes["W_y"] = (y, h)
    shapes["b_y"] = (y,)
    return shapes


def init_params(
    input_size: int, hidden_size: int, seed: int, n_labels: int = N_LABELS
) -> TreeLstmParams:
    """Uniform(-r, r) weights with r = sqrt(6 / (fan_in + fan_out)).

    Biases start at zero except the forget bias, which starts at 1.0 to keep
    memory paths open early in training.
    """
    if input_size < 1 or hidden_size < 1:
        raise ValueError("sizes must be positive")
    rng = np.random.default_rng(seed)
    shapes = _expected_shapes(input_size, hidden_size, n_labels)

    def uniform(shape):
        fan_out, fan_in = shape
        r = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-r, r, shape)

    kwargs = {}
    for name in TENSOR_NAMES:
        shape = shapes[name]
        if name.startswith("b_"):
            kwargs[name] = np.zeros(shape)
        else:
            kwargs[name] = uniform(shape)
    kwargs["b_f"] = np.ones(hidden_size)
    return TreeLstmParams(
        input_size=input_size, hidden_size=hidden_size, n_labels=n_labels, **kwargs
    )


@dataclass
class ParamGrads:
    """Additive gradient accumulator mirroring TreeLstmParams."""

    W_i: np.ndarray
    W_f: np.ndarray
    W_o: np.ndarray
    W_u: np.ndarray
    U_i: np.ndarray
    U_f: np.ndarray
    U_o: np.ndarray
    U_u: np.ndarray
    b_i: np.ndarray
    b_f: np.ndarray
    b_o: np.ndarray
    b_u: np.ndarray
    W_y: np.ndarray
    b_y: np.ndarray

    @classmethod
    def zeros_like(cls, params: TreeLstmParams) -> "ParamGrads":
        return cls(**{name: np.zeros_like(arr) for name, arr in params.tensors()})

    def tensors(self):
        for name in TENSOR_NAMES:
            yield name, getattr(self, name)

    def reset(self):
        for _, arr in self.tensors():
            arr.fill(0.0)

    def add(self, other: "ParamGrads"):
        for name, arr in self.tensors():
            arr += getattr(other, name)

    def scale(self, factor: float):
        for _, arr in self.tensors():
            arr *= factor


@dataclass
class NodeCache:
    """Forward quantities needed by the reverse pass."""

    x: np.ndarray                       # input after dropout
    h_tilde: np.ndarray
    i: np.ndarray
    o: np.ndarray
    u: np.ndarray
    f: list[np.ndarray]                 # per child, in children order
    tanh_c: np.ndarray
    children: list["NodeState"]
    grad_h: np.ndarray | None = None    # filled by the backward pass
    grad_c: np.ndarray | None = None


@dataclass
class NodeState:
    h: np.ndarray
    c: np.ndarray
    cache: NodeCache | None = None


def node_forward(
    params: TreeLstmParams,
    x: np.ndarray,
    children: list[NodeState],
    node: int | None = None,
    keep_cache: bool = True,
) -> NodeState:
    """One cell application; `children` may be empty (leaf case)."""
    hsz = params.hidden_size
    if children:
        h_tilde = np.sum([ch.h for ch in children], axis=0)
    else:
        h_tilde = np.zeros(hsz)
    i = _sigmoid(params.W_i @ x + params.U_i @ h_tilde + params.b_i)
    o = _sigmoid(params.W_o @ x + params.U_o @ h_tilde + params.b_o)
    u = np.tanh(params.W_u @ x + params.U_u @ h_tilde + params.b_u)
    c = i * u
    f = []
    if children:
        wfx = params.W_f @ x
        for ch in children:
            f_k = _sigmoid(wfx + params.U_f @ ch.h + params.b_f)
            f.append(f_k)
            c = c + f_k * ch.c
    tanh_c = np.tanh(c)
    h = o * tanh_c
    if not (np.isfinite(h).all() and np.isfinite(c).all()):
        where = "node ?" if node is None else f"node {node}"
        raise NumericError(f"non-finite cell state at {where}")
    cache = None
    if keep_cache:
        cache = NodeCache(
            x=x, h_tilde=h_tilde, i=i, o=o, u=u, f=f, tanh_c=tanh_c,
            children=list(children),
        )
    return NodeState(h=h, c=c, cache=cache)


@dataclass
class Tape:
    """Record of one tree evaluation, consumed by loss_and_backward."""

    sub: SpanningSubtree
    states: dict[int, NodeState]
    postorder: list[int]

    @property
    def root_state(self) -> NodeState:
        return self.states[self.sub.root]


def tree_forward(
    params: TreeLstmParams,
    sub: SpanningSubtree,
    inputs: dict[int, np.ndarray],
    dropout: float = 0.0,
    train: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[NodeState, Tape]:
    """Evaluate the cell bottom-up over the subtree.

    In train mode, inverted dropout is applied to each node's input vector
    (retained coordinates scaled by 1/(1-p)); eval mode applies neither the
    mask nor the scaling.  Nodes are visited in post-order, so RNG
    consumption is deterministic.
    """
    use_dropout = train and dropout > 0.0
    if use_dropout and rng is None:
        raise ValueError("train-mode dropout needs an RNG")
    states: dict[int, NodeState] = {}
    order = sub.postorder()
    for node in order:
        x = inputs[node]
        if use_dropout:
            mask = (rng.random(x.shape[0]) >= dropout) / (1.0 - dropout)
            x = x * mask
        children = [states[c] for c in sub.children_in_set[node]]
        states[node] = node_forward(params, x, children, node=node)
    tape = Tape(sub=sub, states=states, postorder=order)
    return tape.root_state, tape


def predict(params: TreeLstmParams, h: np.ndarray) -> np.ndarray:
    """Softmax over the label logits, stabilized by max-subtraction."""
    z = params.W_y @ h + params.b_y
    z = z - np.max(z)
    e = np.exp(z)
    return e / np.sum(e)


def loss_and_backward(
    params: TreeLstmParams,
    tape: Tape,
    gold: int,
    weight: float = 1.0,
    grads: ParamGrads | None = None,
) -> tuple[float, ParamGrads]:
    """Cross-entropy loss at the root plus gradients for every tensor.

    Traverses the tape root-to-leaves, accumulating into `grads` (a fresh
    accumulator when not supplied).  `weight` scales the instance's loss and
    gradients (class weighting).
    """
    if grads is None:
        grads = ParamGrads.zeros_like(params)
    sub = tape.sub
    root_state = tape.root_state
    p = predict(params, root_state.h)
    with np.errstate(divide="ignore"):
        loss = -float(np.log(p[gold])) * weight

    dlogits = p.copy()
    dlogits[gold] -= 1.0
    dlogits *= weight
    grads.W_y += np.outer(dlogits, root_state.h)
    grads.b_y += dlogits

    dh = {node: np.zeros(params.hidden_size) for node in tape.postorder}
    dc = {node: np.zeros(params.hidden_size) for node in tape.postorder}
    dh[sub.root] = params.W_y.T @ dlogits

    for node in reversed(tape.postorder):
        state = tape.states[node]
        cache = state.cache
        if cache is None:
            raise ValueError("tape was recorded without caches")
        gh = dh[node]
        gc = dc[node]
        cache.grad_h = gh
        cache.grad_c = gc

        do = gh * cache.tanh_c
        dcell = gc + gh * cache.o * (1.0 - cache.tanh_c ** 2)
        di = dcell * cache.u
        du = dcell * cache.i

        da_i = di * cache.i * (1.0 - cache.i)
        da_o = do * cache.o * (1.0 - cache.o)
        da_u = du * (1.0 - cache.u ** 2)

        x = cache.x
        h_tilde = cache.h_tilde
        grads.W_i += np.outer(da_i, x)
        grads.U_i += np.outer(da_i, h_tilde)
        grads.b_i += da_i
        grads.W_o += np.outer(da_o, x)
        grads.U_o += np.outer(da_o, h_tilde)
        grads.b_o += da_o
        grads.W_u += np.outer(da_u, x)
        grads.U_u += np.outer(da_u, h_tilde)
        grads.b_u += da_u

        dh_tilde = params.U_i.T @ da_i + params.U_o.T @ da_o + params.U_u.T @ da_u
        kids = sub.children_in_set[node]
        for k, child in enumerate(kids):
            child_state = tape.states[child]
            f_k = cache.f[k]
            df_k = dcell * child_state.c
            da_f = df_k * f_k * (1.0 - f_k)
            grads.W_f += np.outer(da_f, x)
            grads.U_f += np.outer(da_f, child_state.h)
            grads.b_f += da_f
            dh[child] += dh_tilde + params.U_f.T @ da_f
            dc[child] += dcell * f_k

    if not np.isfinite(loss):
        raise NumericError("non-finite loss")
    for name, arr in grads.tensors():
        if not np.isfinite(arr).all():
            raise NumericError(f"non-finite gradient in {name}")
    return loss, grads
