"""The child-sum cell, the softmax head, and a finite-difference gradient check.

Builds a small tree, runs the bottom-up forward pass, classifies from the
root state, and verifies a few analytic gradients against central
differences -- the same oracle the test suite applies to every tensor.
"""

import numpy as np

from treerel.model import (
    init_params,
    loss_and_backward,
    node_forward,
    predict,
    tree_forward,
)
from treerel.parsefile import parse_records
from treerel.tree import build_tree, spanning_subtree

rng = np.random.default_rng(1)

PARSE = """\
#doc D
#sent 0
1\troot\tVERB\t0\troot\t0\t4
2\tleft\tNOUN\t1\tnsubj\t5\t9
3\tright\tNOUN\t1\tdobj\t10\t15
4\tdeep\tADJ\t3\tamod\t16\t20
"""
tree = build_tree(parse_records(PARSE)[0])
sub = spanning_subtree(tree, 1, 3)          # left .. right, rooted at "root"
sub_full = spanning_subtree(tree, 1, 3)

input_size, hidden = 5, 4
params = init_params(input_size, hidden, seed=7)
inputs = {i: rng.normal(size=input_size) for i in range(len(tree))}

# Forward pass: children are summed, so sibling order cannot matter.
left = node_forward(params, inputs[1], [])
right = node_forward(params, inputs[2], [])
ab = node_forward(params, inputs[0], [left, right])
ba = node_forward(params, inputs[0], [right, left])
print("sibling order deviation:", np.max(np.abs(ab.h - ba.h)))

root_state, tape = tree_forward(params, sub, inputs, dropout=0.0, train=True)
print("root |h| max:", np.max(np.abs(root_state.h)), "(always < 1)")

probs = predict(params, root_state.h)
print("class probabilities:", np.round(probs, 4), "sum:", probs.sum())

loss, grads = loss_and_backward(params, tape, gold=2)
print("cross-entropy loss:", round(loss, 6))

# Spot-check gradients with central differences at a few coordinates.
def loss_at():
    state, _ = tree_forward(params, sub, inputs, train=False)
    return -float(np.log(predict(params, state.h)[2]))

eps = 1e-5
print("\ncoordinate        analytic      finite-diff   rel-err")
for name, idx in (("W_i", (0, 0)), ("U_f", (1, 2)), ("b_o", (3,)), ("W_y", (2, 1))):
    arr = getattr(params, name)
    orig = arr[idx]
    arr[idx] = orig + eps
    up = loss_at()
    arr[idx] = orig - eps
    down = loss_at()
    arr[idx] = orig
    fd = (up - down) / (2 * eps)
    analytic = getattr(grads, name)[idx]
    rel = abs(analytic - fd) / max(abs(analytic), abs(fd), 1e-12)
    print(f"{name}{str(idx):<12s} {analytic:+.8f}  {fd:+.8f}  {rel:.2e}")
