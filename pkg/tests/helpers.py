"""Independent oracles and shared helpers for the test suite.

Everything here is deliberately written as a second implementation, separate
from the package code paths it checks: subset enumeration instead of branch
and bound, vertex-by-vertex loops instead of matrix message passing, and
central finite differences instead of the analytic backward pass.
"""

from __future__ import annotations

import math
import random

import numpy as np

from cmpdp.graph import Graph, build_graph
from cmpdp.net import CmpParams, score_graph


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return build_graph(n, edges)


def brute_force_mis_size(g: Graph) -> int:
    """Enumerate all 2^n subsets; usable up to n ~ 16."""
    masks = [sum(1 << u for u in g.adjacency[v]) for v in range(g.n)]
    best = 0
    for subset in range(1 << g.n):
        ok = True
        rest = subset
        while rest:
            bit = rest & -rest
            rest ^= bit
            v = bit.bit_length() - 1
            if masks[v] & subset:
                ok = False
                break
        if ok:
            best = max(best, subset.bit_count())
    return best


def brute_force_mvc_size(g: Graph) -> int:
    """Smallest subset touching every edge, by enumeration."""
    edges = g.edges()
    best = g.n
    for subset in range(1 << g.n):
        if subset.bit_count() >= best:
            continue
        if all((subset >> u & 1) or (subset >> v & 1) for u, v in edges):
            best = subset.bit_count()
    return best


def straight_line_logit(params: CmpParams, g: Graph) -> float:
    """Forward pass re-derived from the architecture description, computed
    with per-vertex loops and explicit non-neighbor sums (no global-sum
    shortcut)."""
    n = g.n
    if n == 0:
        return 0.0
    w = params.width
    eps = 1e-5

    def gelu_scalar(x: float) -> float:
        return 0.5 * x * (1.0 + math.erf(x / math.sqrt(2.0)))

    def layer_norm(vec: np.ndarray, scale: np.ndarray, shift: np.ndarray) -> np.ndarray:
        mean = float(np.mean(vec))
        var = float(np.mean((vec - mean) ** 2))
        return scale * ((vec - mean) / math.sqrt(var + eps)) + shift

    emb = [np.zeros(3 * w) for _ in range(n)]
    for k in range(params.rounds):
        nxt = []
        for v in range(n):
            neigh = np.zeros(3 * w)
            for u in g.adjacency[v]:
                neigh += emb[u]
            anti = np.zeros(3 * w)
            for u in range(n):
                if u != v and u not in g.adjacency[v]:
                    anti += emb[u]
            a = params.self_w[k] @ emb[v] + params.self_b[k]
            b = params.neigh_w[k] @ neigh + params.neigh_b[k]
            c = params.anti_w[k] @ anti + params.anti_b[k]
            pre = np.concatenate((a, b, c))
            act = np.array([gelu_scalar(x) for x in pre])
            nxt.append(layer_norm(act, params.norm_scale[k], params.norm_shift[k]))
        emb = nxt
    pooled = sum(emb) / n
    x = pooled
    hidden = []
    for i in range(params.head_layers - 1):
        z = params.head_w[i] @ x + params.head_b[i]
        act = np.array([gelu_scalar(t) for t in z])
        x = layer_norm(act, params.head_norm_scale[i], params.head_norm_shift[i])
        hidden.append(x)
    final_input = np.concatenate((hidden[-1], hidden[0]))
    return float((params.head_w[-1] @ final_input + params.head_b[-1])[0])


def pairwise_loss_value(params: CmpParams, g: Graph, gp: Graph, label: int) -> float:
    """Loss recomputed from two independent forward calls (for finite
    differences)."""
    z0 = score_graph(params, g)[0]
    z1 = score_graph(params, gp)[0]
    d = z1 - z0
    return float(np.logaddexp(0.0, d) - label * d)


def finite_difference_grads(
    params: CmpParams, g: Graph, gp: Graph, label: int, step: float = 1e-5
) -> CmpParams:
    """Central differences of the pair loss for every parameter component."""
    from cmpdp.net import zeros_like_params

    grads = zeros_like_params(params)
    grad_map = dict(grads.tensors())
    for name, tensor in params.tensors():
        out = grad_map[name]
        flat = tensor.reshape(-1)
        gflat = out.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + step
            hi = pairwise_loss_value(params, g, gp, label)
            flat[i] = keep - step
            lo = pairwise_loss_value(params, g, gp, label)
            flat[i] = keep
            gflat[i] = (hi - lo) / (2.0 * step)
    return grads


def relative_mismatch(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    """Boolean mask of components whose relative difference exceeds tol;
    components tiny on both sides pass."""
    denom = np.maximum(np.abs(a), np.abs(b))
    tiny = denom < 1e-10
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(a - b) / denom
    rel = np.where(tiny, 0.0, rel)
    return rel > tol
