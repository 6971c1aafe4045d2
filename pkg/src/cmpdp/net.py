"""The learnable graph scorer behind the comparator.

Architecture: ``rounds`` iterations of three-branch message passing over
zero-initialized node embeddings, where each vertex combines a linear map of
its own embedding, of the sum over neighbors, and of the sum over strict
non-neighbors (self excluded), concatenated and passed through exact GELU and
a learnable layer norm. The final embeddings are mean-pooled and fed to a
dense head whose last layer sees the last hidden output concatenated with the
first hidden output (a skip connection), producing one logit.

Everything is float64 numpy with hand-derived gradients; there is no autodiff
and no batching across graphs. The non-neighbor sum is computed as
(global sum - neighbor sum - self), so one round costs O(n + m) per vertex
rather than O(n^2).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterator

import numpy as np
from scipy.special import erf, expit

from .graph import Graph

NORM_EPS = 1e-5

_SQRT1_2 = float(np.sqrt(0.5))
_INV_SQRT_2PI = float(1.0 / np.sqrt(2.0 * np.pi))

MAGIC = b"CMPNET1"


class NonFiniteError(FloatingPointError):
    """A forward or backward tensor went non-finite; names the layer."""


class WeightFileError(ValueError):
    """Base class for weight-file problems."""


class WeightFormatError(WeightFileError):
    pass


class WeightDimensionError(WeightFileError):
    pass


class WeightTruncatedError(WeightFileError):
    pass


class WeightChecksumError(WeightFileError):
    pass


def gelu(x: np.ndarray) -> np.ndarray:
    """Exact (erf-based) GELU."""
    return 0.5 * x * (1.0 + erf(x * _SQRT1_2))


def gelu_grad(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + erf(x * _SQRT1_2)) + x * np.exp(-0.5 * x * x) * _INV_SQRT_2PI


def head_dims(width: int, head_layers: int) -> list[tuple[int, int]]:
    """(in, out) sizes of the head layers: 3w -> w, then w -> w hidden layers,
    and a final 2w -> 1 layer fed by [last hidden || first hidden]."""
    dims = [(3 * width, width)]
    dims.extend((width, width) for _ in range(head_layers - 2))
    dims.append((2 * width, 1))
    return dims


@dataclass
class CmpParams:
    """All learnable tensors, geometry (rounds, width, head_layers) included.

    Per round: self/neighbor/non-neighbor weight matrices (width x 3*width)
    with bias vectors (width), plus layer-norm scale/shift (3*width). The head
    holds ``head_layers`` linear layers sized by :func:`head_dims`, each hidden
    layer with its own layer-norm scale/shift.
    """

    rounds: int
    width: int
    head_layers: int
    self_w: list[np.ndarray] = field(default_factory=list)
    self_b: list[np.ndarray] = field(default_factory=list)
    neigh_w: list[np.ndarray] = field(default_factory=list)
    neigh_b: list[np.ndarray] = field(default_factory=list)
    anti_w: list[np.ndarray] = field(default_factory=list)
    anti_b: list[np.ndarray] = field(default_factory=list)
    norm_scale: list[np.ndarray] = field(default_factory=list)
    norm_shift: list[np.ndarray] = field(default_factory=list)
    head_w: list[np.ndarray] = field(default_factory=list)
    head_b: list[np.ndarray] = field(default_factory=list)
    head_norm_scale: list[np.ndarray] = field(default_factory=list)
    head_norm_shift: list[np.ndarray] = field(default_factory=list)

    def tensors(self) -> Iterator[tuple[str, np.ndarray]]:
        """Yield (name, live array) in the canonical serialization order."""
        for k in range(self.rounds):
            yield f"round{k}.self_w", self.self_w[k]
            yield f"round{k}.self_b", self.self_b[k]
            yield f"round{k}.neigh_w", self.neigh_w[k]
            yield f"round{k}.neigh_b", self.neigh_b[k]
            yield f"round{k}.anti_w", self.anti_w[k]
            yield f"round{k}.anti_b", self.anti_b[k]
            yield f"round{k}.norm_scale", self.norm_scale[k]
            yield f"round{k}.norm_shift", self.norm_shift[k]
        for i in range(self.head_layers):
            yield f"head{i}.w", self.head_w[i]
            yield f"head{i}.b", self.head_b[i]
            if i < self.head_layers - 1:
                yield f"head{i}.norm_scale", self.head_norm_scale[i]
                yield f"head{i}.norm_shift", self.head_norm_shift[i]

    def copy(self) -> "CmpParams":
        out = zeros_like_params(self)
        for (_, dst), (_, src) in zip(out.tensors(), self.tensors()):
            dst[...] = src
        return out

    def component_count(self) -> int:
        return sum(a.size for _, a in self.tensors())

    def check_shapes(self) -> None:
        if self.head_layers < 2:
            raise WeightDimensionError("head_layers must be at least 2")
        w3 = 3 * self.width
        for k in range(self.rounds):
            for name, arr, shape in (
                (f"round{k}.self_w", self.self_w[k], (self.width, w3)),
                (f"round{k}.neigh_w", self.neigh_w[k], (self.width, w3)),
                (f"round{k}.anti_w", self.anti_w[k], (self.width, w3)),
                (f"round{k}.self_b", self.self_b[k], (self.width,)),
                (f"round{k}.neigh_b", self.neigh_b[k], (self.width,)),
                (f"round{k}.anti_b", self.anti_b[k], (self.width,)),
                (f"round{k}.norm_scale", self.norm_scale[k], (w3,)),
                (f"round{k}.norm_shift", self.norm_shift[k], (w3,)),
            ):
                if arr.shape != shape:
                    raise WeightDimensionError(f"{name}: expected {shape}, got {arr.shape}")
        for i, (din, dout) in enumerate(head_dims(self.width, self.head_layers)):
            if self.head_w[i].shape != (dout, din):
                raise WeightDimensionError(
                    f"head{i}.w: expected {(dout, din)}, got {self.head_w[i].shape}"
                )
            if self.head_b[i].shape != (dout,):
                raise WeightDimensionError(
                    f"head{i}.b: expected {(dout,)}, got {self.head_b[i].shape}"
                )
        for name, arrs in (("norm_scale", self.head_norm_scale), ("norm_shift", self.head_norm_shift)):
            if len(arrs) != self.head_layers - 1:
                raise WeightDimensionError(f"head.{name}: expected {self.head_layers - 1} entries")
        for _, arr in self.tensors():
            if not np.isfinite(arr).all():
                raise NonFiniteError("parameter tensor contains non-finite values")


def zeros_like_params(p: CmpParams) -> CmpParams:
    w3 = 3 * p.width
    out = CmpParams(p.rounds, p.width, p.head_layers)
    for _ in range(p.rounds):
        out.self_w.append(np.zeros((p.width, w3)))
        out.self_b.append(np.zeros(p.width))
        out.neigh_w.append(np.zeros((p.width, w3)))
        out.neigh_b.append(np.zeros(p.width))
        out.anti_w.append(np.zeros((p.width, w3)))
        out.anti_b.append(np.zeros(p.width))
        out.norm_scale.append(np.zeros(w3))
        out.norm_shift.append(np.zeros(w3))
    for din, dout in head_dims(p.width, p.head_layers):
        out.head_w.append(np.zeros((dout, din)))
        out.head_b.append(np.zeros(dout))
    for _ in range(p.head_layers - 1):
        out.head_norm_scale.append(np.zeros(p.width))
        out.head_norm_shift.append(np.zeros(p.width))
    return out


def init_params(rounds: int, width: int, head_layers: int, seed: int) -> CmpParams:
    """Fan-in-scaled uniform weights and biases; norm scale 1, shift 0.
    Deterministic per seed."""
    if rounds < 1 or width < 1:
        raise WeightDimensionError("rounds and width must be at least 1")
    if head_layers < 2:
        raise WeightDimensionError("head_layers must be at least 2")
    rng = np.random.default_rng(seed)
    w3 = 3 * width

    def lin(shape: tuple[int, ...], fan_in: int) -> np.ndarray:
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, shape)

    p = CmpParams(rounds, width, head_layers)
    for _ in range(rounds):
        p.self_w.append(lin((width, w3), w3))
        p.self_b.append(lin((width,), w3))
        p.neigh_w.append(lin((width, w3), w3))
        p.neigh_b.append(lin((width,), w3))
        p.anti_w.append(lin((width, w3), w3))
        p.anti_b.append(lin((width,), w3))
        p.norm_scale.append(np.ones(w3))
        p.norm_shift.append(np.zeros(w3))
    for din, dout in head_dims(width, head_layers):
        p.head_w.append(lin((dout, din), din))
        p.head_b.append(lin((dout,), din))
    for _ in range(head_layers - 1):
        p.head_norm_scale.append(np.ones(width))
        p.head_norm_shift.append(np.zeros(width))
    return p


@dataclass
class ForwardTrace:
    """Intermediates of one forward pass, enough to run the backward pass."""

    n: int
    adj: np.ndarray | None = None          # (n, n) dense adjacency
    node_emb: list[np.ndarray] = field(default_factory=list)   # rounds+1 of (n, 3w)
    neigh_sum: list[np.ndarray] = field(default_factory=list)  # per round (n, 3w)
    anti_sum: list[np.ndarray] = field(default_factory=list)
    pre_act: list[np.ndarray] = field(default_factory=list)    # concat before GELU
    normed: list[np.ndarray] = field(default_factory=list)     # layer-norm x-hat
    inv_std: list[np.ndarray] = field(default_factory=list)    # (n, 1)
    graph_emb: np.ndarray | None = None    # (3w,) mean-pooled
    head_pre: list[np.ndarray] = field(default_factory=list)
    head_normed: list[np.ndarray] = field(default_factory=list)
    head_inv_std: list[float] = field(default_factory=list)
    head_out: list[np.ndarray] = field(default_factory=list)   # hidden outputs
    final_input: np.ndarray | None = None  # (2w,)
    logit: float = 0.0


def score_graph(params: CmpParams, g: Graph) -> tuple[float, ForwardTrace]:
    """Logit for one graph. An empty graph scores 0 by convention (the
    recursive solvers never compare empty graphs)."""
    n = g.n
    if n == 0:
        return 0.0, ForwardTrace(n=0)
    w = params.width
    w3 = 3 * w
    adj = np.zeros((n, n))
    for v in range(n):
        for u in g.adjacency[v]:
            adj[v, u] = 1.0
    trace = ForwardTrace(n=n, adj=adj)
    emb = np.zeros((n, w3))
    trace.node_emb.append(emb)
    for k in range(params.rounds):
        neigh = adj @ emb
        anti = emb.sum(axis=0) - neigh - emb
        a = emb @ params.self_w[k].T + params.self_b[k]
        b = neigh @ params.neigh_w[k].T + params.neigh_b[k]
        c = anti @ params.anti_w[k].T + params.anti_b[k]
        pre = np.concatenate((a, b, c), axis=1)
        act = gelu(pre)
        mean = act.mean(axis=1, keepdims=True)
        var = act.var(axis=1, keepdims=True)
        inv = 1.0 / np.sqrt(var + NORM_EPS)
        xhat = (act - mean) * inv
        emb = xhat * params.norm_scale[k] + params.norm_shift[k]
        if not np.isfinite(emb).all():
            raise NonFiniteError(f"non-finite embedding after message round {k}")
        trace.neigh_sum.append(neigh)
        trace.anti_sum.append(anti)
        trace.pre_act.append(pre)
        trace.normed.append(xhat)
        trace.inv_std.append(inv)
        trace.node_emb.append(emb)
    pooled = emb.mean(axis=0)
    trace.graph_emb = pooled
    x = pooled
    for i in range(params.head_layers - 1):
        z = params.head_w[i] @ x + params.head_b[i]
        act = gelu(z)
        mean = act.mean()
        var = act.var()
        inv = float(1.0 / np.sqrt(var + NORM_EPS))
        xhat = (act - mean) * inv
        h = xhat * params.head_norm_scale[i] + params.head_norm_shift[i]
        if not np.isfinite(h).all():
            raise NonFiniteError(f"non-finite activation in head layer {i}")
        trace.head_pre.append(z)
        trace.head_normed.append(xhat)
        trace.head_inv_std.append(inv)
        trace.head_out.append(h)
        x = h
    final_input = np.concatenate((x, trace.head_out[0]))
    logit = float((params.head_w[-1] @ final_input + params.head_b[-1])[0])
    if not np.isfinite(logit):
        raise NonFiniteError("non-finite logit in final head layer")
    trace.final_input = final_input
    trace.logit = logit
    return logit, trace


def cmp(params: CmpParams, g: Graph, g_prime: Graph) -> int:
    """1 when the scorer ranks g strictly below g_prime, else 0. Ties (and
    identical graphs) give 0."""
    return 1 if score_graph(params, g)[0] < score_graph(params, g_prime)[0] else 0


def pair_loss(params: CmpParams, g: Graph, g_prime: Graph, label: int) -> float:
    """Cross-entropy of the two-way softmax over the pair's logits."""
    _check_label(label)
    z0 = score_graph(params, g)[0]
    z1 = score_graph(params, g_prime)[0]
    d = z1 - z0
    return float(np.logaddexp(0.0, d) - label * d)


def pair_loss_and_grad(
    params: CmpParams, g: Graph, g_prime: Graph, label: int
) -> tuple[float, CmpParams]:
    """Loss plus exact analytic gradients for every parameter tensor.

    label 1 means g_prime is annotated as the graph with the larger optimum.
    The gradient object reuses the CmpParams layout.
    """
    _check_label(label)
    z0, t0 = score_graph(params, g)
    z1, t1 = score_graph(params, g_prime)
    d = z1 - z0
    loss = float(np.logaddexp(0.0, d) - label * d)
    dz1 = float(expit(d)) - label
    grads = zeros_like_params(params)
    _backprop(params, t1, dz1, grads)
    _backprop(params, t0, -dz1, grads)
    return loss, grads


def _check_label(label: int) -> None:
    if label not in (0, 1):
        raise ValueError(f"label must be 0 or 1, got {label!r}")


def _backprop(params: CmpParams, trace: ForwardTrace, dlogit: float, grads: CmpParams) -> None:
    """Accumulate d(loss)/d(params) for one graph's forward trace."""
    if trace.n == 0:
        return  # constant logit, nothing to propagate
    n = trace.n
    w = params.width
    last = params.head_layers - 1

    u = trace.final_input
    grads.head_w[last] += dlogit * u[None, :]
    grads.head_b[last] += dlogit
    du = dlogit * params.head_w[last][0]
    dh = [np.zeros(w) for _ in range(last)]
    dh[last - 1] += du[:w]
    dh[0] += du[w:]

    dpooled = None
    for i in range(last - 1, -1, -1):
        dy = dh[i]
        xhat = trace.head_normed[i]
        grads.head_norm_scale[i] += dy * xhat
        grads.head_norm_shift[i] += dy
        dxhat = dy * params.head_norm_scale[i]
        m1 = dxhat.mean()
        m2 = (dxhat * xhat).mean()
        dact = trace.head_inv_std[i] * (dxhat - m1 - xhat * m2)
        dz = dact * gelu_grad(trace.head_pre[i])
        xin = trace.graph_emb if i == 0 else trace.head_out[i - 1]
        grads.head_w[i] += np.outer(dz, xin)
        grads.head_b[i] += dz
        dx = params.head_w[i].T @ dz
        if i == 0:
            dpooled = dx
        else:
            dh[i - 1] += dx
    if not np.isfinite(dpooled).all():
        raise NonFiniteError("non-finite gradient entering the pooling layer")

    demb = np.tile(dpooled / n, (n, 1))
    for k in range(params.rounds - 1, -1, -1):
        xhat = trace.normed[k]
        inv = trace.inv_std[k]
        grads.norm_scale[k] += (demb * xhat).sum(axis=0)
        grads.norm_shift[k] += demb.sum(axis=0)
        dxhat = demb * params.norm_scale[k]
        m1 = dxhat.mean(axis=1, keepdims=True)
        m2 = (dxhat * xhat).mean(axis=1, keepdims=True)
        dact = inv * (dxhat - m1 - xhat * m2)
        dpre = dact * gelu_grad(trace.pre_act[k])
        da = dpre[:, :w]
        db = dpre[:, w : 2 * w]
        dc = dpre[:, 2 * w :]
        emb_k = trace.node_emb[k]
        grads.self_w[k] += da.T @ emb_k
        grads.self_b[k] += da.sum(axis=0)
        grads.neigh_w[k] += db.T @ trace.neigh_sum[k]
        grads.neigh_b[k] += db.sum(axis=0)
        grads.anti_w[k] += dc.T @ trace.anti_sum[k]
        grads.anti_b[k] += dc.sum(axis=0)
        demb_k = da @ params.self_w[k]
        ds = db @ params.neigh_w[k]
        demb_k += trace.adj @ ds
        dt = dc @ params.anti_w[k]
        demb_k += dt.sum(axis=0) - trace.adj @ dt - dt
        if not np.isfinite(demb_k).all():
            raise NonFiniteError(f"non-finite gradient in message round {k}")
        demb = demb_k


@dataclass
class AdamState:
    """First/second moments per tensor plus the shared step counter."""

    step: int
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]

    def copy(self) -> "AdamState":
        return AdamState(
            self.step,
            {k: a.copy() for k, a in self.m.items()},
            {k: a.copy() for k, a in self.v.items()},
        )


def init_adam(params: CmpParams) -> AdamState:
    return AdamState(
        0,
        {name: np.zeros_like(a) for name, a in params.tensors()},
        {name: np.zeros_like(a) for name, a in params.tensors()},
    )


def adam_step(
    params: CmpParams,
    grads: CmpParams,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[CmpParams, AdamState]:
    """One bias-corrected Adam update; inputs are not mutated."""
    new_params = params.copy()
    new_state = state.copy()
    new_state.step += 1
    t = new_state.step
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    grad_map = dict(grads.tensors())
    for name, tensor in new_params.tensors():
        gr = grad_map[name]
        m = new_state.m[name]
        v = new_state.v[name]
        m *= beta1
        m += (1.0 - beta1) * gr
        v *= beta2
        v += (1.0 - beta2) * gr * gr
        tensor -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    return new_params, new_state


def params_to_bytes(params: CmpParams) -> bytes:
    """MAGIC, then rounds/width/head_layers as little-endian int64, then every
    tensor in canonical order as little-endian float64, then a CRC32."""
    parts = [MAGIC]
    header = np.array([params.rounds, params.width, params.head_layers], dtype="<i8")
    parts.append(header.tobytes())
    for _, tensor in params.tensors():
        parts.append(np.ascontiguousarray(tensor, dtype="<f8").tobytes())
    body = b"".join(parts)
    crc = np.array([zlib.crc32(body)], dtype="<u4").tobytes()
    return body + crc


def params_from_bytes(data: bytes, expect: tuple[int, int, int] | None = None) -> CmpParams:
    if data[: len(MAGIC)] != MAGIC:
        raise WeightFormatError("bad magic: not a comparator weight file")
    off = len(MAGIC)
    if len(data) < off + 24 + 4:
        raise WeightTruncatedError("file too short for header")
    rounds, width, head_layers = (int(x) for x in np.frombuffer(data, dtype="<i8", count=3, offset=off))
    off += 24
    if rounds < 1 or width < 1 or head_layers < 2:
        raise WeightFormatError(f"implausible geometry ({rounds}, {width}, {head_layers})")
    if expect is not None:
        for name, got, want in zip(("rounds", "width", "head_layers"), (rounds, width, head_layers), expect):
            if got != want:
                raise WeightDimensionError(f"{name}: file has {got}, expected {want}")
    skeleton = zeros_like_params(CmpParams(rounds, width, head_layers))
    payload = sum(a.size for _, a in skeleton.tensors()) * 8
    total = len(MAGIC) + 24 + payload + 4
    if len(data) < total:
        raise WeightTruncatedError(f"expected {total} bytes, got {len(data)}")
    if len(data) > total:
        raise WeightFormatError(f"{len(data) - total} trailing bytes")
    stored = int(np.frombuffer(data, dtype="<u4", count=1, offset=total - 4)[0])
    if zlib.crc32(data[: total - 4]) != stored:
        raise WeightChecksumError("checksum mismatch")
    for _, tensor in skeleton.tensors():
        flat = np.frombuffer(data, dtype="<f8", count=tensor.size, offset=off)
        tensor[...] = flat.reshape(tensor.shape)
        off += tensor.size * 8
    return skeleton


def save_params(params: CmpParams, dest: str | Path | BinaryIO) -> None:
    data = params_to_bytes(params)
    if hasattr(dest, "write"):
        dest.write(data)
    else:
        Path(dest).write_bytes(data)


def load_params(src: str | Path | BinaryIO, expect: tuple[int, int, int] | None = None) -> CmpParams:
    if hasattr(src, "read"):
        data = src.read()
    else:
        data = Path(src).read_bytes()
    return params_from_bytes(data, expect)
