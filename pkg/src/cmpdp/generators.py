"""Synthetic graph generators: ER, BA, WS, and the greedy-adversarial "special" family.

Every generator takes an explicit ``random.Random`` so that a GenSpec (model,
parameters, seed) always reproduces the same graph; no global RNG state is
touched.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .graph import Graph, GraphError, build_graph, relabel

ER = "er"
BA = "ba"
WS = "ws"
SPECIAL = "special"

MODELS = (ER, BA, WS, SPECIAL)


@dataclass(frozen=True)
class GenSpec:
    """Recipe for one synthetic graph.

    model-specific fields: ER uses ``p`` (edge probability); BA uses
    ``attach`` (edges per new vertex); WS uses ``ring_k`` (even ring degree)
    and ``rewire`` (rewiring probability); "special" interprets ``n`` as the
    planted independent-set size and uses ``surplus`` (extra clique vertices).
    """

    model: str
    n: int
    seed: int = 0
    p: float | None = None
    attach: int | None = None
    ring_k: int | None = None
    rewire: float | None = None
    surplus: int | None = None

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise GraphError(f"unknown generator model {self.model!r}")
        if self.n <= 0:
            raise GraphError("n must be positive")
        if self.model == ER:
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise GraphError("er requires edge probability p in [0,1]")
        elif self.model == BA:
            if self.attach is None or self.attach < 1:
                raise GraphError("ba requires attach >= 1")
            if self.attach >= self.n:
                raise GraphError("ba requires attach < n")
        elif self.model == WS:
            if self.ring_k is None or self.ring_k < 2 or self.ring_k % 2:
                raise GraphError("ws requires an even ring_k >= 2")
            if self.ring_k >= self.n:
                raise GraphError("ws requires ring_k < n")
            if self.rewire is None or not 0.0 <= self.rewire <= 1.0:
                raise GraphError("ws requires rewire probability in [0,1]")
        elif self.model == SPECIAL:
            if self.surplus is None or self.surplus < 0:
                raise GraphError("special requires surplus >= 0")


def generate(spec: GenSpec) -> Graph:
    """Produce the graph described by ``spec``; deterministic per seed."""
    rng = random.Random(spec.seed)
    if spec.model == ER:
        return erdos_renyi(spec.n, spec.p, rng)
    if spec.model == BA:
        return barabasi_albert(spec.n, spec.attach, rng)
    if spec.model == WS:
        return watts_strogatz(spec.n, spec.ring_k, spec.rewire, rng)
    return special_graph(spec.n, spec.surplus, rng)


def erdos_renyi(n: int, p: float, rng: random.Random) -> Graph:
    """G(n, p): each vertex pair is an edge independently with probability p."""
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return build_graph(n, edges)


def barabasi_albert(n: int, attach: int, rng: random.Random) -> Graph:
    """Preferential attachment starting from a clique on ``attach`` vertices.

    Each new vertex connects to ``attach`` distinct existing vertices chosen
    proportionally to degree (uniformly while all degrees are zero).
    """
    edges = [(u, v) for u in range(attach) for v in range(u + 1, attach)]
    # one entry per endpoint, so sampling from it is degree-proportional
    endpoints: list[int] = [u for e in edges for u in e]
    for t in range(attach, n):
        chosen: set[int] = set()
        while len(chosen) < attach:
            if endpoints:
                chosen.add(endpoints[rng.randrange(len(endpoints))])
            else:
                chosen.add(rng.randrange(t))
        for u in chosen:
            edges.append((u, t))
            endpoints.extend((u, t))
    return build_graph(n, edges)


def watts_strogatz(n: int, ring_k: int, rewire: float, rng: random.Random) -> Graph:
    """Ring lattice (ring_k/2 neighbors per side) with per-edge rewiring."""
    half = ring_k // 2
    adj: list[set[int]] = [set() for _ in range(n)]
    for offset in range(1, half + 1):
        for u in range(n):
            v = (u + offset) % n
            adj[u].add(v)
            adj[v].add(u)
    for offset in range(1, half + 1):
        for u in range(n):
            v = (u + offset) % n
            if rng.random() >= rewire:
                continue
            if len(adj[u]) >= n - 1:
                continue  # no free target left
            w = rng.randrange(n)
            while w == u or w in adj[u]:
                w = rng.randrange(n)
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    return build_graph(n, [(u, v) for u in range(n) for v in adj[u] if u < v])


def special_graph(n: int, surplus: int, rng: random.Random) -> Graph:
    """Greedy-adversarial family: two low-degree vertices attached to an
    independent core of size ``n``, the core fully joined to a clique of size
    ``n + surplus``. The optimum independent set is the core; degree-greedy
    selection finds only 3 vertices.

    Built on canonical ids, then relabeled by a seeded permutation so that
    different seeds give differently-labeled instances.
    """
    core = list(range(2, 2 + n))
    clique = list(range(2 + n, 2 + 2 * n + surplus))
    edges: list[tuple[int, int]] = []
    for i in core:
        edges.append((0, i))
        edges.append((1, i))
        edges.extend((i, c) for c in clique)
    edges.extend(
        (clique[a], clique[b]) for a in range(len(clique)) for b in range(a + 1, len(clique))
    )
    g = build_graph(2 + 2 * n + surplus, edges)
    perm = list(range(g.n))
    rng.shuffle(perm)
    return relabel(g, perm)
