"""Comparator-guided recursive solvers for MIS and MVC, plus roll-out
estimators.

A comparator is any total function (g0, g1) -> {0, 1}; 0 keeps the first
branch. The solvers are valid for arbitrary comparators: the MIS recursion
always ends in an independent set of the original graph, and the MVC
recursion (with its copy-vertex gadgets) always ends in a vertex cover. With
an exact comparator both are optimal on every run.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Callable

from .classic import exact_mis_size, exact_mvc_size, greedy_mis
from .graph import (
    INDEPENDENT_SET,
    VERTEX_COVER,
    Graph,
    GraphError,
    VertexSet,
    build_graph,
    remove_neighbors,
    remove_vertex,
)
from .net import CmpParams, score_graph

Comparator = Callable[[Graph, Graph], int]


def derive_seed(seed: int, *parts: int | str) -> int:
    """Stable 64-bit stream seed for (seed, parts); independent-ish streams
    for roll-outs and workers."""
    h = hashlib.blake2b(digest_size=8)
    h.update(repr((seed,) + parts).encode())
    return int.from_bytes(h.digest(), "little")


_SCORE_CACHE_LIMIT = 200_000


def _cached_scorer(params: CmpParams) -> Callable[[Graph], float]:
    """Parameters are fixed for the closure's lifetime, so logits can be
    memoized; recursion tails revisit the same small subgraphs constantly."""
    cache: dict[Graph, float] = {}

    def score(g: Graph) -> float:
        logit = cache.get(g)
        if logit is None:
            logit = score_graph(params, g)[0]
            if len(cache) >= _SCORE_CACHE_LIMIT:
                cache.clear()
            cache[g] = logit
        return logit

    return score


def learned_mis_comparator(params: CmpParams) -> Comparator:
    """Keep the branch the scorer ranks at least as high; ties keep branch 0."""
    score = _cached_scorer(params)

    def compare(g0: Graph, g1: Graph) -> int:
        return 1 if score(g0) < score(g1) else 0

    return compare


def learned_mvc_comparator(params: CmpParams) -> Comparator:
    """Minimization flips the test: keep branch 0 unless it scores strictly higher."""
    score = _cached_scorer(params)

    def compare(g0: Graph, g1: Graph) -> int:
        return 1 if score(g0) > score(g1) else 0

    return compare


def oracle_mis_comparator() -> Comparator:
    def compare(g0: Graph, g1: Graph) -> int:
        return 1 if exact_mis_size(g0) < exact_mis_size(g1) else 0

    return compare


def oracle_mvc_comparator() -> Comparator:
    def compare(g0: Graph, g1: Graph) -> int:
        return 1 if exact_mvc_size(g0) > exact_mvc_size(g1) else 0

    return compare


def random_comparator(seed: int) -> Comparator:
    """Seeded fair coin; the sanity-check baseline."""
    rng = random.Random(seed)

    def compare(g0: Graph, g1: Graph) -> int:
        return rng.randrange(2)

    return compare


@dataclass(frozen=True)
class RecursionStep:
    """One branching decision: the graph it was made on, the picked vertex
    (local and original ids), the two candidate subgraphs, and the choice."""

    graph: Graph
    vertex: int
    vertex_original: int
    g0: Graph
    g1: Graph
    choice: int


@dataclass
class Trajectory:
    steps: list[RecursionStep] = field(default_factory=list)
    terminal_graph: Graph | None = None
    result: VertexSet | None = None

    def to_lines(self) -> list[str]:
        """One step per line, for debugging dumps."""
        lines = []
        for i, s in enumerate(self.steps):
            lines.append(
                f"step={i} n={s.graph.n} m={s.graph.m} v={s.vertex} orig={s.vertex_original}"
                f" choice={s.choice} g0=({s.g0.n},{s.g0.m}) g1=({s.g1.n},{s.g1.m})"
            )
        return lines


def solve_mis(g: Graph, comparator: Comparator, seed: int) -> tuple[VertexSet, Trajectory]:
    """Recursive MIS: while edges remain, pick a random vertex v of positive
    degree, compare (g minus v) against (g minus neighbors of v), and keep the
    winner. The surviving vertices, mapped back to original ids, are always an
    independent set of ``g``.
    """
    rng = random.Random(seed)
    cur = g
    to_original = list(range(g.n))
    traj = Trajectory()
    while cur.m > 0:
        candidates = [v for v in range(cur.n) if cur.degree(v) > 0]
        v = candidates[rng.randrange(len(candidates))]
        g0, map0 = remove_vertex(cur, v)
        g1, map1 = remove_neighbors(cur, v)
        choice = 1 if comparator(g0, g1) else 0
        traj.steps.append(RecursionStep(cur, v, to_original[v], g0, g1, choice))
        nxt, mapping = (g0, map0) if choice == 0 else (g1, map1)
        relabeled = [0] * nxt.n
        for old, new in mapping.items():
            relabeled[new] = to_original[old]
        cur, to_original = nxt, relabeled
    members = frozenset(to_original)
    result = VertexSet(members, INDEPENDENT_SET)
    traj.terminal_graph = cur
    traj.result = result
    return result, traj


@dataclass(frozen=True)
class MvcGadgets:
    """The two MVC branch graphs for a vertex v, with bookkeeping.

    ``g0`` drops v, clears every edge incident to a neighbor of v, and gives
    each neighbor u a pendant copy u' (edge u'-u): the branch where all
    neighbors of v join the cover. ``g1`` keeps all vertices, clears the edges
    at v, and adds a pendant copy v': the branch where v itself joins.

    ``*_source[i]`` is the vertex of the input graph that vertex i stands
    for; ``*_is_copy[i]`` marks the pendant copies.
    """

    g0: Graph
    g0_source: tuple[int, ...]
    g0_is_copy: tuple[bool, ...]
    g1: Graph
    g1_source: tuple[int, ...]
    g1_is_copy: tuple[bool, ...]


def build_mvc_gadgets(g: Graph, v: int) -> MvcGadgets:
    if not 0 <= v < g.n:
        raise GraphError(f"vertex {v} out of range for {g.n} vertices")
    neigh = g.adjacency[v]
    if not neigh:
        raise GraphError(f"vertex {v} is isolated; the MVC branch step needs degree >= 1")
    neigh_set = set(neigh)

    keep = [u for u in range(g.n) if u != v]
    old_to_new = {old: new for new, old in enumerate(keep)}
    base = len(keep)
    edges0 = [
        (old_to_new[a], old_to_new[b])
        for a, b in g.edges()
        if a != v and b != v and a not in neigh_set and b not in neigh_set
    ]
    source0 = list(keep)
    copy0 = [False] * base
    for i, u in enumerate(neigh):
        edges0.append((old_to_new[u], base + i))
        source0.append(u)
        copy0.append(True)
    g0 = build_graph(base + len(neigh), edges0)

    edges1 = [(a, b) for a, b in g.edges() if a != v and b != v]
    edges1.append((v, g.n))
    g1 = build_graph(g.n + 1, edges1)
    source1 = list(range(g.n)) + [v]
    copy1 = [False] * g.n + [True]

    return MvcGadgets(g0, tuple(source0), tuple(copy0), g1, tuple(source1), tuple(copy1))


def solve_mvc(g: Graph, comparator: Comparator, seed: int) -> tuple[VertexSet, Trajectory]:
    """Recursive MVC via the copy-vertex gadgets.

    Base case: when every degree is <= 1, the graph is isolated vertices and
    isolated edges; the cover takes one endpoint per edge (preferring an
    original vertex over a copy, then the smaller original id). Otherwise a
    random vertex of positive degree is picked and the comparator chooses
    between its two gadget branches (0 keeps g0, i.e. the branch whose cover
    is estimated no larger).
    """
    rng = random.Random(seed)
    cur = g
    source = list(range(g.n))
    is_copy = [False] * g.n
    traj = Trajectory()
    while cur.max_degree() >= 2:
        candidates = [v for v in range(cur.n) if cur.degree(v) >= 1]
        v = candidates[rng.randrange(len(candidates))]
        gad = build_mvc_gadgets(cur, v)
        choice = 1 if comparator(gad.g0, gad.g1) else 0
        traj.steps.append(RecursionStep(cur, v, source[v], gad.g0, gad.g1, choice))
        gsel, sel_source, sel_copy = (
            (gad.g0, gad.g0_source, gad.g0_is_copy)
            if choice == 0
            else (gad.g1, gad.g1_source, gad.g1_is_copy)
        )
        source = [source[sel_source[i]] for i in range(gsel.n)]
        is_copy = [sel_copy[i] or is_copy[sel_source[i]] for i in range(gsel.n)]
        cur = gsel
    cover: set[int] = set()
    for x, y in cur.edges():
        picked = min(x, y, key=lambda t: (is_copy[t], source[t], t))
        cover.add(source[picked])
    result = VertexSet(frozenset(cover), VERTEX_COVER)
    traj.terminal_graph = cur
    traj.result = result
    return result, traj


def rollout_estimate(g: Graph, comparator: Comparator, num_rollouts: int, seed: int) -> int:
    """Best independent-set size over ``num_rollouts`` independent solver runs
    (0 when no roll-outs are requested)."""
    best = 0
    for i in range(num_rollouts):
        vs, _ = solve_mis(g, comparator, derive_seed(seed, "rollout", i))
        best = max(best, len(vs))
    return best


def mixed_estimate(g: Graph, comparator: Comparator, num_rollouts: int, seed: int) -> int:
    """Roll-out estimate floored by the degree-greedy heuristic."""
    return max(len(greedy_mis(g)), rollout_estimate(g, comparator, num_rollouts, seed))
