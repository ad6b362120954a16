"""Meaning graphs and the fixtures hypothesis tests are built from.

A meaning graph is the hidden ground truth: an undirected graph over
concepts, optionally labeled with entity strings when ingested from a
triples file. This module generates them (Erdos-Renyi), loads them from
TSV triples, screens out degenerate parameter regimes, and picks the node
pairs (exact-distance pairs, disconnected pairs, cut pairs) that the
estimation and spectral layers consume.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .graph import (
    UNREACHABLE,
    Graph,
    _bfs_levels,
    ball_bound,
    bfs_distance,
    components,
    min_cut,
)
from .rng import STREAM_ER, STREAM_PAIR_AT_DISTANCE, STREAM_PAIR_DISCONNECTED, index_to_pair, pair_count, skip_sample, stream

if TYPE_CHECKING:
    from .sampler import SampleParams

log = logging.getLogger(__name__)


class NoSuchPair:
    """Sentinel: the requested pair does not exist in this graph."""

    _instance = None

    def __new__(cls) -> "NoSuchPair":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NO_SUCH_PAIR"

    def __reduce__(self):
        return (NoSuchPair, ())


NO_SUCH_PAIR = NoSuchPair()


class TriplesFormatError(ValueError):
    """Raised for a malformed line in a triples TSV file."""


@dataclass(frozen=True)
class MeaningGraph:
    """A meaning graph plus optional per-node entity labels."""

    graph: Graph
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.labels is not None:
            if len(self.labels) != self.graph.n:
                raise ValueError(
                    f"{len(self.labels)} labels for {self.graph.n} nodes"
                )
            if len(set(self.labels)) != len(self.labels):
                raise ValueError("labels must be unique per node")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def edge_count(self) -> int:
        return self.graph.edge_count


@dataclass(frozen=True)
class CutPair:
    """Two meaning graphs that differ exactly by a minimum (m, m') cut.

    ``g`` has m at finite distance d from m_prime; ``g_prime`` is ``g``
    with the cut edges removed, so the pair is disconnected there. This is
    the matched world pair the spectral closeness experiment compares.
    """

    g: MeaningGraph
    g_prime: MeaningGraph
    m: int
    m_prime: int
    cut: tuple[tuple[int, int], ...]
    d: int

    def __post_init__(self):
        if bfs_distance(self.g.graph, self.m, self.m_prime) != self.d:
            raise ValueError("stored distance does not match g")
        if bfs_distance(self.g_prime.graph, self.m, self.m_prime) is not UNREACHABLE:
            raise ValueError("pair still connected after cut removal")
        removed = set(self.cut)
        expect = [e for e in self.g.graph.edges() if e not in removed]
        if list(self.g_prime.graph.edges()) != expect:
            raise ValueError("g_prime edge set is not g minus the cut")


@dataclass(frozen=True)
class ConditionCheck:
    passed: bool
    message: str


@dataclass(frozen=True)
class NontrivialityReport:
    """Finite-instance screens against regimes where testing is degenerate.

    Each condition is a cheap surrogate for one way the problem collapses:
    no noise at all, perfectly faithful channels, noise drowning signal,
    balls covering the whole graph, or a graph too sparse to mean anything.
    """

    nonzero_noise: ConditionCheck
    incomplete_information: ConditionCheck
    noise_subordinate: ConditionCheck
    ball_small: ConditionCheck
    enough_edges: ConditionCheck

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self._conditions())

    def _conditions(self) -> tuple[ConditionCheck, ...]:
        return (
            self.nonzero_noise,
            self.incomplete_information,
            self.noise_subordinate,
            self.ball_small,
            self.enough_edges,
        )

    def render(self) -> str:
        names = (
            "nonzero-noise",
            "incomplete-information",
            "noise-subordinate",
            "ball-small",
            "enough-edges",
        )
        lines = []
        for name, cond in zip(names, self._conditions()):
            flag = "pass" if cond.passed else "FAIL"
            lines.append(f"{name:24s} {flag}  {cond.message}")
        lines.append(f"{'overall':24s} {'pass' if self.overall else 'FAIL'}")
        return "\n".join(lines)


def gen_er(n: int, p: float, seed: int) -> MeaningGraph:
    """Erdos-Renyi G(n, p) meaning graph, deterministic under seed.

    Edges are drawn by geometric skip-sampling over the unordered-pair
    index space, so runtime is O(n + expected edges) rather than O(n^2).
    """
    if n < 1:
        raise ValueError(f"need at least one node, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability {p!r} outside [0, 1]")
    rng = stream(seed, STREAM_ER)
    hits = skip_sample(rng, pair_count(n), p)
    us, vs = index_to_pair(hits, n)
    return MeaningGraph(Graph(n, zip(us.tolist(), vs.tolist())))


def load_triples(path, relation_prefix: str) -> MeaningGraph:
    """Build a labeled meaning graph from a ``head<TAB>rel<TAB>tail`` file.

    Keeps triples whose relation starts with ``relation_prefix``. Entities
    become nodes in first-seen order; parallel and reversed duplicates
    collapse to one undirected edge; self-loop triples keep their entity
    but produce no edge. Malformed lines raise with the line number.
    """
    index: dict[str, int] = {}
    labels: list[str] = []
    edges: set[tuple[int, int]] = set()

    def node(entity: str) -> int:
        k = index.get(entity)
        if k is None:
            k = len(labels)
            index[entity] = k
            labels.append(entity)
        return k

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise TriplesFormatError(
                    f"{path}:{lineno}: expected head<TAB>relation<TAB>tail, got {line!r}"
                )
            head, rel, tail = fields
            if not rel.startswith(relation_prefix):
                continue
            u, v = node(head), node(tail)
            if u != v:
                edges.add((min(u, v), max(u, v)))
    return MeaningGraph(Graph(len(labels), sorted(edges)), tuple(labels))


def check_nontrivial(gm: MeaningGraph, params: "SampleParams", d: int) -> NontrivialityReport:
    """Screen a (graph, parameters, distance) instance for degeneracy.

    Returns a report, never raises: callers decide whether a failed screen
    is a hard error (the CLI does, unless told otherwise).
    """
    if d < 1:
        raise ValueError(f"distance must be positive, got {d}")
    p_plus, p_minus = params.p_plus, params.p_minus
    eps_plus, eps_minus = params.eps_plus, params.eps_minus
    n = gm.n

    c1 = ConditionCheck(
        p_minus > 0 and eps_minus > 0 and eps_plus > 0,
        f"p_minus={p_minus:g}, eps_minus={eps_minus:g}, eps_plus={eps_plus:g} (all must be > 0)",
    )
    c2 = ConditionCheck(p_plus < 1, f"p_plus={p_plus:g} (must be < 1)")
    c3 = ConditionCheck(
        p_minus <= p_plus / 10 and eps_plus < 0.5 and p_plus > 0.5,
        f"p_minus={p_minus:g} vs p_plus/10={p_plus / 10:g}, eps_plus={eps_plus:g} < 0.5, p_plus={p_plus:g} > 0.5",
    )
    ball = ball_bound(gm.graph, d)
    c4 = ConditionCheck(
        ball <= n / 4,
        f"ball_bound(d={d})={ball} vs n/4={n / 4:g}",
    )
    need = math.ceil(math.log(n)) if n > 0 else 0
    c5 = ConditionCheck(
        gm.edge_count >= need,
        f"edges={gm.edge_count} vs ceil(ln n)={need}",
    )
    return NontrivialityReport(c1, c2, c3, c4, c5)


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return stream(seed, STREAM_PAIR_AT_DISTANCE)


def pick_pair_at_distance(
    gm: MeaningGraph, d: int, seed, max_attempts: int | None = None
) -> tuple[int, int] | NoSuchPair:
    """Uniformly sample an ordered node pair at exact distance d.

    Rejection over uniformly drawn (anchor, target) pairs keeps the sample
    unbiased; after ``max_attempts`` misses (default 10n) an exhaustive
    scan either settles the draw or proves no such pair exists.
    ``seed`` may be an int or a Generator to embed in a caller's stream.
    """
    if d < 1:
        raise ValueError(f"distance must be positive, got {d}")
    g = gm.graph
    n = g.n
    if n < 2:
        return NO_SUCH_PAIR
    rng = _as_rng(seed)
    attempts = 10 * n if max_attempts is None else max_attempts
    for _ in range(attempts):
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        if u == v:
            continue
        if bfs_distance(g, u, v, cap=d) == d:
            return (u, v)
    pairs: list[tuple[int, int]] = []
    for u in range(n):
        levels = _bfs_levels(g, u, cap=d)
        pairs.extend((u, v) for v in range(n) if levels[v] == d)
    if not pairs:
        return NO_SUCH_PAIR
    return pairs[int(rng.integers(len(pairs)))]


def pick_disconnected_pair(gm: MeaningGraph, seed) -> tuple[int, int] | NoSuchPair:
    """Uniformly sample an ordered pair of nodes in different components.

    Exact weighted sampling over components, no rejection: the anchor is
    drawn with weight (n - size of its component), the partner uniformly
    from the other components.
    """
    g = gm.graph
    n = g.n
    comps = components(g)
    if len(comps) < 2:
        return NO_SUCH_PAIR
    if isinstance(seed, np.random.Generator):
        rng = seed
    else:
        rng = stream(seed, STREAM_PAIR_DISCONNECTED)
    comp_of = [0] * n
    for ci, comp in enumerate(comps):
        for u in comp:
            comp_of[u] = ci
    sizes = [len(c) for c in comps]
    weights = np.array([n - sizes[comp_of[u]] for u in range(n)], dtype=np.int64)
    total = int(weights.sum())
    r = int(rng.integers(total))
    u = int(np.searchsorted(np.cumsum(weights), r, side="right"))
    k = int(rng.integers(n - sizes[comp_of[u]]))
    for v in range(n):
        if comp_of[v] != comp_of[u]:
            if k == 0:
                return (u, v)
            k -= 1
    raise AssertionError("unreachable: partner index exhausted")


def make_cut_pair(gm: MeaningGraph, m: int, m_prime: int) -> CutPair:
    """Build the (g, g') world pair for a connected meaning pair.

    g' is g minus a minimum (m, m') edge cut, so the pair is disconnected
    in g' while every other edge is untouched. The cut size is expected
    to stay within the 1-ball bound; larger cuts are logged, not rejected.
    """
    g = gm.graph
    d = bfs_distance(g, m, m_prime)
    if d is UNREACHABLE:
        raise ValueError(f"nodes {m} and {m_prime} are already disconnected")
    if d == 0:
        raise ValueError("cut pair endpoints must differ")
    cut = tuple(min_cut(g, m, m_prime))
    b1 = ball_bound(g, 1)
    if len(cut) > b1:
        log.warning("min cut size %d exceeds 1-ball bound %d", len(cut), b1)
    g_prime = g.remove_edges(cut)
    labels = gm.labels
    return CutPair(
        g=MeaningGraph(g, labels),
        g_prime=MeaningGraph(g_prime, labels),
        m=m,
        m_prime=m_prime,
        cut=cut,
        d=d,
    )
