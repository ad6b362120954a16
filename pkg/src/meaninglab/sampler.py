"""Sampling observable symbol graphs from a hidden meaning graph.

Each meaning node gets ``lam`` symbol replicas. Structural edges appear
between symbols of different clusters with probability ``p_plus`` when
the underlying meaning pair is an edge and ``p_minus`` when it is not.
Similarity edges connect same-cluster symbols with probability
``1 - eps_plus`` and, as false positives, cross-cluster symbols with
probability ``eps_minus``. Downstream reasoning only ever looks at the
union of the two kinds.

The quadratic passes (``p_minus``, ``eps_minus``) use geometric
skip-sampling over the pair-slot index space, so sampling costs
O(expected edges) rather than O((lam*n)^2). Every pass draws from its own
named stream, which makes samples independent of pass order and safe to
reproduce across worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .graph import Graph
from .meaning import CutPair, MeaningGraph
from .rng import (
    STREAM_SIM_CROSS,
    STREAM_SIM_INTRA,
    STREAM_STRUCT_NEG,
    STREAM_STRUCT_POS,
    index_to_pair,
    pair_count,
    skip_sample,
    stream,
)


def fold_noise(p: float, eps: float) -> float:
    """Probability that at least one of two independent channels fires."""
    if not 0.0 <= p <= 1.0 or not 0.0 <= eps <= 1.0:
        raise ValueError(f"fold_noise arguments must be probabilities, got {p!r}, {eps!r}")
    if p == 1.0 or eps == 1.0:
        return 1.0
    # The sum form keeps eps=0 an exact identity; the clamps absorb the
    # one-ulp round-off that would otherwise leak past the endpoints.
    return min(1.0, max(p, eps, p + eps - p * eps))


@dataclass(frozen=True)
class SampleParams:
    """Channel probabilities and replication factor for one sampling run.

    With ``fold=True`` the cross-cluster similarity noise is folded into
    the structural probabilities (p -> p + eps_minus - p*eps_minus) and
    ``eps_minus`` is treated as zero; the union-graph distribution is
    unchanged, only the kind labels move.
    """

    p_plus: float
    p_minus: float
    eps_plus: float
    eps_minus: float
    lam: int
    fold: bool = False

    def __post_init__(self):
        for name in ("p_plus", "p_minus", "eps_plus", "eps_minus"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v!r} outside [0, 1]")
        if not isinstance(self.lam, int) or self.lam < 1:
            raise ValueError(f"lam must be a positive integer, got {self.lam!r}")

    def effective(self) -> "SampleParams":
        """Parameters the sampling engine actually uses."""
        if not self.fold:
            return self
        return replace(
            self,
            p_plus=fold_noise(self.p_plus, self.eps_minus),
            p_minus=fold_noise(self.p_minus, self.eps_minus),
            eps_minus=0.0,
            fold=False,
        )


class PairClass(Enum):
    """The three kinds of unordered symbol pairs the model distinguishes."""

    MEANING_EDGE = "meaning_edge"
    MEANING_NON_EDGE = "meaning_non_edge"
    INTRA_CLUSTER = "intra_cluster"


def edge_probability(params: SampleParams, pair_class: PairClass) -> float:
    """Analytic union-edge probability for one pair class.

    Invariant under folding: the structural and similarity channels for a
    cross-cluster pair combine to exactly the folded probability.
    """
    if pair_class is PairClass.MEANING_EDGE:
        return fold_noise(params.p_plus, params.eps_minus)
    if pair_class is PairClass.MEANING_NON_EDGE:
        return fold_noise(params.p_minus, params.eps_minus)
    return 1.0 - params.eps_plus


@dataclass(frozen=True)
class SymbolGraph:
    """A sampled symbol graph with its origin map and provenance.

    ``graph`` is the union of structural and similarity edges over
    ``lam * n_meaning`` nodes; symbol ``w`` descends from meaning node
    ``w // lam``. The two kind sets may overlap when both channels fire
    for the same cross-cluster pair.
    """

    graph: Graph
    structural: frozenset
    similarity: frozenset
    lam: int
    n_meaning: int
    params: SampleParams
    seed: int

    def __post_init__(self):
        if self.graph.n != self.lam * self.n_meaning:
            raise ValueError(
                f"{self.graph.n} symbol nodes but lam*n = {self.lam * self.n_meaning}"
            )
        union = self.structural | self.similarity
        if union != set(self.graph.edges()):
            raise ValueError("union of kind sets does not match the graph")
        for u, v in self.structural:
            if u // self.lam == v // self.lam:
                raise ValueError(f"structural edge ({u}, {v}) inside a cluster")

    def origin(self, w: int) -> int:
        """Meaning node this symbol descends from."""
        if not 0 <= w < self.graph.n:
            raise ValueError(f"symbol {w} out of range")
        return w // self.lam

    def origin_map(self) -> tuple[int, ...]:
        return tuple(w // self.lam for w in range(self.graph.n))

    def cluster(self, m: int) -> range:
        """Symbol replicas of meaning node m."""
        if not 0 <= m < self.n_meaning:
            raise ValueError(f"meaning node {m} out of range")
        return range(self.lam * m, self.lam * (m + 1))

    def representative(self, m: int) -> int:
        """First replica of meaning node m."""
        if not 0 <= m < self.n_meaning:
            raise ValueError(f"meaning node {m} out of range")
        return self.lam * m


def node_pair_connectivity(sg: SymbolGraph, w: int, w_prime: int) -> bool:
    """Whether two distinct symbols share an edge of either kind."""
    if w == w_prime:
        raise ValueError("symbols must be distinct")
    return sg.graph.has_edge(w, w_prime)


# -- sampling passes ----------------------------------------------------


def _edge_array(g: Graph) -> np.ndarray:
    edges = np.fromiter(
        (x for e in g.edges() for x in e), dtype=np.int64, count=2 * g.edge_count
    )
    return edges.reshape(-1, 2)


def _positive_uniforms(seed: int, n_edges: int, lam: int) -> np.ndarray:
    rng = stream(seed, STREAM_STRUCT_POS)
    return rng.random((n_edges, lam * lam))


def _slots_to_symbol_pairs(m1, m2, slot, lam):
    j1 = slot // lam
    j2 = slot % lam
    return lam * m1 + j1, lam * m2 + j2


def _negative_hits(seed: int, n: int, lam: int, p: float, stream_id: int):
    """Hit slots of a Bernoulli(p) pass over every cross-cluster slot."""
    rng = stream(seed, stream_id)
    hits = skip_sample(rng, pair_count(n) * lam * lam, p)
    pidx = hits // (lam * lam)
    slot = hits % (lam * lam)
    m1, m2 = index_to_pair(pidx, n)
    return pidx, m1, m2, slot


def _intra_mask(seed: int, n: int, lam: int, eps_plus: float):
    """Presence mask for the C(lam, 2) similarity slots of each cluster."""
    if lam < 2:
        return None, None, None
    pairs = [(a, b) for a in range(lam) for b in range(a + 1, lam)]
    rng = stream(seed, STREAM_SIM_INTRA)
    mask = rng.random((n, len(pairs))) < (1.0 - eps_plus)
    a = np.array([p[0] for p in pairs], dtype=np.int64)
    b = np.array([p[1] for p in pairs], dtype=np.int64)
    return mask, a, b


def _edge_pair_indices(g: Graph) -> np.ndarray:
    """Sorted unordered-pair indices of a graph's edges."""
    n = g.n
    out = np.fromiter(
        (u * n - u * (u + 1) // 2 + (v - u - 1) for u, v in g.edges()),
        dtype=np.int64,
        count=g.edge_count,
    )
    return out


def sample_symbol_graph(gm: MeaningGraph, params: SampleParams, seed: int) -> SymbolGraph:
    """Draw one symbol graph for ``gm`` under ``params``.

    Deterministic in ``seed``; each pair class consumes an independent
    named stream, so the same seed yields the same graph regardless of
    how the passes are scheduled.
    """
    eff = params.effective()
    n = gm.n
    lam = eff.lam
    structural: list[tuple[int, int]] = []
    similarity: list[tuple[int, int]] = []

    # Structural pass over meaning edges.
    edges = _edge_array(gm.graph)
    if len(edges):
        u = _positive_uniforms(seed, len(edges), lam)
        eidx, slot = np.nonzero(u < eff.p_plus)
        w1, w2 = _slots_to_symbol_pairs(edges[eidx, 0], edges[eidx, 1], slot, lam)
        structural.extend(zip(w1.tolist(), w2.tolist()))

    # Structural pass over meaning non-edges: sample the whole slot space
    # sparsely, then drop hits that landed on actual meaning edges.
    pidx, m1, m2, slot = _negative_hits(seed, n, lam, eff.p_minus, STREAM_STRUCT_NEG)
    if len(pidx):
        keep = ~np.isin(pidx, _edge_pair_indices(gm.graph))
        w1, w2 = _slots_to_symbol_pairs(m1[keep], m2[keep], slot[keep], lam)
        structural.extend(zip(w1.tolist(), w2.tolist()))

    # Similarity inside clusters.
    mask, a, b = _intra_mask(seed, n, lam, eff.eps_plus)
    if mask is not None:
        midx, k = np.nonzero(mask)
        w1 = lam * midx + a[k]
        w2 = lam * midx + b[k]
        similarity.extend(zip(w1.tolist(), w2.tolist()))

    # Similarity false positives across clusters (absent when folded).
    _, m1, m2, slot = _negative_hits(seed, n, lam, eff.eps_minus, STREAM_SIM_CROSS)
    if len(m1):
        w1, w2 = _slots_to_symbol_pairs(m1, m2, slot, lam)
        similarity.extend(zip(w1.tolist(), w2.tolist()))

    structural_set = frozenset(structural)
    similarity_set = frozenset(similarity)
    union = Graph(lam * n, structural_set | similarity_set)
    return SymbolGraph(
        graph=union,
        structural=structural_set,
        similarity=similarity_set,
        lam=lam,
        n_meaning=n,
        params=params,
        seed=seed,
    )


def sample_coupled(cp: CutPair, params: SampleParams, seed: int) -> tuple[SymbolGraph, SymbolGraph]:
    """Sample symbol graphs for both worlds of a cut pair, coupled.

    Every slot shares one uniform draw across the two worlds. On slots
    over cut edges the g-world compares it to p_plus and the g'-world to
    p_minus (the pair is a non-edge there); everywhere else the worlds
    are identical by construction. The first component equals
    ``sample_symbol_graph(cp.g, params, seed)`` draw for draw.
    """
    eff = params.effective()
    n = cp.g.n
    lam = eff.lam
    cut_set = set(cp.cut)

    struct_g: list[tuple[int, int]] = []
    struct_gp: list[tuple[int, int]] = []

    edges = _edge_array(cp.g.graph)
    if len(edges):
        u = _positive_uniforms(seed, len(edges), lam)
        in_cut = np.fromiter(
            ((int(e[0]), int(e[1])) in cut_set for e in edges),
            dtype=bool,
            count=len(edges),
        )
        thresh_gp = np.where(in_cut, eff.p_minus, eff.p_plus)
        eidx, slot = np.nonzero(u < eff.p_plus)
        w1, w2 = _slots_to_symbol_pairs(edges[eidx, 0], edges[eidx, 1], slot, lam)
        struct_g.extend(zip(w1.tolist(), w2.tolist()))
        eidx, slot = np.nonzero(u < thresh_gp[:, None])
        w1, w2 = _slots_to_symbol_pairs(edges[eidx, 0], edges[eidx, 1], slot, lam)
        struct_gp.extend(zip(w1.tolist(), w2.tolist()))

    pidx, m1, m2, slot = _negative_hits(seed, n, lam, eff.p_minus, STREAM_STRUCT_NEG)
    if len(pidx):
        # Cut pairs are edges of g, so this shared pass skips them for
        # both worlds; their g'-side p_minus draw happened above.
        keep = ~np.isin(pidx, _edge_pair_indices(cp.g.graph))
        w1, w2 = _slots_to_symbol_pairs(m1[keep], m2[keep], slot[keep], lam)
        shared = list(zip(w1.tolist(), w2.tolist()))
        struct_g.extend(shared)
        struct_gp.extend(shared)

    similarity: list[tuple[int, int]] = []
    mask, a, b = _intra_mask(seed, n, lam, eff.eps_plus)
    if mask is not None:
        midx, k = np.nonzero(mask)
        w1 = lam * midx + a[k]
        w2 = lam * midx + b[k]
        similarity.extend(zip(w1.tolist(), w2.tolist()))
    _, m1, m2, slot = _negative_hits(seed, n, lam, eff.eps_minus, STREAM_SIM_CROSS)
    if len(m1):
        w1, w2 = _slots_to_symbol_pairs(m1, m2, slot, lam)
        similarity.extend(zip(w1.tolist(), w2.tolist()))

    similarity_set = frozenset(similarity)

    def build(struct_list) -> SymbolGraph:
        structural_set = frozenset(struct_list)
        union = Graph(lam * n, structural_set | similarity_set)
        return SymbolGraph(
            graph=union,
            structural=structural_set,
            similarity=similarity_set,
            lam=lam,
            n_meaning=n,
            params=params,
            seed=seed,
        )

    return build(struct_g), build(struct_gp)


def count_edges_by_class(sg: SymbolGraph, gm: MeaningGraph) -> dict[PairClass, int]:
    """Union-graph edge counts split by pair class (test and audit helper)."""
    counts = {c: 0 for c in PairClass}
    for u, v in sg.graph.edges():
        mu, mv = u // sg.lam, v // sg.lam
        if mu == mv:
            counts[PairClass.INTRA_CLUSTER] += 1
        elif gm.graph.has_edge(mu, mv):
            counts[PairClass.MEANING_EDGE] += 1
        else:
            counts[PairClass.MEANING_NON_EDGE] += 1
    return counts


# -- serialization ------------------------------------------------------


def write_symbol_graph(sg: SymbolGraph, path) -> None:
    """Write the extended edge-list form with kind column and origin block.

    An edge carrying both kinds emits one ``S`` line and one ``R`` line;
    readers merge them. Output is byte-stable for a given graph.
    """
    p = sg.params
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# symbol-graph meaning-nodes={sg.n_meaning} lambda={sg.lam} seed={sg.seed}\n")
        fh.write(
            "# params"
            f" p_plus={p.p_plus!r} p_minus={p.p_minus!r}"
            f" eps_plus={p.eps_plus!r} eps_minus={p.eps_minus!r}"
            f" fold={int(p.fold)}\n"
        )
        for w in range(sg.graph.n):
            fh.write(f"#origin {w} {w // sg.lam}\n")
        for u, v in sg.graph.edges():
            if (u, v) in sg.structural:
                fh.write(f"{u}\t{v}\tS\n")
            if (u, v) in sg.similarity:
                fh.write(f"{u}\t{v}\tR\n")


def read_symbol_graph(path) -> SymbolGraph:
    """Parse a file written by :func:`write_symbol_graph`."""
    meta: dict[str, str] = {}
    par: dict[str, str] = {}
    origin: dict[int, int] = {}
    structural: set[tuple[int, int]] = set()
    similarity: set[tuple[int, int]] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#origin"):
                fields = line.split()
                if len(fields) != 3:
                    raise ValueError(f"{path}:{lineno}: bad origin line {line!r}")
                origin[int(fields[1])] = int(fields[2])
                continue
            if line.startswith("#"):
                fields = line[1:].split()
                if fields and fields[0] == "symbol-graph":
                    meta.update(f.split("=", 1) for f in fields[1:])
                elif fields and fields[0] == "params":
                    par.update(f.split("=", 1) for f in fields[1:])
                continue
            fields = line.split("\t")
            if len(fields) != 3 or fields[2] not in ("S", "R"):
                raise ValueError(f"{path}:{lineno}: expected 'u<TAB>v<TAB>S|R', got {line!r}")
            u, v = int(fields[0]), int(fields[1])
            edge = (min(u, v), max(u, v))
            (structural if fields[2] == "S" else similarity).add(edge)
    try:
        n_meaning = int(meta["meaning-nodes"])
        lam = int(meta["lambda"])
        seed = int(meta["seed"])
        params = SampleParams(
            p_plus=float(par["p_plus"]),
            p_minus=float(par["p_minus"]),
            eps_plus=float(par["eps_plus"]),
            eps_minus=float(par["eps_minus"]),
            lam=lam,
            fold=bool(int(par["fold"])),
        )
    except KeyError as missing:
        raise ValueError(f"{path}: missing header field {missing}")
    for w, m in origin.items():
        if w // lam != m:
            raise ValueError(f"{path}: origin line maps {w} to {m}, expected {w // lam}")
    union = Graph(lam * n_meaning, structural | similarity)
    return SymbolGraph(
        graph=union,
        structural=frozenset(structural),
        similarity=frozenset(similarity),
        lam=lam,
        n_meaning=n_meaning,
        params=params,
        seed=seed,
    )
