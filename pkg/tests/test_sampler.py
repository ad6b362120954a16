"""Symbol-graph sampling: channels, folding, coupling, serialization."""

from __future__ import annotations

import math

import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from meaninglab.bounds import gilbert_bounds
from meaninglab.graph import Graph, components
from meaninglab.meaning import MeaningGraph, gen_er, make_cut_pair
from meaninglab.rng import pair_count
from meaninglab.sampler import (
    PairClass,
    SampleParams,
    SymbolGraph,
    count_edges_by_class,
    edge_probability,
    fold_noise,
    node_pair_connectivity,
    read_symbol_graph,
    sample_coupled,
    sample_symbol_graph,
    write_symbol_graph,
)


def params(p_plus=0.8, p_minus=0.01, eps_plus=0.2, eps_minus=0.05, lam=2, fold=False):
    return SampleParams(p_plus, p_minus, eps_plus, eps_minus, lam, fold)


# -- parameters and folding --------------------------------------------


def test_fold_noise_values():
    assert fold_noise(0.0, 0.0) == 0.0
    assert fold_noise(1.0, 0.3) == 1.0
    assert fold_noise(0.5, 0.5) == 0.75
    assert fold_noise(0.2, 0.0) == 0.2


@given(st.floats(0, 1), st.floats(0, 1))
@example(1.0, 0.599623917613144)  # p+eps-p*eps alone rounds below 1 here
def test_fold_noise_symmetric_and_bounded(p, eps):
    folded = fold_noise(p, eps)
    assert folded == fold_noise(eps, p)
    assert max(p, eps) <= folded <= 1.0


def test_params_validation():
    with pytest.raises(ValueError):
        params(p_plus=1.2)
    with pytest.raises(ValueError):
        params(lam=0)
    with pytest.raises(ValueError):
        SampleParams(0.5, 0.1, 0.1, 0.1, 2.0)  # lam must be an int


def test_effective_folds_once():
    p = params(fold=True)
    eff = p.effective()
    assert eff.p_plus == fold_noise(p.p_plus, p.eps_minus)
    assert eff.p_minus == fold_noise(p.p_minus, p.eps_minus)
    assert eff.eps_minus == 0.0
    assert eff.eps_plus == p.eps_plus
    assert not eff.fold
    assert eff.effective() == eff
    assert params(fold=False).effective() == params(fold=False)


def test_edge_probability_invariant_under_folding():
    p = params()
    for cls in PairClass:
        assert edge_probability(p, cls) == edge_probability(p.effective(), cls)
        folded = params(fold=True)
        assert edge_probability(folded.effective(), cls) == edge_probability(folded, cls)


# -- single-world sampling ---------------------------------------------


def test_identity_channel_reproduces_meaning_graph():
    # Faithful structural channel, no noise, one replica per node: the
    # symbol graph must equal the meaning graph exactly.
    gm = gen_er(60, 0.08, 7)
    sg = sample_symbol_graph(gm, SampleParams(1.0, 0.0, 1.0, 0.0, 1), seed=3)
    assert sg.graph == gm.graph
    assert sg.similarity == frozenset()
    assert sg.structural == frozenset(gm.graph.edges())


def test_replication_and_origin():
    gm = gen_er(20, 0.1, 1)
    sg = sample_symbol_graph(gm, params(lam=3), seed=5)
    assert sg.graph.n == 60
    assert sg.origin(0) == 0 and sg.origin(5) == 1 and sg.origin(59) == 19
    assert sg.origin_map() == tuple(w // 3 for w in range(60))
    assert list(sg.cluster(4)) == [12, 13, 14]
    assert sg.representative(4) == 12


def test_no_structural_edge_inside_any_cluster():
    sg = sample_symbol_graph(gen_er(40, 0.1, 2), params(lam=3), seed=9)
    for u, v in sg.structural:
        assert u // 3 != v // 3


def test_class_counts_cover_union():
    gm = gen_er(40, 0.1, 2)
    sg = sample_symbol_graph(gm, params(lam=3), seed=9)
    counts = count_edges_by_class(sg, gm)
    assert sum(counts.values()) == sg.graph.edge_count


def test_deterministic_in_seed():
    gm = gen_er(30, 0.1, 4)
    a = sample_symbol_graph(gm, params(), seed=11)
    b = sample_symbol_graph(gm, params(), seed=11)
    c = sample_symbol_graph(gm, params(), seed=12)
    assert a.graph == b.graph and a.structural == b.structural and a.similarity == b.similarity
    assert c.graph != a.graph


def test_structural_count_within_4_sigma():
    gm = gen_er(50, 0.1, 6)
    p = params(p_plus=0.7, p_minus=0.02, eps_minus=0.0, lam=2)
    e = gm.edge_count
    non = pair_count(50) - e
    slots_pos, slots_neg = e * 4, non * 4
    mean = slots_pos * 0.7 + slots_neg * 0.02
    var = slots_pos * 0.7 * 0.3 + slots_neg * 0.02 * 0.98
    total = 0
    runs = 40
    for s in range(runs):
        total += len(sample_symbol_graph(gm, p, seed=s).structural)
    assert abs(total - runs * mean) <= 4 * math.sqrt(runs * var)


def test_similarity_count_within_4_sigma():
    gm = gen_er(50, 0.1, 6)
    p = params(eps_plus=0.3, eps_minus=0.04, lam=3)
    intra_slots = 50 * 3  # C(3, 2) per cluster
    cross_slots = pair_count(50) * 9
    mean = intra_slots * 0.7 + cross_slots * 0.04
    var = intra_slots * 0.7 * 0.3 + cross_slots * 0.04 * 0.96
    total = 0
    runs = 40
    for s in range(runs):
        total += len(sample_symbol_graph(gm, p, seed=s).similarity)
    assert abs(total - runs * mean) <= 4 * math.sqrt(runs * var)


def test_folding_preserves_union_distribution():
    # Same per-class analytic probabilities either way; verify the union
    # edge totals agree with them under both modes, 4 sigma.
    gm = gen_er(30, 0.12, 8)
    base = dict(p_plus=0.7, p_minus=0.03, eps_plus=0.25, eps_minus=0.06, lam=2)
    runs = 120
    e = gm.edge_count
    non = pair_count(30) - e
    slot_counts = {
        PairClass.MEANING_EDGE: e * 4,
        PairClass.MEANING_NON_EDGE: non * 4,
        PairClass.INTRA_CLUSTER: 30,
    }
    for fold in (False, True):
        p = SampleParams(fold=fold, **base)
        totals = {c: 0 for c in PairClass}
        for s in range(runs):
            counts = count_edges_by_class(sample_symbol_graph(gm, p, seed=s), gm)
            for c in PairClass:
                totals[c] += counts[c]
        for c in PairClass:
            prob = edge_probability(p, c)
            mean = runs * slot_counts[c] * prob
            sd = math.sqrt(runs * slot_counts[c] * prob * (1 - prob))
            assert abs(totals[c] - mean) <= 4 * sd, (fold, c)


def test_folded_run_has_no_cross_similarity():
    gm = gen_er(30, 0.12, 8)
    sg = sample_symbol_graph(gm, params(eps_minus=0.1, fold=True), seed=1)
    for u, v in sg.similarity:
        assert u // sg.lam == v // sg.lam


def test_cluster_connectivity_matches_channel_probability():
    # Isolated clusters under lam=2: connected iff the one similarity
    # slot fired, so the frequency estimates 1 - eps_plus directly.
    gm = MeaningGraph(Graph(150))
    p = SampleParams(0.9, 0.0, 0.3, 0.0, 2)
    runs = 30
    connected = 0
    for s in range(runs):
        sg = sample_symbol_graph(gm, p, seed=s)
        for m in range(150):
            if sg.graph.has_edge(2 * m, 2 * m + 1):
                connected += 1
    trials = runs * 150
    mean, sd = trials * 0.7, math.sqrt(trials * 0.7 * 0.3)
    assert abs(connected - mean) <= 4 * sd


def test_cluster_connectivity_respects_gilbert_bound():
    # G(5, 0.75) clusters: empirical connectivity frequency must sit at
    # or above the closed-form lower bound minus sampling error.
    gm = MeaningGraph(Graph(80))
    p = SampleParams(0.9, 0.0, 0.25, 0.0, 5)
    runs = 25
    connected = 0
    for s in range(runs):
        sg = sample_symbol_graph(gm, p, seed=s)
        comp_of: dict[int, int] = {}
        for ci, comp in enumerate(components(sg.graph)):
            for w in comp:
                comp_of[w] = ci
        for m in range(80):
            cluster = list(sg.cluster(m))
            if len({comp_of[w] for w in cluster}) == 1:
                connected += 1
    trials = runs * 80
    frequency = connected / trials
    bound = gilbert_bounds(5, 0.75).exact
    assert frequency >= bound - 4 * math.sqrt(0.25 / trials)


def test_node_pair_connectivity():
    gm = gen_er(30, 0.1, 4)
    sg = sample_symbol_graph(gm, params(), seed=11)
    u, v = next(iter(sorted(sg.graph.edges())))
    assert node_pair_connectivity(sg, u, v)
    assert node_pair_connectivity(sg, v, u)
    with pytest.raises(ValueError):
        node_pair_connectivity(sg, 3, 3)


# -- coupled sampling ---------------------------------------------------


def cut_fixture(seed=3):
    gm = gen_er(40, 0.12, seed)
    comps = components(gm.graph)
    big = max(comps, key=len)
    return make_cut_pair(gm, big[0], big[-1])


def test_coupled_first_world_equals_plain_sample():
    cp = cut_fixture()
    p = params(p_plus=0.7, p_minus=0.05, lam=2)
    sg, _ = sample_coupled(cp, p, seed=21)
    plain = sample_symbol_graph(cp.g, p, seed=21)
    assert sg.graph == plain.graph
    assert sg.structural == plain.structural
    assert sg.similarity == plain.similarity


def test_coupled_worlds_differ_only_over_cut():
    cp = cut_fixture()
    p = params(p_plus=0.7, p_minus=0.05, lam=2)
    sg, sg_prime = sample_coupled(cp, p, seed=21)
    assert sg.similarity == sg_prime.similarity
    cut_set = set(cp.cut)
    for u, v in sg.structural ^ sg_prime.structural:
        mu, mv = u // 2, v // 2
        assert (min(mu, mv), max(mu, mv)) in cut_set


def test_coupled_monotone_when_p_minus_below_p_plus():
    cp = cut_fixture()
    sg, sg_prime = sample_coupled(cp, params(p_plus=0.7, p_minus=0.05, lam=2), seed=4)
    assert sg_prime.structural <= sg.structural


def test_coupled_cut_slot_marginal_frequency():
    # In the g' world each of the |cut|*lam^2 cut slots fires with
    # probability p_minus; check the long-run total, 4 sigma.
    cp = cut_fixture()
    p = params(p_plus=0.7, p_minus=0.15, lam=2)
    cut_set = set(cp.cut)
    slots = len(cp.cut) * 4
    runs = 250
    hits = 0
    for s in range(runs):
        _, sg_prime = sample_coupled(cp, p, seed=s)
        for u, v in sg_prime.structural:
            if (u // 2, v // 2) in cut_set:
                hits += 1
    mean = runs * slots * 0.15
    sd = math.sqrt(runs * slots * 0.15 * 0.85)
    assert abs(hits - mean) <= 4 * sd


def test_coupled_deterministic():
    cp = cut_fixture()
    a = sample_coupled(cp, params(), seed=2)
    b = sample_coupled(cp, params(), seed=2)
    assert a[0].graph == b[0].graph and a[1].graph == b[1].graph


# -- invariants over random instances ----------------------------------


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(2, 12),
    p_edge=st.floats(0.0, 0.6),
    lam=st.integers(1, 4),
    seed=st.integers(0, 10_000),
)
def test_sampled_graph_invariants(n, p_edge, lam, seed):
    gm = gen_er(n, p_edge, seed)
    p = SampleParams(0.8, 0.05, 0.3, 0.1, lam)
    sg = sample_symbol_graph(gm, p, seed=seed + 1)
    assert sg.graph.n == lam * n
    assert sg.structural | sg.similarity == set(sg.graph.edges())
    for u, v in sg.structural:
        assert u // lam != v // lam
    again = sample_symbol_graph(gm, p, seed=seed + 1)
    assert again.graph == sg.graph


# -- serialization ------------------------------------------------------


def test_symbol_graph_round_trip(tmp_path):
    gm = gen_er(25, 0.15, 3)
    sg = sample_symbol_graph(gm, params(lam=3), seed=17)
    path = tmp_path / "sg.tsv"
    write_symbol_graph(sg, path)
    back = read_symbol_graph(path)
    assert back == sg


def test_symbol_graph_write_is_byte_stable(tmp_path):
    sg = sample_symbol_graph(gen_er(20, 0.2, 1), params(), seed=5)
    a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    write_symbol_graph(sg, a)
    write_symbol_graph(sg, b)
    assert a.read_bytes() == b.read_bytes()


def test_dual_kind_edge_round_trip(tmp_path):
    # A cross-cluster pair can carry both kinds; both survive a round trip.
    sg = SymbolGraph(
        graph=Graph(4, [(0, 1), (0, 3)]),
        structural=frozenset({(0, 3)}),
        similarity=frozenset({(0, 1), (0, 3)}),
        lam=2,
        n_meaning=2,
        params=params(),
        seed=0,
    )
    path = tmp_path / "dual.tsv"
    write_symbol_graph(sg, path)
    text = path.read_text()
    assert "0\t3\tS\n" in text and "0\t3\tR\n" in text
    assert read_symbol_graph(path) == sg


def test_read_symbol_graph_rejects_bad_kind(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("# symbol-graph meaning-nodes=1 lambda=2 seed=0\n0\t1\tX\n")
    with pytest.raises(ValueError, match=":2"):
        read_symbol_graph(path)


def test_symbol_graph_constructor_rejects_intra_structural():
    with pytest.raises(ValueError, match="inside a cluster"):
        SymbolGraph(
            graph=Graph(4, [(0, 1)]),
            structural=frozenset({(0, 1)}),
            similarity=frozenset(),
            lam=2,
            n_meaning=2,
            params=params(),
            seed=0,
        )
