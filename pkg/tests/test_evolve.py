import itertools

import numpy as np
import pytest

from topiclife.evolve import (
    EvolutionEdge,
    LongevityClass,
    StageRole,
    build_graph,
    classify_longevity,
    cosine,
    group_and_longevity,
    joint_vocabulary,
    link_all_months,
    link_months,
    representation_vector,
)
from topiclife.represent import TopicRepresentation


def rep(topic_id, terms):
    return TopicRepresentation(topic_id=topic_id, terms=list(terms))


M = {i: (2021, i) for i in range(1, 13)}


def longest_branch_oracle(stages, edges):
    """Enumerate every root-to-leaf path and return the widest month span."""
    months = {s: m for s, m in stages.items()}
    succ = {s: [] for s in stages}
    has_in = {s: False for s in stages}
    for a, b in edges:
        succ[a].append(b)
        has_in[b] = True
    best = 0
    for root in stages:
        if has_in[root]:
            continue
        stack = [(root, months[root])]
        while stack:
            node, start = stack.pop()
            if not succ[node]:
                best = max(best, months[node] - start + 1)
            for nxt in succ[node]:
                stack.append((nxt, start))
    return best


class TestVectorsAndCosine:
    def test_representation_vector_layout(self):
        vocab = {"a": 0, "b": 1}
        v = representation_vector(rep(0, [("a", 0.5)]), vocab)
        assert v.tolist() == [0.5, 0.0]

    def test_disjoint_reps_orthogonal(self):
        r1, r2 = rep(0, [("a", 1.0)]), rep(1, [("b", 1.0)])
        vocab = joint_vocabulary([r1], [r2])
        assert cosine(representation_vector(r1, vocab), representation_vector(r2, vocab)) == 0.0

    def test_identical_reps_cosine_one(self):
        r = rep(0, [("a", 0.3), ("b", 0.7)])
        vocab = joint_vocabulary([r])
        v = representation_vector(r, vocab)
        assert cosine(v, v) == pytest.approx(1.0)

    def test_hand_value(self):
        assert cosine(np.array([1.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0])) == pytest.approx(
            1 / np.sqrt(2)
        )

    def test_zero_vector_convention(self):
        assert cosine(np.zeros(3), np.ones(3)) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            cosine(np.ones(2), np.ones(3))


class TestLinkMonths:
    def test_single_strong_edge(self):
        edges = link_months(M[1], [rep(0, [("a", 1.0)])], M[2], [rep(0, [("a", 0.9), ("b", 0.4)])])
        assert len(edges) == 1
        assert edges[0].strong

    def test_split_kept_by_best_predecessor(self):
        reps_a = [rep(0, [("x", 1.0), ("y", 0.5)])]
        reps_b = [rep(0, [("x", 1.0)]), rep(1, [("x", 0.3), ("y", 1.0)])]
        edges = link_months(M[1], reps_a, M[2], reps_b)
        targets = {e.to_topic[1] for e in edges}
        assert targets == {0, 1}

    def test_zero_similarity_excluded_by_default(self):
        edges = link_months(M[1], [rep(0, [("a", 1.0)])], M[2], [rep(0, [("b", 1.0)])])
        assert edges == []

    def test_include_zero_flag(self):
        edges = link_months(
            M[1], [rep(0, [("a", 1.0)])], M[2], [rep(0, [("b", 1.0)])], include_zero=True
        )
        assert len(edges) == 1
        assert edges[0].similarity == 0.0

    def test_threshold_filters(self):
        reps_a = [rep(0, [("a", 1.0), ("b", 1.0)])]
        reps_b = [rep(0, [("a", 1.0)])]
        assert link_months(M[1], reps_a, M[2], reps_b, theta_link=0.9) == []
        assert len(link_months(M[1], reps_a, M[2], reps_b, theta_link=0.5)) == 1


class TestBuildGraph:
    def test_isolated_topic_is_emergence(self):
        graph = build_graph({M[1]: [0]}, [])
        assert graph.stages[0].role is StageRole.EMERGENCE
        groups = group_and_longevity(graph)
        assert groups[0].longevity_months == 1

    def test_chain_roles(self):
        edges = [
            EvolutionEdge((M[1], 0), (M[2], 0), 0.8),
            EvolutionEdge((M[2], 0), (M[3], 0), 0.7),
        ]
        graph = build_graph({M[1]: [0], M[2]: [0], M[3]: [0]}, edges)
        roles = [s.role for s in graph.stages]
        assert roles == [StageRole.EMERGENCE, StageRole.STAGNATION, StageRole.DISAPPEARANCE]

    def test_merge_has_in_degree_two(self):
        edges = [
            EvolutionEdge((M[1], 0), (M[2], 0), 0.8),
            EvolutionEdge((M[2], 0), (M[3], 0), 0.8),
            EvolutionEdge((M[3], 0), (M[4], 0), 0.6),
            EvolutionEdge((M[3], 1), (M[4], 0), 0.55),
        ]
        graph = build_graph({M[1]: [0], M[2]: [0], M[3]: [0, 1], M[4]: [0]}, edges)
        merged_stage = graph.stage_by_topic[(M[4], 0)]
        in_deg = sum(1 for e in graph.edges if e.to_stage == merged_stage)
        assert in_deg == 2

    def test_unknown_topic_rejected(self):
        with pytest.raises(ValueError):
            build_graph({M[1]: [0]}, [EvolutionEdge((M[1], 0), (M[2], 0), 0.5)])

    def test_stage_ids_unique(self):
        edges = [EvolutionEdge((M[1], 0), (M[2], 1), 0.9)]
        graph = build_graph({M[1]: [0, 1], M[2]: [0, 1]}, edges)
        ids = [s.stage_id for s in graph.stages]
        assert len(ids) == len(set(ids))


class TestScenarios:
    """The four canonical lifecycle shapes: short chain, gapped chain,
    split, and merge."""

    def test_short_chain_longevity_two(self):
        edges = [EvolutionEdge((M[1], 0), (M[2], 0), 0.9)]
        graph = build_graph({M[1]: [0], M[2]: [0]}, edges)
        (group,) = group_and_longevity(graph)
        assert group.longevity_months == 2
        roles = {s.stage_id: s.role for s in graph.stages}
        assert roles["A1"] is StageRole.EMERGENCE
        assert roles["A2"] is StageRole.DISAPPEARANCE

    def test_gapped_chain_longevity_four(self):
        # Three stages from January to April; the topic skips March.
        edges = [
            EvolutionEdge((M[1], 0), (M[2], 0), 0.8),
            EvolutionEdge((M[2], 0), (M[4], 0), 0.6),
        ]
        graph = build_graph({M[1]: [0], M[2]: [0], M[4]: [0]}, edges)
        (group,) = group_and_longevity(graph)
        assert group.longevity_months == 4
        assert len(group.stage_ids) == 3
        roles = [s.role for s in graph.stages]
        assert roles == [StageRole.EMERGENCE, StageRole.STAGNATION, StageRole.DISAPPEARANCE]

    def test_split_longest_branch_wins(self):
        edges = [
            EvolutionEdge((M[1], 0), (M[2], 0), 0.9),
            EvolutionEdge((M[1], 0), (M[2], 1), 0.6),
            EvolutionEdge((M[2], 0), (M[3], 0), 0.8),
            EvolutionEdge((M[3], 0), (M[4], 0), 0.7),
        ]
        graph = build_graph({M[1]: [0], M[2]: [0, 1], M[3]: [0], M[4]: [0]}, edges)
        (group,) = group_and_longevity(graph)
        assert group.longevity_months == 4
        split_stage = graph.stage_by_topic[(M[1], 0)]
        out_deg = sum(1 for e in graph.edges if e.from_stage == split_stage)
        assert out_deg == 2

    def test_merge_extends_longevity_to_four(self):
        edges = [
            EvolutionEdge((M[1], 0), (M[2], 0), 0.9),
            EvolutionEdge((M[2], 0), (M[3], 0), 0.8),
            EvolutionEdge((M[3], 0), (M[4], 0), 0.7),
            EvolutionEdge((M[3], 1), (M[4], 0), 0.6),
        ]
        graph = build_graph({M[1]: [0], M[2]: [0], M[3]: [0, 1], M[4]: [0]}, edges)
        (group,) = group_and_longevity(graph)
        assert group.longevity_months == 4
        # The stage that merges in is an emergence of its own.
        side_root = graph.stage_by_topic[(M[3], 1)]
        role = next(s.role for s in graph.stages if s.stage_id == side_root)
        assert role is StageRole.EMERGENCE


class TestClassifyLongevity:
    @pytest.mark.parametrize(
        "months,expected",
        [(1, "short"), (2, "short"), (3, "short"), (4, "short"),
         (5, "medium"), (6, "medium"),
         (7, "high"), (8, "high"), (9, "high"), (10, "high"), (11, "high"), (12, "high")],
    )
    def test_thresholds(self, months, expected):
        assert classify_longevity(months) is LongevityClass(expected)

    def test_zero_invalid(self):
        with pytest.raises(ValueError):
            classify_longevity(0)


class TestGraphProperties:
    @staticmethod
    def random_graph(rng):
        monthly = {}
        stage_months = {}
        for month_idx in range(1, 6):
            n_topics = int(rng.integers(1, 4))
            monthly[M[month_idx]] = list(range(n_topics))
            for t in range(n_topics):
                stage_months[(month_idx, t)] = month_idx
        edges = []
        for month_idx in range(1, 5):
            for a in monthly[M[month_idx]]:
                for b in monthly[M[month_idx + 1]]:
                    if rng.random() < 0.35:
                        edges.append(
                            EvolutionEdge((M[month_idx], a), (M[month_idx + 1], b), float(rng.random()))
                        )
        return monthly, edges

    def test_groups_partition_stages(self):
        rng = np.random.default_rng(20)
        for _ in range(25):
            monthly, edges = self.random_graph(rng)
            graph = build_graph(monthly, edges)
            groups = group_and_longevity(graph)
            seen = list(itertools.chain.from_iterable(g.stage_ids for g in groups))
            assert sorted(seen) == sorted(s.stage_id for s in graph.stages)

    def test_longevity_bounds(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            monthly, edges = self.random_graph(rng)
            groups = group_and_longevity(build_graph(monthly, edges))
            for g in groups:
                assert 1 <= g.longevity_months <= 5

    def test_longest_branch_matches_oracle(self):
        rng = np.random.default_rng(22)
        for _ in range(40):
            monthly, edges = self.random_graph(rng)
            graph = build_graph(monthly, edges)
            groups = group_and_longevity(graph)
            month_of = {s.stage_id: s.month_key[1] for s in graph.stages}
            for g in groups:
                stages = {sid: month_of[sid] for sid in g.stage_ids}
                group_edges = [
                    (e.from_stage, e.to_stage) for e in graph.edges if e.from_stage in stages
                ]
                assert g.longevity_months == longest_branch_oracle(stages, group_edges)

    def test_strong_filter_never_extends_longevity(self):
        rng = np.random.default_rng(23)
        for _ in range(25):
            monthly, edges = self.random_graph(rng)
            full = group_and_longevity(build_graph(monthly, edges))
            letter_of = {}
            graph = build_graph(monthly, edges)
            for s in graph.stages:
                letter_of[(s.month_key, s.topic_id)] = s.letter
            full_longevity = {g.letter: g.longevity_months for g in full}
            strong_edges = [
                EvolutionEdge(e.from_topic, e.to_topic, e.similarity)
                for e in edges
                if e.similarity > 0.5
            ]
            filtered_graph = build_graph(monthly, strong_edges)
            for g in group_and_longevity(filtered_graph):
                old_letters = {
                    letter_of[(s.month_key, s.topic_id)]
                    for s in filtered_graph.stages
                    if s.stage_id in set(g.stage_ids)
                }
                assert g.longevity_months <= max(full_longevity[l] for l in old_letters)

    def test_topic_id_permutation_invariance(self):
        monthly = {M[1]: [0, 1], M[2]: [0, 1]}
        edges = [EvolutionEdge((M[1], 0), (M[2], 1), 0.9)]
        base = group_and_longevity(build_graph(monthly, edges))
        remapped_edges = [EvolutionEdge((M[1], 1), (M[2], 0), 0.9)]
        swapped = group_and_longevity(build_graph(monthly, remapped_edges))
        assert sorted(g.longevity_months for g in base) == sorted(
            g.longevity_months for g in swapped
        )


class TestLinkAllMonths:
    def test_consecutive_only_by_default(self):
        reps = {
            M[1]: [rep(0, [("a", 1.0)])],
            M[3]: [rep(0, [("a", 1.0)])],
        }
        assert link_all_months(reps) == []

    def test_gap_tolerance_bridges(self):
        reps = {
            M[1]: [rep(0, [("a", 1.0)])],
            M[3]: [rep(0, [("a", 1.0)])],
        }
        edges = link_all_months(reps, gap_tolerance=1)
        assert len(edges) == 1
        assert edges[0].from_topic == (M[1], 0)
        assert edges[0].to_topic == (M[3], 0)

    def test_gap_link_only_for_unlinked_stages(self):
        reps = {
            M[1]: [rep(0, [("a", 1.0)])],
            M[2]: [rep(0, [("a", 1.0)])],
            M[3]: [rep(0, [("a", 1.0)])],
        }
        edges = link_all_months(reps, gap_tolerance=1)
        spans = sorted((e.from_topic[0][1], e.to_topic[0][1]) for e in edges)
        assert spans == [(1, 2), (2, 3)]
