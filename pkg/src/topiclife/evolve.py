"""Cross-month topic linking, lifecycle roles and longevity.

Topics of consecutive months are compared by the cosine similarity of
their representation vectors over the joint term set. A candidate pair
(above the link threshold) becomes an edge when the target is the source's
best successor or the source is the target's best predecessor; that single
rule produces chains, splits (one to many) and mergers (many to one).

Stages take roles from their degrees: emergence (no incoming edge),
disappearance (incoming but no outgoing) and stagnation (both). Weakly
connected components form lettered groups whose longevity is the inclusive
calendar-month span of the longest root-to-leaf branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .represent import TopicRepresentation

MonthKey = tuple[int, int]
TopicKey = tuple[MonthKey, int]

STRONG_SIMILARITY = 0.5


class StageRole(str, Enum):
    EMERGENCE = "emergence"
    STAGNATION = "stagnation"
    DISAPPEARANCE = "disappearance"


class LongevityClass(str, Enum):
    HIGH = "high"
    MEDIUM = "medium"
    SHORT = "short"


@dataclass
class TopicStage:
    stage_id: str
    month_key: MonthKey
    topic_id: int
    role: StageRole

    @property
    def letter(self) -> str:
        return self.stage_id.rstrip("0123456789")


@dataclass
class EvolutionEdge:
    from_topic: TopicKey
    to_topic: TopicKey
    similarity: float
    from_stage: str = ""
    to_stage: str = ""

    @property
    def strong(self) -> bool:
        return self.similarity > STRONG_SIMILARITY


@dataclass
class TopicGroup:
    letter: str
    stage_ids: list[str]
    longevity_months: int
    longevity_class: LongevityClass


@dataclass
class EvolutionGraph:
    stages: list[TopicStage]
    edges: list[EvolutionEdge]
    stage_by_topic: dict[TopicKey, str] = field(default_factory=dict)


def month_index(month_key: MonthKey) -> int:
    return month_key[0] * 12 + (month_key[1] - 1)


def representation_vector(rep: TopicRepresentation, joint_vocab: dict[str, int]) -> np.ndarray:
    """Weights of a representation laid out over a shared term index."""
    vec = np.zeros(len(joint_vocab), dtype=np.float64)
    for term, weight in rep.terms:
        idx = joint_vocab.get(term)
        if idx is not None:
            vec[idx] = weight
    return vec


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; zero by convention when either vector is zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError("vectors must have the same length")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def joint_vocabulary(*rep_lists: list[TopicRepresentation]) -> dict[str, int]:
    terms = sorted({t for reps in rep_lists for rep in reps for t, _ in rep.terms})
    return {t: i for i, t in enumerate(terms)}


def link_months(
    month_a: MonthKey,
    reps_a: list[TopicRepresentation],
    month_b: MonthKey,
    reps_b: list[TopicRepresentation],
    theta_link: float = 0.0,
    include_zero: bool = False,
) -> list[EvolutionEdge]:
    """Link one month's topics to the next month's.

    Candidate pairs have similarity strictly above ``theta_link`` (or at
    least ``theta_link`` with ``include_zero``). A candidate is kept when
    it is the source's best successor or the target's best predecessor;
    argmax ties go to the lower topic id.
    """
    if not reps_a or not reps_b:
        return []
    vocab = joint_vocabulary(reps_a, reps_b)
    va = [representation_vector(r, vocab) for r in reps_a]
    vb = [representation_vector(r, vocab) for r in reps_b]
    sims = np.array([[cosine(u, v) for v in vb] for u in va])
    candidate = sims >= theta_link if include_zero else sims > theta_link

    best_succ = {}
    for i in range(len(reps_a)):
        cols = np.nonzero(candidate[i])[0]
        if cols.size:
            best_succ[i] = int(cols[np.argmax(sims[i, cols])])
    best_pred = {}
    for j in range(len(reps_b)):
        rows = np.nonzero(candidate[:, j])[0]
        if rows.size:
            best_pred[j] = int(rows[np.argmax(sims[rows, j])])

    edges = []
    for i in range(len(reps_a)):
        for j in range(len(reps_b)):
            if not candidate[i, j]:
                continue
            if best_succ.get(i) == j or best_pred.get(j) == i:
                edges.append(
                    EvolutionEdge(
                        from_topic=(month_a, reps_a[i].topic_id),
                        to_topic=(month_b, reps_b[j].topic_id),
                        similarity=float(sims[i, j]),
                    )
                )
    return edges


def link_all_months(
    monthly_reps: dict[MonthKey, list[TopicRepresentation]],
    theta_link: float = 0.0,
    include_zero: bool = False,
    gap_tolerance: int = 0,
) -> list[EvolutionEdge]:
    """Link every consecutive month pair present in the data.

    With a positive ``gap_tolerance``, a topic whose month +1 produced no
    link may connect up to that many further months ahead; only stages
    still without a forward edge may start such a link, and only stages
    without an incoming edge may receive one.
    """
    months = sorted(monthly_reps)
    edges: list[EvolutionEdge] = []
    for a, b in zip(months, months[1:]):
        if month_index(b) - month_index(a) == 1:
            edges.extend(
                link_months(a, monthly_reps[a], b, monthly_reps[b], theta_link, include_zero)
            )
    for gap in range(2, gap_tolerance + 2):
        has_out = {e.from_topic for e in edges}
        has_in = {e.to_topic for e in edges}
        for a in months:
            b = None
            for candidate_month in months:
                if month_index(candidate_month) - month_index(a) == gap:
                    b = candidate_month
                    break
            if b is None:
                continue
            reps_a = [r for r in monthly_reps[a] if (a, r.topic_id) not in has_out]
            reps_b = [r for r in monthly_reps[b] if (b, r.topic_id) not in has_in]
            edges.extend(link_months(a, reps_a, b, reps_b, theta_link, include_zero))
    return edges


def _letters(index: int) -> str:
    # A..Z, then AA, AB, ...
    label = ""
    index += 1
    while index > 0:
        index, rem = divmod(index - 1, 26)
        label = chr(ord("A") + rem) + label
    return label


def build_graph(
    monthly_topics: dict[MonthKey, list[int]],
    edges: list[EvolutionEdge],
) -> EvolutionGraph:
    """Assemble stages with ids and roles from per-month topic lists and edges.

    Components are lettered by first month of appearance, then by
    descending stage count, then by smallest topic id; stage ordinals run
    chronologically within each component.
    """
    nodes: list[TopicKey] = [
        (month, topic) for month in sorted(monthly_topics) for topic in monthly_topics[month]
    ]
    node_set = set(nodes)
    for edge in edges:
        for key in (edge.from_topic, edge.to_topic):
            if key not in node_set:
                raise ValueError(f"edge references unknown topic {key}")
        span = month_index(edge.to_topic[0]) - month_index(edge.from_topic[0])
        if span < 1:
            raise ValueError("edges must point to a later month")

    adj: dict[TopicKey, set[TopicKey]] = {node: set() for node in nodes}
    in_deg = {node: 0 for node in nodes}
    out_deg = {node: 0 for node in nodes}
    for edge in edges:
        adj[edge.from_topic].add(edge.to_topic)
        adj[edge.to_topic].add(edge.from_topic)
        out_deg[edge.from_topic] += 1
        in_deg[edge.to_topic] += 1

    seen: set[TopicKey] = set()
    components: list[list[TopicKey]] = []
    for node in nodes:
        if node in seen:
            continue
        stack, members = [node], []
        seen.add(node)
        while stack:
            cur = stack.pop()
            members.append(cur)
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        members.sort(key=lambda k: (month_index(k[0]), k[1]))
        components.append(members)
    components.sort(key=lambda ms: (month_index(ms[0][0]), -len(ms), ms[0][1]))

    stage_by_topic: dict[TopicKey, str] = {}
    stages: list[TopicStage] = []
    for c_idx, members in enumerate(components):
        letter = _letters(c_idx)
        for ordinal, key in enumerate(members, start=1):
            stage_id = f"{letter}{ordinal}"
            stage_by_topic[key] = stage_id
            if in_deg[key] == 0:
                role = StageRole.EMERGENCE
            elif out_deg[key] == 0:
                role = StageRole.DISAPPEARANCE
            else:
                role = StageRole.STAGNATION
            stages.append(TopicStage(stage_id=stage_id, month_key=key[0], topic_id=key[1], role=role))

    for edge in edges:
        edge.from_stage = stage_by_topic[edge.from_topic]
        edge.to_stage = stage_by_topic[edge.to_topic]
    return EvolutionGraph(stages=stages, edges=edges, stage_by_topic=stage_by_topic)


def classify_longevity(months: int) -> LongevityClass:
    """Map a month span to its longevity class: more than six months is
    high, five or six medium, fewer than five short."""
    if months < 1:
        raise ValueError("longevity is at least one month")
    if months > 6:
        return LongevityClass.HIGH
    if months >= 5:
        return LongevityClass.MEDIUM
    return LongevityClass.SHORT


def group_and_longevity(graph: EvolutionGraph) -> list[TopicGroup]:
    """Compute per-group longevity as the calendar span of the longest
    root-to-leaf branch, inclusive of both endpoints."""
    by_letter: dict[str, list[TopicStage]] = {}
    for stage in graph.stages:
        by_letter.setdefault(stage.letter, []).append(stage)

    succ: dict[str, list[str]] = {s.stage_id: [] for s in graph.stages}
    pred: dict[str, list[str]] = {s.stage_id: [] for s in graph.stages}
    month_of = {s.stage_id: month_index(s.month_key) for s in graph.stages}
    for edge in graph.edges:
        succ[edge.from_stage].append(edge.to_stage)
        pred[edge.to_stage].append(edge.from_stage)

    groups = []
    for letter in sorted(by_letter, key=lambda l: (len(l), l)):
        members = sorted(by_letter[letter], key=lambda s: (month_of[s.stage_id], s.topic_id))
        ordered = sorted(members, key=lambda s: month_of[s.stage_id])
        earliest_root: dict[str, int] = {}
        for stage in ordered:
            sid = stage.stage_id
            if not pred[sid]:
                earliest_root[sid] = month_of[sid]
            else:
                earliest_root[sid] = min(earliest_root[p] for p in pred[sid])
        longevity = max(
            month_of[s.stage_id] - earliest_root[s.stage_id] + 1
            for s in ordered
            if not succ[s.stage_id]
        )
        groups.append(
            TopicGroup(
                letter=letter,
                stage_ids=[s.stage_id for s in members],
                longevity_months=longevity,
                longevity_class=classify_longevity(longevity),
            )
        )
    return groups
