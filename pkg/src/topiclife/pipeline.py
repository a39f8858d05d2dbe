"""End-to-end run orchestration and artifact emission.

A run is driven by one JSON config. Stages: ingest (parse, clean,
tokenize, bin by month), model (per-month clustering and topic
representations), evolve (cross-month linking, groups, longevity), moral
(lexicon scoring), stats (the hypothesis batteries) and report. Each stage
writes an artifact the next one can reread, so stages can be rerun
individually; ``run_all`` chains them in memory and writes everything.

All outputs are deterministic for a fixed config and seed: identical runs
produce byte-identical JSON and CSV artifacts.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import (
    Document,
    Party,
    PreprocessConfig,
    bin_by_month,
    build_documents,
    load_lemma_table,
    load_stopwords,
    month_label,
    parse_month_label,
    parse_records,
)
from .embedding import EmbeddingMatrix, embed_documents, load_precomputed, load_word_vectors, reduce
from .errors import ConfigError, DataError, InvariantError
from .evolve import (
    EvolutionGraph,
    LongevityClass,
    TopicGroup,
    build_graph,
    group_and_longevity,
    link_all_months,
)
from .model import MonthlyTopicModel
from .moral import FOUNDATIONS, Foundation, ScoredDocument, load_lexicon, score_document
from .represent import TopicRepresentation
from .seeding import child_seed
from .stats import ContingencyTable, chi_square, mann_whitney_u

H3_GROUPINGS = (
    "high_vs_medium",
    "medium_vs_short",
    "high_vs_short",
    "high_medium_vs_short",
)

_DEFAULTS = {
    "corpus": {"path": None, "format": "csv", "skip_bad_rows": False},
    "stopwords": None,
    "lemma_table": None,
    "word_vectors": None,
    "precomputed_embeddings": None,
    "moral_lexicon": None,
    "seed": None,
    "out": "out",
    "workers": 1,
    "preprocess": {
        "keep_emoji": False,
        "drop_retweet_marker": True,
        "score_before_stopwords": False,
    },
    "vectorizer": {"ngram_range": [1, 1], "min_df": 5, "max_features": 170000},
    "ctfidf": {"bm25_weighting": False, "reduce_frequent_words": True, "top_k": 10},
    "reduce": {"method": "identity", "out_dim": None},
    "cluster": {
        "algorithm": "hdbscan",
        "min_cluster_size": 10,
        "min_samples": None,
        "k": 8,
        "max_iter": 300,
        "tol": 1e-4,
    },
    "evolve": {"theta_link": 0.0, "include_zero": False, "gap_tolerance": 0},
    "stats": {"h3_groupings": list(H3_GROUPINGS)},
}

_PATH_KEYS = ("stopwords", "lemma_table", "word_vectors", "precomputed_embeddings", "moral_lexicon")


@dataclass
class RunConfig:
    """A fully validated configuration with every default filled in."""

    raw: dict
    base_dir: Path
    out_dir: Path

    def __getitem__(self, key):
        return self.raw[key]

    def path(self, key: str) -> Path | None:
        value = self.raw[key] if key != "corpus" else self.raw["corpus"]["path"]
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    @property
    def config_hash(self) -> str:
        # Execution-only keys do not change results, so they stay out of
        # the hash.
        hashed = {k: v for k, v in self.raw.items() if k not in ("out", "workers")}
        canon = json.dumps(hashed, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _merge_defaults(defaults: dict, given: dict, key_path: str = "") -> dict:
    merged = {}
    for key, default in defaults.items():
        here = f"{key_path}.{key}" if key_path else key
        if key in given:
            value = given[key]
            if isinstance(default, dict):
                if not isinstance(value, dict):
                    raise ConfigError(f"{here}: expected an object")
                merged[key] = _merge_defaults(default, value, here)
            else:
                merged[key] = value
        else:
            merged[key] = json.loads(json.dumps(default))
    for key in given:
        if key not in defaults:
            here = f"{key_path}.{key}" if key_path else key
            raise ConfigError(f"unknown config key {here!r}")
    return merged


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def validate_config(path, overrides: dict | None = None) -> RunConfig:
    """Load, default-fill and validate a JSON run config.

    ``overrides`` may replace ``seed``, ``out`` and ``workers`` (the CLI
    flags). Unknown keys, missing files and out-of-range values are fatal,
    each naming the offending key path.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        given = json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(given, dict):
        raise ConfigError("config must be a JSON object")
    merged = _merge_defaults(_DEFAULTS, given)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    _require(merged["corpus"]["path"] is not None, "corpus.path is required")
    _require(merged["corpus"]["format"] in ("csv", "jsonl"), "corpus.format must be csv or jsonl")
    _require(merged["seed"] is not None, "seed is required")
    _require(isinstance(merged["seed"], int) and merged["seed"] >= 0, "seed must be a non-negative integer")
    _require(int(merged["workers"]) >= 1, "workers must be >= 1")

    vec = merged["vectorizer"]
    _require(isinstance(vec["min_df"], int) and vec["min_df"] >= 1, "vectorizer.min_df must be >= 1")
    lo, hi = vec["ngram_range"]
    _require(1 <= lo <= hi, "vectorizer.ngram_range must satisfy 1 <= lo <= hi")
    _require(
        vec["max_features"] is None or (isinstance(vec["max_features"], int) and vec["max_features"] >= 1),
        "vectorizer.max_features must be >= 1 or null",
    )
    _require(merged["ctfidf"]["top_k"] >= 1, "ctfidf.top_k must be >= 1")

    red = merged["reduce"]
    _require(red["method"] in ("identity", "pca"), "reduce.method must be identity or pca")
    if red["method"] == "pca":
        _require(
            isinstance(red["out_dim"], int) and red["out_dim"] >= 1,
            "reduce.out_dim must be >= 1 when reduce.method is pca",
        )

    clu = merged["cluster"]
    _require(clu["algorithm"] in ("hdbscan", "kmeans"), "cluster.algorithm must be hdbscan or kmeans")
    _require(clu["min_cluster_size"] >= 2, "cluster.min_cluster_size must be >= 2")
    _require(
        clu["min_samples"] is None or 1 <= clu["min_samples"] <= clu["min_cluster_size"],
        "cluster.min_samples must be in [1, min_cluster_size] or null",
    )
    _require(clu["k"] >= 1, "cluster.k must be >= 1")

    evo = merged["evolve"]
    _require(evo["gap_tolerance"] >= 0, "evolve.gap_tolerance must be >= 0")
    _require(-1.0 <= evo["theta_link"] <= 1.0, "evolve.theta_link must be in [-1, 1]")

    for grouping in merged["stats"]["h3_groupings"]:
        _require(grouping in H3_GROUPINGS, f"stats.h3_groupings: unknown grouping {grouping!r}")

    have_vectors = merged["word_vectors"] is not None
    have_matrix = merged["precomputed_embeddings"] is not None
    _require(
        have_vectors != have_matrix,
        "exactly one of word_vectors or precomputed_embeddings is required",
    )

    config = RunConfig(raw=merged, base_dir=path.parent.resolve(), out_dir=Path(merged["out"]))
    if not config.out_dir.is_absolute():
        config.out_dir = config.base_dir / config.out_dir

    corpus_path = config.path("corpus")
    _require(corpus_path.exists(), f"corpus.path does not exist: {corpus_path}")
    for key in _PATH_KEYS:
        p = config.path(key)
        if p is not None and not p.exists():
            raise ConfigError(f"{key} does not exist: {p}")
    return config


# ---------------------------------------------------------------------------
# Stage: ingest


def ingest(config: RunConfig) -> tuple[list[Document], int, int]:
    """Parse and preprocess the corpus; returns (documents, dropped, parsed)."""
    preprocess = PreprocessConfig(
        stopwords=load_stopwords(config.path("stopwords")),
        lemma_table=load_lemma_table(config.path("lemma_table")),
        drop_retweet_marker=config["preprocess"]["drop_retweet_marker"],
        keep_emoji=config["preprocess"]["keep_emoji"],
    )
    records = parse_records(
        config.path("corpus"),
        format=config["corpus"]["format"],
        skip_bad_rows=config["corpus"]["skip_bad_rows"],
    )
    documents, dropped = build_documents(
        records,
        preprocess,
        keep_stopword_tokens=config["preprocess"]["score_before_stopwords"],
    )
    if not documents:
        raise DataError("no documents: corpus is empty after preprocessing")
    return documents, dropped, len(records)


# ---------------------------------------------------------------------------
# Stage: model


@dataclass
class ModelResult:
    monthly_reps: dict[tuple[int, int], list[TopicRepresentation]]
    monthly_sizes: dict[tuple[int, int], dict[int, int]]
    labels: dict[str, int]
    per_month_counts: dict[tuple[int, int], dict[str, int]]


def _embed_all(config: RunConfig, documents: list[Document]) -> EmbeddingMatrix:
    doc_ids = [d.id for d in documents]
    if config.raw["word_vectors"] is not None:
        table = load_word_vectors(config.path("word_vectors"))
        matrix = embed_documents([d.tokens for d in documents], table, doc_ids)
    else:
        matrix = load_precomputed(config.path("precomputed_embeddings"), doc_ids)
    return reduce(matrix, config["reduce"]["method"], config["reduce"]["out_dim"])


def model_months(config: RunConfig, documents: list[Document]) -> ModelResult:
    """Fit one topic model per month bin.

    Months with fewer usable documents than twice the minimum cluster size
    (or fewer than k for kmeans) yield zero topics and all outliers.
    """
    matrix = _embed_all(config, documents)
    bins = bin_by_month(documents)
    row_of = {doc_id: i for i, doc_id in enumerate(matrix.doc_ids)}
    clu = config["cluster"]

    def fit_month(month: tuple[int, int]):
        docs = bins[month]
        rows = np.array([row_of[d.id] for d in docs])
        X = matrix.X[rows]
        oov = matrix.all_oov_mask[rows]
        usable = int((~oov).sum())
        floor = 2 * clu["min_cluster_size"] if clu["algorithm"] == "hdbscan" else clu["k"]
        if usable < floor:
            labels = np.full(len(docs), -1, dtype=int)
            return month, labels, [], {}
        model = MonthlyTopicModel(
            algorithm=clu["algorithm"],
            min_cluster_size=clu["min_cluster_size"],
            min_samples=clu["min_samples"],
            k=clu["k"],
            seed=child_seed(config.seed, f"cluster:{month_label(month)}"),
            max_iter=clu["max_iter"],
            tol=clu["tol"],
            ngram_range=tuple(config["vectorizer"]["ngram_range"]),
            min_df=config["vectorizer"]["min_df"],
            max_features=config["vectorizer"]["max_features"],
            bm25_weighting=config["ctfidf"]["bm25_weighting"],
            reduce_frequent_words=config["ctfidf"]["reduce_frequent_words"],
            top_k=config["ctfidf"]["top_k"],
        )
        try:
            model.fit([d.tokens for d in docs], X, oov)
        except Exception as exc:
            raise DataError(f"model stage failed for month {month_label(month)}: {exc}") from exc
        return month, model.labels_, model.topics_, model.topic_sizes()

    months = sorted(bins)
    workers = int(config["workers"])
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fitted = list(pool.map(fit_month, months))
    else:
        fitted = [fit_month(m) for m in months]

    monthly_reps: dict[tuple[int, int], list[TopicRepresentation]] = {}
    monthly_sizes: dict[tuple[int, int], dict[int, int]] = {}
    labels: dict[str, int] = {}
    per_month_counts: dict[tuple[int, int], dict[str, int]] = {}
    for month, month_labels, topics, sizes in sorted(fitted, key=lambda item: item[0]):
        monthly_reps[month] = topics
        monthly_sizes[month] = sizes
        docs = bins[month]
        for doc, label in zip(docs, month_labels):
            labels[doc.id] = int(label)
        assigned = int((np.asarray(month_labels) >= 0).sum())
        per_month_counts[month] = {
            "documents": len(docs),
            "topics": len(topics),
            "assigned": assigned,
            "outliers": len(docs) - assigned,
        }
    return ModelResult(
        monthly_reps=monthly_reps,
        monthly_sizes=monthly_sizes,
        labels=labels,
        per_month_counts=per_month_counts,
    )


# ---------------------------------------------------------------------------
# Stage: evolve


def evolve_topics(config: RunConfig, result: ModelResult) -> tuple[EvolutionGraph, list[TopicGroup]]:
    evo = config["evolve"]
    edges = link_all_months(
        result.monthly_reps,
        theta_link=evo["theta_link"],
        include_zero=evo["include_zero"],
        gap_tolerance=evo["gap_tolerance"],
    )
    monthly_topics = {
        month: [rep.topic_id for rep in reps] for month, reps in result.monthly_reps.items()
    }
    graph = build_graph(monthly_topics, edges)
    groups = group_and_longevity(graph)
    return graph, groups


def longevity_class_by_topic(
    graph: EvolutionGraph, groups: list[TopicGroup]
) -> dict[tuple[tuple[int, int], int], str]:
    class_of_letter = {g.letter: g.longevity_class.value for g in groups}
    out = {}
    for stage in graph.stages:
        out[(stage.month_key, stage.topic_id)] = class_of_letter[stage.letter]
    return out


# ---------------------------------------------------------------------------
# Stage: moral


def moral_scores(
    config: RunConfig,
    documents: list[Document],
    labels: dict[str, int],
    topic_classes: dict[tuple[tuple[int, int], int], str],
) -> list[ScoredDocument]:
    lexicon_path = config.path("moral_lexicon")
    if lexicon_path is None:
        return []
    lexicon = load_lexicon(lexicon_path)
    use_pre = config["preprocess"]["score_before_stopwords"]
    scored = []
    for doc in documents:
        tokens = doc.tokens_with_stopwords if use_pre and doc.tokens_with_stopwords else doc.tokens
        label = labels.get(doc.id, -1)
        longevity = topic_classes.get((doc.month_key, label)) if label >= 0 else None
        scored.append(
            ScoredDocument(
                doc_id=doc.id,
                party=doc.party.value,
                month=month_label(doc.month_key),
                longevity_class=longevity,
                profile=score_document(tokens, lexicon),
            )
        )
    return scored


# ---------------------------------------------------------------------------
# Stage: stats


def _mwu_entry(hypothesis, grouping, foundation, a, b, names) -> dict | None:
    if len(a) < 1 or len(b) < 1:
        return None
    result = mann_whitney_u(a, b)
    return {
        "hypothesis": hypothesis,
        "grouping": grouping,
        "foundation": foundation,
        "method": result.method,
        "statistic": result.statistic,
        "p_value": result.p_value,
        "sample_sizes": list(result.sample_sizes),
        "group_means": {
            names[0]: float(np.mean(a)),
            names[1]: float(np.mean(b)),
        },
    }


def hypothesis_tests(
    scored: list[ScoredDocument],
    doc_parties: dict[str, str],
    doc_classes: dict[str, str | None],
    h3_groupings=H3_GROUPINGS,
) -> list[dict]:
    """Run the party/longevity chi-square and the Mann-Whitney batteries.

    Independents sit outside the two-party comparisons (the party versus
    longevity table and the per-foundation party tests) but do count in
    the longevity batteries. Entries are emitted only for runs whose
    samples are non-empty.
    """
    entries: list[dict] = []

    # Party vs longevity class (documents with a topic only).
    classes = [c.value for c in (LongevityClass.SHORT, LongevityClass.MEDIUM, LongevityClass.HIGH)]
    parties = [Party.DEMOCRAT.value, Party.REPUBLICAN.value]
    counts = np.zeros((2, 3))
    for doc_id, longevity in doc_classes.items():
        party = doc_parties.get(doc_id)
        if longevity is None or party not in parties:
            continue
        counts[parties.index(party), classes.index(longevity)] += 1
    keep_cols = [j for j in range(3) if counts[:, j].sum() > 0]
    keep_rows = [i for i in range(2) if counts[i].sum() > 0]
    if len(keep_rows) == 2 and len(keep_cols) >= 2:
        table = ContingencyTable(
            counts=counts[np.ix_(keep_rows, keep_cols)],
            row_labels=[parties[i] for i in keep_rows],
            col_labels=[classes[j] for j in keep_cols],
        )
        result = chi_square(table)
        entries.append(
            {
                "hypothesis": "H1",
                "grouping": "party_x_longevity",
                "foundation": None,
                "method": result.method,
                "statistic": result.statistic,
                "p_value": result.p_value,
                "df": result.df,
                "group_means": None,
            }
        )

    by_party: dict[str, dict[Foundation, list[float]]] = {p: {f: [] for f in FOUNDATIONS} for p in parties}
    by_class: dict[str, dict[Foundation, list[float]]] = {c: {f: [] for f in FOUNDATIONS} for c in classes}
    for item in scored:
        for foundation, value in item.profile.scores.items():
            if item.party in by_party:
                by_party[item.party][foundation].append(value)
            if item.longevity_class in by_class:
                by_class[item.longevity_class][foundation].append(value)

    if scored:
        for foundation in FOUNDATIONS:
            entry = _mwu_entry(
                "H2",
                "democrat_vs_republican",
                foundation.value,
                by_party[Party.DEMOCRAT.value][foundation],
                by_party[Party.REPUBLICAN.value][foundation],
                ("democrat", "republican"),
            )
            if entry:
                entries.append(entry)

        pools = {
            "high_vs_medium": ("high", "medium"),
            "medium_vs_short": ("medium", "short"),
            "high_vs_short": ("high", "short"),
            "high_medium_vs_short": (("high", "medium"), "short"),
        }
        for grouping in h3_groupings:
            left, right = pools[grouping]
            for foundation in FOUNDATIONS:
                a = []
                for c in (left if isinstance(left, tuple) else (left,)):
                    a.extend(by_class[c][foundation])
                b = []
                for c in (right if isinstance(right, tuple) else (right,)):
                    b.extend(by_class[c][foundation])
                name_a = "+".join(left) if isinstance(left, tuple) else left
                entry = _mwu_entry("H3", grouping, foundation.value, a, b, (name_a, right))
                if entry:
                    entries.append(entry)
    return entries


# ---------------------------------------------------------------------------
# Serialization helpers


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def write_json(path: Path, payload) -> None:
    _write_text(path, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def topics_payload(result: ModelResult) -> dict:
    months = []
    for month in sorted(result.monthly_reps):
        counts = result.per_month_counts[month]
        months.append(
            {
                "month": month_label(month),
                "n_documents": counts["documents"],
                "n_outliers": counts["outliers"],
                "topics": [
                    {
                        "id": rep.topic_id,
                        "size": result.monthly_sizes[month].get(rep.topic_id, 0),
                        "terms": [[term, weight] for term, weight in rep.terms],
                    }
                    for rep in result.monthly_reps[month]
                ],
            }
        )
    return {"months": months}


def evolution_payload(graph: EvolutionGraph, groups: list[TopicGroup]) -> dict:
    return {
        "stages": [
            {
                "id": s.stage_id,
                "month": month_label(s.month_key),
                "topic": s.topic_id,
                "role": s.role.value,
            }
            for s in graph.stages
        ],
        "edges": [
            {
                "from": e.from_stage,
                "to": e.to_stage,
                "similarity": e.similarity,
                "strong": e.strong,
            }
            for e in graph.edges
        ],
        "groups": [
            {
                "letter": g.letter,
                "longevity_months": g.longevity_months,
                "longevity_class": g.longevity_class.value,
                "members": g.stage_ids,
            }
            for g in groups
        ],
    }


def moral_csv_text(scored: list[ScoredDocument]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["doc_id", "party", "longevity_class"] + [f.value for f in FOUNDATIONS]
    )
    for item in scored:
        row = [item.doc_id, item.party, item.longevity_class or ""]
        for foundation in FOUNDATIONS:
            value = item.profile.get(foundation)
            row.append("" if value is None else repr(value))
        writer.writerow(row)
    return buffer.getvalue()


def assignments_csv_text(documents: list[Document], labels: dict[str, int]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["doc_id", "month", "party", "topic"])
    for doc in documents:
        writer.writerow([doc.id, month_label(doc.month_key), doc.party.value, labels.get(doc.id, -1)])
    return buffer.getvalue()


def documents_jsonl_text(documents: list[Document]) -> str:
    lines = []
    for doc in documents:
        payload = {
            "id": doc.id,
            "month": month_label(doc.month_key),
            "party": doc.party.value,
            "tokens": doc.tokens,
            "extracted": doc.extracted,
        }
        if doc.tokens_with_stopwords is not None:
            payload["tokens_with_stopwords"] = doc.tokens_with_stopwords
        lines.append(json.dumps(payload, ensure_ascii=False))
    return "\n".join(lines) + "\n"


def documents_csv_text(documents: list[Document]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["id", "month", "party", "tokens", "hashtags", "mentions", "urls"])
    for doc in documents:
        writer.writerow(
            [
                doc.id,
                month_label(doc.month_key),
                doc.party.value,
                " ".join(doc.tokens),
                " ".join(doc.extracted.get("hashtags", [])),
                " ".join(doc.extracted.get("mentions", [])),
                " ".join(doc.extracted.get("urls", [])),
            ]
        )
    return buffer.getvalue()


def load_documents_jsonl(path) -> list[Document]:
    documents = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            payload = json.loads(line)
            documents.append(
                Document(
                    id=payload["id"],
                    month_key=parse_month_label(payload["month"]),
                    party=Party(payload["party"]),
                    tokens=payload["tokens"],
                    extracted=payload.get("extracted", {}),
                    tokens_with_stopwords=payload.get("tokens_with_stopwords"),
                )
            )
    return documents


def load_topics_json(path) -> dict[tuple[int, int], list[TopicRepresentation]]:
    payload = json.loads(Path(path).read_text("utf-8"))
    monthly: dict[tuple[int, int], list[TopicRepresentation]] = {}
    for month in payload["months"]:
        key = parse_month_label(month["month"])
        monthly[key] = [
            TopicRepresentation(
                topic_id=topic["id"],
                terms=[(term, weight) for term, weight in topic["terms"]],
            )
            for topic in month["topics"]
        ]
    return monthly


def load_assignments_csv(path) -> tuple[dict[str, tuple[tuple[int, int], int]], dict[str, str]]:
    doc_topic: dict[str, tuple[tuple[int, int], int]] = {}
    doc_party: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            doc_topic[row["doc_id"]] = (parse_month_label(row["month"]), int(row["topic"]))
            doc_party[row["doc_id"]] = row["party"]
    return doc_topic, doc_party


def load_evolution_json(path) -> dict[tuple[tuple[int, int], int], str]:
    payload = json.loads(Path(path).read_text("utf-8"))
    class_of_letter = {g["letter"]: g["longevity_class"] for g in payload["groups"]}
    stage_letter = {s["id"]: s["id"].rstrip("0123456789") for s in payload["stages"]}
    out = {}
    for stage in payload["stages"]:
        key = (parse_month_label(stage["month"]), stage["topic"])
        out[key] = class_of_letter[stage_letter[stage["id"]]]
    return out


def load_moral_csv(path) -> list[ScoredDocument]:
    from .moral import MoralProfile

    scored = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            scores = {}
            matched = {}
            for foundation in FOUNDATIONS:
                cell = row[foundation.value]
                if cell != "":
                    scores[foundation] = float(cell)
                    matched[foundation] = 1
            scored.append(
                ScoredDocument(
                    doc_id=row["doc_id"],
                    party=row["party"],
                    month="",
                    longevity_class=row["longevity_class"] or None,
                    profile=MoralProfile(scores=scores, matched=matched),
                )
            )
    return scored


def manifest_payload(
    config: RunConfig,
    result: ModelResult,
    parsed: int,
    dropped: int,
) -> dict:
    per_month = {}
    totals = {"documents": 0, "topics_extracted": 0, "documents_assigned": 0, "outliers": 0}
    for month in sorted(result.per_month_counts):
        counts = result.per_month_counts[month]
        per_month[month_label(month)] = dict(counts)
        totals["documents"] += counts["documents"]
        totals["topics_extracted"] += counts["topics"]
        totals["documents_assigned"] += counts["assigned"]
        totals["outliers"] += counts["outliers"]
    totals["records_parsed"] = parsed
    totals["dropped_empty"] = dropped
    if totals["documents"] != totals["documents_assigned"] + totals["outliers"]:
        raise InvariantError("document counts do not reconcile")
    if totals["documents"] + dropped != parsed:
        raise InvariantError("parsed record counts do not reconcile")
    return {"config_hash": config.config_hash, "totals": totals, "per_month": per_month}


# ---------------------------------------------------------------------------
# Report


def _fmt_p(p: float) -> str:
    return f"{p:.4f}"


def emit_report(
    manifest: dict,
    topics: dict,
    evolution: dict,
    stats_entries: list[dict],
    have_moral: bool,
) -> str:
    lines: list[str] = []
    lines.append("# Run report")
    lines.append("")
    totals = manifest["totals"]
    lines.append("## Corpus")
    lines.append("")
    lines.append(f"- records parsed: {totals['records_parsed']}")
    lines.append(f"- documents kept: {totals['documents']} (dropped empty: {totals['dropped_empty']})")
    lines.append(f"- topics extracted: {totals['topics_extracted']}")
    lines.append(f"- documents assigned to a topic: {totals['documents_assigned']}")
    lines.append(f"- outliers: {totals['outliers']}")
    lines.append("")

    lines.append("## Topics by month")
    lines.append("")
    lines.append("| Month | Topics | Two most frequent |")
    lines.append("| --- | --- | --- |")
    for month in topics["months"]:
        tops = month["topics"][:2]
        names = "; ".join(
            f"{t['id']} " + " ".join(term for term, _ in t["terms"][:4]) for t in tops
        )
        lines.append(f"| {month['month']} | {len(month['topics'])} | {names or 'N/A'} |")
    lines.append("")

    lines.append("## Topic groups and longevity")
    lines.append("")
    lines.append("| Group | Longevity (months) | Class | Stages |")
    lines.append("| --- | --- | --- | --- |")
    for group in evolution["groups"]:
        lines.append(
            f"| {group['letter']} | {group['longevity_months']} | "
            f"{group['longevity_class']} | {', '.join(group['members'])} |"
        )
    lines.append("")

    h1 = [e for e in stats_entries if e["hypothesis"] == "H1"]
    lines.append("## Party and longevity (H1)")
    lines.append("")
    if h1:
        entry = h1[0]
        lines.append(
            f"Chi-square statistic {entry['statistic']:.4f} with df {entry['df']}: "
            f"p = {_fmt_p(entry['p_value'])}"
        )
    else:
        lines.append("Not enough populated cells to run the test.")
    lines.append("")

    if have_moral:
        lines.append("## Moral foundations by party (H2)")
        lines.append("")
        lines.append("| Foundation | p-value | Dem. avg. | Rep. avg. |")
        lines.append("| --- | --- | --- | --- |")
        for entry in stats_entries:
            if entry["hypothesis"] != "H2":
                continue
            means = entry["group_means"]
            lines.append(
                f"| {entry['foundation'].capitalize()} | {_fmt_p(entry['p_value'])} | "
                f"{means['democrat']:.2f} | {means['republican']:.2f} |"
            )
        lines.append("")
        lines.append("## Moral foundations by longevity (H3)")
        lines.append("")
        for grouping in H3_GROUPINGS:
            block = [
                e for e in stats_entries if e["hypothesis"] == "H3" and e["grouping"] == grouping
            ]
            if not block:
                continue
            lines.append(f"### {grouping.replace('_', ' ')}")
            lines.append("")
            lines.append("| Foundation | p-value | Group means |")
            lines.append("| --- | --- | --- |")
            for entry in block:
                means = ", ".join(f"{k}: {v:.2f}" for k, v in entry["group_means"].items())
                lines.append(
                    f"| {entry['foundation'].capitalize()} | {_fmt_p(entry['p_value'])} | {means} |"
                )
            lines.append("")
    else:
        lines.append("## Moral foundations")
        lines.append("")
        lines.append("No moral lexicon configured; moral sections omitted.")
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Full run


@dataclass
class RunOutput:
    manifest: dict
    out_dir: Path
    artifacts: dict[str, Path] = field(default_factory=dict)


def run_all(config: RunConfig) -> RunOutput:
    """Execute every stage and write all artifacts into the output directory."""
    documents, dropped, parsed = ingest(config)
    result = model_months(config, documents)
    graph, groups = evolve_topics(config, result)
    topic_classes = longevity_class_by_topic(graph, groups)
    scored = moral_scores(config, documents, result.labels, topic_classes)

    doc_parties = {d.id: d.party.value for d in documents}
    doc_classes = {
        d.id: topic_classes.get((d.month_key, result.labels.get(d.id, -1)))
        if result.labels.get(d.id, -1) >= 0
        else None
        for d in documents
    }
    stats_entries = hypothesis_tests(
        scored, doc_parties, doc_classes, tuple(config["stats"]["h3_groupings"])
    )

    manifest = manifest_payload(config, result, parsed, dropped)
    topics = topics_payload(result)
    evolution = evolution_payload(graph, groups)

    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    artifacts: dict[str, Path] = {}

    _write_text(out / "documents.jsonl", documents_jsonl_text(documents))
    artifacts["documents"] = out / "documents.jsonl"
    _write_text(out / "assignments.csv", assignments_csv_text(documents, result.labels))
    artifacts["assignments"] = out / "assignments.csv"
    write_json(out / "topics.json", topics)
    artifacts["topics"] = out / "topics.json"
    write_json(out / "evolution.json", evolution)
    artifacts["evolution"] = out / "evolution.json"
    if scored:
        _write_text(out / "moral.csv", moral_csv_text(scored))
        artifacts["moral"] = out / "moral.csv"
    write_json(out / "stats.json", {"tests": stats_entries})
    artifacts["stats"] = out / "stats.json"
    write_json(out / "manifest.json", manifest)
    artifacts["manifest"] = out / "manifest.json"
    report = emit_report(manifest, topics, evolution, stats_entries, have_moral=bool(scored))
    _write_text(out / "report.md", report)
    artifacts["report"] = out / "report.md"
    return RunOutput(manifest=manifest, out_dir=out, artifacts=artifacts)
