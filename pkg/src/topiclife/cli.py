"""Command line interface.

Subcommands run the whole analysis (``run``) or one stage at a time
(``ingest``, ``model``, ``evolve``, ``moral``, ``stats``, ``report``),
each reading the previous stage's artifact from the output directory.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline
from .errors import ConfigError, DataError, InvariantError
from .evolve import build_graph, group_and_longevity, link_all_months
from .pipeline import RunConfig, validate_config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topiclife",
        description="Monthly topic models, topic evolution and moral-foundation analyses",
    )
    parser.add_argument("command", choices=["run", "ingest", "model", "evolve", "moral", "stats", "report"])
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, default=None, help="run seed (overrides config)")
    parser.add_argument("--workers", type=int, default=None, help="parallel month workers")
    parser.add_argument(
        "--format",
        choices=["json", "csv"],
        default="json",
        help="ingest artifact format (documents.jsonl or documents.csv)",
    )
    return parser


def _load_config(args) -> RunConfig:
    overrides = {"seed": args.seed, "out": args.out, "workers": args.workers}
    return validate_config(args.config, overrides)


def _require_artifact(path: Path, producer: str) -> Path:
    if not path.exists():
        raise DataError(f"missing {path.name}; run the {producer} stage first")
    return path


def _cmd_ingest(config: RunConfig, fmt: str) -> None:
    documents, dropped, parsed = pipeline.ingest(config)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        target = config.out_dir / "documents.csv"
        pipeline._write_text(target, pipeline.documents_csv_text(documents))
    else:
        target = config.out_dir / "documents.jsonl"
        pipeline._write_text(target, pipeline.documents_jsonl_text(documents))
    print(f"parsed {parsed} records, kept {len(documents)} documents "
          f"(dropped {dropped} empty) -> {target}")


def _cmd_model(config: RunConfig) -> None:
    docs_path = _require_artifact(config.out_dir / "documents.jsonl", "ingest")
    documents = pipeline.load_documents_jsonl(docs_path)
    result = pipeline.model_months(config, documents)
    pipeline.write_json(config.out_dir / "topics.json", pipeline.topics_payload(result))
    pipeline._write_text(
        config.out_dir / "assignments.csv",
        pipeline.assignments_csv_text(documents, result.labels),
    )
    n_topics = sum(c["topics"] for c in result.per_month_counts.values())
    print(f"extracted {n_topics} topics over {len(result.per_month_counts)} months")


def _cmd_evolve(config: RunConfig) -> None:
    topics_path = _require_artifact(config.out_dir / "topics.json", "model")
    monthly_reps = pipeline.load_topics_json(topics_path)
    evo = config["evolve"]
    edges = link_all_months(
        monthly_reps,
        theta_link=evo["theta_link"],
        include_zero=evo["include_zero"],
        gap_tolerance=evo["gap_tolerance"],
    )
    monthly_topics = {m: [r.topic_id for r in reps] for m, reps in monthly_reps.items()}
    graph = build_graph(monthly_topics, edges)
    groups = group_and_longevity(graph)
    pipeline.write_json(config.out_dir / "evolution.json", pipeline.evolution_payload(graph, groups))
    print(f"linked {len(graph.edges)} edges into {len(groups)} groups")


def _cmd_moral(config: RunConfig) -> None:
    if config.path("moral_lexicon") is None:
        raise ConfigError("moral_lexicon is not configured")
    documents = pipeline.load_documents_jsonl(
        _require_artifact(config.out_dir / "documents.jsonl", "ingest")
    )
    doc_topic, _ = pipeline.load_assignments_csv(
        _require_artifact(config.out_dir / "assignments.csv", "model")
    )
    topic_classes = pipeline.load_evolution_json(
        _require_artifact(config.out_dir / "evolution.json", "evolve")
    )
    labels = {doc_id: topic for doc_id, (_, topic) in doc_topic.items()}
    scored = pipeline.moral_scores(config, documents, labels, topic_classes)
    pipeline._write_text(config.out_dir / "moral.csv", pipeline.moral_csv_text(scored))
    print(f"scored {len(scored)} documents -> moral.csv")


def _cmd_stats(config: RunConfig) -> None:
    doc_topic, doc_party = pipeline.load_assignments_csv(
        _require_artifact(config.out_dir / "assignments.csv", "model")
    )
    topic_classes = pipeline.load_evolution_json(
        _require_artifact(config.out_dir / "evolution.json", "evolve")
    )
    doc_classes = {
        doc_id: (topic_classes.get((month, topic)) if topic >= 0 else None)
        for doc_id, (month, topic) in doc_topic.items()
    }
    moral_path = config.out_dir / "moral.csv"
    scored = pipeline.load_moral_csv(moral_path) if moral_path.exists() else []
    for item in scored:
        item.longevity_class = doc_classes.get(item.doc_id)
    entries = pipeline.hypothesis_tests(
        scored, doc_party, doc_classes, tuple(config["stats"]["h3_groupings"])
    )
    pipeline.write_json(config.out_dir / "stats.json", {"tests": entries})
    print(f"ran {len(entries)} tests -> stats.json")


def _cmd_report(config: RunConfig) -> None:
    topics = json.loads(_require_artifact(config.out_dir / "topics.json", "model").read_text("utf-8"))
    evolution = json.loads(
        _require_artifact(config.out_dir / "evolution.json", "evolve").read_text("utf-8")
    )
    stats_payload = json.loads(
        _require_artifact(config.out_dir / "stats.json", "stats").read_text("utf-8")
    )
    manifest_path = config.out_dir / "manifest.json"
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text("utf-8"))
    else:
        totals = {
            "records_parsed": sum(m["n_documents"] for m in topics["months"]),
            "documents": sum(m["n_documents"] for m in topics["months"]),
            "dropped_empty": 0,
            "topics_extracted": sum(len(m["topics"]) for m in topics["months"]),
            "documents_assigned": sum(
                m["n_documents"] - m["n_outliers"] for m in topics["months"]
            ),
            "outliers": sum(m["n_outliers"] for m in topics["months"]),
        }
        manifest = {"config_hash": config.config_hash, "totals": totals, "per_month": {}}
    have_moral = (config.out_dir / "moral.csv").exists()
    report = pipeline.emit_report(
        manifest, topics, evolution, stats_payload["tests"], have_moral
    )
    pipeline._write_text(config.out_dir / "report.md", report)
    print(f"wrote {config.out_dir / 'report.md'}")


def _cmd_run(config: RunConfig) -> None:
    output = pipeline.run_all(config)
    totals = output.manifest["totals"]
    print(
        f"{totals['topics_extracted']} topics extracted from "
        f"{totals['documents_assigned']} assigned documents "
        f"({totals['documents']} total) -> {output.out_dir}"
    )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        if args.command == "run":
            _cmd_run(config)
        elif args.command == "ingest":
            _cmd_ingest(config, args.format)
        elif args.command == "model":
            _cmd_model(config)
        elif args.command == "evolve":
            _cmd_evolve(config)
        elif args.command == "moral":
            _cmd_moral(config)
        elif args.command == "stats":
            _cmd_stats(config)
        elif args.command == "report":
            _cmd_report(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
