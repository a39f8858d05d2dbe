import json
from pathlib import Path

import pytest

from topiclife.pipeline import run_all, validate_config

REPO = Path(__file__).resolve().parent.parent
SYNTHETIC = REPO / "data" / "synthetic"


@pytest.fixture(scope="session")
def synthetic_config_path() -> Path:
    return SYNTHETIC / "config.json"


@pytest.fixture(scope="session")
def synthetic_run(tmp_path_factory, synthetic_config_path):
    """One full pipeline run over the bundled corpus, shared by tests."""
    out = tmp_path_factory.mktemp("synthetic_run")
    config = validate_config(synthetic_config_path, {"out": str(out)})
    result = run_all(config)
    return result


@pytest.fixture()
def tiny_corpus_csv(tmp_path) -> Path:
    """A one-month corpus small enough to cluster quickly."""
    rows = ["id,timestamp,author,party,account_type,text"]
    for i in range(30):
        topic = "bridge road transit repair" if i % 2 == 0 else "ballot election vote poll"
        rows.append(f"d{i:02d},2021-03-{(i % 27) + 1:02d}T12:00:00Z,auth{i},D,personal,{topic} {topic}")
    path = tmp_path / "tiny.csv"
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path


@pytest.fixture()
def tiny_config(tmp_path, tiny_corpus_csv) -> Path:
    vectors = tmp_path / "vectors.txt"
    lines = []
    words = {
        "bridge": (10, 0), "road": (10, 0.3), "transit": (10.2, 0), "repair": (9.8, 0.1),
        "ballot": (0, 10), "election": (0.2, 10), "vote": (0, 9.8), "poll": (0.1, 10.2),
    }
    for word, (x, y) in words.items():
        lines.append(f"{word} {x} {y}")
    vectors.write_text("\n".join(lines) + "\n", encoding="utf-8")
    config = {
        "corpus": {"path": str(tiny_corpus_csv), "format": "csv"},
        "word_vectors": str(vectors),
        "seed": 7,
        "out": str(tmp_path / "out"),
        "cluster": {"min_cluster_size": 5},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    return path
