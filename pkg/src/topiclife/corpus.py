"""Corpus ingestion and preprocessing.

Turns raw timestamped records (CSV or JSON-lines) into tokenized
:class:`Document` objects ready for modeling. Cleaning runs a fixed step
order: web-entity replacement, feature extraction (hashtags, mentions,
URLs), leading-RT removal, punctuation stripping, lowercasing. Tokens are
then whitespace-split, filtered against a stopword file and mapped through
a lemma table. Records that end up with no tokens are dropped.

Stopwords and the lemma table are plain data files so a run is reproducible
without any NLP library at runtime; defaults ship with the package.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from importlib import resources
from typing import Iterable

from .errors import DataError

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("id", "timestamp", "author", "party", "account_type", "text")

DEFAULT_ENTITY_MAP = {
    "<br>": " ",
    "%quot;": '"',
    "&quot;": '"',
    "&#39;": "'",
    "&amp;": "&",
    "&lt;": "<",
    "&gt;": ">",
}

URL_RE = re.compile(r"https?://\S+|\b[\w.-]+\.[a-z]{2,4}/\S+", re.IGNORECASE)
HASHTAG_RE = re.compile(r"#(\w+)")
MENTION_RE = re.compile(r"@(\w+)")
RT_RE = re.compile(r"^\s*RT\b[:\s]*")


class Party(str, Enum):
    DEMOCRAT = "D"
    REPUBLICAN = "R"
    INDEPENDENT = "I"

    @classmethod
    def parse(cls, value: str) -> "Party":
        v = value.strip()
        aliases = {
            "d": cls.DEMOCRAT,
            "democrat": cls.DEMOCRAT,
            "r": cls.REPUBLICAN,
            "republican": cls.REPUBLICAN,
            "i": cls.INDEPENDENT,
            "independent": cls.INDEPENDENT,
        }
        try:
            return aliases[v.lower()]
        except KeyError:
            raise ValueError(f"unknown party {value!r}") from None


class AccountType(str, Enum):
    PERSONAL = "personal"
    PROFESSIONAL = "professional"

    @classmethod
    def parse(cls, value: str) -> "AccountType":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(f"unknown account type {value!r}") from None


@dataclass
class RawRecord:
    """One input row before any cleaning."""

    id: str
    timestamp: datetime
    author_handle: str
    party: Party
    account_type: AccountType
    text: str


@dataclass
class Document:
    """A cleaned, tokenized record assigned to a month bin."""

    id: str
    month_key: tuple[int, int]
    party: Party
    tokens: list[str]
    extracted: dict[str, list[str]] = field(default_factory=dict)
    # Populated only when moral scoring is configured to run before
    # stopword removal.
    tokens_with_stopwords: list[str] | None = None


@dataclass
class PreprocessConfig:
    """Cleaning and tokenization settings.

    ``lemma_table`` must be idempotent: the target of any mapping must not
    itself map elsewhere.
    """

    stopwords: set[str] = field(default_factory=set)
    lemma_table: dict[str, str] = field(default_factory=dict)
    entity_map: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_ENTITY_MAP))
    drop_retweet_marker: bool = True
    keep_emoji: bool = False

    def __post_init__(self) -> None:
        for key in self.entity_map:
            if not key:
                raise ValueError("entity_map keys must be non-empty")
        for form, lemma in self.lemma_table.items():
            if self.lemma_table.get(lemma, lemma) != lemma:
                raise ValueError(
                    f"lemma table is not idempotent: {form!r} -> {lemma!r} -> "
                    f"{self.lemma_table[lemma]!r}"
                )


def load_stopwords(path=None) -> set[str]:
    """Read a stopword file (one token per line); ``None`` loads the packaged default."""
    if path is None:
        text = resources.files("topiclife").joinpath("data/stopwords_en.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return {line.strip() for line in text.splitlines() if line.strip()}


def load_lemma_table(path=None) -> dict[str, str]:
    """Read a tab-separated ``form<TAB>lemma`` file; ``None`` loads the packaged default."""
    if path is None:
        text = resources.files("topiclife").joinpath("data/lemmas_en.tsv").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    table: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"lemma table line {lineno}: expected 'form<TAB>lemma'")
        table[parts[0].strip()] = parts[1].strip()
    return table


def _parse_timestamp(value: str) -> datetime:
    v = value.strip()
    if v.endswith(("Z", "z")):
        v = v[:-1] + "+00:00"
    ts = datetime.fromisoformat(v)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _record_from_mapping(row: dict, lineno: int) -> RawRecord:
    missing = [f for f in REQUIRED_FIELDS if row.get(f) is None]
    if missing:
        raise DataError(f"line {lineno}: missing required field(s) {', '.join(missing)}")
    try:
        timestamp = _parse_timestamp(str(row["timestamp"]))
    except ValueError:
        raise DataError(f"line {lineno}: unparseable timestamp {row['timestamp']!r}") from None
    try:
        party = Party.parse(str(row["party"]))
        account_type = AccountType.parse(str(row["account_type"]))
    except ValueError as exc:
        raise DataError(f"line {lineno}: {exc}") from None
    return RawRecord(
        id=str(row["id"]),
        timestamp=timestamp,
        author_handle=str(row["author"]),
        party=party,
        account_type=account_type,
        text=str(row["text"]),
    )


def parse_records(stream, format: str = "csv", skip_bad_rows: bool = False) -> list[RawRecord]:
    """Parse a CSV or JSON-lines stream into :class:`RawRecord` objects.

    ``stream`` may be a text or byte stream, or a path. Row order is
    preserved. Malformed rows raise :class:`DataError` naming the line, or
    are skipped with a warning when ``skip_bad_rows`` is set. A missing
    required column is always fatal, as is a duplicate id unless skipping.
    """
    fmt = format.lower()
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown corpus format {format!r}")

    close = False
    if hasattr(stream, "read"):
        raw = stream.read()
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise DataError(f"input is not valid UTF-8: {exc}") from None
        fh = io.StringIO(raw)
    elif isinstance(stream, (str, bytes)) or hasattr(stream, "__fspath__"):
        fh = open(stream, encoding="utf-8", newline="")
        close = True
    else:
        raise TypeError("stream must be a path or a readable object")

    records: list[RawRecord] = []
    seen_ids: set[str] = set()

    def handle(row: dict, lineno: int) -> None:
        record = _record_from_mapping(row, lineno)
        if record.id in seen_ids:
            raise DataError(f"line {lineno}: duplicate id {record.id!r}")
        seen_ids.add(record.id)
        records.append(record)

    try:
        if fmt == "csv":
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise DataError("empty CSV input")
            missing = [f for f in REQUIRED_FIELDS if f not in reader.fieldnames]
            if missing:
                raise DataError(f"CSV header missing required column(s) {', '.join(missing)}")
            for lineno, row in enumerate(reader, start=2):
                try:
                    handle(row, lineno)
                except DataError as exc:
                    if not skip_bad_rows:
                        raise
                    logger.warning("skipping row: %s", exc)
        else:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    try:
                        row = json.loads(line)
                    except json.JSONDecodeError:
                        raise DataError(f"line {lineno}: invalid JSON") from None
                    if not isinstance(row, dict):
                        raise DataError(f"line {lineno}: expected a JSON object")
                    handle(row, lineno)
                except DataError as exc:
                    if not skip_bad_rows:
                        raise
                    logger.warning("skipping row: %s", exc)
    finally:
        if close:
            fh.close()
    return records


_EMOJI_RANGES = (
    (0x1F300, 0x1FAFF),
    (0x2600, 0x27BF),
    (0xFE00, 0xFE0F),
    (0x1F1E6, 0x1F1FF),
)


def _is_emoji(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


def clean_text(raw: str, config: PreprocessConfig) -> dict:
    """Clean one raw text and extract tweet features.

    Returns ``{"text", "hashtags", "mentions", "urls"}``. The cleaned text
    is lowercase with punctuation removed; hashtags, mentions and URLs are
    removed from the text and returned as features. Total function: any
    input produces a result.
    """
    text = unicodedata.normalize("NFC", raw)
    for escape, replacement in config.entity_map.items():
        text = text.replace(escape, replacement)

    urls = URL_RE.findall(text)
    text = URL_RE.sub(" ", text)
    hashtags = HASHTAG_RE.findall(text)
    text = HASHTAG_RE.sub(" ", text)
    mentions = MENTION_RE.findall(text)
    text = MENTION_RE.sub(" ", text)

    if config.drop_retweet_marker:
        text = RT_RE.sub("", text)

    kept = []
    for ch in text:
        if ch.isalnum() or ch.isspace():
            kept.append(ch)
        elif config.keep_emoji and _is_emoji(ch):
            kept.append(ch)
        else:
            kept.append(" ")
    text = " ".join("".join(kept).split()).lower()
    return {"text": text, "hashtags": hashtags, "mentions": mentions, "urls": urls}


def tokenize_lemmatize(text: str, config: PreprocessConfig) -> list[str]:
    """Whitespace-tokenize cleaned text, drop stopwords, map through the lemma table."""
    tokens = [t for t in text.split() if t not in config.stopwords]
    return [config.lemma_table.get(t, t) for t in tokens]


def build_documents(
    records: Iterable[RawRecord],
    config: PreprocessConfig,
    keep_stopword_tokens: bool = False,
) -> tuple[list[Document], int]:
    """Clean and tokenize records; drop those left empty.

    Returns the documents plus the number of dropped records. With
    ``keep_stopword_tokens`` each document also carries its lemmatized
    token list before stopword removal.
    """
    documents: list[Document] = []
    dropped = 0
    for record in records:
        cleaned = clean_text(record.text, config)
        tokens = tokenize_lemmatize(cleaned["text"], config)
        if not tokens:
            dropped += 1
            continue
        doc = Document(
            id=record.id,
            month_key=(record.timestamp.year, record.timestamp.month),
            party=record.party,
            tokens=tokens,
            extracted={
                "hashtags": cleaned["hashtags"],
                "mentions": cleaned["mentions"],
                "urls": cleaned["urls"],
            },
        )
        if keep_stopword_tokens:
            doc.tokens_with_stopwords = [
                config.lemma_table.get(t, t) for t in cleaned["text"].split()
            ]
        documents.append(doc)
    return documents, dropped


def bin_by_month(docs: Iterable[Document]) -> dict[tuple[int, int], list[Document]]:
    """Partition documents by ``month_key``; bins are ordered chronologically
    and preserve within-bin input order."""
    bins: dict[tuple[int, int], list[Document]] = {}
    for doc in docs:
        bins.setdefault(doc.month_key, []).append(doc)
    return dict(sorted(bins.items()))


def month_label(month_key: tuple[int, int]) -> str:
    return f"{month_key[0]:04d}-{month_key[1]:02d}"


def parse_month_label(label: str) -> tuple[int, int]:
    year, month = label.split("-")
    return int(year), int(month)
