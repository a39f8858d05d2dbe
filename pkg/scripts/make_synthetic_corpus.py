#!/usr/bin/env python3
"""Regenerate the bundled synthetic corpus under data/synthetic/.

The corpus spans 24 months (2021-01 through 2022-12, ~2,000 rows) with ten
planted themes whose active spans produce high, medium and short-lived
topic groups. Each theme-month emits paired Democrat/Republican documents:
the pairs carry party-skewed care and loyalty lemmas (Democrats high
strength, Republicans low) while fairness, authority and purity lemmas are
mirrored exactly across the pair, so only the planted foundations separate
the parties. A few rows are noise: a deliberately tiny first month, pure
out-of-vocabulary documents, and rows that clean down to nothing.

Deterministic: rerunning this script reproduces the committed files byte
for byte.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

OUT_DIR = Path(__file__).resolve().parent.parent / "data" / "synthetic"
SEED = 20210117

EMBED_DIM = 16
DOCS_PER_PARTY = 18  # per theme-month, plus 2 independents

THEMES = {
    "infrastructure": {
        "months": range(2, 12),
        "terms": ["infrastructure", "bridge", "road", "transit", "repair", "construction",
                  "highway", "rail", "broadband", "pipe", "grid", "project"],
    },
    "border": {
        "months": range(2, 5),
        "terms": ["border", "immigrant", "asylum", "migrant", "patrol", "crossing",
                  "enforcement", "wall", "customs", "visa", "entry", "detention"],
    },
    "healthcare": {
        "months": range(4, 9),
        "terms": ["health", "insurance", "hospital", "doctor", "patient", "prescription",
                  "medicare", "premium", "coverage", "clinic", "nurse", "treatment"],
    },
    "courts": {
        "months": range(6, 8),
        "terms": ["court", "judge", "justice", "nominee", "confirmation", "hearing",
                  "bench", "ruling", "supreme", "appeal", "precedent", "docket"],
    },
    "economy": {
        "months": range(9, 13),
        "terms": ["economy", "inflation", "wage", "worker", "union", "corporation",
                  "profit", "market", "tax", "budget", "deficit", "price"],
    },
    "voting": {
        "months": range(12, 25),
        "terms": ["vote", "election", "ballot", "democracy", "register", "poll",
                  "voter", "precinct", "turnout", "registration", "count", "access"],
    },
    "foreign": {
        "months": range(13, 15),
        "terms": ["ukraine", "russia", "sanction", "ally", "nato", "treaty",
                  "diplomacy", "embassy", "invasion", "defense", "missile", "summit"],
    },
    "climate": {
        "months": range(15, 21),
        "terms": ["climate", "energy", "emission", "solar", "wind", "carbon",
                  "planet", "environment", "pollution", "renewable", "conservation", "wildfire"],
    },
    "guns": {
        "months": range(18, 20),
        "terms": ["gun", "firearm", "shooting", "violence", "background", "weapon",
                  "ammunition", "rifle", "buyback", "holster", "safety", "reform"],
    },
    "education": {
        "months": range(21, 25),
        "terms": ["student", "school", "loan", "debt", "teacher", "college",
                  "tuition", "classroom", "education", "scholarship", "campus", "graduate"],
    },
}

# Planted foundations: Democrats draw from the high-strength half,
# Republicans from the low half. Unplanted foundations are mirrored.
CARE_HIGH = [("compassion", 8.8), ("nurture", 8.2), ("comfort", 7.9), ("kindness", 8.5),
             ("heal", 7.4), ("gentle", 7.1), ("caring", 7.7), ("empathy", 8.4),
             ("tender", 7.3), ("shelter", 6.9)]
CARE_LOW = [("cruelty", 1.2), ("harm", 2.0), ("hurt", 2.5), ("abuse", 1.5),
            ("suffer", 2.8), ("brutal", 1.8), ("torment", 1.4), ("anguish", 2.2),
            ("wound", 2.6), ("ruthless", 1.6)]
LOYALTY_HIGH = [("patriot", 8.4), ("devoted", 7.8), ("unity", 7.5), ("solidarity", 8.1),
                ("allegiance", 7.2), ("loyal", 8.6), ("comrade", 6.8), ("homeland", 7.0),
                ("faithful", 7.9), ("kinship", 6.7)]
LOYALTY_LOW = [("betray", 1.4), ("treason", 1.1), ("deserter", 2.2), ("traitor", 1.6),
               ("abandon", 2.6), ("defect", 2.9), ("disloyal", 1.9), ("renegade", 2.4),
               ("turncoat", 1.3), ("estrange", 2.7)]
FAIRNESS = [("equality", 8.0), ("impartial", 7.3), ("fair", 7.7), ("unbiased", 6.9),
            ("honest", 7.5), ("equitable", 7.9), ("evenhanded", 6.6), ("reciprocal", 6.3),
            ("balanced", 6.1), ("deserve", 5.8), ("cheat", 1.9), ("rigged", 2.1),
            ("unequal", 2.4), ("bias", 3.0), ("swindle", 1.6), ("unjust", 1.8),
            ("favoritism", 2.7), ("dishonest", 2.2), ("exploit", 2.5), ("fraud", 1.4)]
AUTHORITY = [("obedience", 7.0), ("respect", 7.6), ("tradition", 7.2), ("lawful", 6.6),
             ("duty", 7.4), ("hierarchy", 6.2), ("discipline", 6.9), ("command", 6.4),
             ("venerate", 7.1), ("deference", 6.7), ("defy", 2.3), ("rebel", 2.7),
             ("chaos", 1.7), ("anarchy", 1.3), ("insubordinate", 2.1), ("lawless", 1.9),
             ("mutiny", 1.5), ("disrespect", 2.4), ("subvert", 2.6), ("disorder", 2.8)]
PURITY = [("sacred", 8.3), ("pure", 7.9), ("holy", 7.5), ("sanctity", 8.0),
          ("pristine", 7.3), ("chaste", 6.8), ("wholesome", 7.1), ("immaculate", 7.7),
          ("virtuous", 7.4), ("sublime", 6.9), ("filth", 1.4), ("disgust", 1.9),
          ("degrade", 2.2), ("contaminate", 2.6), ("vile", 1.6), ("obscene", 2.0),
          ("profane", 1.8), ("repulsive", 2.3), ("taint", 2.5), ("squalid", 2.7)]

UNPLANTED = {"fairness": FAIRNESS, "authority": AUTHORITY, "purity": PURITY}

# Surface variants that the packaged lemma table folds back to the pool term.
SURFACES = {
    "bridge": ["bridges"], "road": ["roads"], "pipe": ["pipes"], "grid": ["grids"],
    "vote": ["votes", "voted", "voting"], "voter": ["voters"], "election": ["elections"],
    "worker": ["workers"], "union": ["unions"], "corporation": ["corporations"],
    "profit": ["profits"], "market": ["markets"], "tax": ["taxes"], "budget": ["budgets"],
    "deficit": ["deficits"], "price": ["prices"], "wage": ["wages"],
    "student": ["students"], "school": ["schools"], "loan": ["loans"], "debt": ["debts"],
    "doctor": ["doctors"], "hospital": ["hospitals"], "patient": ["patients"],
    "prescription": ["prescriptions"], "judge": ["judges"], "justice": ["justices"],
    "court": ["courts"], "immigrant": ["immigrants"], "border": ["borders"],
    "gun": ["guns"], "emission": ["emissions"],
}

STOPFILL = ["the", "and", "we", "our", "to", "of", "for", "is", "are", "will",
            "this", "that", "more", "all"]

MONTH_SCHEDULE: dict[int, list[str]] = {}
for name, spec in THEMES.items():
    for month in spec["months"]:
        MONTH_SCHEDULE.setdefault(month, []).append(name)

D_AUTHORS = [f"sen_blue_{i:02d}" for i in range(1, 14)]
R_AUTHORS = [f"rep_red_{i:02d}" for i in range(1, 14)]
I_AUTHORS = ["ind_white_01", "ind_white_02"]


def month_of(index: int) -> tuple[int, int]:
    year = 2021 + (index - 1) // 12
    month = (index - 1) % 12 + 1
    return year, month


def lexicon_rows() -> list[tuple[str, str, float]]:
    rows = []
    for lemma, strength in CARE_HIGH + CARE_LOW:
        rows.append((lemma, "care", strength))
    for lemma, strength in LOYALTY_HIGH + LOYALTY_LOW:
        rows.append((lemma, "loyalty", strength))
    for name, pool in UNPLANTED.items():
        for lemma, strength in pool:
            rows.append((lemma, name, strength))
    return rows


def write_lexicon() -> None:
    lines = ["# Synthetic strength lexicon for the bundled demo corpus."]
    for lemma, foundation, strength in lexicon_rows():
        lines.append(f"{lemma}\t{foundation}\t{strength}")
    (OUT_DIR / "moral_lexicon.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_vectors(rng: np.random.Generator) -> None:
    lines = []
    for axis, (name, spec) in enumerate(THEMES.items()):
        center = np.zeros(EMBED_DIM)
        center[axis] = 10.0
        center[(axis + 5) % EMBED_DIM] += 4.0
        for term in spec["terms"]:
            vec = center + rng.normal(0.0, 0.15, EMBED_DIM)
            lines.append(term + " " + " ".join(f"{v:.6f}" for v in vec))
    (OUT_DIR / "vectors.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def surface(rng: np.random.Generator, term: str) -> str:
    variants = SURFACES.get(term)
    if variants and rng.random() < 0.3:
        return str(rng.choice(variants))
    return term


def theme_words(rng: np.random.Generator, theme: str) -> list[str]:
    terms = THEMES[theme]["terms"]
    count = int(rng.integers(12, 17))
    picks = [surface(rng, str(t)) for t in rng.choice(terms, size=count)]
    return picks


def decorate(rng: np.random.Generator, words: list[str], theme: str) -> str:
    words = list(words)
    for stop in rng.choice(STOPFILL, size=int(rng.integers(2, 5))):
        words.insert(int(rng.integers(0, len(words) + 1)), str(stop))
    text = " ".join(words)
    if rng.random() < 0.25:
        text += f" #{theme}"
    if rng.random() < 0.2:
        text += f" https://t.co/{''.join(rng.choice(list('abcdefghij0123456789'), size=8))}"
    if rng.random() < 0.15:
        text = f"@{rng.choice(D_AUTHORS + R_AUTHORS)} " + text
    if rng.random() < 0.1:
        text = "RT " + text
    if rng.random() < 0.1:
        text = text.replace(" and ", " &amp; ", 1)
    if rng.random() < 0.05:
        text += " 🎉"
    words_cap = text.split(" ")
    for i in range(len(words_cap)):
        if rng.random() < 0.1:
            words_cap[i] = words_cap[i].capitalize()
    text = " ".join(words_cap)
    if rng.random() < 0.3:
        text += "."
    return text


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    write_vectors(rng)
    write_lexicon()

    rows = []
    counter = 0

    def add_row(month_idx: int, party: str, account: str, author: str, text: str) -> None:
        nonlocal counter
        counter += 1
        year, month = month_of(month_idx)
        day = 1 + (counter * 7) % 28
        hour = (counter * 3) % 24
        minute = (counter * 11) % 60
        rows.append(
            {
                "id": f"t{counter:05d}",
                "timestamp": f"{year:04d}-{month:02d}-{day:02d}T{hour:02d}:{minute:02d}:00Z",
                "author": author,
                "party": party,
                "account_type": account,
                "text": text,
            }
        )

    # Month 1: too few documents for clustering on purpose.
    for _ in range(10):
        words = theme_words(rng, "infrastructure")
        add_row(1, "I", "personal", str(rng.choice(I_AUTHORS)), decorate(rng, words, "infrastructure"))

    for month_idx in range(2, 25):
        for theme in MONTH_SCHEDULE.get(month_idx, []):
            for _pair in range(DOCS_PER_PARTY):
                d_words = theme_words(rng, theme)
                r_words = theme_words(rng, theme)
                if rng.random() < 0.7:
                    d_words.append(str(rng.choice([w for w, _ in CARE_HIGH])))
                    r_words.append(str(rng.choice([w for w, _ in CARE_LOW])))
                if rng.random() < 0.6:
                    d_words.append(str(rng.choice([w for w, _ in LOYALTY_HIGH])))
                    r_words.append(str(rng.choice([w for w, _ in LOYALTY_LOW])))
                for pool in UNPLANTED.values():
                    if rng.random() < 0.5:
                        mirrored = str(rng.choice([w for w, _ in pool]))
                        d_words.append(mirrored)
                        r_words.append(mirrored)
                account = "professional" if rng.random() < 0.5 else "personal"
                add_row(month_idx, "D", account, str(rng.choice(D_AUTHORS)),
                        decorate(rng, d_words, theme))
                add_row(month_idx, "R", account, str(rng.choice(R_AUTHORS)),
                        decorate(rng, r_words, theme))
            for _ in range(2):
                words = theme_words(rng, theme)
                if rng.random() < 0.3:
                    pool = lexicon_rows()
                    words.append(str(rng.choice([w for w, _, _ in pool])))
                add_row(month_idx, "I", "personal", str(rng.choice(I_AUTHORS)),
                        decorate(rng, words, theme))

    # Out-of-vocabulary documents: tokens with no word vectors.
    for k in range(6):
        month_idx = int(rng.integers(2, 25))
        text = " ".join(f"zzqx{k}{j}" for j in range(6))
        add_row(month_idx, "I", "personal", "ind_white_01", text)

    # Rows that clean down to nothing.
    for k in range(8):
        month_idx = int(rng.integers(2, 25))
        if k % 2 == 0:
            text = f"RT @sen_blue_01: https://t.co/{''.join(rng.choice(list('abc123'), size=8))} #update"
        else:
            text = "the and of to is are"
        add_row(month_idx, "I", "personal", "ind_white_02", text)

    # A few non-ASCII documents; letters survive cleaning.
    for k in range(5):
        month_idx = int(rng.integers(21, 25))
        words = theme_words(rng, "education") + ["educación", "derecho"]
        add_row(month_idx, "I", "personal", "ind_white_01", decorate(rng, words, "education"))

    rows.sort(key=lambda r: (r["timestamp"], r["id"]))
    with open(OUT_DIR / "corpus.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["id", "timestamp", "author", "party", "account_type", "text"]
        )
        writer.writeheader()
        writer.writerows(rows)

    config = {
        "corpus": {"path": "corpus.csv", "format": "csv"},
        "word_vectors": "vectors.txt",
        "moral_lexicon": "moral_lexicon.tsv",
        "seed": 117,
        "out": "out",
    }
    (OUT_DIR / "config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(rows)} rows to {OUT_DIR / 'corpus.csv'}")


if __name__ == "__main__":
    main()
