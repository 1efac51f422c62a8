"""Regenerate the committed sample data under demos/data/.

Deterministic: a fixed seed drives thread shapes, topic drift, and author
assignment, so rerunning this script reproduces the files byte for byte.
The dump mimics two communities (thread ids a*, b*) with different topic
mixes, a couple of bot accounts, some entity-free comments, and a few
malformed records, so every ingest counter gets exercised.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

SEED = 20170401
N_THREADS = 200
MAX_DEPTH = 6

DATA_DIR = Path(__file__).resolve().parent / "data"

TOPICS = {
    "politics": [
        ("Donald_Trump", ["Trump", "Donald Trump"]),
        ("Joe_Biden", ["Biden"]),
        ("China", ["China"]),
        ("Russia", ["Russia"]),
        ("Congress", ["Congress"]),
        ("White_House", ["White House"]),
    ],
    "tech": [
        ("Apple_Inc", ["Apple"]),
        ("Google", ["Google"]),
        ("IPhone", ["iPhone"]),
        ("Artificial_intelligence", ["AI"]),
        ("Elon_Musk", ["Musk", "Elon Musk"]),
        ("Twitter", ["Twitter"]),
    ],
    "sports": [
        ("NBA", ["NBA"]),
        ("LeBron_James", ["LeBron"]),
        ("Super_Bowl", ["Super Bowl"]),
        ("New_York_Yankees", ["Yankees"]),
        ("Olympics", ["Olympics"]),
        ("FIFA", ["FIFA"]),
    ],
}

# cluster centers for the embedding file; entities get small seeded offsets
CENTERS = {"politics": (0.0, 0.0), "tech": (10.0, 0.0), "sports": (0.0, 10.0)}

MIXES = {
    "a": [("politics", 0.6), ("tech", 0.4)],
    "b": [("politics", 0.3), ("sports", 0.7)],
}

FILLER = [
    "honestly no idea what to make of this",
    "this again",
    "source please",
    "came here to say exactly that",
    "lol",
    "can we not",
    "good point, saving this thread",
]

BOTS = ["newsbot", "remindme-bot"]
USERS = [f"user{i:02d}" for i in range(40)]


def pick_topic(rng: random.Random, mix) -> str:
    r = rng.random()
    acc = 0.0
    for topic, p in mix:
        acc += p
        if r < acc:
            return topic
    return mix[-1][0]


def comment_text(rng: random.Random, topic: str, n_entities: int) -> str:
    if n_entities == 0:
        return rng.choice(FILLER)
    picks = rng.sample(TOPICS[topic], k=min(n_entities, len(TOPICS[topic])))
    surfaces = [rng.choice(surfs) for _, surfs in picks]
    templates = [
        "so {0} is everywhere today",
        "{0} really did that huh",
        "saw a long piece on {0} this morning",
        "between this and {0} it has been a week",
    ]
    if len(surfaces) == 1:
        return rng.choice(templates).format(surfaces[0])
    return f"{surfaces[0]} and {surfaces[1]} in the same story, what a timeline"


def build_thread(rng: random.Random, prefix: str, index: int) -> list[dict]:
    tid = f"{prefix}{index:03d}"
    mix = MIXES[prefix]
    topic = pick_topic(rng, mix)
    records = [
        {
            "id": f"t3_{tid}",
            "author": rng.choice(USERS),
            "title": comment_text(rng, topic, rng.choice([1, 1, 2])),
            "subreddit": "alphatalk" if prefix == "a" else "betatalk",
        }
    ]
    counter = 0

    def grow(parent_full_id: str, parent_topic: str, depth: int) -> None:
        nonlocal counter
        if depth > MAX_DEPTH:
            return
        n_children = 0
        while n_children < 3 and rng.random() < 0.8 - 0.07 * depth:
            n_children += 1
        for _ in range(n_children):
            counter += 1
            cid = f"t1_{tid}c{counter:02d}"
            topic_here = parent_topic if rng.random() < 0.7 else pick_topic(rng, mix)
            author = rng.choice(BOTS) if rng.random() < 0.04 else rng.choice(USERS)
            n_entities = rng.choice([0, 1, 1, 1, 2]) if depth > 1 else rng.choice([1, 1, 2])
            records.append(
                {
                    "id": cid,
                    "parent_id": parent_full_id,
                    "link_id": f"t3_{tid}",
                    "author": author,
                    "body": comment_text(rng, topic_here, n_entities),
                }
            )
            grow(cid, topic_here, depth + 1)

    grow(f"t3_{tid}", topic, 1)
    return records


def main() -> None:
    rng = random.Random(SEED)
    DATA_DIR.mkdir(parents=True, exist_ok=True)

    lines = []
    for i in range(N_THREADS):
        prefix = "a" if i < N_THREADS // 2 else "b"
        for record in build_thread(rng, prefix, i % (N_THREADS // 2)):
            lines.append(json.dumps(record))
    # two broken records and one orphan, so ingest counters are non-zero
    lines.insert(
        37,
        json.dumps({"id": "t1_stray1", "parent_id": "t1_gone", "body": "no link id here"}),
    )
    lines.insert(201, "{this is not json")
    lines.append(
        json.dumps(
            {
                "id": "t1_orphan",
                "parent_id": "t1_a000c99",
                "link_id": "t3_a000",
                "author": "user00",
                "body": "replying to a deleted comment",
            }
        )
    )
    (DATA_DIR / "sample_dump.jsonl").write_text("\n".join(lines) + "\n")

    gaz_rows = []
    for topic, entries in TOPICS.items():
        for entity, surfaces in entries:
            prior = 0.9
            for surface in surfaces:
                gaz_rows.append(f"{surface}\t{entity}\t{prior}")
    # one ambiguous surface and one below the default prior cutoff
    gaz_rows.append("Apple\tApple_(fruit)\t0.05")
    gaz_rows.append("Mercury\tMercury_(planet)\t0.3")
    (DATA_DIR / "gazetteer.tsv").write_text("\n".join(sorted(gaz_rows)) + "\n")

    emb_rows = []
    for topic, entries in TOPICS.items():
        cx, cy = CENTERS[topic]
        for entity, _ in entries:
            emb_rows.append(
                f"{entity} {cx + rng.uniform(-2, 2):.6f} {cy + rng.uniform(-2, 2):.6f}"
            )
    emb_rows.append(f"Apple_(fruit) {rng.uniform(4, 6):.6f} {rng.uniform(4, 6):.6f}")
    emb_rows.append(f"Mercury_(planet) {rng.uniform(4, 6):.6f} {rng.uniform(4, 6):.6f}")
    (DATA_DIR / "embeddings.txt").write_text("\n".join(sorted(emb_rows)) + "\n")

    (DATA_DIR / "bots.txt").write_text("\n".join(BOTS) + "\n")

    n_comments = sum(1 for line in lines if '"t1_' in line)
    print(f"wrote {N_THREADS} threads, {n_comments} comments to {DATA_DIR}")


if __name__ == "__main__":
    main()
