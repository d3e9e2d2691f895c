#!/usr/bin/env python3
"""Regenerate the synthetic review fixtures under crates/core/tests/fixtures.

Texts are assembled from short aspect sentences; the share of positive
sentences rises with the star rating so lexicon sentiment carries signal.
Output is deterministic for a given seed.
"""
import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures"

ASPECTS = ["staff", "room", "bed", "breakfast", "pool", "bathroom", "location",
           "view", "lobby", "shower", "restaurant", "bar", "parking", "spa", "gym"]
POSITIVE = ["friendly", "excellent", "wonderful", "great", "clean", "comfortable",
            "lovely", "helpful", "spotless", "superb", "fantastic", "perfect"]
NEGATIVE = ["dirty", "rude", "awful", "terrible", "noisy", "broken", "filthy",
            "poor", "disappointing", "horrible", "smelly", "unhelpful"]
NEUTRAL = ["small", "busy", "old", "quiet", "modern", "large", "basic", "standard"]
FILLER = [
    "We stayed for {n} nights.",
    "The hotel is in the old town.",
    "We had a room on the {n}th floor.",
    "My husband booked the trip.",
    "We arrived by train.",
]
P_POSITIVE = {1: 0.08, 2: 0.25, 3: 0.5, 4: 0.75, 5: 0.92}
HOTELS = [f"Hotel_Review-g{100 + i}-d{2000 + i}-Reviews-Hotel_{chr(65 + i)}-Town.html"
          for i in range(12)]


def sentence(rng, rating):
    aspect = rng.choice(ASPECTS)
    roll = rng.random()
    if roll < 0.15:
        word = rng.choice(NEUTRAL)
    elif rng.random() < P_POSITIVE[rating]:
        word = rng.choice(POSITIVE)
    else:
        word = rng.choice(NEGATIVE)
    verb = rng.choice(["was", "is"])
    adverb = rng.choice(["", "", "very ", "really "])
    return f"The {aspect} {verb} {adverb}{word}."


def review(rng, rating):
    parts = [sentence(rng, rating) for _ in range(rng.randint(2, 5))]
    if rng.random() < 0.5:
        parts.insert(rng.randrange(len(parts) + 1),
                     rng.choice(FILLER).format(n=rng.randint(2, 9)))
    return {
        "hotel_url": rng.choice(HOTELS),
        "author": "anon",
        "date": "2019-01-01",
        "rating": rating,
        "title": "Stay",
        "text": " ".join(parts),
        "property_dict": {},
    }


def write(name, counts, seed):
    rng = random.Random(seed)
    labels = [r for r, c in counts.items() for _ in range(c)]
    rng.shuffle(labels)
    with open(OUT / name, "w") as f:
        for r in labels:
            f.write(json.dumps(review(rng, r)) + "\n")


SAMPLE_TRIPLES = [
    (144, "Great pool", "is in", "wonderful spot by beach", 0.83),
    (3798, "bed", "was comfortable with", "excellent linen", 0.79),
    (992, "positive", "were many small issues with", "room for improvement", 0.77),
    (6254, "loft", "best feature of was", "bathroom", 0.64),
    (276, "Breakfast", "was outstanding for", "British fryup", 0.61),
    (1299, "we", "were", "most impressed", 0.53),
    (2185, "Our 40th school reunion weekend", "was", "help", 0.40),
    (1513, "hotel", "is well located in", "historical center", 0.27),
    (4683, "Hotel", "was accommodating to", "our group", 0.00),
    (5108, "We", "brought along", "our 8yearold", 0.00),
    (721, "We", "had", "5night stay", 0.00),
    (6958, "Ravenna", "was", "crowded", 0.00),
    (3744, "same", "can", "can said of bathroom", 0.00),
    (8153, "This", "is", "our 4th year staying here", 0.00),
    (5882, "manager", "moved with", "only minor change fee", 0.00),
    (9326, "it", "is", "too much trouble", -0.40),
    (6644, "Poor excuse", "is in", "need", -0.42),
    (5672, "water temperature", "keeps", "fluctuating dangerously", -0.46),
    (8623, "check", "is", "wrong", -0.48),
    (4844, "My complaint", "was", "very poor wireless internet service", -0.68),
]


def write_triples():
    import csv
    with open(OUT / "sample_triples.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["review_id", "subject", "predicate", "object", "sentiment"])
        for row in SAMPLE_TRIPLES:
            w.writerow(row)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write("reviews_1000.jsonl", {5: 508, 4: 278, 3: 121, 2: 53, 1: 40}, seed=1000)
    write("reviews_200.jsonl", {5: 100, 4: 56, 3: 24, 2: 11, 1: 9}, seed=200)
    write_triples()
