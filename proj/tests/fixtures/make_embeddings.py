"""Regenerates embeddings.txt for the test fixtures.

Sentiment-bearing words share a "quality" direction and are spread along a
polarity axis, so nearest neighbours stay within the same sentiment band.
Everything else gets a seeded pseudo-random direction.
"""
import hashlib
import math
import pathlib
import random
import re

HERE = pathlib.Path(__file__).parent
DIM = 12

POLARITY = {
    -2: "terrible awful horrible rude disgusting worst dirty burnt never".split(),
    -1: "bland slow disappointing disappointed mediocre overpriced dry soggy bored cold".split(),
    0: "okay fine average decent ordinary special".split(),
    1: "good great friendly nice tasty quick crisp relax".split(),
    2: "outstanding amazing absolutely delicious fantastic incredible perfect best".split(),
}


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def seeded(token):
    seed = int.from_bytes(hashlib.sha256(token.encode()).digest()[:8], "little")
    return random.Random(seed)


def vector(token):
    rng = seeded(token)
    for p, words in POLARITY.items():
        if token in words:
            v = [rng.uniform(-0.05, 0.05) for _ in range(DIM)]
            v[0] += 1.0
            v[1] += p / 2.0
            return unit(v)
    v = [rng.uniform(-1.0, 1.0) for _ in range(DIM)]
    v[0] *= 0.1
    v[1] *= 0.1
    return unit(v)


def main():
    vocab = set()
    for path in sorted(HERE.glob("*/*.txt")):
        for word in re.findall(r"[a-z0-9']+", path.read_text().lower()):
            vocab.add(word)
    for words in POLARITY.values():
        vocab.update(words)
    lines = []
    for token in sorted(vocab):
        lines.append(token + " " + " ".join(f"{x:.6f}" for x in vector(token)))
    (HERE / "embeddings.txt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
