#!/usr/bin/env python3
"""Writes a small LIBSVM file shaped like the mushrooms data: 22 one-hot
categorical attributes (112 binary features) and a noisy linear label rule."""
import argparse

import numpy as np

CARDINALITIES = [6, 4, 10, 2, 9, 2, 2, 2, 12, 2, 5, 4, 4, 9, 9, 1, 4, 3, 5, 9, 6, 2]


def generate(positives, negatives, seed):
    rng = np.random.default_rng(seed)
    weights = [rng.normal(size=k) for k in CARDINALITIES]
    rows = []
    while len(rows) < 40 * (positives + negatives):
        choice = [int(rng.integers(k)) for k in CARDINALITIES]
        score = sum(w[c] for w, c in zip(weights, choice)) + 0.5 * rng.normal()
        rows.append((score, choice))
    rows.sort(key=lambda r: r[0])
    cut = np.median([r[0] for r in rows])
    pos = [c for s, c in rows if s > cut][:positives]
    neg = [c for s, c in rows if s <= cut][:negatives]
    data = [(1, c) for c in pos] + [(-1, c) for c in neg]
    order = rng.permutation(len(data))
    return [data[i] for i in order]


def to_libsvm(label, choice):
    offsets = np.cumsum([0] + CARDINALITIES[:-1])
    idx = sorted(int(o) + c + 1 for o, c in zip(offsets, choice))
    return ("+1" if label > 0 else "-1") + "".join(f" {i}:1" for i in idx)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--positives", type=int, default=60)
    ap.add_argument("--negatives", type=int, default=140)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("out")
    args = ap.parse_args()
    with open(args.out, "w", newline="\n") as f:
        for label, choice in generate(args.positives, args.negatives, args.seed):
            f.write(to_libsvm(label, choice) + "\n")


if __name__ == "__main__":
    main()
