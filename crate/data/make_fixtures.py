#!/usr/bin/env python3
"""Regenerates the synthetic LIBSVM fixtures in this directory.

Two well-separated Gaussian blobs (train/test, 400 points each) and one
overlapping pair (500 points) for convergence experiments. Seeded, so the
output is reproducible byte for byte.
"""

import random
from pathlib import Path

HERE = Path(__file__).parent


def blob_file(path, m, centers, sigma, seed):
    rng = random.Random(seed)
    lines = []
    for i in range(m):
        label = 1 if i % 2 == 0 else -1
        cx, cy = centers[0] if label == 1 else centers[1]
        x = rng.gauss(cx, sigma)
        y = rng.gauss(cy, sigma)
        lines.append(f"{'+1' if label == 1 else '-1'} 1:{x!r} 2:{y!r}")
    path.write_text("\n".join(lines) + "\n")


def main():
    blob_file(
        HERE / "two_gaussians_train.libsvm",
        400,
        [(0.0, 0.0), (4.0, 4.0)],
        1.0,
        seed=20240101,
    )
    blob_file(
        HERE / "two_gaussians_test.libsvm",
        400,
        [(0.0, 0.0), (4.0, 4.0)],
        1.0,
        seed=20240202,
    )
    blob_file(
        HERE / "overlapping_train.libsvm",
        500,
        [(0.0, 0.0), (2.0, 2.0)],
        1.2,
        seed=20240303,
    )


if __name__ == "__main__":
    main()
