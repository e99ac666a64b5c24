#!/usr/bin/env python3
"""Detection chain: losses, backgrounds, beam splitting, gated clicks.

Walks one channel through the transport model and checks each stage
against its closed form: binomial thinning composes multiplicatively,
Poisson backgrounds shift the click probability by an exponential factor,
and a binary detector seeing geometric light of mean mu through total
efficiency eta clicks with probability eta*mu/(1 + eta*mu).
"""

import math

import numpy as np

from pairsim import SourceModel, add_background, detect_batch, sample_write, split, thin

DRAWS = 1_000_000


def main():
    rng = np.random.default_rng(7)

    print("thinning composition: thin(thin(n, 0.8), 0.5) vs thin(n, 0.4)")
    start = np.full(DRAWS, 5, dtype=np.int64)
    twice = thin(thin(start, 0.8, rng), 0.5, rng)
    once = thin(start, 0.4, rng)
    print(f"  means {twice.mean():.5f} vs {once.mean():.5f} (exact 2.0)")

    print("Poisson background of mean 0.01 on an empty channel")
    out = add_background(np.zeros(DRAWS, dtype=np.int64), 0.01, rng)
    print(f"  P(>=1 photon) {np.mean(out >= 1):.6f} "
          f"(closed form {1 - math.exp(-0.01):.6f})")

    print("50/50 beam splitter conserves and balances")
    n = rng.poisson(1.0, DRAWS)
    a, b = split(n, rng)
    print(f"  conservation holds: {np.array_equal(a + b, n)}, "
          f"mean split {a.mean():.4f} / {b.mean():.4f}")

    print("gated click detector on geometric light, mean 0.2, efficiency 0.5")
    exc = sample_write(0.2, SourceModel.QUANTUM_TMS, rng, size=DRAWS)
    clicked, offsets = detect_batch(exc.n_stokes, 0.5, 0.0, 0.0, 1e-6, rng)
    expected = 0.5 * 0.2 / (1 + 0.5 * 0.2)
    print(f"  click probability {clicked.mean():.6f} "
          f"(geometric series {expected:.6f})")
    print(f"  all {offsets.size:,} timestamps inside the 1 us gate: "
          f"{bool(np.all((offsets >= 0) & (offsets < 1e-6)))}")

    print("reference detector: single photon at 64% efficiency")
    one = np.ones(DRAWS, dtype=np.int64)
    clicked, _ = detect_batch(one, 0.64, 0.0, 0.0, 1e-6, rng)
    print(f"  click probability {clicked.mean():.5f} (target 0.64)")


if __name__ == "__main__":
    main()
