#!/usr/bin/env python3
"""Storage-delay sweep: how long does the pair correlation survive?

The write-read delay is the headline capability of a photon-pair memory:
the two photons of a pair are separated by a controllable storage time.
With a finite memory lifetime the surviving correlated fraction decays
exponentially in the delay while diffused-in excitations grow, so the
cross correlation g12 falls monotonically; the classicality violation
persists as long as g12^2 stays above g11*g22.
"""

import dataclasses

from pairsim import reference_preset, sweep

DELAYS_US = [0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0]
LIFETIME = 3e-6
TRIALS = 1_000_000


def main():
    cfg = dataclasses.replace(reference_preset(), memory_lifetime=LIFETIME)
    rows = sweep(cfg, "delay_dt", [d * 1e-6 for d in DELAYS_US],
                 trials=TRIALS, seed=5)
    print(f"memory lifetime {LIFETIME * 1e6:.0f} us, {TRIALS:,} trials per point\n")
    print("delay (us)   g12           g11     g22     ratio    verdict")
    for delay, row in zip(DELAYS_US, rows):
        print(f"{delay:8.1f}   {row['g12']:5.2f} +- {row['g12_sigma']:4.2f}"
              f"   {row['g11']:5.2f}   {row['g22']:5.2f}   {row['ratio']:6.2f}"
              f"   {row['verdict']}")
    print("\ng12 decays with the storage delay; the violation persists past "
          "the 2 us reference delay and fades as the memory decoheres.")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available, skipping the figure")
        return
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.errorbar(DELAYS_US, [r["g12"] for r in rows],
                yerr=[r["g12_sigma"] for r in rows], fmt="o-", capsize=3,
                label="g12(delay)")
    ax.axhline(2.0, ls="--", c="gray", label="typical g11, g22 level")
    ax.set_xlabel("write-read delay (us)")
    ax.set_ylabel("normalized cross correlation")
    ax.legend()
    fig.tight_layout()
    fig.savefig("demos_delay_sweep.png", dpi=120)
    print("wrote demos_delay_sweep.png")


if __name__ == "__main__":
    main()
