"""Correlated write/read photon-pair source models.

A write pulse populates a forward-scattered light mode (the "write" or
Stokes channel) together with a long-lived collective excitation of the
atomic ensemble acting as a bosonic memory mode.  Two source laws are
implemented:

``quantum_tms``
    Two-mode-squeezed statistics: a single excitation number n is drawn
    from the geometric (single-mode thermal) law

        P(n) = p**n / (1 + p)**(n + 1),

    with mean p, and the write mode and the memory mode share that number
    exactly.  This is the nonclassical reference model.

``classical_correlated``
    A common exponentially distributed intensity lam with mean p drives
    two independent Poisson counts.  The joint law admits a positive
    P-representation by construction, so it can never violate the
    Cauchy-Schwarz bound; it serves as the classical boundary model.

After a storage delay the memory mode decoheres (excitations are lost and
uncorrelated ones diffuse in) and a read pulse converts the surviving
excitations to photons in the read (anti-Stokes) channel.

All samplers accept either scalar counts or numpy arrays (one entry per
trial) and draw from a caller-supplied ``numpy.random.Generator``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln


class SourceModel(Enum):
    """Physics of the write process."""

    QUANTUM_TMS = "quantum_tms"
    CLASSICAL_CORRELATED = "classical_correlated"


@dataclass
class TrialExcitation:
    """Per-trial excitation numbers at each pipeline stage.

    ``n_stokes`` and ``n_memory`` are set at write time; ``n_antistokes``
    starts at zero and is filled after retrieval.  Fields are ints for a
    single trial or int64 arrays for a batch of trials.
    """

    n_stokes: np.ndarray | int
    n_memory: np.ndarray | int
    n_antistokes: np.ndarray | int


def _size_of(n):
    """None for scalars, else the array shape (for rng size arguments)."""
    return None if np.isscalar(n) else np.shape(n)


def sample_write(p: float, model: SourceModel, rng: np.random.Generator,
                 size: int | None = None) -> TrialExcitation:
    """Sample write-pulse excitation numbers for one trial or a batch.

    Parameters
    ----------
    p : mean excitation number per write pulse (>= 0).
    model : source law, see module docstring.
    rng : numpy Generator.
    size : None for a single trial, else number of trials.

    Returns
    -------
    TrialExcitation with n_stokes and n_memory filled, n_antistokes zeroed.
    """
    if p < 0:
        raise ValueError(f"mean excitation p must be >= 0, got {p}")
    if model is SourceModel.QUANTUM_TMS:
        if p == 0:
            n = 0 if size is None else np.zeros(size, dtype=np.int64)
        else:
            # numpy's geometric is supported on {1, 2, ...}; shift to {0, 1, ...}
            n = rng.geometric(1.0 / (1.0 + p), size=size) - 1
        n_stokes = n
        n_memory = n if size is None else np.array(n, dtype=np.int64)
    elif model is SourceModel.CLASSICAL_CORRELATED:
        lam = rng.exponential(scale=p, size=size) if p > 0 else (
            0.0 if size is None else np.zeros(size))
        n_stokes = rng.poisson(lam, size=size)
        n_memory = rng.poisson(lam, size=size)
    else:
        raise ValueError(f"unknown source model: {model!r}")
    zero = 0 if size is None else np.zeros(size, dtype=np.int64)
    return TrialExcitation(n_stokes=n_stokes, n_memory=n_memory, n_antistokes=zero)


def joint_pmf(p: float, model: SourceModel, n_s: int, n_m: int) -> float:
    """Exact probability of the joint count (n_s, n_m) under the source law.

    Analytic counterpart of :func:`sample_write`.  For ``quantum_tms`` the
    pmf is zero off the diagonal n_s == n_m; for ``classical_correlated``
    the exponential mixture of Poisson pairs integrates to

        P(n_s, n_m) = C(n_s + n_m, n_s) * (1/p) / (2 + 1/p)**(n_s + n_m + 1).
    """
    if p < 0:
        raise ValueError(f"mean excitation p must be >= 0, got {p}")
    if n_s < 0 or n_m < 0:
        raise ValueError("counts must be >= 0")
    if model is SourceModel.QUANTUM_TMS:
        if n_s != n_m:
            return 0.0
        if p == 0:
            return 1.0 if n_s == 0 else 0.0
        return math.exp(n_s * math.log(p) - (n_s + 1) * math.log1p(p))
    if model is SourceModel.CLASSICAL_CORRELATED:
        if p == 0:
            return 1.0 if (n_s == 0 and n_m == 0) else 0.0
        k = n_s + n_m
        log_binom = gammaln(k + 1) - gammaln(n_s + 1) - gammaln(n_m + 1)
        return float(np.exp(log_binom - math.log(p)
                            - (k + 1) * math.log(2.0 + 1.0 / p)))
    raise ValueError(f"unknown source model: {model!r}")


def decohere_memory(n_memory, delay: float, lifetime: float,
                    diffusion_in_mean: float, rng: np.random.Generator):
    """Apply storage decoherence to the memory mode.

    Each stored excitation independently survives the write-read delay with
    probability exp(-delay/lifetime).  Uncorrelated excitations diffuse in
    as a Poisson count with mean ``diffusion_in_mean * (1 - survival)``;
    the (1 - survival) scaling makes delay == 0 exactly clean.
    """
    if delay < 0:
        raise ValueError(f"delay must be >= 0, got {delay}")
    if lifetime <= 0:
        raise ValueError(f"lifetime must be > 0, got {lifetime}")
    if diffusion_in_mean < 0:
        raise ValueError(f"diffusion_in_mean must be >= 0, got {diffusion_in_mean}")
    survival = math.exp(-delay / lifetime)
    survivors = rng.binomial(n_memory, survival)
    injected = rng.poisson(diffusion_in_mean * (1.0 - survival),
                           size=_size_of(n_memory))
    return survivors + injected


def retrieve(n_memory, eta_r: float, rng: np.random.Generator):
    """Convert stored excitations to read-channel photons (binomial thinning)."""
    if not 0.0 <= eta_r <= 1.0:
        raise ValueError(f"retrieval efficiency must be in [0, 1], got {eta_r}")
    return rng.binomial(n_memory, eta_r)
