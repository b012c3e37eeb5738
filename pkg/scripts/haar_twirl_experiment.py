#!/usr/bin/env python3
"""Convergence experiment: Monte-Carlo Haar averaging vs the exact twirl.

Samples SU(2) uniformly (unit quaternions), pushes the rotations through
three spin-1 factors, and tracks how fast the sample average of U A U^dag
approaches the commutant projection.  Expected scaling: error ~ 1/sqrt(N).

Usage: python scripts/haar_twirl_experiment.py [max_samples] [seed]
"""

import sys

import numpy as np

from qrf import reps


def haar_su2_batch(rng, count):
    q = rng.standard_normal((count, 4))
    q /= np.linalg.norm(q, axis=1)[:, None]
    psi = np.arccos(np.clip(q[:, 0], -1, 1))
    vec = q[:, 1:]
    norms = np.linalg.norm(vec, axis=1)
    safe = norms > 1e-12
    axes = np.zeros_like(vec)
    axes[safe] = vec[safe] / norms[safe][:, None]
    axes[~safe] = [0.0, 0.0, 1.0]
    return psi, axes


def main() -> int:
    max_samples = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    rng = np.random.default_rng(seed)

    total_rep = reps.tensor([reps.spin_rep(1)] * 3)
    h = rng.standard_normal((27, 27)) + 1j * rng.standard_normal((27, 27))
    a = (h + h.conj().T) / 2
    a /= np.linalg.norm(a)
    exact = reps.group_average(total_rep, a, "twirl", 1.0)

    half_gens = np.stack(reps.spin_rep(1).generators) / 2.0
    total = np.zeros((27, 27), dtype=complex)
    done = 0
    checkpoints = {int(10 ** (k / 2)) for k in range(4, 2 * int(np.log10(max_samples)) + 1)}
    print(f"{'samples':>9s}  {'|mc - exact|_F':>14s}  {'sqrt(N)*err':>12s}")
    while done < max_samples:
        m = min(2000, max_samples - done)
        psi, axes = haar_su2_batch(rng, m)
        gen = np.einsum("mk,kij->mij", axes, half_gens)
        u3 = (
            np.eye(3)[None, :, :]
            + 1j * np.sin(2 * psi)[:, None, None] * gen
            + (np.cos(2 * psi) - 1.0)[:, None, None] * (gen @ gen)
        )
        u27 = np.einsum("mab,mcd,mef->macebdf", u3, u3, u3, optimize=True).reshape(m, 27, 27)
        total += np.einsum("mij,jk,mlk->il", u27, a, np.conj(u27), optimize=True)
        done += m
        if done in checkpoints or done == max_samples:
            err = float(np.linalg.norm(total / done - exact))
            print(f"{done:9d}  {err:14.3e}  {np.sqrt(done) * err:12.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
