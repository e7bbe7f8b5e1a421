#!/usr/bin/env python3
"""Smoke test for the Python bindings.

Build the extension first (see README), or run via:

    cargo build -p newton-mcmc-py --release
    cp target/release/libnewton_mcmc_py.so python/newton_mcmc_py.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import newton_mcmc_py as nm


def check(name, ok, detail=""):
    status = "ok" if ok else "FAIL"
    print(f"  {name}: {status} {detail}")
    if not ok:
        sys.exit(1)


def main():
    print("model construction and energies")
    model = nm.Model.ising(2, 2, 0.1, 0.2)
    check("dim", model.dim() == 4)
    # All-up state: 4 edges * 0.1 + 4 sites * 0.2 = 1.2.
    check("energy", math.isclose(model.energy([1, 1, 1, 1]), 1.2, abs_tol=1e-12))

    print("chain run vs exact mean")
    exact = model.exact_mean()
    result = nm.run(model, "newton", alpha=0.5, mh=True, steps=100_000, seed=1)
    rmse = math.sqrt(
        sum((a - b) ** 2 for a, b in zip(result.mean_state, exact)) / len(exact)
    )
    check("rmse", rmse <= 0.02, f"(rmse={rmse:.4f})")
    check("acceptance", 0.0 < result.acceptance_rate <= 1.0)

    print("diagnostics")
    ess = nm.ess(result.energies)
    check("ess", 0.0 < ess <= len(result.energies), f"(ess={ess:.0f})")
    vote = nm.majority_vote(result.mean_state, 2)
    check("majority vote", sum(vote) == 2)

    print("multilinear extension")
    # f over subsets of {0,1}: extension at (0.5, 0.5) is the average.
    values = [1.0, 2.0, 3.0, 4.0]
    check("midpoint", math.isclose(nm.extension(2, values, [0.5, 0.5]), 2.5))
    grad = nm.extension_gradient(2, values, [0.0, 0.0])
    check("gradient", grad == [2.0, 1.0], f"({grad})")

    print("exact bound checks")
    bias = nm.stationarity_bias(model, [1.0, 0.5, 0.1])
    distances = [d for (_, d, _) in bias]
    check("bias bound", all(d <= b + 1e-9 for (_, d, b) in bias))
    check("bias monotone", distances == sorted(distances, reverse=True))
    c, gap_full, gap_coord, gap_ok, var_ok = nm.spectral_comparison(model, 0.5)
    check("gap bound", gap_ok and var_ok, f"(c={c:.3f}, gaps {gap_full:.3f}/{gap_coord:.3f})")

    print("OK")


if __name__ == "__main__":
    main()
