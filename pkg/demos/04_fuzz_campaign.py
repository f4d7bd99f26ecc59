"""
A seeded random campaign
========================

Each trial draws its pair from a counter-based generator keyed by
(seed, trial index), so results do not depend on the number of workers.
"""

import dataclasses

from zhanchain.experiments import Distribution, EnsembleConfig, records_to_csv, run_ensemble

# the guard matters on platforms where worker processes re-import this file
if __name__ == "__main__":
    config = EnsembleConfig(distribution=Distribution.log_uniform(-6, 6), n_min=2, n_max=8, trials=500, seed=7)
    result = run_ensemble(config)
    print(result.summary.to_dict())

    # Worst observed ratio rho(A o B) / rho(AB).
    worst = result.records[result.summary.argmin_trial]
    print("argmin trial", worst.trial_index, "n =", worst.n, "ratio =", worst.ratio)

    # Same seed, four worker processes: byte-identical CSV.
    parallel = run_ensemble(dataclasses.replace(config, threads=4))
    print("identical:", records_to_csv(result.records) == records_to_csv(parallel.records))
