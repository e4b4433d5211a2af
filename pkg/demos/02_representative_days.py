"""Compress 120 historical days into a 7-day synthetic optimization period.

Each day is summarized by twelve statistics (mean/std/max/min of price,
total demand, and PV capacity factor), standardized, and clustered with
k-means. The day closest to each centroid becomes the cluster's
representative; a first-order Markov chain fitted on the historical label
sequence then samples which representative plays on each synthetic day.
"""

import numpy as np

from hessmg import build_scenario, make_demo_dataset
from hessmg.scenario import stationary_distribution


def main():
    days = make_demo_dataset(seed=0, n_days=120)
    scenario = build_scenario(days, w=5, t_syn=7, seed=0)

    print(f"{len(days)} historical days -> {scenario.n_clusters} clusters "
          f"-> {len(scenario.sequence)} synthetic days\n")

    print("cluster  weight  representative  mean price  mean demand")
    for j in range(scenario.n_clusters):
        rep = scenario.representatives[j]
        demand = rep.demand_ch + rep.demand_wh
        print(f"  {j}      {scenario.weights[j]:5.3f}   {rep.date}      "
              f"{rep.price.mean():7.1f}     {demand.mean():5.2f}")

    print("\nday-to-day transition matrix (rows sum to 1):")
    with np.printoptions(precision=2, suppress=True):
        print(scenario.transition)

    print("\nsampled synthetic sequence:", scenario.sequence.tolist())
    pi = stationary_distribution(scenario.transition)
    with np.printoptions(precision=3, suppress=True):
        print("stationary distribution of the chain:", pi)

    # the scenario serializes to JSON, so a batch of experiments can share it
    text = scenario.to_json()
    print(f"\nserialized scenario: {len(text)} bytes of JSON")


if __name__ == "__main__":
    main()
