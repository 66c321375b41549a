"""Expectations of a random set with known inclusion probabilities.

Each of five points joins the random set independently with probability
(0.9, 0.7, 0.5, 0.3, 0.1).  The mean cardinality is 2.5, so the Vorob'ev
expectation is the coverage superlevel set holding the 2-3 most likely
points; Monte Carlo estimation recovers it along with the coverage function.
"""

import numpy as np

import specuq as sq

inclusion = np.array([0.9, 0.7, 0.5, 0.3, 0.1])
X = sq.DataSet(np.arange(5.0)[:, None])
reference = inclusion >= 0.5

rng = np.random.default_rng(0)
acc = sq.Accumulator(size=5)
while acc.sample_count < 20_000:
    member = rng.random(5) < inclusion
    if member.all() or not member.any():
        continue  # empty/full sets have infinite oriented distances
    levels = np.where(member, 0.5, -0.5)
    sample = sq.ClusterSample(
        membership=member,
        levels=levels,
        odf=sq.odf_values(member, X),
        sample_cardinality=int(member.sum()),
    )
    sq.accumulate(acc, sample, reference)

report = sq.finalize(acc, reference)
print("true inclusion:", inclusion.tolist())
print("estimated coverage:", np.round(report.coverage, 3).tolist())
print(f"mean cardinality: {acc.cardinality_sum / acc.sample_count:.3f}")
print(f"Vorob'ev threshold t* = {report.t_star:.3f}")
print("Vorob'ev set:", report.vorobev_set.tolist())
print("ODF set:", report.odf_set.tolist())
print("mean misclustering vs {0,1,2}:", f"{report.expected_misclustering_rate:.3f}")
