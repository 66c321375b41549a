"""Walk through the full pipeline on the blob-in-ring data set.

Generates a small reference set, clusters it, corrupts it a few hundred
times per noise level, and prints how the expected misclustering rate and
the three set-valued expectations respond to growing noise.
"""

import numpy as np

import specuq as sq

rng = np.random.default_rng(8)
X = sq.gen_point_in_circle(40, rng)  # 120 points, labels 1 (blob) and 2 (ring)
sigma = sq.mst_sigma(X)
print(f"n={len(X)}  sigma (MST heuristic) = {sigma:.3f}")

bundle = sq.laplacian(sq.similarity_matrix(X, sigma))
pair = sq.fiedler_pair(bundle)
inside, outside = sq.bi_cluster(pair.vector)
print(f"Fiedler eigenvalue {pair.value:.4f}, gap {pair.gap:.4f}")
print(f"reference clustering: |A|={inside.size}, |A-bar|={outside.size}")
print("(the blob's tail overlaps the ring here, so the sign cut bisects the")
print(" plane; the pipeline quantifies the stability of *this* clustering)")

ctx = sq.GaugeContext(pair.vector)
reference = pair.vector >= 0
source = sq.make_regeneration_source(sq.GeneratorSpec(kind="point_in_circle", m=40, seed=8))

print("\n eps   rate   |vorobev|  |odf|  |spectral|  t*")
for eps in (0.025, 0.05, 0.1, 0.2, 0.4):
    corruption = sq.CorruptionConfig(
        deletion_range=(0.01, 0.07), noise_std=eps, master_seed=123
    )
    acc = sq.Accumulator(size=len(X))
    for index in range(300):
        sample = sq.corrupt(X, corruption, source, index)
        sq.accumulate(acc, sq.cluster_reference_under_sample(X, sample, sigma, ctx), reference)
    report = sq.finalize(acc, reference)
    print(
        f"{eps:5.3f}  {report.expected_misclustering_rate:6.2f}  "
        f"{report.vorobev_set.size:8d}  {report.odf_set.size:5d}  "
        f"{report.spectral_set.size:9d}  {report.t_star:.3f}"
    )

print("\nLarger noise perturbs more points across the spectral boundary, so the")
print("rate grows while the expectation sets stay close to the reference cluster.")
