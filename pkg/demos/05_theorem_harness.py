"""Testing the harmonicity implications as implications, over random maps.

Two statements are exercised over a family of PHWC maps: a parallel
associated f-structure forces harmonicity, and so does an integrable one
whose fundamental 2-form has vanishing mixed part together with the
covariant-derivative condition out of the 0-eigenspace.  The harness
measures every hypothesis, counts counterexamples (there should be none),
and -- because all of this silently relies on the target being Kaehler --
validates that claim too.  Forging the flag on a non-Kaehler metric is
caught and reported rather than corrupting the tension computation.

Run:  python demos/05_theorem_harness.py
"""

import numpy as np

from phwc import HermitianMetricField, MetricField, SuiteSample, compose, theorem_suite
from phwc.catalog import (
    immersion_r2_c3,
    linear_r4_c2,
    non_kaehler_hermitian_c2,
    random_holomorphic_map,
    sample_points,
)

rng = np.random.default_rng(5)
ex1, ex2 = immersion_r2_c3(), linear_r4_c2()
g2, g4 = MetricField.euclidean(2), MetricField.euclidean(4)

samples = [
    SuiteSample("immersion_c3", ex1, g2, HermitianMetricField.flat(3),
                sample_points(rng, 5, [[-1, 1]] * 2)),
    SuiteSample("linear_c2", ex2, g4, HermitianMetricField.flat(2),
                sample_points(rng, 5, [[-1, 1]] * 4)),
]
for idx in range(8):
    base, g, nin = (ex1, g2, 3) if idx % 2 == 0 else (ex2, g4, 2)
    psi = random_holomorphic_map(rng, nin, 2)
    samples.append(SuiteSample(f"composite_{idx}", compose(psi, base), g,
                               HermitianMetricField.flat(2),
                               sample_points(rng, 3, [[-1, 1]] * base.domain_dim)))

report = theorem_suite(samples)
print(f"honest suite: {report.checked} points checked, "
      f"{report.skipped} skipped, {report.counterexamples} counterexamples")
sample_rec = next(r for r in report.records if r.status == "ok")
print("a typical record:")
for key, val in sample_rec.residuals.items():
    print(f"    {key:10s} {val:.3e}")

print("\nnegative control: forged Kaehler flag on a non-Kaehler metric")
forged = non_kaehler_hermitian_c2()
forged.kaehler = True
control = theorem_suite([SuiteSample(
    "forged", ex2, g4, forged, sample_points(rng, 3, [[-1, 1]] * 4))])
print(f"  counterexamples reported: {control.counterexamples}")
for rec in control.counterexample_records():
    print(f"    {rec.sample} at {np.round(rec.point, 2)}: {rec.reasons[0]} "
          f"(closedness residual {rec.residuals['kaehler']:.3f})")
