"""Calibrate the expert threshold k against labeled ground truth.

Sweeps k over {0.0, 0.1, ..., 1.0}; for each k the labeled pairs are
split into seeded stratified folds and precision, recall and F-measure
are averaged over the held-out folds. The synthetic oracle below declares
experts exactly at normalized >= 0.5, so calibration should recover
best_k = 0.5 with a perfect F-measure, and the curve shows the usual
precision/recall trade: recall falls as k rises.

Run:  python demos/03_threshold_calibration.py
"""

from fileexperts.expertise import BLAME, ExpertiseScore, OracleSets, calibrate

scores = []
experts, non_experts = set(), set()
for level in range(10):
    normalized = level / 10 + 0.05
    for i in range(4):
        developer, file = f"dev{level}_{i}", f"src/file{level}_{i}.py"
        scores.append(
            ExpertiseScore(developer, file, BLAME, raw=100 * normalized, normalized=normalized)
        )
        (experts if normalized >= 0.5 else non_experts).add((developer, file))

oracle = OracleSets(
    declared_experts=frozenset(experts),
    declared_non_experts=frozenset(non_experts),
)
print(f"oracle: {len(experts)} declared experts, {len(non_experts)} declared non-experts")

curve = calibrate(scores, oracle, folds=10, seed=0)
print("\n   k   precision  recall  f_measure")
for point in curve.points:
    best = "  <- best_k" if point.k == curve.best_k else ""
    print(
        f"  {point.k:.1f}  {point.precision:9.3f} {point.recall:7.3f} {point.f_measure:10.3f}{best}"
    )

print(f"\nbest threshold: {curve.best_k} (ties resolve toward the smallest k)")
