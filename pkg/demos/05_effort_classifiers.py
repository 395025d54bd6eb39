"""
Classifying effort from feature frames
======================================

Train the two bundled classifiers on labelled (SDNN, pupil-z) frames and
compare them on held-out data, both with the full three-level labels and
with the folded low/high split.
"""

import numpy as np

from oft.effortclass import binarize, cross_validate, fit_model, LabelledFrame

rng = np.random.default_rng(3)

# three effort levels with distinct physiological signatures; four subjects
centers = {1: (62.0, -0.8), 2: (45.0, 0.3), 3: (28.0, 1.4)}
frames = []
for label, (sdnn_c, z_c) in centers.items():
    for i in range(48):
        frames.append(LabelledFrame(
            subject=f"p{i % 4 + 1}",
            features=(sdnn_c + 4.0 * rng.standard_normal(),
                      z_c + 0.15 * rng.standard_normal()),
            label=label,
        ))

X = np.asarray([f.features for f in frames])
y = np.asarray([f.label for f in frames])

for spec in ({"kind": "knn", "k": 5, "metric": "euclidean"},
             {"kind": "rf", "trees": 23, "seed": 0}):
    model = fit_model(spec, X, y)
    acc = float(np.mean(model.predict(X) == y))
    print(f"{spec['kind']:3s} training accuracy on 3 classes: {acc:.3f}")
print()

# the built-in splits: per-subject 75/25 and leave-whole-subjects-out
for scheme in ("per-subject-75-25", "leave-subjects-out"):
    report = cross_validate(frames, scheme, {"kind": "knn", "k": 5, "metric": "euclidean"},
                            seed=1)
    print(f"{scheme:20s} accuracy {report.global_accuracy:.3f} "
          f"({report.n_train} train / {report.n_test} test)")
print()

# folding to low (label 1) vs high (2 and 3) is the coarser, easier call
folded = [LabelledFrame(f.subject, f.features, int(binarize(f.label))) for f in frames]
report = cross_validate(folded, "per-subject-75-25",
                        {"kind": "rf", "trees": 23, "seed": 0}, seed=1)
print(f"low/high forest accuracy: {report.global_accuracy:.3f}")
print(f"per-class recall: { {k: round(v, 3) for k, v in report.per_class.items()} }")
