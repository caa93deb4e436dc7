"""Writes tests/data/hdbscan_cases.json: 2D point sets with scikit-learn
HDBSCAN labels (EOM selection, single cluster allowed) as the reference
partition."""
import json
import pathlib

import numpy as np
from sklearn.cluster import HDBSCAN

rng = np.random.default_rng(2024)
cases = []


def add(name, pts, mcs=3):
    pts = np.asarray(pts, dtype=float)
    labels = HDBSCAN(min_cluster_size=mcs, allow_single_cluster=True,
                     cluster_selection_method="eom").fit(pts).labels_
    cases.append({"name": name, "min_cluster_size": mcs,
                  "points": pts.round(6).tolist(), "labels": labels.tolist()})


add("two_blobs", np.vstack([rng.normal(0, 1, (15, 2)), rng.normal(10, 1, (15, 2))]))
add("three_blobs", np.vstack([rng.normal((0, 0), 0.5, (12, 2)), rng.normal((6, 0), 0.5, (10, 2)),
                              rng.normal((3, 6), 0.5, (14, 2))]))
add("blobs_with_outliers", np.vstack([rng.normal((0, 0), 0.4, (20, 2)), rng.normal((5, 5), 0.4, (20, 2)),
                                      [[20, -20], [-15, 18], [30, 30]]]))
add("one_blob", rng.normal(0, 1, (25, 2)))
add("uneven_sizes", np.vstack([rng.normal((0, 0), 0.3, (40, 2)), rng.normal((4, 4), 0.3, (6, 2))]), 5)
add("uniform_noise", rng.uniform(0, 10, (30, 2)))
add("elongated", np.vstack([np.c_[np.linspace(0, 10, 20), rng.normal(0, 0.1, 20)],
                            np.c_[np.linspace(0, 10, 20), 5 + rng.normal(0, 0.1, 20)]]), 4)

out = pathlib.Path(__file__).resolve().parents[2] / "tests" / "data" / "hdbscan_cases.json"
out.write_text(json.dumps(cases, indent=1) + "\n")
for c in cases:
    print(c["name"], sorted(set(c["labels"])))
