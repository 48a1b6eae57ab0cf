#!/usr/bin/env python3
"""Regenerates crates/core/tests/data/stats_reference.json.

Produces 50 seeded sample pairs with two-sided p-values from scipy:
Welch's t-test, and Mann-Whitney U computed exactly when the combined
sample has no ties and n_a*n_b <= 400, otherwise with the tie-corrected
normal approximation without continuity correction. This mirrors the
rule implemented in crates/core/src/stats.rs.
"""
import json
import pathlib

import numpy as np
from scipy import stats

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/data/stats_reference.json"
EXACT_U_LIMIT = 400

rng = np.random.default_rng(20240817)
cases = []
for i in range(50):
    n_a = int(rng.integers(3, 30))
    n_b = int(rng.integers(3, 30))
    loc_a = float(rng.uniform(0, 50))
    loc_b = loc_a + float(rng.normal(0, 5))
    scale = float(rng.uniform(0.5, 10))
    a = rng.normal(loc_a, scale, n_a)
    b = rng.normal(loc_b, scale * float(rng.uniform(0.5, 2)), n_b)
    if i % 3 == 0:
        # Round to force ties so the normal-approximation path is exercised.
        a = np.round(a, 0)
        b = np.round(b, 0)
    a = a.tolist()
    b = b.tolist()

    p_t = float(stats.ttest_ind(a, b, equal_var=False).pvalue)
    has_ties = len(set(a) | set(b)) < len(a) + len(b)
    if not has_ties and n_a * n_b <= EXACT_U_LIMIT:
        p_w = float(stats.mannwhitneyu(a, b, method="exact").pvalue)
        method = "exact"
    else:
        p_w = float(
            stats.mannwhitneyu(a, b, method="asymptotic", use_continuity=False).pvalue
        )
        method = "asymptotic"
    cases.append({"a": a, "b": b, "p_t": p_t, "p_wmw": p_w, "wmw_method": method})

OUT.write_text(json.dumps(cases, indent=1) + "\n")
print(f"wrote {len(cases)} cases to {OUT}")
