"""
The generalization benchmark and the memory/scoping ablation
============================================================

Four levels: L1 resamples placements of the 16 training tasks, L2 holds out
rigid-object colors/shapes, L3 holds out drawer geometries, L4 composes
skills into novel long-horizon tasks.

This demo runs a reduced protocol (5 episodes x 2 seeds; the acceptance
suite runs the full 20 x 5) for three policies:

  oracle        exact keypoints through the two-round protocol -> ceiling
  noisy-oracle  same protocol with 6 mm keypoint noise and previous-step
                memory + sub-task scoping
  monolithic    same keypoint noise but no memory and no scoping: progress
                must be re-inferred from noisy object estimates every step

The monolithic twin collapses on L4 (repetitive press plans can never be
confirmed without memory; identical-looking blocks get confused), which is
the desk-scale mirror of the ablation this library exists to demonstrate.
"""

from c2f.policies import evaluate, format_report_table, make_policy_factory
from c2f.tasks import default_suite

suite = default_suite()

for policy in ("oracle", "noisy-oracle", "monolithic"):
    report = evaluate(
        make_policy_factory(policy, keypoint_sigma=0.006),
        suite, episodes_per_variation=5, seeds=(0, 1), levels=("L1", "L4"),
    )
    l1 = report["levels"]["L1"]
    l4 = report["levels"]["L4"]
    print(f"{policy:13s}  L1 {100 * l1['mean']:5.1f}% ± {100 * l1['std']:4.1f}   "
          f"L4 {100 * l4['mean']:5.1f}% ± {100 * l4['std']:4.1f}")

print("\nfull per-task table for the noisy-oracle policy on L4:")
report = evaluate(make_policy_factory("noisy-oracle", keypoint_sigma=0.006),
                  suite, episodes_per_variation=5, seeds=(0, 1), levels=("L4",))
print(format_report_table(report))
