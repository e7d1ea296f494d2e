"""
Keyframes, segments, and the training dataset
=============================================

Extract keyframes from an expert trajectory, segment it, apply the
post-keyframe sampling strategy, and build the actual training samples
(previous-step memory, sub-task plan context, keypoint and action targets).
"""

from pathlib import Path

import numpy as np

from c2f.bench import DEFAULT_BOUNDS
from c2f.tasks import default_suite, generate_scene
from c2f.trajectory import (
    build_training_samples,
    extract_keyframes,
    sample_training_indices,
    segment,
)

spec = {s.task_id: s for s in default_suite()}["open_drawer_then_put_block+L4"]
gen = generate_scene(spec, variation=0, seed=1, render=True)
traj, plan = gen.trajectory, gen.plan

# the heuristic (gripper changes + low-speed minima + final frame) recovers
# exactly the generator's semantic events
kf = extract_keyframes(traj)
print(f"trajectory length {len(traj)}, keyframes {kf}")
assert kf == traj.keyframes

print("\nplan (one step instruction per keyframe, grouped into sub-tasks):")
for i, subtask in enumerate(plan.subtasks, 1):
    print(f"  sub-task {i}:")
    for step in subtask:
        print(f"    - {step}")

segments = segment(traj, kf)
print("\nsegments (start..keyframe, gripper after):")
for s in segments:
    print(f"  #{s.index}: {s.start:3d}..{s.keyframe:3d}  gripper_open={s.action.gripper_open}")

# the sampling strategy: the m+1 observations right after each keyframe,
# clipped at the next keyframe, plus the initial observation
pairs = sample_training_indices(kf, len(traj), m=5)
print(f"\nsampling windows (m=5): {len(pairs)} samples")
print("  first few:", pairs[:6])
assert all(t < target for t, target in pairs)

samples = build_training_samples(traj, plan, m=5, bounds=DEFAULT_BOUNDS,
                                 resolution=32, cube_side=0.28)
s = samples[0]
print(f"\nsample 0: obs {s.obs_index} -> keyframe {s.target_keyframe}")
print(f"  previous step: {s.prev_step!r}")
print(f"  target step:   {s.step!r}")
print(f"  sub-task plan: {len(s.subtask_plan)} steps")
print(f"  keypoint:      {s.keypoint.round(4).tolist()}")
print(f"  objects:       {[(o.name, o.pixels['front']) for o in s.object_positions]}")

mid = [x for x in samples if x.prev_step != samples[0].prev_step][0]
print(f"\na later sample carries the previous step as memory: {mid.prev_step!r}")
