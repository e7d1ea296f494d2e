"""
Heatmap keypoints and coarse-to-fine refinement
===============================================

Render Gaussian heatmap targets for a 3D keypoint, decode them back by
scoring candidate cloud points across the three views, and show how the
crop-and-re-project fine stage tightens the estimate.

Outputs land in demos/out/02/.
"""

from pathlib import Path

import numpy as np
from PIL import Image

from c2f.geometry import PointCloud, WorkspaceBounds, canonical_view_poses
from c2f.heatmap import (
    Heatmap,
    coarse_to_fine_keypoint,
    decode_keypoint,
    gaussian_grid,
    heatmap_overlay_image,
    render_targets,
)
from c2f.bench import scene_cloud
from c2f.tasks import default_suite, generate_scene

out = Path(__file__).parent / "out" / "02"
out.mkdir(parents=True, exist_ok=True)

bounds = WorkspaceBounds(np.array([-0.35, -0.35, 0.0]), np.array([0.35, 0.35, 0.7]))
spec = {s.task_id: s for s in default_suite()}["stack_two_blocks"]
gen = generate_scene(spec, variation=0, seed=3)
cloud = scene_cloud(gen.scene)

# ground truth: the grasp keypoint of the first keyframe action
g = gen.trajectory.actions[gen.trajectory.keyframes[1]].position
print("ground-truth keypoint:", g.round(4))

# render normalized Gaussian targets at the keypoint's projection
poses = canonical_view_poses(bounds, 64)
heatmaps = render_targets(g, poses, sigma=1.5)
from c2f.geometry import project_canonical

views = project_canonical(cloud, bounds, 64)
for view, hm in zip(views, heatmaps):
    Image.fromarray(heatmap_overlay_image(view, hm)).save(out / f"target_{hm.view_id}.png")

# decoding scores every cloud point by its summed heatmap values
coarse = decode_keypoint(heatmaps, cloud, poses)
print(f"coarse decode error: {1000 * np.linalg.norm(coarse.position - g):.1f} mm")


def fine_predictor(fine_views):
    # stand-in for a fine-stage network: re-renders the ground truth in the
    # crop's own frame
    result = []
    for view in fine_views:
        cu, cv = view.pose.world_to_pixel_continuous(g)
        grid = gaussian_grid(float(cu[0]), float(cv[0]), view.resolution, 1.5)
        result.append(Heatmap(view.view_id, grid / grid.sum()))
    return result


fine = coarse_to_fine_keypoint(
    cloud, heatmaps, fine_predictor, cube_side=0.2, bounds=bounds, fine_resolution=64
)
print(f"fine decode error:   {1000 * np.linalg.norm(fine.position - g):.1f} mm")

# the paired comparison over many scenes is what the acceptance suite runs;
# here a handful of seeds makes the point
rng = np.random.default_rng(0)
wins = 0
for seed in range(10):
    gen = generate_scene(spec, variation=0, seed=seed)
    cloud = scene_cloud(gen.scene)
    g = gen.trajectory.actions[gen.trajectory.keyframes[1]].position
    hms = render_targets(g, poses, sigma=1.5)
    c = decode_keypoint(hms, cloud, poses)
    f = coarse_to_fine_keypoint(cloud, hms, fine_predictor, 0.2, bounds, fine_resolution=64)
    wins += np.linalg.norm(f.position - g) <= np.linalg.norm(c.position - g) + 1e-12
print(f"fine <= coarse on {wins}/10 scenes")
