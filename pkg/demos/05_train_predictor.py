"""
Training the toy action predictor
=================================

The predictor fuses per-view RGB/depth/3D-position tokens with the step
instruction and a proprio token, and decodes per-view translation heatmaps
plus rotation bins and a gripper logit. Everything is numpy with exact
hand-written gradients, so this demo also spot-checks a finite difference
and then overfits one sample until the heatmap argmax hits the target.

Takes about a minute.
"""

import numpy as np

from c2f.bench import DEFAULT_BOUNDS
from c2f.pipeline import generate_demo_trajectories
from c2f.predictor import (
    ActionPredictorNet,
    AdamState,
    PredictorConfig,
    TrainConfig,
    encode_observation,
    pixel_error,
    targets_from_sample,
    train,
    training_views,
)
from c2f.tasks import bundled_demo_suite
from c2f.trajectory import build_training_samples, load_trajectory

import tempfile
from pathlib import Path

cfg = PredictorConfig(resolution=32, patch_size=8, dim=32, layers=1, heads=2,
                      pos_bands=4, vocab=64, rotation_bins=24)

# build a small dataset from two bundled tasks
with tempfile.TemporaryDirectory() as tmp:
    dirs = generate_demo_trajectories(bundled_demo_suite()[:2], Path(tmp), seed=0)
    samples = []
    for d in dirs:
        traj, plan = load_trajectory(d)
        samples += build_training_samples(traj, plan, m=3, bounds=DEFAULT_BOUNDS,
                                          resolution=32, cube_side=0.28)
print(f"{len(samples)} training samples")

net = ActionPredictorNet(cfg, seed=0)
enc = encode_observation(training_views(samples[0]), samples[0].step,
                         samples[0].gripper_open, net.encoders)
targets = targets_from_sample(samples[0], cfg)

# gradients are exact: one central-difference probe
loss, grads, _ = net.loss_and_grads(enc, targets)
name = "layer0/Wq"
idx = int(np.argmax(np.abs(grads[name])))
h = 1e-6
flat = net.params[name].ravel()
flat[idx] += h
up, _, _ = net.loss_and_grads(enc, targets)
flat[idx] -= 2 * h
down, _, _ = net.loss_and_grads(enc, targets)
flat[idx] += h
numeric = (up - down) / (2 * h)
analytic = grads[name].ravel()[idx]
print(f"grad check {name}[{idx}]: analytic {analytic:.6e} vs numeric {numeric:.6e}")

# overfit a single sample: the argmax pixel reaches the target quickly
adam = AdamState(net.params)
for step in range(200):
    _, g, _ = net.loss_and_grads(enc, targets)
    adam.step(net.params, g, 0.01)
    if step % 50 == 49:
        print(f"  step {step + 1}: pixel error {pixel_error(net.predict(enc), targets):.1f}px")

# and a short multi-sample run with the seeded trainer
net = ActionPredictorNet(cfg, seed=1)
report = train(samples, net, TrainConfig(learning_rate=3e-3, batch_size=8,
                                         epochs=10, holdout_fraction=0.2, seed=0))
print(f"epoch losses: {[round(x, 2) for x in report.epoch_losses]}")
print(f"holdout pixel error after 10 epochs: {report.final_holdout_pixel_error:.2f}px "
      f"({report.n_train} train / {report.n_holdout} holdout)")
