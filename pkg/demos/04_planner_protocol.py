"""
The two-round planner protocol
==============================

Round 1 is text-only: (task, previous step) -> current sub-task plan.
Round 2 grounds it: (views, sub-task plan, previous step) -> object
positions, step instruction, 3D keypoint. The session tracks the
previous-step memory across an episode; an empty round-1 plan means done.
"""

import json
from pathlib import Path

from c2f.bench import BenchParams, DEFAULT_BOUNDS, step_episode
from c2f.policies import EpisodeContext, oracle_planner_for
from c2f.planner import PlannerSession, write_transcript
from c2f.tasks import default_suite, generate_scene
from c2f.trajectory import Action

out = Path(__file__).parent / "out" / "04"
out.mkdir(parents=True, exist_ok=True)

spec = {s.task_id: s for s in default_suite()}["stack_three_blocks+L4"]
gen = generate_scene(spec, variation=0, seed=0)
params = BenchParams()

planner = oracle_planner_for(gen)
session = PlannerSession(task=gen.plan.task)
scene = gen.scene
steps = gen.plan.steps()
kf_actions = [gen.trajectory.actions[k] for k in gen.trajectory.keyframes]

print(f"task: {gen.plan.task!r}\n")
while True:
    subtask = session.run_round1(planner)
    if session.done:
        print("round 1 returned an empty plan: task complete")
        break
    ctx = EpisodeContext(scene, DEFAULT_BOUNDS, params)
    response = session.run_round2(planner, ctx.views(32))
    print(f"m={session.subtask_index - (response.step == subtask[-1])} "
          f"step={response.step!r}")
    print(f"   objects: {[(o.name, o.pixels['top']) for o in response.object_positions][:2]}")
    print(f"   keypoint {response.keypoint_world.round(3).tolist()} "
          f"pixels {response.keypoint_pixels}")
    template = kf_actions[steps.index(response.step)]
    scene = step_episode(
        scene, Action(response.keypoint_world, template.quaternion, template.gripper_open),
        params,
    )

path = write_transcript(session, out / "transcript.jsonl")
lines = path.read_text().strip().split("\n")
print(f"\ntranscript: {len(lines)} JSONL rounds -> {path}")
print("last entry:", json.loads(lines[-1])["round"])

from c2f.tasks import check_success

print("episode success:", check_success(scene, gen.goal, params))
