"""Walk through generation on a scene with two near-identical trains.

Run: python3 demos/01_two_trains.py
"""
from pathlib import Path

from iterative_rsa import RsaConfig, generate, parse_scene, prepare_scene, render

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

# %% Load and prepare the scene
scene = parse_scene((DATA / "two_trains.json").read_bytes())
prep = prepare_scene(scene)
print("target:", prep.target, "(reused existing object)" if not prep.alignment.added_new else "(appended)")
print("descriptors:")
for d in prep.space:
    print(f"  {d.kind.value:<10} {d.surface:<18} {sorted(d.extension)}")

# %% Prior over referents is proportional to box area
print("prior:", {k: round(v, 3) for k, v in prep.prior.items()})

# %% Generate with the language-model term switched off
expr, trace = generate(prep.space, prep.target, prep.prior, None, RsaConfig(lm_weight=False))
for step in trace.steps:
    best = sorted(step.candidates, key=lambda c: -c.speaker_prob)[:3]
    shown = ", ".join(f"{c.descriptor.surface}={c.speaker_prob:.3f}" for c in best)
    print(f"step {step.step}: chose {step.chosen.surface!r}  H {step.entropy_before:.3f} -> {step.entropy_after:.3f} bits  [{shown}]")
print("expression:", render(expr))
