"""How the relation threshold decides which dog is "with frisbee".

Run: python3 demos/02_threshold_semantics.py
"""
from pathlib import Path

from iterative_rsa import RsaConfig, ThresholdTable, generate, parse_scene, prepare_scene, render

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
scene = parse_scene((DATA / "dog_frisbee.json").read_bytes())

for rel in (0.5, 0.2, 0.9):
    prep = prepare_scene(scene, ThresholdTable(theta_rel=rel))
    rels = [d for d in prep.space if d.kind.value == "relation"]
    expr, trace = generate(prep.space, prep.target, prep.prior, None, RsaConfig(lm_weight=False))
    print(f"theta.rel={rel}: relations {[(d.surface, sorted(d.extension)) for d in rels]}")
    print(f"   -> {render(expr)!r}  final entropy {trace.steps[-1].entropy_after:.3f} bits")
