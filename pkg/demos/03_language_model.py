"""Effect of the n-gram term and the alpha rationality parameter.

Run: python3 demos/03_language_model.py
"""
from pathlib import Path

from iterative_rsa import RsaConfig, generate, parse_scene, prepare_scene, render, train

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
prep = prepare_scene(parse_scene((DATA / "two_trains.json").read_bytes()))

# a tiny corpus where "long" tends to follow "right".  History is the word
# sequence in generation order, so after "right" the model favours "long".
corpus = ["right long", "right long", "right long train", "left train", "person standing"]
lm = train(corpus, n=3, smoothing_k=0.1)
print("P(long | right) =", round(lm.prob("long", ["<s>", "right"]), 3))
print("P(train | right) =", round(lm.prob("train", ["<s>", "right"]), 3))

for label, model, cfg in [
    ("lm off", None, RsaConfig(lm_weight=False)),
    ("lm on", lm, RsaConfig()),
    ("lm on, alpha=5", lm, RsaConfig(alpha=5.0)),
    ("lm on, beta=0.5", lm, RsaConfig(beta=0.5)),
]:
    expr, _ = generate(prep.space, prep.target, prep.prior, model, cfg)
    print(f"{label:<16} {render(expr)}")

# %% sampling is reproducible from a seed
for seed in (1, 2, 3):
    expr, _ = generate(prep.space, prep.target, prep.prior, lm, RsaConfig(mode="sample", seed=seed))
    print(f"sample seed={seed}: {render(expr)}")
