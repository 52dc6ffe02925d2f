"""Command-line interface: ``iterative-rsa {generate,comprehend,evaluate,train-lm,synth}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import ngram_lm
from .config import AppConfig, load_config_file
from .errors import ConfigError, GenerationError, IterativeRSAError, SceneParseError, SceneValidationError, SemanticsError
from .evaluation import Outcome, classify, evaluate_dataset, load_dataset
from .ngram_lm import NgramModel
from .pipeline import prepare_scene
from .rsa_core import Expression, generate, pragmatic_listener, render
from .scene_model import parse_scene, serialize_scene
from .synthgen import Guarantee, SynthParams, generate_scene

log = logging.getLogger("iterative_rsa")

EXIT_INPUT = 1
EXIT_GENERATION = 2

ARTICLES = {"the", "a", "an"}


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON config file; flags override its values")
    p.add_argument("--theta-type", type=float)
    p.add_argument("--theta-attr", type=float)
    p.add_argument("--theta-rel", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--max-len", type=int, help="maximum descriptors per expression (default 4)")
    p.add_argument("--entropy-stop", type=float, help="stop once listener entropy <= this many bits")
    p.add_argument("--beta", type=float, help="per-word cost weight")
    p.add_argument("--mode", choices=["greedy", "sample"])
    p.add_argument("--seed", type=int)
    p.add_argument("--lm", help="serialized n-gram model (JSON)")
    p.add_argument("--lm-weight", choices=["on", "off"])
    p.add_argument("--overlap", choices=["coverage", "iou"])
    p.add_argument("--log-level", dest="verbosity")


def _app_config(args) -> AppConfig:
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {
        "theta_type": args.theta_type,
        "theta_attr": args.theta_attr,
        "theta_rel": args.theta_rel,
        "alpha": args.alpha,
        "max_len": args.max_len,
        "entropy_stop": args.entropy_stop,
        "beta": args.beta,
        "mode": args.mode,
        "seed": args.seed,
        "lm": args.lm,
        "lm_weight": None if args.lm_weight is None else args.lm_weight == "on",
        "overlap": args.overlap,
        "verbosity": args.verbosity,
        "output": getattr(args, "out", None),
    }
    cfg = AppConfig.build(file_values, overrides)
    logging.basicConfig(level=cfg.verbosity.upper(), format="%(levelname)s %(name)s: %(message)s")
    return cfg


def _load_lm(cfg: AppConfig):
    if not cfg.lm:
        return None
    try:
        return NgramModel.from_json(Path(cfg.lm).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError) as e:
        raise ConfigError(f"cannot load language model {cfg.lm}: {e}") from None


def _load_prepared(path, cfg: AppConfig):
    scene = parse_scene(Path(path).read_bytes())
    return prepare_scene(scene, cfg.thresholds(), cfg.overlap)


def cmd_generate(args) -> int:
    try:
        cfg = _app_config(args)
        lm = _load_lm(cfg)
    except ConfigError as e:
        return _fail(EXIT_INPUT, "config", str(e))
    try:
        prep = _load_prepared(args.scene, cfg)
    except OSError as e:
        return _fail(EXIT_INPUT, "io", str(e))
    except (SceneParseError, SceneValidationError) as e:
        return _fail(EXIT_INPUT, "scene", str(e))
    except SemanticsError as e:
        return _fail(EXIT_GENERATION, "semantics", str(e))
    try:
        expr, trace = generate(prep.space, prep.target, prep.prior, lm, cfg.rsa())
    except GenerationError as e:
        return _fail(EXIT_GENERATION, "generation", str(e))
    sys.stdout.write(render(expr) + "\n")
    if args.trace:
        doc = trace.to_dict()
        doc["image_id"] = prep.scene.image_id
        doc["alignment"] = vars(prep.alignment)
        Path(args.trace).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return 0


def parse_expression(text: str, space) -> tuple[list, list[str]]:
    """Map words of ``text`` onto descriptor surfaces, longest match first."""
    words = [w for w in text.lower().split()]
    surfaces = sorted({d.surface for d in space}, key=lambda s: -len(s.split()))
    found, unknown = [], []
    i = 0
    while i < len(words):
        for s in surfaces:
            sw = s.split()
            if words[i:i + len(sw)] == sw:
                d = space.by_surface(s)[0]
                if d not in found:
                    found.append(d)
                i += len(sw)
                break
        else:
            if words[i] not in ARTICLES:
                unknown.append(words[i])
            i += 1
    return found, unknown


def cmd_comprehend(args) -> int:
    try:
        cfg = _app_config(args)
        lm = _load_lm(cfg)
    except ConfigError as e:
        return _fail(EXIT_INPUT, "config", str(e))
    try:
        prep = _load_prepared(args.scene, cfg)
    except OSError as e:
        return _fail(EXIT_INPUT, "io", str(e))
    except (SceneParseError, SceneValidationError) as e:
        return _fail(EXIT_INPUT, "scene", str(e))
    except SemanticsError as e:
        return _fail(EXIT_GENERATION, "semantics", str(e))

    descs, unknown = parse_expression(args.expression, prep.space)
    report = {
        "expression": args.expression,
        "descriptors": [d.surface for d in descs],
        "unknown_words": unknown,
        "target": prep.target,
    }
    if not descs:
        report.update(posterior=None, outcome=Outcome.NO_MATCH.value)
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
        return _fail(EXIT_GENERATION, "comprehension", "no resolvable descriptor in expression")
    expr = Expression(tuple(descs))
    report["outcome"] = classify(expr, prep.space, prep.target, prep.alignment).value
    try:
        report["posterior"] = pragmatic_listener(expr, prep.prior, prep.space, lm, cfg.rsa()).as_dict()
    except GenerationError as e:
        report["posterior"] = None
        report["listener_error"] = str(e)
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return 0


def cmd_evaluate(args) -> int:
    try:
        cfg = _app_config(args)
        lm = _load_lm(cfg)
    except ConfigError as e:
        return _fail(EXIT_INPUT, "config", str(e))
    try:
        dataset = load_dataset(args.dataset)
    except (OSError, ValueError) as e:
        return _fail(EXIT_INPUT, "dataset", str(e))
    if not dataset:
        return _fail(EXIT_INPUT, "dataset", "dataset is empty")
    report = evaluate_dataset(
        dataset, cfg.rsa(), cfg.thresholds(), lm, cfg.overlap, workers=args.workers
    )
    text = report.to_json()
    if cfg.output:
        Path(cfg.output).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")
    counts = ", ".join(f"{o.value}={report.counts[o]}" for o in Outcome)
    adj = "n/a" if report.adjusted_accuracy is None else f"{report.adjusted_accuracy:.4f}"
    summary = (
        f"instances={report.n_instances} {counts} raw_accuracy={report.raw_accuracy:.4f} "
        f"adjusted_accuracy={adj} bleu={report.bleu:.4f} rouge_l={report.rouge_l:.4f} meteor={report.meteor:.4f}"
    )
    (sys.stdout if cfg.output else sys.stderr).write(summary + "\n")
    return 0


def cmd_train_lm(args) -> int:
    try:
        corpus = ngram_lm.load_corpus(args.corpus)
        model = ngram_lm.train(corpus, args.order, args.k)
    except OSError as e:
        return _fail(EXIT_INPUT, "io", str(e))
    except ValueError as e:
        return _fail(EXIT_INPUT, "corpus", str(e))
    Path(args.out).write_text(model.to_json() + "\n", encoding="utf-8")
    sys.stdout.write(f"{model!r} written to {args.out}\n")
    return 0


def cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        guarantee = Guarantee(args.guarantee)
        for i in range(args.count):
            params = SynthParams(
                n_objects=(args.min_objects, args.max_objects),
                guarantee=guarantee,
                seed=args.seed + i,
            )
            scene = generate_scene(params)
            (out / f"{scene.image_id}.json").write_text(serialize_scene(scene) + "\n", encoding="utf-8")
    except ValueError as e:
        return _fail(EXIT_INPUT, "synth", str(e))
    sys.stdout.write(f"wrote {args.count} scenes to {out}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iterative-rsa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a referring expression for a scene's target")
    p.add_argument("scene")
    p.add_argument("--trace", help="write the generation trace JSON here")
    _add_model_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("comprehend", help="interpret an expression against a scene")
    p.add_argument("scene")
    p.add_argument("expression")
    _add_model_flags(p)
    p.set_defaults(func=cmd_comprehend)

    p = sub.add_parser("evaluate", help="evaluate a JSONL dataset of scenes and references")
    p.add_argument("dataset")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--workers", type=int, default=1)
    _add_model_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("train-lm", help="train an n-gram model on a one-expression-per-line corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--k", type=float, default=0.1, help="add-k smoothing constant")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("synth", help="write seeded synthetic scenes")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--guarantee", choices=[g.value for g in Guarantee], default="unique_type")
    p.add_argument("--min-objects", type=int, default=2)
    p.add_argument("--max-objects", type=int, default=6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IterativeRSAError as e:
        return _fail(EXIT_GENERATION, type(e).__name__, str(e))


if __name__ == "__main__":
    sys.exit(main())
