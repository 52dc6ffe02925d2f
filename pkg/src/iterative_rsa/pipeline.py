"""End-to-end glue: graded scene in, referring expression out."""

from __future__ import annotations

from dataclasses import dataclass

from .ngram_lm import LanguageModel
from .rsa_core import Expression, GenerationTrace, RsaConfig, generate
from .scene_model import GradedScene
from .scene_prep import AlignmentResult, align_target, synthesize_ordinals
from .semantics import DescriptorSpace, Distribution, ThresholdTable, categorize, salience_prior

__all__ = ["PreparedScene", "prepare_scene", "generate_for_scene"]


@dataclass(frozen=True)
class PreparedScene:
    scene: GradedScene
    alignment: AlignmentResult
    ordinals: tuple[tuple[str, str], ...]
    space: DescriptorSpace
    prior: Distribution

    @property
    def target(self) -> str:
        return self.alignment.target_id


def prepare_scene(
    scene: GradedScene,
    theta: ThresholdTable | None = None,
    overlap: str = "coverage",
) -> PreparedScene:
    """Align the target, synthesize ordinals, threshold, and build the salience prior."""
    aligned, alignment = align_target(scene, overlap=overlap)
    ordinals = synthesize_ordinals(aligned)
    space = categorize(aligned, theta, ordinals)
    return PreparedScene(aligned, alignment, tuple(ordinals), space, salience_prior(aligned))


def generate_for_scene(
    scene: GradedScene | PreparedScene,
    lm: LanguageModel | None = None,
    cfg: RsaConfig | None = None,
    theta: ThresholdTable | None = None,
    overlap: str = "coverage",
) -> tuple[PreparedScene, Expression, GenerationTrace]:
    prep = scene if isinstance(scene, PreparedScene) else prepare_scene(scene, theta, overlap)
    expr, trace = generate(prep.space, prep.target, prep.prior, lm, cfg)
    return prep, expr, trace
