"""Iterative Rational Speech Act generation of referring expressions over graded scene graphs."""

from .errors import (
    GenerationError,
    IterativeRSAError,
    NoUtterableDescriptor,
    SceneParseError,
    SceneValidationError,
    SemanticsError,
)
from .scene_model import BoundingBox, GradedObject, GradedRelation, GradedScene, TargetSpec, object_area, parse_scene, serialize_scene
from .scene_prep import AlignmentResult, align_target, overlap_ratio, synthesize_ordinals
from .semantics import Descriptor, DescriptorKind, DescriptorSpace, Distribution, ThresholdTable, categorize, salience_prior, truth
from .ngram_lm import NgramModel, OffModel, descriptor_prob, train
from .rsa_core import (
    Expression,
    GenerationTrace,
    Mode,
    RsaConfig,
    entropy,
    generate,
    literal_listener,
    pragmatic_listener,
    pragmatic_speaker,
    render,
    utility,
)
from .pipeline import PreparedScene, generate_for_scene, prepare_scene
from .metrics import bleu, meteor_exact, rouge_l
from .evaluation import MetricsReport, Outcome, adjusted_accuracy, classify, evaluate_dataset
from .synthgen import Guarantee, SynthParams, brute_force_oracle, generate_scene

__version__ = "0.1.0"
