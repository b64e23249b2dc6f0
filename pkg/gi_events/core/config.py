"""
Configuration - Typed settings for every stage plus the run configuration file.

Contains:
- Stage configs: FocalConfig, VoteWindow, HysteresisConfig, HmmConfig, EvalConfig
- RunConfig: the declarative JSON run file, with CLI overrides
- PipelineSettings: resolved settings consumed by the decode graph
- load_run_config: explicit path > GI_EVENTS_CONFIG > built-in defaults
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from gi_events.core.errors import ConfigError
from gi_events.core.label_space import label_space_from_document, load_label_space
from gi_events.core.schemas import GatingPrior, LabelSpace
from gi_events.utils.constants import (
    COMPOSITION_GT_STYLE,
    CONFIG_ENV_VAR,
    DECODER_HYSTERESIS,
    DECODER_VITERBI,
    DEFAULT_COUNT_RATIO_FLAG,
    DEFAULT_FOCAL_GAMMA,
    DEFAULT_IOU_THRESHOLDS,
    DEFAULT_MIN_LEN,
    DEFAULT_STAY_PROB,
    DEFAULT_T_OFF,
    DEFAULT_T_ON,
    DEFAULT_TEMPERATURE,
    DEFAULT_VOTE_RADIUS,
    DEFAULT_W_MAX,
    DEFAULT_W_MIN,
    NUM_ANATOMY_CLASSES,
    NUM_CLASSES,
    PROB_EPSILON,
)

DecoderKind = Literal["hysteresis", "viterbi"]
CompositionMode = Literal["gt_style", "per_label"]
FocalVariant = Literal["as_printed", "standard"]


# ============================================================================
# STAGE CONFIGS
# ============================================================================

class FocalConfig(BaseModel):
    """
    Focal-style weighting.

    'as_printed' modulates both terms by (1 - p)^gamma; 'standard' uses
    p^gamma on the negative term instead.
    """

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(default=DEFAULT_FOCAL_GAMMA, ge=0.0)
    variant: FocalVariant = "as_printed"


class VoteWindow(BaseModel):
    model_config = ConfigDict(frozen=True)

    radius: int = Field(default=DEFAULT_VOTE_RADIUS, ge=0)


class HysteresisConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    t_on: float = Field(default=DEFAULT_T_ON, ge=0.0, le=1.0)
    t_off: float = Field(default=DEFAULT_T_OFF, ge=0.0, le=1.0)
    min_len: int = Field(default=DEFAULT_MIN_LEN, ge=1)

    @model_validator(mode="after")
    def _check_order(self) -> "HysteresisConfig":
        if self.t_off > self.t_on:
            raise ValueError(f"t_off ({self.t_off}) must not exceed t_on ({self.t_on})")
        return self


class HmmConfig(BaseModel):
    """Symmetric two-state chain per class; stay_prob sits on the diagonal."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    stay_prob: float = Field(default=DEFAULT_STAY_PROB, gt=0.0, lt=1.0)
    per_class_stay: Dict[int, float] = {}
    temperature: float = Field(default=DEFAULT_TEMPERATURE, gt=0.0)

    @model_validator(mode="after")
    def _check_overrides(self) -> "HmmConfig":
        for c, p in self.per_class_stay.items():
            if not 0 <= c < NUM_CLASSES:
                raise ValueError(f"per_class_stay: invalid class index {c}")
            if not 0.0 < p < 1.0:
                raise ValueError(f"per_class_stay[{c}] = {p} outside (0, 1)")
        return self

    def stay_for(self, c: int) -> float:
        return self.per_class_stay.get(c, self.stay_prob)


class EvalConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    iou_thresholds: Tuple[float, ...] = DEFAULT_IOU_THRESHOLDS
    count_ratio_flag: float = Field(default=DEFAULT_COUNT_RATIO_FLAG, ge=1.0)

    @model_validator(mode="after")
    def _check_thresholds(self) -> "EvalConfig":
        if not self.iou_thresholds:
            raise ValueError("at least one IoU threshold is required")
        if any(not 0.0 < t <= 1.0 for t in self.iou_thresholds):
            raise ValueError(f"IoU thresholds must lie in (0, 1]: {self.iou_thresholds}")
        if len(set(self.iou_thresholds)) != len(self.iou_thresholds):
            raise ValueError(f"IoU thresholds must be distinct: {self.iou_thresholds}")
        return self


class LossSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    w_min: float = Field(default=DEFAULT_W_MIN, ge=0.0)
    w_max: float = DEFAULT_W_MAX
    epsilon: float = Field(default=PROB_EPSILON, gt=0.0, lt=0.5)
    gamma: float = Field(default=DEFAULT_FOCAL_GAMMA, ge=0.0)
    focal_variant: FocalVariant = "as_printed"

    @model_validator(mode="after")
    def _check_bounds(self) -> "LossSettings":
        if self.w_max < self.w_min:
            raise ValueError(f"w_max ({self.w_max}) must not be below w_min ({self.w_min})")
        return self


# ============================================================================
# RESOLVED PIPELINE SETTINGS
# ============================================================================

class PipelineSettings(BaseModel):
    """Everything the decode graph needs, with names already resolved to indices."""

    model_config = ConfigDict(frozen=True)

    space: LabelSpace = LabelSpace()
    prior: GatingPrior = Field(default_factory=GatingPrior.permissive)
    gating_enabled: bool = True
    vote_window: VoteWindow = VoteWindow()
    decoder: DecoderKind = DECODER_HYSTERESIS
    hysteresis: HysteresisConfig = HysteresisConfig()
    hmm: HmmConfig = HmmConfig()
    composition: CompositionMode = COMPOSITION_GT_STYLE
    epsilon: float = Field(default=PROB_EPSILON, gt=0.0, lt=0.5)

    @property
    def decode_temperature(self) -> float:
        # Temperature scaling belongs to the HMM decoder
        return self.hmm.temperature if self.decoder == DECODER_VITERBI else 1.0


def prior_from_names(mapping: Dict[str, List[str]], space: LabelSpace) -> GatingPrior:
    """
    Build a GatingPrior from a pathology-name -> anatomy-names mapping.

    Pathologies missing from the mapping are allowed in every anatomy.
    """
    everywhere = frozenset(range(NUM_ANATOMY_CLASSES))
    allowed = {m: everywhere for m in space.pathology_indices}
    for pathology_name, anatomy_names in mapping.items():
        if pathology_name not in space.pathology_names:
            raise ConfigError(f"gating: '{pathology_name}' is not a pathology class")
        anatomies = set()
        for anatomy_name in anatomy_names:
            if anatomy_name not in space.anatomy_names:
                raise ConfigError(
                    f"gating: '{anatomy_name}' (for '{pathology_name}') is not an anatomy class"
                )
            anatomies.add(space.index_of(anatomy_name))
        allowed[space.index_of(pathology_name)] = frozenset(anatomies)
    return GatingPrior(allowed=allowed)


# ============================================================================
# RUN CONFIGURATION FILE
# ============================================================================

class LabelSpaceDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    anatomy: List[str]
    pathology: List[str]


class RunConfig(BaseModel):
    """The declarative run file. Every CLI flag overrides one of these fields."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    label_space: Union[str, LabelSpaceDocument, None] = None
    gating: Dict[str, List[str]] = {}
    gating_enabled: bool = True
    vote_radius: int = Field(default=DEFAULT_VOTE_RADIUS, ge=0)
    decoder: DecoderKind = DECODER_HYSTERESIS
    hysteresis: HysteresisConfig = HysteresisConfig()
    hmm: HmmConfig = HmmConfig()
    composition: CompositionMode = COMPOSITION_GT_STYLE
    eval_thresholds: Tuple[float, ...] = DEFAULT_IOU_THRESHOLDS
    count_ratio_flag: float = Field(default=DEFAULT_COUNT_RATIO_FLAG, ge=1.0)
    loss: LossSettings = LossSettings()
    seed: int = 0

    def resolve_label_space(self) -> LabelSpace:
        if self.label_space is None:
            return LabelSpace()
        if isinstance(self.label_space, str):
            return load_label_space(self.label_space)
        return label_space_from_document(self.label_space.model_dump())

    def to_settings(self) -> PipelineSettings:
        space = self.resolve_label_space()
        return PipelineSettings(
            space=space,
            prior=prior_from_names(self.gating, space),
            gating_enabled=self.gating_enabled,
            vote_window=VoteWindow(radius=self.vote_radius),
            decoder=self.decoder,
            hysteresis=self.hysteresis,
            hmm=self.hmm,
            composition=self.composition,
            epsilon=self.loss.epsilon,
        )

    def eval_config(self) -> EvalConfig:
        try:
            return EvalConfig(iou_thresholds=self.eval_thresholds, count_ratio_flag=self.count_ratio_flag)
        except ValidationError as e:
            raise ConfigError(f"invalid evaluation settings: {e.errors()[0]['msg']}") from None

    def focal_config(self) -> FocalConfig:
        return FocalConfig(gamma=self.loss.gamma, variant=self.loss.focal_variant)

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """
        Apply CLI overrides; None values are ignored.

        Nested keys use their section name as prefix (t_on -> hysteresis.t_on).
        The merged document is re-validated so cross-field invariants hold.
        """
        routes = {
            "t_on": ("hysteresis", "t_on"),
            "t_off": ("hysteresis", "t_off"),
            "min_len": ("hysteresis", "min_len"),
            "stay_prob": ("hmm", "stay_prob"),
            "temperature": ("hmm", "temperature"),
            "w_min": ("loss", "w_min"),
            "w_max": ("loss", "w_max"),
            "gamma": ("loss", "gamma"),
            "focal_variant": ("loss", "focal_variant"),
        }
        document = self.model_dump()
        for key, value in overrides.items():
            if value is None:
                continue
            if key in routes:
                section, field = routes[key]
                document[section][field] = value
            elif key in RunConfig.model_fields:
                document[key] = value
            else:
                raise ConfigError(f"unknown override '{key}'")
        try:
            return RunConfig.model_validate(document)
        except ValidationError as e:
            raise ConfigError(f"invalid configuration after overrides: {e}") from e


def load_run_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    """
    Load the run configuration.

    Args:
        path: Explicit JSON file; falls back to $GI_EVENTS_CONFIG, then defaults

    Returns:
        Validated RunConfig with a relative label_space path made absolute
    """
    load_dotenv(override=False)
    if path is None:
        path = os.getenv(CONFIG_ENV_VAR) or None
    if path is None:
        return RunConfig()

    config_path = Path(path)
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {config_path}") from None
    except UnicodeDecodeError:
        raise ConfigError(f"{config_path}: not valid UTF-8 text") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{config_path}: line {e.lineno}: invalid JSON ({e.msg})") from e

    label_space = document.get("label_space") if isinstance(document, dict) else None
    if isinstance(label_space, str) and not Path(label_space).is_absolute():
        document["label_space"] = str((config_path.parent / label_space).resolve())

    try:
        return RunConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"{config_path}: {e}") from e

