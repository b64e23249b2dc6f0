"""
Constants module - All configuration defaults for the GI event toolkit.

Centralizes:
- Label space defaults (anatomy / pathology names)
- Loss kernel bounds and numerical guards
- Temporal decoder defaults
- Evaluation thresholds
- File format and environment names
"""

from typing import Tuple

# ============================================================================
# LABEL SPACE
# ============================================================================

NUM_ANATOMY_CLASSES = 5
NUM_PATHOLOGY_CLASSES = 12
NUM_CLASSES = NUM_ANATOMY_CLASSES + NUM_PATHOLOGY_CLASSES

# Anatomical order, proximal to distal
DEFAULT_ANATOMY_NAMES: Tuple[str, ...] = (
    "mouth",
    "esophagus",
    "stomach",
    "small_intestine",
    "colon",
)

# Placeholders until a real label set is configured
DEFAULT_PATHOLOGY_NAMES: Tuple[str, ...] = tuple(
    f"path_{i:02d}" for i in range(1, NUM_PATHOLOGY_CLASSES + 1)
)

# ============================================================================
# LOSS KERNELS
# ============================================================================

DEFAULT_W_MIN = 1.0
DEFAULT_W_MAX = 50.0
PROB_EPSILON = 1e-7
DEFAULT_FOCAL_GAMMA = 2.0
GRADIENT_CHECK_STEP = 1e-5

# ============================================================================
# TEMPORAL DECODING
# ============================================================================

DEFAULT_VOTE_RADIUS = 1

DEFAULT_T_ON = 0.5
DEFAULT_T_OFF = 0.3
DEFAULT_MIN_LEN = 1

DEFAULT_STAY_PROB = 0.9
DEFAULT_TEMPERATURE = 1.0

DECODER_HYSTERESIS = "hysteresis"
DECODER_VITERBI = "viterbi"

COMPOSITION_GT_STYLE = "gt_style"
COMPOSITION_PER_LABEL = "per_label"

# ============================================================================
# EVALUATION
# ============================================================================

DEFAULT_IOU_THRESHOLDS: Tuple[float, ...] = (0.5, 0.95)
DEFAULT_COUNT_RATIO_FLAG = 2.0

# ============================================================================
# FILES & ENVIRONMENT
# ============================================================================

CONFIG_ENV_VAR = "GI_EVENTS_CONFIG"
FRAME_COLUMN = "frame"
EVENT_FILE_SUFFIX = ".json"

# Fractions of a synthetic video spent in each anatomy, in anatomical order
SYNTHETIC_ANATOMY_FRACTIONS: Tuple[float, ...] = (0.02, 0.08, 0.20, 0.50, 0.20)

# Pathology bursts: per-frame start probability and length bounds (frames)
DEFAULT_BURST_RATE = 0.004
DEFAULT_BURST_MIN_LEN = 5
DEFAULT_BURST_MAX_LEN = 40

# Injected implausible detections sit in this probability band
IMPLAUSIBLE_PROB_RANGE: Tuple[float, float] = (0.6, 1.0)

SYNTHETIC_VIDEO_PREFIX = "synth"
