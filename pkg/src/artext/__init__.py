"""Text simplification for AR task guidance.

The package turns long manual steps into short, display-friendly
instructions: an LLM plans and drafts candidates, rule-based
classifiers score likely errors, a trained calibrator ranks the
candidates, hard validators gate what may ship, and spatial context
from the headset grounds the final wording.
"""

from .calibration import (
    CalibrationModel,
    GoldDataset,
    GoldSample,
    GoldSource,
    TrainConfig,
    calibrate,
    default_model,
    fit,
    select,
    softmax,
    train,
)
from .classifiers import RuleBasedClassifier, classify_rules
from .config import AppConfig, load_config
from .pipeline import StepResult, simplify_manual, simplify_step
from .prompting import (
    HttpBackend,
    PromptTemplate,
    ScriptedBackend,
    parse_plan,
    render_plan,
)
from .service import create_app
from .spatial import elaborate_locations, substitute_measures
from .store import ManualStore
from .types import (
    CandidateSet,
    CandidateSimplification,
    DetectedObject,
    ErrorClass,
    ErrorProbabilities,
    ManualDocument,
    ManualStep,
    PlanAction,
    SimplificationPlan,
    SimplificationTechnique,
    SpatialContext,
    StepStatus,
    validate_manual,
)
from .validators import DisplayProfile, ValidationReport, validate

__version__ = "0.1.0"
