"""Pick the best explainable activity recognition model with an LLM judge."""

from .compare import ComparisonReport, SurveyBenchmark, compare, render_report
from .errors import XarJudgeError
from .judge import HttpChatJudge, JudgeConfig, JudgeResponse, MockJudge, complete, make_judge, mock_judge
from .model import (
    EvaluationPool,
    EventWindow,
    ExplanationCandidate,
    HighLevelEvent,
    ModelRoster,
    QualityKey,
    Strategy,
    Violation,
    WindowCase,
    validate_pool,
)
from .prompts import PromptBundle, PromptTemplate, UniqueOption, build_prompt, canonicalize, deduplicate
from .ranking import Ranking, kendall_tau, rank_models
from .scoring import (
    ScoreBoard,
    ScoreVector,
    accumulate,
    normalize,
    run_evaluation,
    score_best_among_k,
    score_likert,
)
from .synth import generate_synthetic_pool
from .verdict import JudgeVerdict, VerdictKind, parse_verdict, render_final_line

__version__ = "0.1.0"
