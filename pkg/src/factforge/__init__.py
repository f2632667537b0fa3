"""factforge: fine-grained fact verification and evidence-grounded revision.

Extracts fact triples from text, asks one retrieval question per triple,
gathers evidence from a knowledge-graph adapter and a web-search adapter,
labels each fact StronglySupported / LikelySupported / Questionable with
attributed evidence, and proposes validated rewrites for questionable
facts.
"""

__version__ = "0.1.0"

from .bench import (
    AnnotatedInstance,
    EvalReport,
    GoldFact,
    Link,
    MatchConfig,
    perturb,
    score,
)
from .errors import FactForgeError
from .extract import Passage, align_span, extract_facts, group_extended, split_sentences
from .llm import HttpBackend, MockBackend, ask, complete, fixture_key, render_prompt
from .model import (
    CharSpan,
    Classification,
    ClassifiedEvidence,
    EvidenceOrigin,
    EvidenceTriple,
    FactSet,
    KgAnswerSet,
    Triple,
    Verdict,
    VerdictLabel,
    VerificationReport,
    WebHit,
    canonical_json,
    canonicalize,
    parse_triple,
    validate_report,
)
from .normalize import NormalizedValue, contains_normalized, normalize_value
from .pipeline import PipelineConfig, build_components, verify_passage
from .prompts import PromptTask, default_tasks
from .questions import GeneratedQuestion, generate_question
from .retrieve import (
    FixtureWebAdapter,
    KgSnapshot,
    SnapshotKgAdapter,
    query_kg,
    query_web,
)
from .revise import (
    RevisionCheckResult,
    RevisionProposal,
    RevisionResult,
    check_revision,
    propose_revisions,
)
from .verify import JudgeConfig, build_evidence_triple, decide, entail, make_judge

__all__ = [
    "AnnotatedInstance", "CharSpan", "Classification", "ClassifiedEvidence",
    "EvalReport", "EvidenceOrigin", "EvidenceTriple", "FactForgeError",
    "FactSet", "FixtureWebAdapter", "GeneratedQuestion", "GoldFact",
    "HttpBackend", "JudgeConfig", "KgAnswerSet", "KgSnapshot", "Link",
    "MatchConfig", "MockBackend", "NormalizedValue", "Passage",
    "PipelineConfig", "PromptTask", "RevisionCheckResult", "RevisionProposal",
    "RevisionResult", "SnapshotKgAdapter", "Triple", "Verdict", "VerdictLabel",
    "VerificationReport", "WebHit", "align_span", "ask", "build_components",
    "build_evidence_triple", "canonical_json", "canonicalize", "check_revision",
    "complete", "contains_normalized", "decide", "default_tasks", "entail",
    "extract_facts", "fixture_key", "generate_question", "group_extended",
    "make_judge", "normalize_value", "parse_triple", "perturb",
    "propose_revisions", "query_kg", "query_web", "render_prompt", "score",
    "split_sentences", "validate_report", "verify_passage",
]
