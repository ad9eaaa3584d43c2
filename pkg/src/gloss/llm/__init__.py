"""Provider abstraction and task-level prompt operations."""
from gloss.llm.config import (
    OutputShape,
    PromptRequest,
    PromptTask,
    ProviderConfig,
    ProviderKind,
)
from gloss.llm.gateway import (
    BranchProposal,
    IntentMatch,
    classify_intent,
    complete,
    compose_feedback,
    generate_payload,
    propose_branch,
)
from gloss.llm.providers import (
    MockProvider,
    Provider,
    RemoteChatProvider,
    jaccard,
    provider_from_config,
    word_set,
)

__all__ = [
    "BranchProposal",
    "IntentMatch",
    "MockProvider",
    "OutputShape",
    "PromptRequest",
    "PromptTask",
    "Provider",
    "ProviderConfig",
    "ProviderKind",
    "RemoteChatProvider",
    "classify_intent",
    "complete",
    "compose_feedback",
    "generate_payload",
    "jaccard",
    "propose_branch",
    "provider_from_config",
    "word_set",
]
