"""Short-text clustering with collapsed Gibbs sampling of a Dirichlet multinomial mixture."""

from ._gsdmm import (
    Algorithm,
    Corpus,
    EvalReport,
    GenSpec,
    GeneratedCorpus,
    GsdmmError,
    MergeStep,
    RunConfig,
    RunResult,
    SweepRecord,
    TokenRules,
    accuracy,
    build_corpus,
    default_stopwords,
    evaluate,
    generate_corpus,
    light_stem,
    merge_to_k,
    nmi,
    read_dataset,
    run,
    tokenize,
    word_entropy,
)

__all__ = [
    "Algorithm",
    "Corpus",
    "EvalReport",
    "GenSpec",
    "GeneratedCorpus",
    "GsdmmError",
    "MergeStep",
    "RunConfig",
    "RunResult",
    "SweepRecord",
    "TokenRules",
    "accuracy",
    "build_corpus",
    "default_stopwords",
    "evaluate",
    "generate_corpus",
    "light_stem",
    "merge_to_k",
    "nmi",
    "read_dataset",
    "run",
    "tokenize",
    "word_entropy",
]
