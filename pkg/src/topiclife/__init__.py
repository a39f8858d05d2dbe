"""Monthly topic models, topic-evolution tracking and moral-foundation
scoring for timestamped short text."""

from .cluster import HDBSCAN, ClusterAssignment, KMeans, mutual_reachability
from .corpus import (
    Document,
    Party,
    PreprocessConfig,
    RawRecord,
    bin_by_month,
    build_documents,
    clean_text,
    parse_records,
    tokenize_lemmatize,
)
from .embedding import (
    EmbeddingMatrix,
    PrincipalComponents,
    WordVectorEmbedder,
    WordVectorTable,
    embed_documents,
    load_precomputed,
    load_word_vectors,
    reduce,
)
from .errors import ConfigError, DataError, InvariantError, TopicLifeError
from .evolve import (
    EvolutionEdge,
    EvolutionGraph,
    LongevityClass,
    StageRole,
    TopicGroup,
    TopicStage,
    build_graph,
    classify_longevity,
    cosine,
    group_and_longevity,
    link_months,
    representation_vector,
)
from .model import MonthlyTopicModel
from .moral import (
    FOUNDATIONS,
    Foundation,
    MoralLexicon,
    MoralProfile,
    aggregate_scores,
    load_lexicon,
    score_document,
)
from .represent import (
    ClassTermMatrix,
    ClassTfidf,
    CtfidfConfig,
    TopicRepresentation,
    VectorizerConfig,
    build_vocabulary,
    class_bag_of_words,
    ctfidf,
    top_terms,
)
from .stats import (
    ContingencyTable,
    TestResult,
    chi2_sf,
    chi_square,
    mann_whitney_exact,
    mann_whitney_u,
)

__version__ = "0.1.0"
