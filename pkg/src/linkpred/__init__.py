"""Link prediction on attributed social networks.

Builds balanced edge/non-edge datasets from graph snapshots, scores pairs
with neighbor-overlap metrics and node2vec-style embeddings, and trains
from-scratch classifiers (logistic regression, random forest, SMO SVM, MLP)
evaluated by AUROC/F1 on held-out and fully unseen networks.
"""

from .dataset import (
    FeatureMatrix,
    NodePairSample,
    PairFeatures,
    SplitSpec,
    assign_partitions,
    build_dataset,
    node_pair_features,
    split_network,
    standardize,
)
from .embedding import (
    EmbeddingTable,
    edge_embedding,
    grid_search_embeddings,
    skipgram_loss_grad,
    train_embeddings,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DependencyError,
    DivergenceError,
    DomainError,
    LinkPredError,
    NumericError,
    ParseError,
    ReferentialError,
    SamplingError,
    SchemaError,
    StratificationError,
    ValidationError,
)
from .evaluation import EvalReport, LdaProbe, auroc, f1_accuracy, lda_probe
from .graph import (
    AttributedGraph,
    AttributeRecord,
    GraphStats,
    clustering_coefficient,
    degree_histogram,
    graph_stats,
    load_graph,
)
from .metrics import (
    PairScore,
    adamic_adar,
    jaccard,
    preferential_attachment,
    resource_allocation,
    score_pairs,
)
from .models import (
    ModelConfig,
    TrainedModel,
    load_model,
    predict,
    preset_config,
    save_model,
    score,
    train_logreg,
    train_mlp,
    train_model,
    train_random_forest,
    train_svm,
)
from .pipeline import PipelineConfig, load_config, run_pipeline
from .selection import CorrelationMatrix, SelectionReport, correlation_matrix, rf_importance, rfecv
from .synthetic import make_benchmark_network, powerlaw_cluster_edges, synthesize_attributes
from .walks import Walk, WalkConfig, generate_walks

__version__ = "0.1.0"

__all__ = [
    "AttributeRecord",
    "AttributedGraph",
    "ConfigError",
    "ConvergenceError",
    "CorrelationMatrix",
    "DependencyError",
    "DivergenceError",
    "DomainError",
    "EmbeddingTable",
    "EvalReport",
    "FeatureMatrix",
    "GraphStats",
    "LdaProbe",
    "LinkPredError",
    "ModelConfig",
    "NodePairSample",
    "NumericError",
    "PairFeatures",
    "PairScore",
    "ParseError",
    "PipelineConfig",
    "ReferentialError",
    "SamplingError",
    "SchemaError",
    "SelectionReport",
    "SplitSpec",
    "StratificationError",
    "TrainedModel",
    "ValidationError",
    "Walk",
    "WalkConfig",
    "adamic_adar",
    "assign_partitions",
    "auroc",
    "build_dataset",
    "clustering_coefficient",
    "correlation_matrix",
    "degree_histogram",
    "edge_embedding",
    "f1_accuracy",
    "generate_walks",
    "graph_stats",
    "grid_search_embeddings",
    "jaccard",
    "lda_probe",
    "load_config",
    "load_graph",
    "load_model",
    "make_benchmark_network",
    "node_pair_features",
    "powerlaw_cluster_edges",
    "predict",
    "preferential_attachment",
    "preset_config",
    "resource_allocation",
    "rf_importance",
    "rfecv",
    "run_pipeline",
    "save_model",
    "score",
    "score_pairs",
    "split_network",
    "standardize",
    "skipgram_loss_grad",
    "synthesize_attributes",
    "train_embeddings",
    "train_logreg",
    "train_mlp",
    "train_model",
    "train_random_forest",
    "train_svm",
]
