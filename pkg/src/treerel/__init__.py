"""Relation classification over dependency subtrees with a child-sum tree LSTM.

The pipeline: parse annotated abstracts and their dependency parses, reduce
each entity pair to the subtree spanning the two entity heads, encode nodes
as word embeddings plus optional syntactic features, run a child-sum tree
LSTM bottom-up, and classify the relation with a softmax over six types.
Training, evaluation (macro P/R/F1, confusion matrix), and feature/embedding
ablations are included; gradients are computed by a hand-written reverse
pass and verified against finite differences in the test suite.
"""

from .corpus import (
    AnnotatedDocument,
    DatasetSplit,
    EntitySpan,
    LABELS,
    RelationInstance,
    load_abstract_file,
    load_relation_file,
    parse_abstract_file,
    parse_relation_file,
    split_validation,
)
from .embed import ConcatEmbedder, EmbeddingTable, load_table, lowercase_fallback
from .features import FeatureConfig, FeatureVocab, NodeInput, build_vocab, encode_node
from .metrics import EvalReport, confusion, score
from .model import (
    NodeState,
    ParamGrads,
    TreeLstmParams,
    init_params,
    loss_and_backward,
    node_forward,
    predict,
    tree_forward,
)
from .parsefile import ParsedSentenceRecord, TokenRow, read_parse_file
from .pipeline import EncodedInstance, encode_instances, extract_instances
from .tree import (
    DepTree,
    SpanningSubtree,
    build_tree,
    entity_head,
    join_trees,
    node_height,
    spanning_subtree,
    to_bracket,
)
from .train import TrainConfig, TrainLog, fit, make_batches, train_epoch
from .evaluate import evaluate_model
from .ablation import run_ablation

__version__ = "0.1.0"
