"""hexaparse: projective dependency parsing as sequence tagging.

Sentences map reversibly to tag sequences (two tags per word, six tag
kinds) through binary head trees; a depth-lattice Viterbi search recovers
the best valid sequence from per-word scores; a sparse linear tagger, CLI,
and HTTP service round out the toolkit.
"""

__version__ = "0.1.0"

from hexaparse.bht import (
    BhtNode,
    BinarizationOrder,
    Internal,
    Leaf,
    bht_to_bracket,
    bht_to_dep,
    dep_to_bht,
)
from hexaparse.codec import (
    Hexatag,
    TagSequence,
    TagVocab,
    ValidityState,
    bht_to_tags,
    is_valid_sequence,
    parse_tag,
    parse_tags,
    serialize_tag,
    serialize_tags,
    step_validity,
    tags_to_bht,
    tags_to_tree,
    tree_to_tags,
)
from hexaparse.decoder import (
    DecodeResult,
    ScoreTable,
    brute_force_decode,
    score_of,
    viterbi_decode,
)
from hexaparse.errors import (
    AlignmentError,
    ConlluParseError,
    DecodeError,
    HexaparseError,
    InvalidTransitionError,
    ModelFormatError,
    NonProjectiveError,
    ShapeError,
    TagParseError,
    TreeStructureError,
    UnknownTagError,
)
from hexaparse.evaluate import EvalReport, attachment_scores
from hexaparse.model import (
    LinearTagModel,
    TrainConfig,
    load_model,
    predict_corpus,
    save_model,
    score_sentence,
    train,
    word_features,
)
from hexaparse.treebank import (
    Corpus,
    DepTree,
    Token,
    crossing_arcs,
    enumerate_projective_trees,
    is_projective,
    parse_conllu,
    random_projective_tree,
    write_conllu,
)

__all__ = [
    "__version__",
    "AlignmentError",
    "BhtNode",
    "BinarizationOrder",
    "ConlluParseError",
    "Corpus",
    "DecodeError",
    "DecodeResult",
    "DepTree",
    "EvalReport",
    "Hexatag",
    "HexaparseError",
    "Internal",
    "InvalidTransitionError",
    "Leaf",
    "LinearTagModel",
    "ModelFormatError",
    "NonProjectiveError",
    "ScoreTable",
    "ShapeError",
    "TagParseError",
    "TagSequence",
    "TagVocab",
    "Token",
    "TrainConfig",
    "TreeStructureError",
    "UnknownTagError",
    "ValidityState",
    "attachment_scores",
    "bht_to_bracket",
    "bht_to_dep",
    "bht_to_tags",
    "brute_force_decode",
    "crossing_arcs",
    "dep_to_bht",
    "enumerate_projective_trees",
    "is_projective",
    "is_valid_sequence",
    "load_model",
    "parse_conllu",
    "parse_tag",
    "parse_tags",
    "predict_corpus",
    "random_projective_tree",
    "save_model",
    "score_of",
    "score_sentence",
    "serialize_tag",
    "serialize_tags",
    "step_validity",
    "tags_to_bht",
    "tags_to_tree",
    "train",
    "tree_to_tags",
    "viterbi_decode",
    "word_features",
    "write_conllu",
]
