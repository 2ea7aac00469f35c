"""Translate topic models between languages with a bilingual lexicon."""

from .errors import (
    InputError,
    LexitopicError,
    ModelFormatError,
    ParameterError,
    RecordError,
    TranslationError,
)
from .evaluation import (
    AlignedPair,
    EvalReport,
    evaluate_consistency,
    ndcg_at_3,
    overlap_at_3,
    recall_precision_at_k,
    topic_sharpness,
)
from .inference import Document, ThetaDistribution, infer_theta
from .lexicon import BilingualLexicon, Direction, TranslationPair, compose_lexicon, translate
from .topic_model import (
    Topic,
    TopicModel,
    fit_to_vocabulary,
    get_rank,
    load_model,
    min_probability,
    normalize,
    save_model,
)
from .translator import (
    KeepOriginPolicy,
    TranslatedTopicModel,
    TranslationConfig,
    translate_plain,
    translate_topic,
    translate_topic_model,
)
from .voting import Voter, VotingModelSpec, evaluate, parse_voting_spec

from ._version import __version__
