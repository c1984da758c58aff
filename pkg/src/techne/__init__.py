"""techne: translation-technique annotation and prediction toolkit.

Annotates English-Chinese aligned word/phrase pairs with translation
techniques via a deterministic rule cascade, synthesizes bad literal
translations for post-editing triage, and trains/evaluates four small
classifier architectures over hashed lexical features.
"""

__version__ = "0.1.0"

from .corpus import (  # noqa: F401
    AlignedUnit,
    PairRecord,
    Quality,
    Sentence,
    Technique,
    Token,
    load_corpus,
    save_corpus,
    split,
)
from .align import (  # noqa: F401
    Alignment,
    EmbeddingTable,
    TranslationTable,
    cosine,
    embed_align,
    lexical_align,
    train_lexical_model,
)
from .resources import RuleResources, load_resources  # noqa: F401
from .annotate import annotate_corpus, classify_pair  # noqa: F401
from .synthesize import SynthesisConfig, build_pe_dataset, make_bad_literal  # noqa: F401
from .encode import (  # noqa: F401
    FeatureConfig,
    InputFormat,
    build_input1,
    build_input2,
    featurize,
)
from .model import (  # noqa: F401
    ArchitectureSpec,
    TrainConfig,
    TrainedModel,
    forward,
    gradient_check,
    multitask_loss,
    predict_arch3,
    train,
)
from .evaluate import MetricsReport, evaluate, f1, heatmap_export  # noqa: F401
