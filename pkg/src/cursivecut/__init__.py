"""Segmentation of overlapped cursive script words into characters.

Heuristic over-segmentation proposes candidate cut columns, a small
MLP+RBF ensemble votes each candidate valid or invalid, and a dynamic
program threads a non-linear separation path through every accepted cut.
"""

from .corpus import (
    CorpusError,
    EvalReport,
    WordRecord,
    auto_label,
    evaluate_pipeline,
    export_training_set,
    load_corpus,
    load_training_set,
    render_report,
    seg_rate,
    synthesize_corpus,
    write_corpus,
)
from .features import FeatureConfig, extract_features
from .images import (
    BinaryImage,
    GrayImage,
    PgmError,
    SkeletonImage,
    load_image,
    save_pbm,
    save_pgm,
    to_gray,
)
from .imgproc import correct_slant, deslant, otsu_threshold, slant_angle, thin
from .neural import (
    EnsembleModel,
    ModelError,
    TrainConfig,
    classify_cut,
    corr_r,
    ensemble_predict,
    load_model,
    mlp_forward,
    mlp_train,
    rbf_forward,
    rbf_train,
    rmse,
    save_model,
    scatter_index,
    train_ensemble,
)
from .pathtrace import (
    CharacterSegment,
    PathCrossingError,
    SegmentationPath,
    render_overlay,
    segment_characters,
    trace_path,
)
from .pipeline import (
    PreprocessResult,
    SegmentationResult,
    classify_cuts,
    preprocess,
    propose_cuts,
    segment_word,
    trace_accepted,
)
from .segmenter import (
    CandidateCut,
    CoreZone,
    CutStatus,
    SegParams,
    crossing_count,
    cuts_from_json,
    cuts_to_json,
    detect_core_zone,
    estimate_char_width,
    filter_loops,
    merge_by_width,
    oversegment,
)
from .service import AnnotationServer, LabelStore, serve

__version__ = "0.1.0"
