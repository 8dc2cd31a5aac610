"""End-to-end composition: raw grayscale word in, character crops out.

Stages: binarize, slant-correct, thin, over-segment, reject loop cuts, merge
near-duplicates, optionally classify the survivors with a trained ensemble,
trace a non-linear path through each accepted cut, split the word along the
paths.
"""

from dataclasses import dataclass, replace

from .features import FeatureConfig, extract_features
from .images import BinaryImage, GrayImage, SkeletonImage
from .imgproc import deslant, otsu_threshold, thin
from .neural import EnsembleModel, classify_cut
from .pathtrace import (
    CharacterSegment,
    SegmentationPath,
    segment_characters,
    trace_path,
)
from .segmenter import (
    CandidateCut,
    CoreZone,
    CutStatus,
    SegParams,
    detect_core_zone,
    estimate_char_width,
    filter_loops,
    merge_by_width,
    oversegment,
)


@dataclass(frozen=True)
class PreprocessResult:
    gray: GrayImage
    threshold: int
    binary: BinaryImage  # binarized input, original frame
    skeleton: SkeletonImage  # deslanted, cropped, thinned
    slant_angle: int
    crop_top: int
    crop_left: int

    def to_input_column(self, column: int) -> int:
        """Map a skeleton column back to the input frame.

        The shear pivots on the bottom row, so the mapping is exact at the
        baseline and off by at most tan(angle)*height elsewhere.
        """
        return column + self.crop_left


@dataclass(frozen=True)
class SegmentationResult:
    preprocess: PreprocessResult
    cuts: list[CandidateCut]
    zone: CoreZone | None
    paths: list[SegmentationPath]
    segments: list[CharacterSegment]

    @property
    def accepted_cuts(self) -> list[CandidateCut]:
        keep = (CutStatus.HEURISTIC_VALID, CutStatus.NN_VALID)
        return [c for c in self.cuts if c.status in keep]


def preprocess(img: GrayImage) -> PreprocessResult:
    threshold, binary = otsu_threshold(img)
    corrected, angle, top, left = deslant(binary)
    return PreprocessResult(
        gray=img,
        threshold=threshold,
        binary=binary,
        skeleton=thin(corrected),
        slant_angle=angle,
        crop_top=top,
        crop_left=left,
    )


def propose_cuts(skel: SkeletonImage, params: SegParams) -> list[CandidateCut]:
    """Heuristic cut pass: over-segment, drop loop crossers, merge clusters.

    Words narrower than the divisor get a proportionally smaller one so the
    spacing rule still applies; a word too narrow to split yields no cuts.
    """
    if skel.width < params.n:
        if skel.width < 2:
            return []
        params = replace(params, n=skel.width)
    cuts = filter_loops(oversegment(skel, params), skel)
    width = params.char_width
    if width is None:
        width = estimate_char_width(skel, cuts)
    return merge_by_width(cuts, width)


def classify_cuts(
    skel: SkeletonImage,
    cuts: list[CandidateCut],
    model: EnsembleModel,
    cfg: FeatureConfig,
) -> list[CandidateCut]:
    """Promote each heuristic survivor to nn_valid or nn_invalid."""
    survivors = [c for c in cuts if c.status == CutStatus.HEURISTIC_VALID]
    out = []
    for cut in cuts:
        if cut.status != CutStatus.HEURISTIC_VALID:
            out.append(cut)
            continue
        verdict = classify_cut(model, extract_features(skel, cut, survivors, cfg))
        status = CutStatus.NN_VALID if verdict == "valid" else CutStatus.NN_INVALID
        out.append(cut.advanced(status))
    return out


def trace_accepted(
    skel: SkeletonImage,
    cuts: list[CandidateCut],
    lam: float = 1.0,
    core_fraction: float = 0.2,
) -> tuple[CoreZone | None, list[SegmentationPath]]:
    """One path per accepted cut, in column order."""
    accepted = [
        c
        for c in sorted(cuts, key=lambda c: c.column)
        if c.status in (CutStatus.HEURISTIC_VALID, CutStatus.NN_VALID)
    ]
    if not accepted or not skel.pixels.any():
        return None, []
    zone = detect_core_zone(skel, core_fraction)
    paths: list[SegmentationPath] = []
    for cut in accepted:
        path = trace_path(skel, cut, zone, lam)
        # two close cuts can detour around the same stroke in opposite
        # directions; the later path would cross, so it is dropped
        if paths and (paths[-1].columns > path.columns).any():
            continue
        paths.append(path)
    return zone, paths


def segment_word(
    img: GrayImage,
    params: SegParams | None = None,
    feature_cfg: FeatureConfig | None = None,
    model: EnsembleModel | None = None,
    lam: float = 1.0,
) -> SegmentationResult:
    """Full pipeline on one word; without a model the heuristics decide."""
    params = params or SegParams()
    pre = preprocess(img)
    cuts = propose_cuts(pre.skeleton, params)
    if model is not None:
        cuts = classify_cuts(pre.skeleton, cuts, model, feature_cfg or FeatureConfig())
    zone, paths = trace_accepted(pre.skeleton, cuts, lam, params.core_fraction)
    segments = segment_characters(pre.skeleton, paths)
    return SegmentationResult(
        preprocess=pre, cuts=cuts, zone=zone, paths=paths, segments=segments
    )
