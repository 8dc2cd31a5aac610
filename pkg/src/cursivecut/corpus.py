"""Word corpora: loading, synthesis, scoring, and training-set export.

A corpus is a directory of PGM word images plus a `manifest.jsonl` naming
each word, its image file, and its ground-truth boundary columns.  Labels
(human or automatic verdicts on candidate cuts) live in a separate
`labels.jsonl` replay log so annotation never rewrites the manifest.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .features import FeatureConfig, extract_features
from .images import GrayImage, load_image, save_pgm
from .neural import EnsembleModel
from .pipeline import PreprocessResult, classify_cuts, preprocess, propose_cuts
from .segmenter import CandidateCut, CutStatus, SegParams

MANIFEST_NAME = "manifest.jsonl"
LABELS_NAME = "labels.jsonl"


class CorpusError(ValueError):
    """Malformed manifest, missing image, or inconsistent ground truth."""


@dataclass
class WordRecord:
    word_id: str
    image: GrayImage
    gt_boundaries: list[int]
    labels: dict[int, str] = field(default_factory=dict)  # column -> valid|invalid
    split: str = "train"
    image_path: str | None = None


@dataclass
class EvalReport:
    word_count: int
    total_points: int
    train_rate: float | None  # unweighted mean over the split's words
    test_rate: float | None
    over_seg: int
    missed: int
    per_word: list[dict]


# ---------------------------------------------------------------------------
# loading

def load_labels(path) -> dict[tuple[str, int], str]:
    """Replay a label log; later entries win, null labels delete."""
    out: dict[tuple[str, int], str] = {}
    text = Path(path).read_text()
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
            key = (entry["word_id"], int(entry["column"]))
            label = entry["label"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorpusError(f"label log line {ln}: {exc}") from exc
        if label is None:
            out.pop(key, None)
        elif label in ("valid", "invalid"):
            out[key] = label
        else:
            raise CorpusError(f"label log line {ln}: unknown label {label!r}")
    return out


def load_corpus(dir_path) -> list[WordRecord]:
    """Read manifest.jsonl (+ labels.jsonl when present) into records."""
    root = Path(dir_path)
    manifest = root / MANIFEST_NAME
    if not manifest.is_file():
        raise CorpusError(f"manifest not found: {manifest}")
    labels: dict[tuple[str, int], str] = {}
    if (root / LABELS_NAME).is_file():
        labels = load_labels(root / LABELS_NAME)

    records = []
    seen = set()
    for ln, line in enumerate(manifest.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            word_id = row["word_id"]
            image_rel = row["image"]
            gt = [int(c) for c in row["gt_boundaries"]]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"manifest line {ln}: {exc}") from exc
        if word_id in seen:
            raise CorpusError(f"word {word_id}: duplicate manifest entry")
        seen.add(word_id)
        image_path = root / image_rel
        if not image_path.is_file():
            raise CorpusError(f"word {word_id}: image not found: {image_path}")
        img = load_image(image_path)
        if any(b - a <= 0 for a, b in zip(gt, gt[1:])):
            raise CorpusError(f"word {word_id}: boundaries not strictly increasing")
        if gt and (gt[0] <= 0 or gt[-1] >= img.width - 1):
            raise CorpusError(f"word {word_id}: boundary outside image interior")
        records.append(
            WordRecord(
                word_id=word_id,
                image=img,
                gt_boundaries=gt,
                labels={c: v for (w, c), v in labels.items() if w == word_id},
                split=row.get("split", "train"),
                image_path=str(image_path),
            )
        )
    return records


def write_corpus(records: list[WordRecord], dir_path) -> Path:
    """Persist records as PGMs plus a manifest; returns the manifest path."""
    root = Path(dir_path)
    root.mkdir(parents=True, exist_ok=True)
    lines = []
    for rec in records:
        name = f"{rec.word_id}.pgm"
        save_pgm(rec.image, root / name)
        lines.append(
            json.dumps(
                {
                    "word_id": rec.word_id,
                    "image": name,
                    "gt_boundaries": rec.gt_boundaries,
                    "split": rec.split,
                }
            )
        )
    manifest = root / MANIFEST_NAME
    manifest.write_text("\n".join(lines) + "\n" if lines else "")
    return manifest


# ---------------------------------------------------------------------------
# synthetic corpus

_BODY_H = 15  # glyph template rows; last row is the baseline
_TOP_PAD = 4
_BOTTOM_PAD = 5
_MARGIN = 3


def _ring_glyph() -> np.ndarray:
    """Closed 1-px loop; columns through it cross two runs."""
    g = np.zeros((_BODY_H, 13), dtype=bool)
    theta = np.linspace(0.0, 2.0 * np.pi, 120, endpoint=False)
    rows = np.round(8 + 6 * np.sin(theta)).astype(int)
    cols = np.round(6 + 6 * np.cos(theta)).astype(int)
    g[rows, cols] = True
    return g


def _arch_glyph() -> np.ndarray:
    """Two stems under a top bar; interior columns cross one run."""
    g = np.zeros((_BODY_H, 12), dtype=bool)
    g[4, :] = True
    g[4:, 0] = True
    g[4:, 11] = True
    return g


def _bar_glyph() -> np.ndarray:
    """Single centered ascender stroke."""
    g = np.zeros((_BODY_H, 12), dtype=bool)
    g[2:, 5] = True
    return g


def _humps_glyph() -> np.ndarray:
    """Three stems under one bar, the classic over-segmentation trap."""
    g = np.zeros((_BODY_H, 15), dtype=bool)
    g[6, :] = True
    g[6:, 0] = True
    g[6:, 7] = True
    g[6:, 14] = True
    return g


DEFAULT_GLYPHS = {
    "ring": _ring_glyph,
    "arch": _arch_glyph,
    "bar": _bar_glyph,
    "humps": _humps_glyph,
}


def _synthesize_word(rng: np.random.Generator, glyphs: dict) -> tuple[np.ndarray, list[int]]:
    names = sorted(glyphs)
    count = int(rng.integers(3, 9))
    chosen = [glyphs[names[i]]() for i in rng.integers(0, len(names), size=count)]
    gaps = [int(rng.integers(6, 8)) for _ in range(count - 1)]

    width = 2 * _MARGIN + sum(g.shape[1] for g in chosen) + sum(gaps)
    height = _TOP_PAD + _BODY_H + _BOTTOM_PAD
    canvas = np.zeros((height, width), dtype=bool)
    baseline = _TOP_PAD + _BODY_H - 1

    x = _MARGIN
    boundaries = []
    for i, g in enumerate(chosen):
        canvas[_TOP_PAD : _TOP_PAD + _BODY_H, x : x + g.shape[1]] = g
        x += g.shape[1]
        if i < len(gaps):
            canvas[baseline, x - 1 : x + gaps[i] + 1] = True  # ligature
            boundaries.append((2 * x + gaps[i] - 1) // 2)
            x += gaps[i]

    for b in boundaries:
        if canvas[_TOP_PAD:baseline, b].any():
            raise RuntimeError(f"glyph ink on boundary column {b}")
    return canvas, boundaries


def synthesize_corpus(
    seed: int, word_count: int, glyphs: dict | None = None
) -> list[WordRecord]:
    """Deterministic words of 3-8 glyphs joined by baseline ligatures.

    Ground truth is the midpoint column of each inter-glyph gap; every
    boundary column is ink-free above the baseline by construction.  Words
    alternate 3:2 between train and test splits.
    """
    if word_count < 1:
        raise ValueError("word_count must be at least 1")
    rng = np.random.default_rng(seed)
    glyphs = glyphs or DEFAULT_GLYPHS
    records = []
    for i in range(word_count):
        canvas, boundaries = _synthesize_word(rng, glyphs)
        img = GrayImage(np.where(canvas, 0, 255).astype(np.uint8))
        records.append(
            WordRecord(
                word_id=f"w{i:04d}",
                image=img,
                gt_boundaries=boundaries,
                split="train" if i % 5 < 3 else "test",
            )
        )
    return records


# ---------------------------------------------------------------------------
# scoring

def seg_rate(
    predicted, gt, tolerance: int = 3
) -> tuple[float, int, int]:
    """Greedy one-to-one matching in column order.

    Each ground-truth boundary claims the leftmost unmatched prediction
    within +-tolerance.  Returns (hit rate %, over-segmentations, misses).
    """
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")
    unmatched = sorted(int(p) for p in predicted)
    gt = sorted(int(g) for g in gt)
    hits = 0
    for g in gt:
        for i, p in enumerate(unmatched):
            if abs(p - g) <= tolerance:
                hits += 1
                del unmatched[i]
                break
    rate = 100.0 if not gt else 100.0 * hits / len(gt)
    return rate, len(unmatched), len(gt) - hits


def _word_predictions(
    record: WordRecord,
    model: EnsembleModel | None,
    params: SegParams,
    feature_cfg: FeatureConfig,
) -> tuple[PreprocessResult, list[CandidateCut], list[int]]:
    pre = preprocess(record.image)
    cuts = propose_cuts(pre.skeleton, params)
    if model is not None:
        cuts = classify_cuts(pre.skeleton, cuts, model, feature_cfg)
    accepted = (CutStatus.HEURISTIC_VALID, CutStatus.NN_VALID)
    predicted = sorted(
        pre.to_input_column(c.column) for c in cuts if c.status in accepted
    )
    return pre, cuts, predicted


def evaluate_pipeline(
    corpus: list[WordRecord],
    model: EnsembleModel | None = None,
    params: SegParams | None = None,
    feature_cfg: FeatureConfig | None = None,
    tolerance: int = 3,
    jobs: int = 1,
) -> EvalReport:
    """Score the pipeline per word and average rates within each split.

    model=None scores the heuristics alone; words are independent, so a
    jobs>1 run fans them out over threads and reduces in input order.
    """
    params = params or SegParams()
    feature_cfg = feature_cfg or FeatureConfig()

    def worker(record: WordRecord) -> dict:
        _, _, predicted = _word_predictions(record, model, params, feature_cfg)
        rate, over, missed = seg_rate(predicted, record.gt_boundaries, tolerance)
        return {
            "word_id": record.word_id,
            "split": record.split,
            "rate": rate,
            "over_seg": over,
            "missed": missed,
            "predicted": predicted,
            "gt": list(record.gt_boundaries),
        }

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_word = list(pool.map(worker, corpus))
    else:
        per_word = [worker(r) for r in corpus]

    def split_mean(split: str) -> float | None:
        rates = [w["rate"] for w in per_word if w["split"] == split]
        return sum(rates) / len(rates) if rates else None

    return EvalReport(
        word_count=len(corpus),
        total_points=sum(len(r.gt_boundaries) for r in corpus),
        train_rate=split_mean("train"),
        test_rate=split_mean("test"),
        over_seg=sum(w["over_seg"] for w in per_word),
        missed=sum(w["missed"] for w in per_word),
        per_word=per_word,
    )


def render_report(report: EvalReport) -> str:
    """Four-column table (words, points, train %, test %) plus error counts."""
    def fmt(rate: float | None) -> str:
        return "-" if rate is None else f"{rate:.2f}"

    header = f"{'Words':>8}  {'Seg. points':>12}  {'Train rate (%)':>15}  {'Test rate (%)':>14}"
    row = (
        f"{report.word_count:>8}  {report.total_points:>12}  "
        f"{fmt(report.train_rate):>15}  {fmt(report.test_rate):>14}"
    )
    tail = f"Over-segmentations: {report.over_seg}   Missed: {report.missed}"
    return "\n".join((header, row, "", tail))


def report_to_json(report: EvalReport) -> dict:
    return {
        "word_count": report.word_count,
        "total_points": report.total_points,
        "train_rate": report.train_rate,
        "test_rate": report.test_rate,
        "over_seg": report.over_seg,
        "missed": report.missed,
        "per_word": report.per_word,
    }


# ---------------------------------------------------------------------------
# labels and training sets

def auto_label(
    corpus: list[WordRecord],
    params: SegParams | None = None,
    tolerance: int = 3,
) -> int:
    """Label every heuristic survivor by proximity to ground truth.

    Stand-in for manual annotation: a cut within +-tolerance of any true
    boundary is valid, the rest invalid.  Returns the number of labels set.
    """
    params = params or SegParams()
    count = 0
    for record in corpus:
        pre = preprocess(record.image)
        cuts = propose_cuts(pre.skeleton, params)
        for cut in cuts:
            if cut.status != CutStatus.HEURISTIC_VALID:
                continue
            col = pre.to_input_column(cut.column)
            ok = any(abs(col - g) <= tolerance for g in record.gt_boundaries)
            record.labels[col] = "valid" if ok else "invalid"
            count += 1
    return count


def export_training_set(
    corpus: list[WordRecord],
    feature_cfg: FeatureConfig | None = None,
    params: SegParams | None = None,
    out_path=None,
) -> list[dict]:
    """One feature row per labeled cut, ordered by (word_id, column).

    Labels are keyed by input-frame columns, so each word's candidate cuts
    are recomputed and mapped back before lookup; unlabeled cuts are
    skipped.  Writes JSON lines when out_path is given.
    """
    params = params or SegParams()
    feature_cfg = feature_cfg or FeatureConfig()
    rows = []
    for record in sorted(corpus, key=lambda r: r.word_id):
        if not record.labels:
            continue
        pre = preprocess(record.image)
        cuts = propose_cuts(pre.skeleton, params)
        survivors = [c for c in cuts if c.status == CutStatus.HEURISTIC_VALID]
        for cut in sorted(survivors, key=lambda c: c.column):
            col = pre.to_input_column(cut.column)
            label = record.labels.get(col)
            if label is None:
                continue
            feats = extract_features(pre.skeleton, cut, survivors, feature_cfg)
            rows.append(
                {
                    "word_id": record.word_id,
                    "column": col,
                    "features": [float(v) for v in feats],
                    "label": 1 if label == "valid" else 0,
                }
            )
    if not rows:
        raise CorpusError("no labeled cuts to export")
    rows.sort(key=lambda r: (r["word_id"], r["column"]))
    if out_path is not None:
        text = "\n".join(json.dumps(r) for r in rows) + "\n"
        Path(out_path).write_text(text)
    return rows


def load_training_set(path) -> tuple[np.ndarray, np.ndarray, list[dict]]:
    """Read an exported training file back into arrays."""
    rows = []
    text = Path(path).read_text()
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            rows.append(row)
            _ = row["features"], row["label"]
        except (json.JSONDecodeError, KeyError) as exc:
            raise CorpusError(f"training file line {ln}: {exc}") from exc
    if not rows:
        raise CorpusError(f"training file is empty: {path}")
    dims = {len(r["features"]) for r in rows}
    if len(dims) != 1:
        raise CorpusError(f"inconsistent feature lengths: {sorted(dims)}")
    X = np.array([r["features"] for r in rows], dtype=np.float64)
    y = np.array([r["label"] for r in rows], dtype=np.float64)
    return X, y, rows
