import json

import numpy as np
import pytest

from cursivecut.corpus import (
    CorpusError,
    WordRecord,
    auto_label,
    evaluate_pipeline,
    export_training_set,
    load_corpus,
    load_labels,
    load_training_set,
    render_report,
    report_to_json,
    seg_rate,
    synthesize_corpus,
    write_corpus,
)
from cursivecut.images import GrayImage
from cursivecut.segmenter import SegParams

BENCH_PARAMS = SegParams(n=29, char_width=2.0)


# -- seg_rate ----------------------------------------------------------------

def test_seg_rate_exact_match():
    assert seg_rate([10, 20, 30], [10, 20, 30]) == (100.0, 0, 0)


def test_seg_rate_no_predictions():
    rate, over, missed = seg_rate([], [10, 20])
    assert (rate, over, missed) == (0.0, 0, 2)


def test_seg_rate_empty_gt_is_perfect():
    rate, over, missed = seg_rate([5, 9], [])
    assert rate == 100.0 and missed == 0 and over == 2


def test_seg_rate_tolerance_and_over_seg():
    # 28 matches 30, 61 matches 60, 90 matches nothing
    rate, over, missed = seg_rate([28, 61, 90], [30, 60], tolerance=3)
    assert rate == 100.0 and over == 1 and missed == 0


def test_seg_rate_each_prediction_claimed_once():
    # one prediction cannot satisfy two boundaries
    rate, over, missed = seg_rate([31], [30, 32], tolerance=3)
    assert rate == 50.0 and over == 0 and missed == 1


def test_seg_rate_negative_tolerance():
    with pytest.raises(ValueError):
        seg_rate([1], [1], tolerance=-1)


def test_seg_rate_invariants(rng):
    for _ in range(300):
        gt = sorted(rng.choice(200, size=int(rng.integers(0, 8)), replace=False).tolist())
        pred = sorted(rng.choice(200, size=int(rng.integers(0, 12)), replace=False).tolist())
        tol = int(rng.integers(0, 6))
        rate, over, missed = seg_rate(pred, gt, tol)
        hits = len(gt) - missed
        assert hits + over == len(pred)
        assert 0 <= hits <= min(len(gt), len(pred))
        if gt:
            assert rate == pytest.approx(100.0 * hits / len(gt))
        # order of the inputs must not matter
        shuffled = seg_rate(list(reversed(pred)), list(reversed(gt)), tol)
        assert shuffled == (rate, over, missed)


# -- synthesis ---------------------------------------------------------------

def test_synthesize_deterministic():
    a = synthesize_corpus(seed=7, word_count=6)
    b = synthesize_corpus(seed=7, word_count=6)
    assert [r.word_id for r in a] == [r.word_id for r in b]
    for ra, rb in zip(a, b):
        assert np.array_equal(ra.image.pixels, rb.image.pixels)
        assert ra.gt_boundaries == rb.gt_boundaries
        assert ra.split == rb.split


def test_synthesize_seed_changes_content():
    a = synthesize_corpus(seed=1, word_count=4)
    b = synthesize_corpus(seed=2, word_count=4)
    assert any(
        not np.array_equal(ra.image.pixels, rb.image.pixels) for ra, rb in zip(a, b)
    )


def test_synthesized_words_well_formed():
    corpus = synthesize_corpus(seed=11, word_count=20)
    assert len(corpus) == 20
    splits = [r.split for r in corpus]
    assert splits[:5] == ["train", "train", "train", "test", "test"]
    for rec in corpus:
        gt = rec.gt_boundaries
        assert 2 <= len(gt) <= 7  # 3..8 glyphs
        assert all(b - a > 0 for a, b in zip(gt, gt[1:]))
        assert gt[0] > 0 and gt[-1] < rec.image.width - 1
        ink = rec.image.pixels == 0
        assert ink.any()
        # boundary columns carry only the baseline ligature
        for col in gt:
            assert ink[:, col].sum() == 1


def test_synthesize_rejects_empty():
    with pytest.raises(ValueError):
        synthesize_corpus(seed=0, word_count=0)


# -- corpus files ------------------------------------------------------------

def small_corpus():
    return synthesize_corpus(seed=3, word_count=3)


def test_corpus_round_trip(tmp_path):
    out = write_corpus(small_corpus(), tmp_path / "c")
    assert out.name == "manifest.jsonl"
    back = load_corpus(tmp_path / "c")
    for orig, got in zip(small_corpus(), back):
        assert got.word_id == orig.word_id
        assert got.gt_boundaries == orig.gt_boundaries
        assert got.split == orig.split
        assert np.array_equal(got.image.pixels, orig.image.pixels)
        assert got.image_path and got.image_path.endswith(f"{orig.word_id}.pgm")


def test_write_corpus_deterministic(tmp_path):
    write_corpus(small_corpus(), tmp_path / "a")
    write_corpus(small_corpus(), tmp_path / "b")
    assert (tmp_path / "a/manifest.jsonl").read_bytes() == (tmp_path / "b/manifest.jsonl").read_bytes()
    assert (tmp_path / "a/w0000.pgm").read_bytes() == (tmp_path / "b/w0000.pgm").read_bytes()


def test_load_corpus_missing_manifest(tmp_path):
    with pytest.raises(CorpusError, match="manifest"):
        load_corpus(tmp_path)


def test_load_corpus_empty_manifest(tmp_path):
    (tmp_path / "manifest.jsonl").write_text("")
    assert load_corpus(tmp_path) == []


def test_load_corpus_missing_image_names_word(tmp_path):
    write_corpus(small_corpus(), tmp_path)
    (tmp_path / "w0001.pgm").unlink()
    with pytest.raises(CorpusError, match="w0001"):
        load_corpus(tmp_path)


def test_load_corpus_duplicate_word_id(tmp_path):
    write_corpus(small_corpus(), tmp_path)
    manifest = tmp_path / "manifest.jsonl"
    lines = manifest.read_text().splitlines()
    manifest.write_text("\n".join(lines + [lines[0]]) + "\n")
    with pytest.raises(CorpusError, match="duplicate"):
        load_corpus(tmp_path)


def test_load_corpus_bad_boundaries(tmp_path):
    rec = small_corpus()[0]
    write_corpus([rec], tmp_path)
    manifest = tmp_path / "manifest.jsonl"
    row = json.loads(manifest.read_text())
    row["gt_boundaries"] = [40, 40]
    manifest.write_text(json.dumps(row) + "\n")
    with pytest.raises(CorpusError, match="increasing"):
        load_corpus(tmp_path)
    row["gt_boundaries"] = [0, 10]
    manifest.write_text(json.dumps(row) + "\n")
    with pytest.raises(CorpusError, match="interior"):
        load_corpus(tmp_path)


def test_load_corpus_malformed_line_numbered(tmp_path):
    write_corpus(small_corpus(), tmp_path)
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text(manifest.read_text() + "{not json\n")
    with pytest.raises(CorpusError, match="line 4"):
        load_corpus(tmp_path)


# -- label log ---------------------------------------------------------------

def entry(word_id, column, label):
    return json.dumps({"word_id": word_id, "column": column, "label": label})


def test_load_labels_replay(tmp_path):
    log = tmp_path / "labels.jsonl"
    log.write_text(
        "\n".join(
            [
                entry("w0", 10, "valid"),
                entry("w0", 20, "invalid"),
                entry("w0", 10, "invalid"),  # overwrite
                entry("w0", 20, None),  # delete
                entry("w1", 5, "valid"),
            ]
        )
        + "\n"
    )
    assert load_labels(log) == {("w0", 10): "invalid", ("w1", 5): "valid"}


def test_load_labels_bad_value_names_line(tmp_path):
    log = tmp_path / "labels.jsonl"
    log.write_text(entry("w0", 1, "valid") + "\n" + entry("w0", 2, "maybe") + "\n")
    with pytest.raises(CorpusError, match="line 2"):
        load_labels(log)


def test_load_corpus_attaches_labels(tmp_path):
    write_corpus(small_corpus(), tmp_path)
    (tmp_path / "labels.jsonl").write_text(
        entry("w0001", 12, "valid") + "\n" + entry("w0002", 9, "invalid") + "\n"
    )
    by_id = {r.word_id: r for r in load_corpus(tmp_path)}
    assert by_id["w0001"].labels == {12: "valid"}
    assert by_id["w0002"].labels == {9: "invalid"}
    assert by_id["w0000"].labels == {}


# -- evaluation --------------------------------------------------------------

def test_heuristics_hit_synthetic_boundaries():
    corpus = synthesize_corpus(seed=5, word_count=10)
    report = evaluate_pipeline(corpus, params=BENCH_PARAMS)
    assert report.word_count == 10
    assert report.total_points == sum(len(r.gt_boundaries) for r in corpus)
    assert report.missed == 0
    assert report.train_rate == 100.0 and report.test_rate == 100.0
    assert report.over_seg > 0  # heuristics alone over-segment


def test_evaluate_threads_match_serial():
    corpus = synthesize_corpus(seed=5, word_count=8)
    serial = evaluate_pipeline(corpus, params=BENCH_PARAMS, jobs=1)
    threaded = evaluate_pipeline(corpus, params=BENCH_PARAMS, jobs=4)
    assert report_to_json(serial) == report_to_json(threaded)


def test_evaluate_duplicated_corpus_same_rates():
    corpus = synthesize_corpus(seed=9, word_count=4)
    once = evaluate_pipeline(corpus, params=BENCH_PARAMS)
    twice = evaluate_pipeline(corpus + corpus, params=BENCH_PARAMS)
    assert twice.train_rate == pytest.approx(once.train_rate)
    assert twice.over_seg == 2 * once.over_seg
    assert twice.missed == 2 * once.missed


def test_evaluate_single_split_leaves_other_none():
    corpus = [r for r in synthesize_corpus(seed=9, word_count=5) if r.split == "train"]
    report = evaluate_pipeline(corpus, params=BENCH_PARAMS)
    assert report.test_rate is None
    assert report.train_rate is not None


def test_report_render_shape():
    corpus = synthesize_corpus(seed=5, word_count=5)
    report = evaluate_pipeline(corpus, params=BENCH_PARAMS)
    text = render_report(report)
    lines = text.splitlines()
    assert len(lines) == 4
    assert "Words" in lines[0] and "Test rate (%)" in lines[0]
    assert "Over-segmentations:" in lines[3] and "Missed:" in lines[3]
    none_side = evaluate_pipeline([corpus[0]], params=BENCH_PARAMS)
    assert "-" in render_report(none_side).splitlines()[1]


def test_report_json_keys():
    corpus = synthesize_corpus(seed=5, word_count=3)
    report = evaluate_pipeline(corpus, params=BENCH_PARAMS)
    data = report_to_json(report)
    assert set(data) == {
        "word_count", "total_points", "train_rate", "test_rate",
        "over_seg", "missed", "per_word",
    }
    json.dumps(data)  # must be serializable
    assert len(data["per_word"]) == 3
    assert {"word_id", "split", "rate", "over_seg", "missed", "predicted", "gt"} <= set(
        data["per_word"][0]
    )


# -- labeling and export -----------------------------------------------------

def test_auto_label_marks_every_survivor():
    corpus = synthesize_corpus(seed=13, word_count=4)
    n = auto_label(corpus, params=BENCH_PARAMS)
    assert n == sum(len(r.labels) for r in corpus)
    assert n > 0
    seen = {v for r in corpus for v in r.labels.values()}
    assert seen == {"valid", "invalid"}


def test_export_round_trip(tmp_path):
    corpus = synthesize_corpus(seed=13, word_count=4)
    auto_label(corpus, params=BENCH_PARAMS)
    out = tmp_path / "train.jsonl"
    rows = export_training_set(corpus, params=BENCH_PARAMS, out_path=out)
    assert len(rows) == sum(len(r.labels) for r in corpus)
    keys = [(r["word_id"], r["column"]) for r in rows]
    assert keys == sorted(keys)
    X, y, meta = load_training_set(out)
    assert X.shape == (len(rows), len(rows[0]["features"]))
    assert set(np.unique(y)) <= {0.0, 1.0}
    assert meta[0]["word_id"] == rows[0]["word_id"]

    again = tmp_path / "again.jsonl"
    export_training_set(corpus, params=BENCH_PARAMS, out_path=again)
    assert out.read_bytes() == again.read_bytes()


def test_export_requires_labels():
    corpus = synthesize_corpus(seed=13, word_count=2)
    with pytest.raises(CorpusError, match="no labeled cuts"):
        export_training_set(corpus, params=BENCH_PARAMS)


def test_export_skips_unlabeled_columns(tmp_path):
    corpus = synthesize_corpus(seed=13, word_count=2)
    auto_label(corpus, params=BENCH_PARAMS)
    keep = dict(list(corpus[0].labels.items())[:2])
    corpus[0].labels = keep
    corpus[1].labels = {}
    rows = export_training_set(corpus, params=BENCH_PARAMS)
    assert len(rows) == 2
    assert {r["word_id"] for r in rows} == {corpus[0].word_id}


def test_load_training_set_errors(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"word_id": "w", "column": 1, "features": [0.1], "label": 1}\nnope\n')
    with pytest.raises(CorpusError, match="line 2"):
        load_training_set(bad)
    ragged = tmp_path / "ragged.jsonl"
    ragged.write_text(
        '{"word_id": "w", "column": 1, "features": [0.1, 0.2], "label": 1}\n'
        '{"word_id": "w", "column": 2, "features": [0.3], "label": 0}\n'
    )
    with pytest.raises(CorpusError):
        load_training_set(ragged)
