"""Annotation backend: serves word images and candidate cuts over HTTP,
records valid/invalid verdicts, and exports the training set.

Labels go to an append-only JSON-lines log, fsynced before the 204 goes
out, so a crash mid-session never loses an acknowledged write; the log
compacts to one line per (word, column) on startup.
"""

import io
import json
import os
import re
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .corpus import CorpusError, export_training_set, load_corpus
from .features import FeatureConfig
from .images import GrayImage
from .pipeline import preprocess, propose_cuts
from .segmenter import CutStatus, SegParams

_PGM_TYPE = "image/x-portable-graymap"

_STATIC_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".svg": "image/svg+xml",
}


class LabelStore:
    """Replayable label log; last write per (word_id, column) wins."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, int], tuple[str, float]] = {}
        if self.path.is_file():
            self._replay()

    def _replay(self) -> None:
        for line in self.path.read_text().splitlines():
            if not line.strip():
                continue
            entry = json.loads(line)
            key = (entry["word_id"], int(entry["column"]))
            if entry["label"] is None:
                self._entries.pop(key, None)
            else:
                self._entries[key] = (entry["label"], float(entry.get("ts", 0.0)))

    def _append(self, word_id: str, column: int, label, ts: float) -> None:
        line = json.dumps(
            {"word_id": word_id, "column": column, "label": label, "ts": ts}
        )
        with open(self.path, "a") as f:
            f.write(line + "\n")
            f.flush()
            os.fsync(f.fileno())

    def put(self, word_id: str, column: int, label: str) -> None:
        if label not in ("valid", "invalid"):
            raise ValueError(f"unknown label {label!r}")
        with self._lock:
            ts = time.time()
            self._append(word_id, column, label, ts)
            self._entries[(word_id, column)] = (label, ts)

    def delete(self, word_id: str, column: int) -> None:
        with self._lock:
            if (word_id, column) in self._entries:
                self._append(word_id, column, None, time.time())
                del self._entries[(word_id, column)]

    def snapshot(self) -> dict[tuple[str, int], str]:
        with self._lock:
            return {k: v[0] for k, v in self._entries.items()}

    def compact(self) -> None:
        """Rewrite the log as one sorted line per live label."""
        with self._lock:
            lines = [
                json.dumps(
                    {"word_id": w, "column": c, "label": label, "ts": ts}
                )
                for (w, c), (label, ts) in sorted(self._entries.items())
            ]
            tmp = self.path.with_suffix(".tmp")
            with open(tmp, "w") as f:
                f.write("\n".join(lines) + "\n" if lines else "")
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, self.path)


class _WordState:
    """Per-word precomputation: preprocess once, candidates fixed."""

    def __init__(self, record, params: SegParams):
        self.record = record
        self.pre = preprocess(record.image)
        self.cuts = propose_cuts(self.pre.skeleton, params)
        self.candidates = {
            self.pre.to_input_column(c.column)
            for c in self.cuts
            if c.status == CutStatus.HEURISTIC_VALID
        }


class AnnotationServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(
        self,
        corpus_dir,
        labels_path=None,
        port: int = 0,
        host: str = "127.0.0.1",
        params: SegParams | None = None,
        feature_cfg: FeatureConfig | None = None,
        static_dir=None,
    ):
        self.corpus_dir = Path(corpus_dir)
        self.params = params or SegParams()
        self.feature_cfg = feature_cfg or FeatureConfig()
        self.static_dir = Path(static_dir).resolve() if static_dir else None
        records = load_corpus(self.corpus_dir)
        self.words = {r.word_id: _WordState(r, self.params) for r in records}
        self.word_order = [r.word_id for r in records]
        if labels_path is None:
            labels_path = self.corpus_dir / "labels.jsonl"
        self.store = LabelStore(labels_path)
        self.store.compact()
        super().__init__((host, port), _Handler)

    @property
    def port(self) -> int:
        return self.server_address[1]


class _Handler(BaseHTTPRequestHandler):
    server: AnnotationServer
    protocol_version = "HTTP/1.1"

    _CUT_RE = re.compile(r"^/api/words/([^/]+)/cuts/([^/]+)$")

    # -- plumbing ---------------------------------------------------------

    def log_message(self, fmt, *args):
        pass

    def _send(self, code: int, body: bytes = b"", ctype: str = "application/json"):
        self.send_response(code)
        if body:
            self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        if body:
            self.wfile.write(body)

    def _send_json(self, code: int, payload) -> None:
        self._send(code, json.dumps(payload).encode(), "application/json")

    def _error(self, code: int, message: str) -> None:
        self._send_json(code, {"error": message})

    def _read_body(self):
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    # -- routes -----------------------------------------------------------

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/api/words":
            return self._get_words()
        m = re.match(r"^/api/words/([^/]+)/image$", path)
        if m:
            return self._get_image(m.group(1))
        m = re.match(r"^/api/words/([^/]+)/cuts$", path)
        if m:
            return self._get_cuts(m.group(1))
        if self.server.static_dir is not None and not path.startswith("/api/"):
            return self._get_static(path)
        self._error(404, f"no route for {path}")

    def do_PUT(self):
        # drain the body before any early error reply: with keep-alive the
        # unread bytes would be parsed as the next request line
        raw = self._read_body()
        target = self._cut_target()
        if target is None:
            return
        word_id, column = target
        try:
            body = json.loads(raw or b"")
            label = body["label"]
        except (json.JSONDecodeError, TypeError, KeyError):
            return self._error(400, "body must be JSON {\"label\": ...}")
        if label not in ("valid", "invalid"):
            return self._error(400, f"label must be valid or invalid, got {label!r}")
        self.server.store.put(word_id, column, label)
        self._send(204)

    def do_DELETE(self):
        self._read_body()
        target = self._cut_target()
        if target is None:
            return
        word_id, column = target
        self.server.store.delete(word_id, column)
        self._send(204)

    def do_POST(self):
        self._read_body()
        if self.path.split("?", 1)[0] != "/api/export":
            return self._error(404, f"no route for {self.path}")
        labels = self.server.store.snapshot()
        records = []
        for word_id in self.server.word_order:
            record = self.server.words[word_id].record
            record.labels = {
                c: v for (w, c), v in labels.items() if w == word_id
            }
            records.append(record)
        out = self.server.corpus_dir / "training.jsonl"
        try:
            rows = export_training_set(
                records, self.server.feature_cfg, self.server.params, out
            )
        except CorpusError as exc:
            return self._error(400, str(exc))
        self._send_json(200, {"rows": len(rows), "path": str(out)})

    # -- handlers ---------------------------------------------------------

    def _cut_target(self):
        """Validate /api/words/{id}/cuts/{column}; None when already replied."""
        m = self._CUT_RE.match(self.path.split("?", 1)[0])
        if not m:
            self._error(404, f"no route for {self.path}")
            return None
        word_id, raw = m.groups()
        state = self.server.words.get(word_id)
        if state is None:
            self._error(404, f"unknown word {word_id}")
            return None
        try:
            column = int(raw)
        except ValueError:
            self._error(404, f"column must be an integer, got {raw!r}")
            return None
        if column not in state.candidates:
            self._error(409, f"column {column} is not a candidate cut")
            return None
        return word_id, column

    def _get_words(self):
        labels = self.server.store.snapshot()
        payload = []
        for word_id in self.server.word_order:
            state = self.server.words[word_id]
            payload.append(
                {
                    "word_id": word_id,
                    "width": state.record.image.width,
                    "height": state.record.image.height,
                    "cut_count": len(state.candidates),
                    "labeled_count": sum(1 for (w, _) in labels if w == word_id),
                }
            )
        self._send_json(200, payload)

    def _get_image(self, word_id: str):
        state = self.server.words.get(word_id)
        if state is None:
            return self._error(404, f"unknown word {word_id}")
        img: GrayImage = state.record.image
        accept = self.headers.get("Accept", "")
        if "image/png" in accept:
            from PIL import Image

            buf = io.BytesIO()
            Image.fromarray(img.pixels, mode="L").save(buf, format="PNG")
            return self._send(200, buf.getvalue(), "image/png")
        header = f"P5\n{img.width} {img.height}\n255\n".encode()
        self._send(200, header + img.pixels.tobytes(), _PGM_TYPE)

    def _get_cuts(self, word_id: str):
        state = self.server.words.get(word_id)
        if state is None:
            return self._error(404, f"unknown word {word_id}")
        labels = self.server.store.snapshot()
        payload = []
        for cut in sorted(state.cuts, key=lambda c: (c.column, c.status.value)):
            col = state.pre.to_input_column(cut.column)
            payload.append(
                {
                    "column": col,
                    "status": cut.status.value,
                    "crossing_count": cut.crossing_count,
                    "label": labels.get((word_id, col)),
                }
            )
        self._send_json(200, payload)

    def _get_static(self, path: str):
        root = self.server.static_dir
        rel = path.lstrip("/") or "index.html"
        target = (root / rel).resolve()
        if root not in target.parents and target != root:
            return self._error(404, "not found")
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            return self._error(404, f"not found: {path}")
        ctype = _STATIC_TYPES.get(target.suffix, "application/octet-stream")
        self._send(200, target.read_bytes(), ctype)


def serve(
    corpus_dir,
    labels_path=None,
    port: int = 0,
    params: SegParams | None = None,
    feature_cfg: FeatureConfig | None = None,
    static_dir=None,
) -> AnnotationServer:
    """Build a ready-to-run server bound on 127.0.0.1; caller starts it."""
    return AnnotationServer(
        corpus_dir,
        labels_path=labels_path,
        port=port,
        params=params,
        feature_cfg=feature_cfg,
        static_dir=static_dir,
    )
