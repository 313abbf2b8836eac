"""MXEB binary format and the directory-based embedding store.

MXEB layout: magic b"MXEB", version byte 0x01, uint32-le row count T,
uint32-le column count D, then T*D float32-le values row-major. A single
embedding is stored with T = 1; Gaussian statistics use T = D+1 rows
(row 0 the mean, rows 1..D the covariance).
"""

import json
import struct
from pathlib import Path

import numpy as np

from .errors import BadFormat, MissingEmbedding
from .metrics import Embedding, GaussianStats, LatentMatrix

MAGIC = b"MXEB"
VERSION = 1


def write_mxeb(path, matrix):
    """Write a 2-D float array as an MXEB file."""
    m = np.asarray(matrix, dtype="<f4")
    if m.ndim == 1:
        m = m[np.newaxis, :]
    if m.ndim != 2:
        raise ValueError(f"expected a 1-D or 2-D array, got ndim={m.ndim}")
    t, d = m.shape
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(bytes([VERSION]))
        f.write(struct.pack("<II", t, d))
        f.write(np.ascontiguousarray(m).tobytes())


def read_mxeb(path):
    """Read an MXEB file into a float64 (T, D) array."""
    with open(path, "rb") as f:
        header = f.read(13)
        if len(header) < 13 or header[:4] != MAGIC:
            raise BadFormat(f"{path}: bad magic")
        if header[4] != VERSION:
            raise BadFormat(f"{path}: unsupported version {header[4]}")
        t, d = struct.unpack("<II", header[5:13])
        body = f.read(4 * t * d)
    if len(body) != 4 * t * d:
        raise BadFormat(f"{path}: expected {4 * t * d} payload bytes, got {len(body)}")
    return np.frombuffer(body, dtype="<f4").astype(np.float64).reshape(t, d)


def write_embedding(path, emb):
    write_mxeb(path, emb.values[np.newaxis, :])


def read_embedding(path, clip_id=""):
    m = read_mxeb(path)
    if m.shape[0] != 1:
        raise BadFormat(f"{path}: expected a single row for an embedding, got {m.shape[0]}")
    return Embedding(m[0], clip_id=clip_id)


def read_latents(path, clip_id=""):
    return LatentMatrix(read_mxeb(path), clip_id=clip_id)


def write_gaussian_stats(path, stats):
    write_mxeb(path, np.vstack([stats.mean[np.newaxis, :], stats.covariance]))


def read_gaussian_stats(path):
    m = read_mxeb(path)
    t, d = m.shape
    if t != d + 1:
        raise BadFormat(f"{path}: stats need D+1 rows for D columns, got {t}x{d}")
    # serialized stats do not carry the sample count; keep the minimum valid value
    return GaussianStats(m[0], 0.5 * (m[1:] + m[1:].T), count=2)


class EmbeddingStore:
    """Directory of <id>.mxeb files plus an index.json mapping ids to files."""

    INDEX = "index.json"

    def __init__(self, root):
        self.root = Path(root)
        self._index = {}
        index_path = self.root / self.INDEX
        if index_path.exists():
            with open(index_path, encoding="utf-8") as f:
                self._index = json.load(f)["entries"]

    def ids(self):
        return sorted(self._index)

    def __contains__(self, entry_id):
        return entry_id in self._index

    def _path(self, entry_id):
        if entry_id not in self._index:
            raise MissingEmbedding(f"no store entry for id {entry_id!r}")
        return self.root / self._index[entry_id]

    def embedding(self, entry_id):
        return read_embedding(self._path(entry_id), clip_id=entry_id)

    def latents(self, entry_id):
        return read_latents(self._path(entry_id), clip_id=entry_id)

    def put(self, entry_id, matrix):
        """Write an entry and update the on-disk index."""
        self.root.mkdir(parents=True, exist_ok=True)
        filename = f"{entry_id}.mxeb"
        write_mxeb(self.root / filename, matrix)
        self._index[entry_id] = filename
        self._flush()

    def ensure_index(self):
        """Write the index file even when no entries were added."""
        self.root.mkdir(parents=True, exist_ok=True)
        self._flush()

    def _flush(self):
        with open(self.root / self.INDEX, "w", encoding="utf-8") as f:
            json.dump({"entries": dict(sorted(self._index.items()))}, f, indent=2)
            f.write("\n")
