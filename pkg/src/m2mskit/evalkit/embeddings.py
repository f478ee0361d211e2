"""Embedding drift: word-vector averaging, 2-component PCA and centroid distances."""

from __future__ import annotations

import math
import warnings
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np


class DimensionMismatch(ValueError):
    pass


class DegenerateRank(UserWarning):
    pass


class MissingLanguage(KeyError):
    pass


def average_word_embedding(token_vectors: Sequence[Sequence[float]]) -> np.ndarray:
    """Componentwise mean of the sub-token vectors of one word."""
    if len(token_vectors) == 0:
        raise ValueError("need at least one vector")
    dims = {len(v) for v in token_vectors}
    if len(dims) != 1:
        raise DimensionMismatch(f"vectors have differing dimensions {sorted(dims)}")
    return np.asarray(token_vectors, dtype=float).mean(axis=0)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def power_iteration(mat: np.ndarray, tol: float = 1e-10, max_iter: int = 10000,
                    rng: np.random.Generator | None = None) -> tuple[float, np.ndarray]:
    """Dominant eigenpair of a symmetric positive semi-definite matrix."""
    rng = rng or np.random.default_rng(0)
    v = rng.standard_normal(mat.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = mat @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0, v
        w /= norm
        if np.linalg.norm(w - v) < tol:
            v = w
            break
        v = w
    return float(v @ mat @ v), v


def top_components(points: np.ndarray, k: int = 2, tol: float = 1e-10,
                   max_iter: int = 10000) -> tuple[np.ndarray, np.ndarray]:
    """Top-``k`` eigenvalues and unit eigenvectors (as columns) of the sample covariance."""
    x = np.asarray(points, dtype=float)
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (x.shape[0] - 1)
    scale = max(float(np.trace(cov)), 1.0)
    rng = np.random.default_rng(0)
    values, vectors = [], []
    work = cov.copy()
    for _ in range(k):
        lam, v = power_iteration(work, tol, max_iter, rng)
        if lam <= 1e-12 * scale:
            values.append(0.0)
            vectors.append(np.zeros(cov.shape[0]))
            continue
        v = _fix_sign(v)
        values.append(lam)
        vectors.append(v)
        work = work - lam * np.outer(v, v)  # deflation
    return np.array(values), np.column_stack(vectors)


def pca_project(points, components: int = 2) -> np.ndarray:
    """Project centered points onto the leading covariance eigenvectors.

    Each eigenvector is signed so its largest-magnitude entry is positive.
    Components with (numerically) zero variance are returned as zero columns
    with a :class:`DegenerateRank` warning.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 2:
        raise ValueError("pca_project needs an n x d matrix with n >= 2 and d >= 2")
    values, vectors = top_components(x, components)
    if np.any(values == 0.0):
        warnings.warn(f"covariance has fewer than {components} nonzero eigenvalues; "
                      "missing components are zero-filled", DegenerateRank, stacklevel=2)
    return (x - x.mean(axis=0)) @ vectors


def centroids(points: np.ndarray, labels: Sequence[str]) -> dict[str, np.ndarray]:
    pts = np.asarray(points, dtype=float)
    labels = list(labels)
    return {lab: pts[[i for i, l in enumerate(labels) if l == lab]].mean(axis=0)
            for lab in dict.fromkeys(labels)}


def centroid_drift(points, labels: Sequence[str], focal: str) -> float:
    """Mean Euclidean distance from the focal language's centroid to every other centroid."""
    cents = centroids(points, labels)
    if focal not in cents:
        raise MissingLanguage(focal)
    others = [c for lab, c in cents.items() if lab != focal]
    if not others:
        raise MissingLanguage("no language other than the focal one")
    return math.fsum(float(np.linalg.norm(cents[focal] - c)) for c in others) / len(others)


def read_embedding_file(path: Path) -> list[tuple[str, np.ndarray]]:
    rows = []
    dim = None
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        word, _, vec = line.partition("\t")
        v = np.array([float(x) for x in vec.split()])
        if dim is None:
            dim = len(v)
        if len(v) != dim or dim < 2:
            raise DimensionMismatch(f"{path}:{lineno}: expected {dim} >= 2 components, got {len(v)}")
        rows.append((word, v))
    return rows


def load_embedding_set(files: Mapping[str, Path]) -> dict[str, list[tuple[str, np.ndarray]]]:
    emb = {lang: read_embedding_file(p) for lang, p in files.items()}
    dims = {len(v) for rows in emb.values() for _, v in rows}
    if len(dims) > 1:
        raise DimensionMismatch(f"languages disagree on dimension: {sorted(dims)}")
    empty = [lang for lang, rows in emb.items() if not rows]
    if empty:
        raise ValueError(f"empty embedding list for {empty}")
    return emb


def drift_analysis(emb: Mapping[str, list[tuple[str, np.ndarray]]], focal: str) -> dict:
    labels = [lang for lang, rows in emb.items() for _ in rows]
    matrix = np.vstack([v for rows in emb.values() for _, v in rows])
    projected = pca_project(matrix, 2)
    cents = centroids(projected, labels)
    return {
        "focal": focal,
        "distance": centroid_drift(projected, labels, focal),
        "centroids": {lang: [float(x) for x in c] for lang, c in cents.items()},
        "n_points": {lang: len(rows) for lang, rows in emb.items()},
    }
