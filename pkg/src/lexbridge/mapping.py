"""Linear alignment between the KB space and the corpus space.

Two maps are supported:

* ``LsMap``: ridge least squares, ``min ||K M - C||^2 + lam ||M||^2`` over
  the bridge rows, solved in closed form through the normal equations.
* ``CcaMap``: canonical correlation analysis. Each view is centred on its
  bridge mean and whitened; the SVD of the whitened cross-covariance gives
  one projection per view.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .bridge import BridgeSet
from .vecspace import EmbeddingSpace


class SingularMapError(np.linalg.LinAlgError):
    pass


@dataclass
class LsMap:
    M: np.ndarray
    lam: float
    residual: float = float("nan")

    @property
    def d_kb(self) -> int:
        return self.M.shape[0]

    @property
    def d_corpus(self) -> int:
        return self.M.shape[1]


@dataclass
class CcaMap:
    M1: np.ndarray  # corpus side, d_C x k
    M2: np.ndarray  # KB side, d_K x k
    mean_corpus: np.ndarray
    mean_kb: np.ndarray
    correlations: np.ndarray
    power: float = 0.0

    @property
    def k(self) -> int:
        return self.M1.shape[1]

    @property
    def d_corpus(self) -> int:
        return self.M1.shape[0]

    @property
    def d_kb(self) -> int:
        return self.M2.shape[0]


SpaceMap = Union[LsMap, CcaMap]


def ls_objective(M, kb_rows, corpus_rows, lam) -> float:
    r = kb_rows @ M - corpus_rows
    return float(np.sum(r * r) + lam * np.sum(M * M))


def fit_ls(bridges: BridgeSet, lam: float = 1.0) -> LsMap:
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    X, Y = bridges.kb_rows, bridges.corpus_rows
    d = X.shape[1]
    if lam == 0 and np.linalg.matrix_rank(X) < d:
        raise SingularMapError(
            f"bridge KB matrix has rank {np.linalg.matrix_rank(X)} < {d}; "
            "the unregularized problem is singular, set lambda > 0")
    A = X.T @ X + lam * np.eye(d)
    try:
        M = np.linalg.solve(A, X.T @ Y)
    except np.linalg.LinAlgError as e:
        raise SingularMapError(f"{e}; set lambda > 0") from None
    r = X @ M - Y
    return LsMap(M, float(lam), float(np.sum(r * r)))


def _inv_sqrt(C: np.ndarray, ridge: float, name: str):
    vals, vecs = np.linalg.eigh(C + ridge * np.eye(C.shape[0]))
    tol = max(vals.max(), 0.0) * C.shape[0] * np.finfo(float).eps
    if vals.min() <= tol:
        raise SingularMapError(
            f"{name} covariance is rank deficient; use a positive regularization")
    return (vecs / np.sqrt(vals)) @ vecs.T


def fit_cca(bridges: BridgeSet, k: Optional[int] = None, reg: Optional[float] = None,
            power: float = 0.0) -> CcaMap:
    """Fit CCA on the bridge rows.

    ``reg`` is added to both auto-covariance diagonals; ``None`` uses
    ``1e-8 * trace / d`` per view. ``power`` scales projected components by
    ``correlation ** power`` at apply time (0 leaves them unweighted).
    """
    X, Y = bridges.corpus_rows, bridges.kb_rows
    n = X.shape[0]
    if n < 2:
        raise ValueError("CCA needs at least two bridge pairs")
    kmax = min(X.shape[1], Y.shape[1], n - 1)
    k = kmax if k is None else k
    if not 1 <= k <= kmax:
        raise ValueError(f"k must be in [1, {kmax}], got {k}")
    mx, my = X.mean(axis=0), Y.mean(axis=0)
    Xc, Yc = X - mx, Y - my
    Cxx = Xc.T @ Xc / (n - 1)
    Cyy = Yc.T @ Yc / (n - 1)
    Cxy = Xc.T @ Yc / (n - 1)
    rx = 1e-8 * np.trace(Cxx) / Cxx.shape[0] if reg is None else reg
    ry = 1e-8 * np.trace(Cyy) / Cyy.shape[0] if reg is None else reg
    Wx = _inv_sqrt(Cxx, rx, "corpus-side")
    Wy = _inv_sqrt(Cyy, ry, "KB-side")
    U, s, Vt = np.linalg.svd(Wx @ Cxy @ Wy)
    corr = np.clip(s[:k], 0.0, 1.0)
    return CcaMap(Wx @ U[:, :k], Wy @ Vt[:k].T, mx, my, corr, power)


def project(space_map: SpaceMap, rows: np.ndarray, side: str) -> np.ndarray:
    """Map raw row vectors from ``side`` ('kb' or 'corpus') into the shared space."""
    rows = np.asarray(rows, dtype=np.float64)
    if side not in ("kb", "corpus"):
        raise ValueError(f"side must be 'kb' or 'corpus', got {side!r}")
    if isinstance(space_map, LsMap):
        if side != "kb":
            raise ValueError("a least-squares map only projects KB-side vectors")
        if rows.shape[-1] != space_map.d_kb:
            raise ValueError(f"expected {space_map.d_kb}-d KB vectors, got {rows.shape[-1]}")
        return rows @ space_map.M
    if side == "corpus":
        M, mu = space_map.M1, space_map.mean_corpus
    else:
        M, mu = space_map.M2, space_map.mean_kb
    if rows.shape[-1] != M.shape[0]:
        raise ValueError(f"expected {M.shape[0]}-d {side} vectors, got {rows.shape[-1]}")
    out = (rows - mu) @ M
    if space_map.power:
        out = out * space_map.correlations ** space_map.power
    return out


def apply_map(space_map: SpaceMap, space: EmbeddingSpace, side: str) -> EmbeddingSpace:
    return EmbeddingSpace(space.words, project(space_map, space.matrix, side))


def _row(f, values):
    f.write(" ".join("%.9g" % v for v in values) + "\n")


def save_map(space_map: SpaceMap, path) -> None:
    """Write a map as text.

    LS: header ``LS <d_K> <d_C> <lambda>``, then ``d_K`` rows of M.
    CCA: header ``CCA <d_C> <d_K> <k>``, then ``d_C`` rows of M1, ``d_K``
    rows of M2, the corpus mean, the KB mean, the correlations and a final
    ``power <p>`` line.
    """
    with open(path, "w", encoding="utf-8") as f:
        if isinstance(space_map, LsMap):
            f.write(f"LS {space_map.d_kb} {space_map.d_corpus} {space_map.lam:.9g}\n")
            for r in space_map.M:
                _row(f, r)
        else:
            m = space_map
            f.write(f"CCA {m.d_corpus} {m.d_kb} {m.k}\n")
            for r in m.M1:
                _row(f, r)
            for r in m.M2:
                _row(f, r)
            _row(f, m.mean_corpus)
            _row(f, m.mean_kb)
            _row(f, m.correlations)
            f.write(f"power {m.power:.9g}\n")


def load_map(path) -> SpaceMap:
    with open(path, encoding="utf-8") as f:
        lines = [ln.split() for ln in f if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty map file")
    head = lines[0]
    try:
        if head[0] == "LS" and len(head) == 4:
            dk, dc, lam = int(head[1]), int(head[2]), float(head[3])
            M = np.array(lines[1:1 + dk], dtype=np.float64)
            if M.shape != (dk, dc):
                raise ValueError(f"expected a {dk}x{dc} matrix, got {M.shape}")
            return LsMap(M, lam)
        if head[0] == "CCA" and len(head) == 4:
            dc, dk, k = int(head[1]), int(head[2]), int(head[3])
            body = lines[1:]
            M1 = np.array(body[:dc], dtype=np.float64)
            M2 = np.array(body[dc:dc + dk], dtype=np.float64)
            mc = np.array(body[dc + dk], dtype=np.float64)
            mk = np.array(body[dc + dk + 1], dtype=np.float64)
            corr = np.array(body[dc + dk + 2], dtype=np.float64)
            power = float(body[dc + dk + 3][1]) if len(body) > dc + dk + 3 else 0.0
            if M1.shape != (dc, k) or M2.shape != (dk, k) or corr.shape != (k,):
                raise ValueError("matrix shapes do not match the header")
            return CcaMap(M1, M2, mc, mk, corr, power)
    except (IndexError, ValueError) as e:
        raise ValueError(f"{path}: malformed map file: {e}") from None
    raise ValueError(f"{path}: unknown map header {' '.join(head)!r}")
