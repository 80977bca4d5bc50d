"""Exact and sparsity-exploiting beamspace LMMSE equalizers.

All functions take the beamspace channel ``H`` (B x U, rows are beams) and
return a :class:`SparseEqualizer`. Beam indices are zero-based. Every argmax
over beams breaks ties toward the smallest index.

Row ``b`` of ``H`` is written ``h_b`` below. Adding beam ``b`` to a support
adds ``conj(h_b) h_b^T`` to the Gram matrix ``H_S^H H_S``, which is the
rank-one update ``v v^H`` with ``v = conj(h_b)``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_channel, check_n_beams, check_rho
from .exceptions import DimensionError, NotPositiveDefiniteError, RankError, SupportExhaustedError
from .numerics import hpd_inverse, sherman_morrison_update, solve_hpd

__all__ = [
    "SparseEqualizer",
    "lmmse_objective",
    "row_objectives",
    "lmmse_full",
    "comp_select_beam",
    "comp",
    "greedy_path",
    "lc",
    "eomp_select_beam",
    "eomp",
    "le",
    "apply_equalizer",
    "build_equalizer",
    "ALGORITHMS",
]

UPDATES = ("sherman-morrison", "cholesky")


@dataclass(frozen=True)
class SparseEqualizer:
    """Equalization matrix with explicit support.

    ``kind`` is one of ``"full"`` (``coef`` is U x B, ``support`` is None),
    ``"columnwise"`` (``support`` holds K beam indices in selection order,
    ``coef`` is the dense U x K block) or ``"entrywise"`` (``support`` and
    ``coef`` are both U x K, row ``u`` listing the beams and weights of user
    ``u``).
    """

    kind: str
    n_beams: int
    coef: np.ndarray
    support: np.ndarray = None
    rho: float = None
    density: float = None
    objective_path: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        U = self.coef.shape[0]
        if self.kind == "full":
            if self.coef.shape[1] != self.n_beams or self.support is not None:
                raise DimensionError("full equalizer must be U x B without support")
            return
        if self.kind not in ("columnwise", "entrywise"):
            raise ValueError(f"unknown equalizer kind {self.kind!r}")
        support = np.asarray(self.support)
        expected = (support.shape[-1],) if self.kind == "columnwise" else (U, support.shape[-1])
        if support.shape != expected or self.coef.shape != (U, support.shape[-1]):
            raise DimensionError(f"support {support.shape} inconsistent with coef {self.coef.shape}")
        rows = support.reshape(-1, support.shape[-1])
        if np.any(rows < 0) or np.any(rows >= self.n_beams):
            raise ValueError("support index out of range")
        if np.any(np.diff(np.sort(rows, axis=1), axis=1) == 0):
            raise ValueError("support indices must be distinct")
        if not np.all(np.isfinite(self.coef)):
            raise ValueError("non-finite equalizer coefficients")

    @property
    def n_users(self):
        return self.coef.shape[0]

    @property
    def K(self):
        return self.n_beams if self.kind == "full" else self.coef.shape[1]

    def to_dense(self):
        """Scatter onto the full U x B matrix."""
        if self.kind == "full":
            return self.coef.copy()
        W = np.zeros((self.n_users, self.n_beams), dtype=np.complex128)
        if self.kind == "columnwise":
            W[:, self.support] = self.coef
        else:
            np.put_along_axis(W, self.support, self.coef, axis=1)
        return W

    def apply(self, y):
        return apply_equalizer(self, y)


def lmmse_objective(W, H, rho):
    """Regularized MSE ``||I - W H||_F^2 + rho ||W||_F^2`` of a dense U x B matrix."""
    H = np.asarray(H)
    U = H.shape[1]
    R = np.eye(U) - W @ H
    return float(np.sum(np.abs(R) ** 2) + rho * np.sum(np.abs(W) ** 2))


def row_objectives(W, H, rho):
    """Per-user terms ``||e_u - H^T w_u||^2 + rho ||w_u||^2``; they sum to the full objective."""
    H = np.asarray(H)
    U = H.shape[1]
    R = np.eye(U) - W @ H
    return np.sum(np.abs(R) ** 2, axis=1) + rho * np.sum(np.abs(W) ** 2, axis=1)


def lmmse_full(H, rho):
    """Exact beamspace LMMSE matrix ``(H^H H + rho I)^{-1} H^H``."""
    H = check_channel(H)
    rho = check_rho(rho, allow_zero=True)
    U = H.shape[1]
    if rho == 0 and np.linalg.matrix_rank(H) < U:
        raise RankError("rho = 0 requires a full column rank channel")
    G = H.conj().T @ H + rho * np.eye(U)
    try:
        W = solve_hpd(G, H.conj().T)
    except NotPositiveDefiniteError:
        raise RankError("Gram matrix is singular") from None
    return SparseEqualizer("full", H.shape[0], W, rho=rho, density=1.0)


def _masked_argmax(scores, excluded):
    scores = np.array(scores, dtype=float)
    scores[..., excluded] = -np.inf
    return int(np.argmax(scores))


def _check_support(support, B):
    support = np.asarray(support, dtype=int).reshape(-1)
    if len(np.unique(support)) >= B:
        raise SupportExhaustedError("all beams are already selected")
    return support


def _row_power(H):
    return np.sum(np.abs(H) ** 2, axis=1)


def comp_select_beam(A, H, support, rho):
    """Next COMP beam: maximize ``||A conj(h_b)||^2 / (||h_b||^2 + rho)`` over b not in support.

    This is the closed-form minimizer of
    ``min_w ||A - w h_b^T||_F^2 + rho ||w||^2`` over the candidate beams.
    """
    H = check_channel(H)
    support = _check_support(support, H.shape[0])
    numer = np.sum(np.abs(H.conj() @ np.asarray(A).T) ** 2, axis=1)
    return _masked_argmax(numer / (_row_power(H) + rho), support)


def eomp_select_beam(z, H, support, rho):
    """Next EOMP beam for one user: maximize ``|z^H h_b|^2 / (||h_b||^2 + rho)``."""
    H = check_channel(H)
    support = _check_support(support, H.shape[0])
    numer = np.abs(H @ np.conj(z)) ** 2
    return _masked_argmax(numer / (_row_power(H) + rho), support)


def _check_common(H, rho, K, update):
    H = check_channel(H)
    rho = check_rho(rho)
    K = check_n_beams(K, H.shape[0])
    if update not in UPDATES:
        raise ValueError(f"update must be one of {UPDATES}, got {update!r}")
    return H, rho, K


def _gram_inverse(H_sel, rho):
    U = H_sel.shape[-1]
    return hpd_inverse(H_sel.conj().T @ H_sel + rho * np.eye(U))


def _comp_iterates(H, rho, K, update, track_objective):
    B, U = H.shape
    eye = np.eye(U)
    G_inv = eye / rho
    support = []
    W = np.zeros((U, 0), dtype=np.complex128)
    path = [float(U)]
    for _ in range(K):
        A = eye - W @ H[support]
        b = comp_select_beam(A, H, support, rho)
        support.append(b)
        if update == "sherman-morrison":
            G_inv = sherman_morrison_update(G_inv, H[b].conj())
        else:
            G_inv = _gram_inverse(H[support], rho)
        W = G_inv @ H[support].conj().T
        if track_objective:
            path.append(lmmse_objective(W, H[support], rho))
        yield SparseEqualizer(
            "columnwise", B, W, np.array(support), rho=rho, density=len(support) / B,
            objective_path=np.array(path) if track_objective else None,
        )


def comp(H, rho, K, update="sherman-morrison", track_objective=False):
    """Columnwise orthogonal matching pursuit.

    Each of the K iterations forms the residual ``A = I - W_S H_S`` from the
    current block, picks one new beam with :func:`comp_select_beam`, and
    refits ``W_S = (H_S^H H_S + rho I)^{-1} H_S^H``. The Gram inverse starts
    at ``I / rho`` and is carried forward with Sherman-Morrison updates
    (``update="cholesky"`` recomputes it from scratch instead).

    With ``track_objective`` the result carries the regularized MSE after
    every iteration in ``objective_path`` (entry 0 is the empty support).
    """
    H, rho, K = _check_common(H, rho, K, update)
    for W in _comp_iterates(H, rho, K, update, track_objective):
        pass
    return W


def lc(H, rho, K):
    """Largest-columns approximation: keep the K strongest beams, then refit."""
    H = check_channel(H)
    rho = check_rho(rho)
    K = check_n_beams(K, H.shape[0])
    support = np.argsort(-_row_power(H), kind="stable")[:K]
    H_sel = H[support]
    W = solve_hpd(H_sel.conj().T @ H_sel + rho * np.eye(H.shape[1]), H_sel.conj().T)
    return SparseEqualizer("columnwise", H.shape[0], W, support, rho=rho, density=K / H.shape[0])


def _entrywise_coef(H_sel, G_inv):
    # per user u: conj(H_u @ G_inv_u[:, u]); H_sel is (U, k, U), G_inv is (U, U, U)
    U = G_inv.shape[0]
    cols = G_inv[np.arange(U), :, np.arange(U)]
    return np.einsum("ukj,uj->uk", H_sel, cols).conj()


def _eomp_iterates(H, rho, K, update, track_objective):
    B, U = H.shape
    users = np.arange(U)
    eye = np.eye(U)
    denom = _row_power(H) + rho
    G_inv = np.broadcast_to(eye / rho, (U, U, U)).astype(np.complex128)
    support = np.empty((U, K), dtype=int)
    coef = np.zeros((U, 0), dtype=np.complex128)
    path = np.ones((U, 1))
    for k in range(K):
        z = eye - np.einsum("ukj,uk->uj", H[support[:, :k]], coef)
        scores = np.abs(z.conj() @ H.T) ** 2 / denom
        if k:
            np.put_along_axis(scores, support[:, :k], -np.inf, axis=1)
        support[:, k] = np.argmax(scores, axis=1)
        if update == "sherman-morrison":
            G_inv = sherman_morrison_update(G_inv, H[support[:, k]].conj())
        else:
            G_inv = np.stack([_gram_inverse(H[support[u, : k + 1]], rho) for u in users])
        H_sel = H[support[:, : k + 1]]
        coef = _entrywise_coef(H_sel, G_inv)
        if track_objective:
            resid = eye - np.einsum("ukj,uk->uj", H_sel, coef)
            value = np.sum(np.abs(resid) ** 2, axis=1) + rho * np.sum(np.abs(coef) ** 2, axis=1)
            path = np.column_stack([path, value])
        yield SparseEqualizer(
            "entrywise", B, coef, support[:, : k + 1].copy(), rho=rho, density=(k + 1) / B,
            objective_path=path if track_objective else None,
        )


def eomp(H, rho, K, update="sherman-morrison", track_objective=False):
    """Entrywise orthogonal matching pursuit.

    The U per-user problems are independent; they are advanced together,
    one beam per user per iteration, with a separate Gram inverse per user.
    User ``u`` starts from residual ``z = e_u``, picks a beam with the
    :func:`eomp_select_beam` score, refits its weight vector on the enlarged
    support, and recomputes ``z = e_u - H_S^T w_u``.

    ``objective_path`` (with ``track_objective``) is U x (K + 1): the per-user
    regularized MSE after each iteration.
    """
    H, rho, K = _check_common(H, rho, K, update)
    for W in _eomp_iterates(H, rho, K, update, track_objective):
        pass
    return W


def greedy_path(algorithm, H, rho, Ks, update="sherman-morrison"):
    """COMP or EOMP equalizers for several support sizes from one greedy run.

    The greedy iterates for a smaller K are a prefix of those for a larger
    K, so ``greedy_path("EOMP", H, rho, [8, 32])[8]`` equals ``eomp(H, rho, 8)``.
    """
    iterates = {"COMP": _comp_iterates, "EOMP": _eomp_iterates}.get(algorithm)
    if iterates is None:
        raise ValueError(f"greedy_path supports COMP and EOMP, got {algorithm!r}")
    Ks = sorted(set(int(K) for K in Ks))
    H, rho, K_max = _check_common(H, rho, Ks[-1], update)
    wanted = set(Ks)
    return {W.K: W for W in iterates(H, rho, K_max, update, False) if W.K in wanted}


def le(H, rho, K):
    """Largest-entries approximation: per user, top-K beams of the EOMP score at ``z = e_u``."""
    H = check_channel(H)
    rho = check_rho(rho)
    B, U = H.shape
    K = check_n_beams(K, B)
    scores = (np.abs(H) ** 2 / (_row_power(H) + rho)[:, None]).T
    support = np.argsort(-scores, axis=1, kind="stable")[:, :K]
    H_sel = H[support]
    G_inv = np.stack([_gram_inverse(H_sel[u], rho) for u in range(U)])
    coef = _entrywise_coef(H_sel, G_inv)
    return SparseEqualizer("entrywise", B, coef, support, rho=rho, density=K / B)


def apply_equalizer(W, y):
    """Estimate symbols from beamspace receive vector(s) ``y`` (length B, or B x T).

    Sparse kinds touch only the selected beams, i.e. U*K complex products per
    received vector.
    """
    y = np.asarray(y)
    if y.shape[0] != W.n_beams or y.ndim not in (1, 2):
        raise DimensionError(f"expected {W.n_beams} beams along axis 0, got shape {y.shape}")
    if W.kind == "full":
        return W.coef @ y
    if W.kind == "columnwise":
        return W.coef @ y[W.support]
    if y.ndim == 1:
        return np.sum(W.coef * y[W.support], axis=1)
    return np.einsum("uk,ukt->ut", W.coef, y[W.support])


ALGORITHMS = ("LMMSE", "COMP", "LC", "EOMP", "LE")


def build_equalizer(algorithm, H, rho, K=None, **kwargs):
    """Dispatch by algorithm tag; ``K`` is ignored for ``"LMMSE"``."""
    if algorithm == "LMMSE":
        return lmmse_full(H, rho)
    funcs = {"COMP": comp, "LC": lc, "EOMP": eomp, "LE": le}
    if algorithm not in funcs:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    return funcs[algorithm](H, rho, K, **kwargs)
