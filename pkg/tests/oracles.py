"""Independent reference computations used only by the tests.

Nothing here calls into the package's numerical paths.
"""

import itertools

import numpy as np


def dft_direct(B):
    """Unitary DFT built entry by entry from the definition."""
    F = np.empty((B, B), dtype=complex)
    for k in range(B):
        for b in range(B):
            F[k, b] = np.exp(-2j * np.pi * k * b / B) / np.sqrt(B)
    return F


def gauss_jordan_inverse(G):
    """Textbook Gauss-Jordan elimination with partial pivoting."""
    n = G.shape[0]
    M = np.hstack([np.array(G, dtype=complex), np.eye(n, dtype=complex)])
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(M[col:, col])))
        M[[col, pivot]] = M[[pivot, col]]
        M[col] /= M[col, col]
        for row in range(n):
            if row != col:
                M[row] -= M[row, col] * M[col]
    return M[:, n:]


def lstsq_objective(A, r, rho):
    """min_w ||A - w r^T||_F^2 + rho ||w||^2 by stacking a regularized least-squares problem.

    ``r`` is a length-U row; each row i of A is fit independently by a scalar
    ``w_i``, solved with numpy.linalg.lstsq on the augmented system.
    """
    total = 0.0
    for a in A:
        design = np.concatenate([r, [np.sqrt(rho)]])[:, None]
        target = np.concatenate([a, [0.0]])
        w, *_ = np.linalg.lstsq(design, target, rcond=None)
        total += np.sum(np.abs(target - design @ w) ** 2)
    return total


def brute_force_comp_step(A, H, support, rho):
    """argmin over b not in support of the rank-one regularized fit; smallest index on ties."""
    best, best_val = None, np.inf
    for b in range(H.shape[0]):
        if b in support:
            continue
        val = lstsq_objective(A, H[b], rho)
        if val < best_val - 1e-12:
            best, best_val = b, val
    return best


def brute_force_eomp_step(z, H, support, rho):
    return brute_force_comp_step(z[None, :], H, support, rho)


def restricted_lmmse(H_sel, rho):
    """U x k minimizer of ||I - W H_sel||^2 + rho||W||^2 via the augmented least-squares system."""
    k, U = H_sel.shape
    design = np.vstack([H_sel.T, np.sqrt(rho) * np.eye(k)])  # (U + k) x k
    target = np.vstack([np.eye(U), np.zeros((k, U))])
    X, *_ = np.linalg.lstsq(design, target, rcond=None)
    return X.T


def best_single_beam(H, rho):
    """Exhaustive search over one-beam supports for the full objective."""
    U = H.shape[1]
    best = None
    for b in range(H.shape[0]):
        W = restricted_lmmse(H[[b]], rho)
        val = np.sum(np.abs(np.eye(U) - W @ H[[b]]) ** 2) + rho * np.sum(np.abs(W) ** 2)
        if best is None or val < best[1] - 1e-12:
            best = (b, val, W)
    return best


def best_single_entry(H, rho, u):
    """Exhaustive (beam, scalar) search for one user with a single nonzero weight."""
    U = H.shape[1]
    e = np.eye(U)[u]
    best = None
    for b in range(H.shape[0]):
        h = H[b]
        design = np.concatenate([h, [np.sqrt(rho)]])[:, None]
        target = np.concatenate([e, [0.0]])
        w, *_ = np.linalg.lstsq(design, target, rcond=None)
        val = np.sum(np.abs(target - design @ w) ** 2)
        if best is None or val < best[1] - 1e-12:
            best = (b, val, w[0])
    return best


def qam16_gray_table():
    """Gray 16-QAM written out by hand: (bits, point * sqrt(10))."""
    pam = {(0, 0): -3, (0, 1): -1, (1, 1): 1, (1, 0): 3}
    table = {}
    for bits in itertools.product((0, 1), repeat=4):
        table[bits] = complex(pam[bits[:2]], pam[bits[2:]])
    return table
