"""Dense complex linear algebra: operator norms, Hermitian spectra and the
block decomposition of a finite-dimensional matrix *-algebra.

Matrices are numpy complex arrays.  All tolerances and the probe seed come
from :mod:`groupoid_lab.config`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import NonConvergence, NotHermitian, NotStarClosed

__all__ = [
    "as_matrix",
    "operator_norm",
    "hermitian_spectrum",
    "jacobi_eigh",
    "range_basis",
    "commutant_basis",
    "BlockProfile",
    "block_decompose",
    "is_unitary",
    "is_projection",
    "polar_unitary",
]


def as_matrix(M) -> np.ndarray:
    A = np.array(M, dtype=complex)
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return A


def _power(A: np.ndarray, v: np.ndarray, tol: float, max_iter: int) -> float:
    """Largest eigenvalue of the PSD matrix A seen from start vector v."""
    v = v / np.linalg.norm(v)
    lam = None
    for _ in range(max_iter):
        w = A @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        rq = float(np.real(np.vdot(v, w)))
        if lam is not None and abs(rq - lam) <= tol * abs(rq):
            return rq
        lam = rq
        v = w / nw
    resid = float(np.linalg.norm(A @ v - lam * v))
    if resid <= tol * max(abs(lam), 1e-300):
        return lam
    raise NonConvergence(f"power iteration hit {max_iter} iterations (residual {resid:.3g})")


def operator_norm(M) -> float:
    """Largest singular value by power iteration on M*M.

    The first run starts from the normalized all-ones vector.  Since that
    start can be orthogonal to the top singular vector (e.g. [[1,-1],[-1,1]]),
    a second run from a seeded random vector is taken as well and the larger
    estimate kept.
    """
    A = as_matrix(M)
    if A.size == 0 or not np.any(A):
        return 0.0
    tol = config.get()
    B = A.conj().T @ A
    n = B.shape[0]
    best = _power(B, np.ones(n, dtype=complex), tol.power_rel_tol, tol.power_max_iter)
    rng = np.random.default_rng(tol.probe_seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    best = max(best, _power(B, v, tol.power_rel_tol, tol.power_max_iter))
    return float(np.sqrt(max(best, 0.0)))


def _check_hermitian(A: np.ndarray) -> None:
    tol = config.get().hermitian_tol
    if A.shape[0] != A.shape[1]:
        raise NotHermitian("matrix is not square")
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 1.0)
    dev = float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0
    if dev > tol * scale:
        raise NotHermitian(f"deviation from Hermitian {dev:.3g}")


def jacobi_eigh(M, check: bool = True):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix by cyclic
    complex Jacobi rotations."""
    A = as_matrix(M).copy()
    if check:
        _check_hermitian(A)
    A = (A + A.conj().T) / 2
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    tol = config.get().jacobi_off_tol
    scale = max(1.0, float(np.linalg.norm(A)))
    for _ in range(100):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                app, aqq = A[p, p].real, A[q, q].real
                tau = (aqq - app) / (2 * mag)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1 + tau * tau))
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                Q = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                A[:, idx] = A[:, idx] @ Q
                A[idx, :] = Q.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p], A[q, q] = A[p, p].real, A[q, q].real
                V[:, idx] = V[:, idx] @ Q
    else:
        raise NonConvergence("Jacobi sweeps did not converge")
    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def hermitian_spectrum(M) -> list[float]:
    w, _ = jacobi_eigh(M)
    return [float(x) for x in w]


def range_basis(M, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column space by modified Gram-Schmidt, in
    column order."""
    A = as_matrix(M)
    tol = config.get().rank_tol if tol is None else tol
    n = A.shape[0]
    cols = []
    for j in range(A.shape[1]):
        v = A[:, j].copy()
        for _ in range(2):
            for u in cols:
                v = v - np.vdot(u, v) * u
        nv = np.linalg.norm(v)
        if nv > tol:
            cols.append(v / nv)
    if not cols:
        return np.zeros((n, 0), dtype=complex)
    return np.column_stack(cols)


def commutant_basis(mats) -> list[np.ndarray]:
    """Basis of {X : XA = AX for all A}, via the kernel of Σ K*K with
    K = I⊗A - Aᵀ⊗I (column-stacked vec)."""
    mats = [as_matrix(A) for A in mats]
    k = mats[0].shape[0]
    I = np.eye(k)
    S = np.zeros((k * k, k * k), dtype=complex)
    for A in mats:
        K = np.kron(I, A) - np.kron(A.T, I)
        S += K.conj().T @ K
    w, U = np.linalg.eigh(S)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    tol = config.get().rank_tol
    null = U[:, w < tol * scale]
    return [null[:, j].reshape((k, k), order="F") for j in range(null.shape[1])]


@dataclass
class BlockProfile:
    """Irreducible types of a represented *-algebra.

    ``sizes`` lists one dimension per type (multiplicities removed);
    ``multiplicities`` gives how often each type occurs; ``components`` holds
    (type index, isometry onto the component).
    """

    sizes: tuple
    multiplicities: tuple
    components: list = field(default_factory=list, repr=False)

    def blocks(self) -> list[int]:
        return sorted(self.sizes)


def _span_residual(mats, target) -> float:
    B = np.column_stack([A.reshape(-1) for A in mats])
    t = target.reshape(-1)
    coef, *_ = np.linalg.lstsq(B, t, rcond=None)
    return float(np.linalg.norm(B @ coef - t))


def _split(mats, V, rng, out, depth=0):
    loc = [V.conj().T @ A @ V for A in mats]
    comm = commutant_basis(loc)
    if len(comm) <= 1:
        out.append(V)
        return
    k = V.shape[1]
    tol = config.get().rank_tol
    for _ in range(8):
        C = np.zeros((k, k), dtype=complex)
        for B in comm:
            a, b = rng.standard_normal(2)
            C += a * (B + B.conj().T) + b * 1j * (B - B.conj().T)
        w, U = jacobi_eigh(C, check=False)
        spread = w[-1] - w[0]
        if spread > tol * max(1.0, float(np.max(np.abs(w)))):
            break
    else:
        raise NonConvergence("commutant probe stayed scalar")
    # eigenvalues of a generic probe are O(1) apart; repeated ones agree to rounding
    gap = 1e-6 * max(1.0, float(np.max(np.abs(w))))
    start = 0
    for i in range(1, k + 1):
        if i == k or w[i] - w[i - 1] > gap:
            _split(mats, V @ U[:, start:i], rng, out, depth + 1)
            start = i


def block_decompose(basis, seed: int | None = None) -> BlockProfile:
    """Simultaneous block diagonalization of a *-closed family of matrices.

    A seeded random Hermitian element of the commutant splits the space into
    invariant eigenspaces; this is repeated until every piece has a scalar
    commutant, i.e. is irreducible.  Pieces are grouped into types by their
    character vectors (traces of all basis elements).
    """
    mats = [as_matrix(A) for A in basis]
    if not mats:
        raise ValueError("empty basis")
    n = mats[0].shape[0]
    scale = max(1.0, max(float(np.max(np.abs(A))) for A in mats))
    tol = config.get().rank_tol
    for i, A in enumerate(mats):
        if _span_residual(mats, A.conj().T) > tol * scale * n:
            raise NotStarClosed("adjoint of a basis element leaves the span", (i,))
    rng = np.random.default_rng(config.get().probe_seed if seed is None else seed)
    pieces: list[np.ndarray] = []
    # the non-degenerate part: vectors killed by every element form a zero block
    joint = sum(A.conj().T @ A for A in mats)
    w, U = np.linalg.eigh(joint)
    live = U[:, w > tol * max(1.0, float(np.max(np.abs(w))))]
    if live.shape[1]:
        _split(mats, range_basis(live), rng, pieces)
    chars, sizes, mult, comps = [], [], [], []
    for V in pieces:
        chi = np.array([np.trace(V.conj().T @ A @ V) for A in mats])
        d = V.shape[1]
        for t, (c0, d0) in enumerate(zip(chars, sizes)):
            if d0 == d and np.max(np.abs(c0 - chi)) <= 1e-6 * scale * n:
                mult[t] += 1
                comps.append((t, V))
                break
        else:
            chars.append(chi)
            sizes.append(d)
            mult.append(1)
            comps.append((len(sizes) - 1, V))
    return BlockProfile(tuple(sizes), tuple(mult), comps)


def is_unitary(U, tol: float | None = None) -> bool:
    U = as_matrix(U)
    tol = config.get().unitary_tol if tol is None else tol
    return U.shape[0] == U.shape[1] and np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=tol, rtol=0)


def is_projection(P, tol: float | None = None) -> bool:
    P = as_matrix(P)
    tol = config.get().projection_tol if tol is None else tol
    return bool(np.max(np.abs(P @ P - P), initial=0.0) <= tol
                and np.max(np.abs(P - P.conj().T), initial=0.0) <= tol)


def polar_unitary(M) -> np.ndarray:
    """Unitary factor of the polar decomposition."""
    U, _, Vh = np.linalg.svd(as_matrix(M))
    return U @ Vh
