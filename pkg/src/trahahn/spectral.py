"""Recurrence matrices, zeros and discrete measures of the (deformed) continuous Hahn family.

For a deformed family no orthogonality measure is claimed: only zeros are
produced.  In the classical symmetric case (rho = lam, sigma = tau) the
substitution ``zeta = lam + i z`` turns the recursion into a real symmetric
Jacobi matrix in ``z`` with zero diagonal, whose Gauss rule is returned.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.special import loggamma

from .coefficients import hahn_recurrence
from .errors import DeformedMeasureUnknown, NotSymmetrizable, NumericalFailure

MAX_ORDER = 60
SYM_TOL = 1e-12


@dataclass(frozen=True)
class RecurrenceMatrix:
    diag: np.ndarray
    sup: np.ndarray
    sub: np.ndarray
    variable: str = "zeta"

    @property
    def size(self):
        return len(self.diag)

    def dense(self):
        return np.diag(self.diag) + np.diag(self.sup, 1) + np.diag(self.sub, -1)


def recurrence_matrix(N, fam):
    """N x N matrix whose eigenvalues are the zeros of ``p~_N`` in ``zeta``.

    Row n reads ``C_n p_{n-1} + alpha_n p_n + A_n p_{n+1} = zeta p_n``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    rec = hahn_recurrence(N - 1, fam)
    return RecurrenceMatrix(rec.diag.copy(), rec.sup[:-1].copy(), rec.sub[1:].copy())


def _poly_and_derivative(rec, N, zeta):
    p_prev, p = 0.0, 1.0
    dp_prev, dp = 0.0, 0.0
    for n in range(N):
        p_next = ((zeta - rec.diag[n]) * p - rec.sub[n] * p_prev) / rec.sup[n]
        dp_next = (p + (zeta - rec.diag[n]) * dp - rec.sub[n] * dp_prev) / rec.sup[n]
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, dp


def zeros(N, fam, refine=True):
    """Zeros of ``p~_N`` in the zeta plane, sorted by real then imaginary part."""
    if N > MAX_ORDER:
        raise ValueError(f"N is capped at {MAX_ORDER}")
    mat = recurrence_matrix(N, fam)
    try:
        vals = np.linalg.eigvals(mat.dense()).astype(complex)
    except LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    if refine:
        rec = hahn_recurrence(N, fam)
        for k, z0 in enumerate(vals):
            p, dp = _poly_and_derivative(rec, N, z0)
            if dp != 0:
                step = p / dp
                if abs(step) < 1e-6 * max(1.0, abs(z0)):
                    vals[k] = z0 - step
    # pair conjugates exactly for a real matrix
    vals = np.where(np.abs(vals.imag) < 1e-13 * np.maximum(1.0, np.abs(vals)), vals.real + 0j, vals)
    return vals[np.lexsort((vals.imag, vals.real))]


def is_symmetric_family(fam, tol=SYM_TOL):
    return abs(fam.rho - fam.lam) <= tol * max(1.0, abs(fam.lam)) and abs(
        fam.sigma - fam.tau
    ) <= tol * max(1.0, abs(fam.tau))


def zline_matrix(N, fam):
    """Real symmetric Jacobi matrix in ``z`` for the classical symmetric family."""
    if fam.deform != 0:
        raise DeformedMeasureUnknown("no orthogonality measure is known for a deformed family")
    if not is_symmetric_family(fam):
        raise NotSymmetrizable("family is not of the rho = lam, sigma = tau type")
    rec = hahn_recurrence(N, fam)
    prods = -rec.sup[: N - 1] * rec.sub[1:N]
    if np.any(prods <= 0):
        raise NotSymmetrizable(f"-A_(n-1) C_n <= 0 at n={int(np.argmax(prods <= 0)) + 1}")
    return RecurrenceMatrix(np.zeros(N), np.sqrt(prods), np.sqrt(prods), variable="z")


def gauss_measure(N, fam):
    """Nodes ``z_k`` and Christoffel weights (summing to 1) of the z-line Jacobi matrix."""
    mat = zline_matrix(N, fam)
    try:
        nodes, vecs = eigh_tridiagonal(mat.diag, mat.sup)
    except LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    return nodes, vecs[0] ** 2


def orthonormal_table(mat, nmax, z):
    """Orthonormal polynomials ``q_0..q_nmax`` of a symmetric Jacobi matrix at ``z``."""
    z = np.asarray(z, dtype=float)
    out = np.zeros((nmax + 1,) + z.shape)
    out[0] = 1.0
    for n in range(nmax):
        prev = out[n - 1] * mat.sup[n - 1] if n > 0 else 0.0
        out[n + 1] = ((z - mat.diag[n]) * out[n] - prev) / mat.sup[n]
    return out


def classical_weight(z, fam):
    """Unnormalized ``|Gamma(lam + iz) Gamma(tau + iz)|^2`` of the symmetric family."""
    z = np.asarray(z, dtype=float)
    return np.exp(2 * (loggamma(fam.lam + 1j * z).real + loggamma(fam.tau + 1j * z).real))


def weight_moment_gaps(fam, N=20, kmax=6):
    """Compare moments of the Gauss measure with those of the classical weight.

    Diagnostic only: returns ``|m_k(gauss) - m_k(classical)|`` for k <= kmax.
    """
    nodes, weights = gauss_measure(N, fam)

    def moment(k):
        val, _ = integrate.quad(lambda t: t**k * classical_weight(t, fam), -np.inf, np.inf,
                                epsabs=0, epsrel=1e-12, limit=400)
        return val

    m0 = moment(0)
    return np.array([abs(np.sum(weights * nodes**k) - moment(k) / m0) for k in range(kmax + 1)])
