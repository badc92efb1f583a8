"""Jacobi polynomials on [0, 1].

``P_n^{(mu,nu)}(x)`` here is the classical Jacobi polynomial evaluated at
``2x - 1``; it is orthogonal under the weight ``x**nu * (1-x)**mu`` and
``P_n(1) = (mu+1)_n / n!``.  Evaluation uses the three-term recursion

    x P_n = 1/2 [1 + (nu^2-mu^2)/(S(S+2))] P_n
            + (n+mu)(n+nu)/(S(S+1)) P_{n-1}
            + (n+1)(n+mu+nu+1)/((S+1)(S+2)) P_{n+1},     S = 2n+mu+nu.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, LinAlgError
from scipy.special import betaln, gammaln

from .errors import DegenerateIndices, EndpointDerivative, IndexOutOfRange, NumericalFailure

DEGEN_TOL = 1e-10


@dataclass(frozen=True)
class JacobiIndex:
    mu: float
    nu: float

    def __post_init__(self):
        if not (self.mu > -1 and self.nu > -1):
            raise IndexOutOfRange(f"Jacobi indices must exceed -1, got ({self.mu}, {self.nu})")


def recurrence_coefficients(n, mu, nu):
    """``(diag, lower, upper)`` of ``x P_n`` in terms of ``P_n, P_{n-1}, P_{n+1}``."""
    s = 2 * n + mu + nu
    if n == 0:
        # removable 0/0 at mu + nu = 0; use the cancelled form
        diag = 0.5 * (1 + (nu - mu) / (mu + nu + 2))
        return diag, 0.0, 1.0 / (mu + nu + 2)
    if abs(s) < DEGEN_TOL or abs(s + 1) < DEGEN_TOL:
        raise DegenerateIndices(f"2n+mu+nu vanishes at n={n}")
    diag = 0.5 * (1 + (nu * nu - mu * mu) / (s * (s + 2)))
    lower = (n + mu) * (n + nu) / (s * (s + 1))
    upper = (n + 1) * (n + mu + nu + 1) / ((s + 1) * (s + 2))
    return diag, lower, upper


def jacobi_table(nmax, mu, nu, x):
    """Rows ``P_0 .. P_nmax`` evaluated at ``x``; shape ``(nmax+1,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    prev = np.zeros_like(x)
    for n in range(nmax):
        diag, lower, upper = recurrence_coefficients(n, mu, nu)
        out[n + 1] = ((x - diag) * out[n] - lower * prev) / upper
        prev = out[n]
    return out


def jacobi_eval(n, mu, nu, x):
    if n < 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    return jacobi_table(n, mu, nu, x)[n]


def jacobi_value_at_one(n, mu):
    return np.exp(gammaln(n + mu + 1) - gammaln(n + 1) - gammaln(mu + 1))


def derivative_combination(n, mu, nu):
    """Coefficients ``(c_{n-1}, c_n, c_{n+1})`` with x(1-x) P_n' = sum c_k P_k."""
    if n == 0:
        return 0.0, 0.0, 0.0
    s = 2 * n + mu + nu
    if abs(s) < DEGEN_TOL:
        raise DegenerateIndices(f"2n+mu+nu vanishes at n={n}")
    k = n + mu + nu + 1
    return (
        k * (n + mu) * (n + nu) / (s * (s + 1)),
        k * (mu - nu) * n / (s * (s + 2)),
        -k * n * (n + 1) / ((s + 1) * (s + 2)),
    )


def _interior(x, exc):
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) | (x >= 1)):
        raise exc("x must lie strictly inside (0, 1)")
    return x


def derivative_table(nmax, mu, nu, x, table=None):
    """First derivatives of ``P_0 .. P_nmax`` from the three-term derivative identity."""
    x = _interior(x, EndpointDerivative)
    if table is None or table.shape[0] < nmax + 2:
        table = jacobi_table(nmax + 1, mu, nu, x)
    out = np.zeros((nmax + 1,) + x.shape)
    w = x * (1 - x)
    for n in range(1, nmax + 1):
        lo, mid, hi = derivative_combination(n, mu, nu)
        out[n] = (lo * table[n - 1] + mid * table[n] + hi * table[n + 1]) / w
    return out


def jacobi_deriv(n, mu, nu, x):
    x = _interior(x, EndpointDerivative)
    if n <= 0:
        return np.zeros_like(x)
    return derivative_table(n, mu, nu, x)[n]


def jacobi_second_deriv(n, mu, nu, x):
    """P_n'' by differentiating the derivative identity (does not use the Jacobi ODE)."""
    x = _interior(x, EndpointDerivative)
    if n <= 0:
        return np.zeros_like(x)
    dtable = derivative_table(n + 1, mu, nu, x)
    lo, mid, hi = derivative_combination(n, mu, nu)
    d_comb = lo * dtable[n - 1] + mid * dtable[n] + hi * dtable[n + 1]
    return (d_comb - (1 - 2 * x) * dtable[n]) / (x * (1 - x))


def jacobi_ode_residual(n, mu, nu, x, ode_mu=None, ode_nu=None):
    """Residual of x(1-x)P'' + [nu+1 - x(mu+nu+2)]P' + n(n+mu+nu+1)P.

    The polynomial uses ``(mu, nu)``; the equation uses ``(ode_mu, ode_nu)``
    when given, which lets a mismatch be detected.
    """
    x = _interior(x, EndpointDerivative)
    em = mu if ode_mu is None else ode_mu
    en = nu if ode_nu is None else ode_nu
    p = jacobi_eval(n, mu, nu, x)
    dp = jacobi_deriv(n, mu, nu, x)
    d2p = jacobi_second_deriv(n, mu, nu, x)
    return x * (1 - x) * d2p + (en + 1 - x * (em + en + 2)) * dp + n * (n + em + en + 1) * p


def gauss_jacobi(N, mu, nu):
    """Gauss rule for the weight ``x**nu (1-x)**mu`` on [0, 1] (Golub-Welsch).

    Built from the symmetrized recursion above; weights sum to B(nu+1, mu+1).
    """
    if N < 1:
        raise ValueError("N must be positive")
    JacobiIndex(mu, nu)
    diag = np.empty(N)
    off = np.empty(N - 1)
    for n in range(N):
        dn, lower, upper = recurrence_coefficients(n, mu, nu)
        diag[n] = dn
        if n < N - 1:
            _, lower_next, _ = recurrence_coefficients(n + 1, mu, nu)
            off[n] = np.sqrt(upper * lower_next)
    try:
        nodes, vecs = eigh_tridiagonal(diag, off)
    except LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    weights = np.exp(betaln(nu + 1, mu + 1)) * vecs[0] ** 2
    return nodes, weights
