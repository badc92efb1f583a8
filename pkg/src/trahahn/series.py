"""Basis functions and the truncated series solution.

    phi_n(x) = g_n x^e0 (1-x)^e1 (r-x)^er exp(-delta x) P_n^{(mu,nu)}(x),
    g_n = (2n+mu+nu+1) Gamma(n+mu+nu+1) / Gamma(n+nu+1),

and ``y_N(x) = omega * sum_{n<=N} f_n phi_n(x)`` with ``f_n`` the deformed
continuous Hahn values at the fixed ``zeta`` of the equation.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import poch

from .coefficients import deformed_hahn_sequence
from .errors import EndpointEvaluation
from .jacobi import derivative_table, jacobi_table
from .parameters import Branch, basis_params, hahn_family

DEFAULT_MARGIN = 1e-3


def g_norm(n, mu, nu):
    """Normalization ``g_n`` for integer ``n >= 0`` (scalar or array).

    The gamma ratio grows like ``n**mu``; it is built as its n = 0 value times
    the product of ``(k+mu+nu+1)/(k+nu+1)``, which never forms a gamma function
    of large argument and keeps the relative error near ``n * eps``.
    """
    n = np.asarray(n)
    top = int(np.max(n)) if n.size else 0
    k = np.arange(top)
    ratio = poch(nu + 1, mu) * np.concatenate(([1.0], np.cumprod((k + mu + nu + 1) / (k + nu + 1))))
    return (2 * n + mu + nu + 1) * ratio[n]


def _check_interior(x, margin):
    x = np.asarray(x, dtype=float)
    if np.any((x < margin) | (x > 1 - margin)):
        raise EndpointEvaluation(f"x must lie in [{margin}, {1 - margin}]")
    return x


def basis_table(nmax, x, basis, margin=DEFAULT_MARGIN):
    """``phi_0..phi_nmax`` and their first two derivatives, shape ``(3, nmax+1, len(x))``.

    Derivatives are analytic: product rule on the prefactor, the derivative
    identity for P_n', and the Jacobi ODE for P_n''.
    """
    x = np.atleast_1d(_check_interior(x, margin))
    mu, nu = basis.mu, basis.nu
    e0, e1, er, delta, r = basis.e0, basis.e1, basis.er, basis.delta, basis.r
    P = jacobi_table(nmax + 1, mu, nu, x)
    dP = derivative_table(nmax, mu, nu, x, table=P)
    n = np.arange(nmax + 1)[:, None]
    d2P = -((nu + 1 - x * (mu + nu + 2)) * dP + n * (n + mu + nu + 1) * P[: nmax + 1]) / (x * (1 - x))

    w = x**e0 * (1 - x) ** e1 * (r - x) ** er * np.exp(-delta * x)
    ell = e0 / x - e1 / (1 - x) - er / (r - x) - delta
    dell = -e0 / x**2 - e1 / (1 - x) ** 2 - er / (r - x) ** 2
    g = g_norm(np.arange(nmax + 1), mu, nu)[:, None]

    out = np.empty((3, nmax + 1, x.size))
    out[0] = g * w * P[: nmax + 1]
    out[1] = g * w * (ell * P[: nmax + 1] + dP)
    out[2] = g * w * ((ell * ell + dell) * P[: nmax + 1] + 2 * ell * dP + d2P)
    return out


def basis_eval(n, x, basis, order=0, margin=DEFAULT_MARGIN):
    scalar = np.ndim(x) == 0
    if n < 0:
        val = np.zeros(np.atleast_1d(x).shape)
    else:
        val = basis_table(n, x, basis, margin)[order, n]
    return float(val[0]) if scalar else val


@dataclass(frozen=True)
class SeriesSolution:
    """Truncated series; ``coeffs`` carries ``N + 2`` values (one past the cut)."""

    params: object
    basis: object
    fam: object
    coeffs: np.ndarray
    N: int
    omega_factor: float = 1.0
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        if len(self.coeffs) < self.N + 2:
            raise ValueError("series needs N + 2 coefficients")
        if self.fam.branch is not self.basis.branch:
            raise ValueError("coefficients and basis come from different branches")


def build_series(p, branch=Branch.TOP, N=20, lambda_choice=None, root_sign_mu=1, root_sign_nu=1,
                 coeffs=None, omega_factor=1.0, margin=DEFAULT_MARGIN):
    basis = basis_params(p, branch, root_sign_mu, root_sign_nu)
    fam = hahn_family(p, basis, lambda_choice)
    if coeffs is None:
        coeffs = deformed_hahn_sequence(N + 1, fam).values
    return SeriesSolution(p, basis, fam, np.asarray(coeffs, dtype=float), N, omega_factor, margin)


def series_eval(sol, x, order=0):
    """Value (or derivative of ``order`` <= 2) of the truncated series at ``x``.

    Terms are accumulated with ``math.fsum`` since consecutive terms
    typically alternate in sign.
    """
    scalar = np.ndim(x) == 0
    table = basis_table(sol.N, x, sol.basis, sol.margin)[order]
    terms = sol.coeffs[: sol.N + 1, None] * table
    out = sol.omega_factor * np.array([math.fsum(col) for col in terms.T])
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class DecayReport:
    term_max: np.ndarray
    ratios: np.ndarray

    @property
    def decaying(self):
        return bool(len(self.ratios) == 0 or np.all(self.ratios[len(self.ratios) // 2:] < 1))

    @property
    def last_ratio(self):
        return float(self.ratios[-1]) if len(self.ratios) else float("nan")


def coefficient_decay_report(sol, lo=0.1, hi=0.9, count=41):
    """Largest ``|f_n phi_n|`` on a grid for each n and successive ratios.

    Flags non-decay; no convergence claim is made.
    """
    x = np.linspace(lo, hi, count)
    table = basis_table(sol.N, x, sol.basis, sol.margin)[0]
    term_max = np.max(np.abs(sol.coeffs[: sol.N + 1, None] * table), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(term_max[:-1] > 0, term_max[1:] / term_max[:-1], 0.0)
    return DecayReport(term_max, ratios)
