"""Numerical certification of the operator identities behind the series solution.

Writing the canonical equation as ``J y = 0``, the basis satisfies

    J phi_n = eta(x) [Dh_n phi_n - Sh_n phi_{n-1} + Th_n phi_{n+1}],
    eta(x) = -+ d (r - x),

and telescoping this over ``n <= N`` with the coefficient recursion leaves

    J y_N = eta(x) [Th_N f_N phi_{N+1} + Sh_{N+1} f_{N+1} phi_N].
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .coefficients import classical_sequence, deformed_hahn_sequence, hahn_B
from .errors import DegenerateIndices, NearSingularPoint, StiffnessFailure
from .parameters import hahn_family
from .series import DEFAULT_MARGIN, basis_table, series_eval


def chebyshev_grid(lo, hi, count=50):
    """Chebyshev points of the first kind mapped to ``[lo, hi]``, ascending."""
    k = np.arange(count)
    t = -np.cos((2 * k + 1) * np.pi / (2 * count))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t


def _check_regular(x, p, margin):
    x = np.asarray(x, dtype=float)
    near = (np.abs(x) < margin) | (np.abs(1 - x) < margin) | (np.abs(p.r - x) < margin)
    if np.any(near):
        raise NearSingularPoint(f"x within {margin} of a singular point")
    return x


def operator_coefficients(p):
    """Return ``coef(x) -> (c2, c1, c0)`` with ``J y = c2 y'' + c1 y' + c0 y``."""

    def coef(x):
        q = x * (1 - x) * (p.r - x)
        c1 = q * (p.a / x - p.b / (1 - x) - p.c / (p.r - x) + p.d)
        c0 = p.A / x - p.B / (1 - x) - p.C / (p.r - x) + x * p.D - p.E
        return q, c1, c0

    return coef


def apply_operator(y, y1, y2, x, p, margin=DEFAULT_MARGIN):
    x = _check_regular(x, p, margin)
    c2, c1, c0 = operator_coefficients(p)(x)
    return c2 * y2 + c1 * y1 + c0 * y


def eta(x, p, basis):
    return -basis.branch.sign * p.d * (p.r - np.asarray(x, dtype=float))


def tridiagonal_coefficients(n, p, basis):
    """``(Dh_n, Sh_n, Th_n)`` of the operator action on ``phi_n``.

    ``Sh_0`` is 0 because ``phi_{-1}`` does not exist.
    """
    mu, nu, chi, s = basis.mu, basis.nu, basis.chi, basis.branch.sign
    S = 2 * n + mu + nu
    if abs(S * (S + 2)) < 1e-10:
        raise DegenerateIndices(f"2n+mu+nu vanishes at n={n}")
    Dh = (
        s * hahn_B(n, mu, nu, chi, p.D) / p.d
        - ((nu + 1) / 2 - s * chi)
        - s * (p.b + p.r * p.c) / 2
        + (nu - mu) * n * (n + mu + nu + 1) / (S * (S + 2))
        + 0.5 * (1 + (nu * nu - mu * mu) / (S * (S + 2))) * ((mu + nu) / 2 + 1 - s * chi)
    )
    Sh = 0.0 if n == 0 else (n + mu) * (n + mu + nu) / (S * (S - 1)) * (n + (mu + nu) / 2 + s * chi)
    Th = (n + 1) * (n + nu + 1) / ((S + 3) * (S + 2)) * (n + (mu + nu) / 2 + 1 - s * chi)
    return Dh, Sh, Th


def _rel(lhs, rhs):
    return np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))


def tridiagonal_identity_error(n, p, basis, grid, margin=DEFAULT_MARGIN):
    """Pointwise ``|J phi_n - eta [..]| / max(1, |eta [..]|)`` on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    tab = basis_table(n + 1, grid, basis, margin)
    lhs = apply_operator(tab[0, n], tab[1, n], tab[2, n], grid, p, margin)
    Dh, Sh, Th = tridiagonal_coefficients(n, p, basis)
    prev = tab[0, n - 1] if n > 0 else 0.0
    rhs = eta(grid, p, basis) * (Dh * tab[0, n] - Sh * prev + Th * tab[0, n + 1])
    return _rel(lhs, rhs)


def tridiagonal_identity_check(n, p, basis, grid, margin=DEFAULT_MARGIN):
    return float(np.max(tridiagonal_identity_error(n, p, basis, grid, margin)))


def truncation_boundary_term(sol, x):
    N, f = sol.N, sol.coeffs
    tab = basis_table(N + 1, x, sol.basis, sol.margin)[0]
    _, _, ThN = tridiagonal_coefficients(N, sol.params, sol.basis)
    _, ShN1, _ = tridiagonal_coefficients(N + 1, sol.params, sol.basis)
    return sol.omega_factor * eta(x, sol.params, sol.basis) * (
        ThN * f[N] * tab[N + 1] + ShN1 * f[N + 1] * tab[N]
    )


def truncation_residual_check(sol, grid):
    grid = np.asarray(grid, dtype=float)
    y, y1, y2 = (series_eval(sol, grid, k) for k in range(3))
    lhs = apply_operator(y, y1, y2, grid, sol.params, sol.margin)
    rhs = truncation_boundary_term(sol, grid)
    return float(np.max(_rel(lhs, rhs)))


def integrate_oracle(coef, x0, y0, y0p, x_target, tol=1e-12, rhs=None):
    """Solve ``c2 y'' + c1 y' + c0 y = rhs(x)`` from ``x0`` with an adaptive 8(5,3) Runge-Kutta.

    ``coef(x)`` returns ``(c2, c1, c0)``.  ``x_target`` may be a scalar or an
    array on either side of ``x0``; returns ``(y, y')`` at those points.
    """
    if tol < 1e-13:
        raise ValueError("tol below 1e-13 is not attainable in double precision")
    targets = np.atleast_1d(np.asarray(x_target, dtype=float))

    def system(x, state):
        c2, c1, c0 = coef(x)
        forcing = 0.0 if rhs is None else rhs(x)
        return [state[1], (forcing - c1 * state[1] - c0 * state[0]) / c2]

    y = np.empty_like(targets)
    yp = np.empty_like(targets)
    for side in (targets < x0, targets >= x0):
        pts = targets[side]
        if pts.size == 0:
            continue
        end = pts.min() if pts[0] < x0 else pts.max()
        order = np.argsort(pts) if end > x0 else np.argsort(-pts)
        if end == x0:
            y[side], yp[side] = y0, y0p
            continue
        sol = solve_ivp(system, (x0, end), [y0, y0p], method="DOP853", rtol=tol,
                        atol=tol * max(1.0, abs(y0), abs(y0p)) * 1e-3, t_eval=pts[order])
        if sol.status != 0:
            raise StiffnessFailure(sol.message)
        vals = np.empty((2, pts.size))
        vals[:, order] = sol.y
        y[side], yp[side] = vals
    if np.ndim(x_target) == 0:
        return float(y[0]), float(yp[0])
    return y, yp


def series_integrator_error(sol, lo=0.3, hi=0.7, x0=0.5, count=41, tol=1e-12):
    """Norm-wise relative gap between the series and the integrated inhomogeneous equation."""
    y0 = series_eval(sol, x0)
    y0p = series_eval(sol, x0, 1)
    grid = np.linspace(lo, hi, count)
    forcing = lambda x: float(truncation_boundary_term(sol, np.array([x]))[0])
    y_int, _ = integrate_oracle(operator_coefficients(sol.params), x0, y0, y0p, grid, tol, forcing)
    y_ser = series_eval(sol, grid)
    return float(np.max(np.abs(y_int - y_ser)) / np.max(np.abs(y_ser)))


@dataclass(frozen=True)
class LimitReport:
    d_values: np.ndarray
    errors: np.ndarray
    slope: float
    per_degree: list = field(default_factory=list)


def _limit_error(fam, n_max):
    deformed = deformed_hahn_sequence(n_max, fam).values
    classical = classical_sequence(n_max, fam)
    per_n = np.abs(deformed - classical) / np.maximum(1.0, np.abs(classical))
    return float(np.max(per_n)), per_n


def limit_check(p, basis, n_max=10, d_values=(1e3, 1e4, 1e5, 1e6), lambda_choice=None):
    """Error of the deformed family against the 3F2 oracle as ``d`` grows.

    ``d = inf`` is accepted and means zero deformation.  The slope is fit
    over the finite ``d`` values only.
    """
    d_values = np.asarray(d_values, dtype=float)
    base = hahn_family(p, basis, lambda_choice)
    errors, per_degree = [], []
    for dv in d_values:
        err, per_n = _limit_error(base.with_deform(0.0 if np.isinf(dv) else 1.0 / dv), n_max)
        errors.append(err)
        per_degree.append(per_n)
    errors = np.array(errors)
    finite = np.isfinite(d_values) & (errors > 0)
    if finite.sum() >= 2:
        slope = float(np.polyfit(np.log10(d_values[finite]), np.log10(errors[finite]), 1)[0])
    else:
        slope = float("nan")
    return LimitReport(d_values, errors, slope, per_degree)
