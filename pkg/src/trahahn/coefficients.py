"""Expansion coefficients of the series solution.

Three routes produce the same numbers:

* the recursion obtained directly from the operator action on the basis
  (``tra_coefficients``), ``L f_n = D_n f_n + T_n f_{n+1} + S_n f_{n-1}``;
* the deformed continuous Hahn recursion
  ``zeta p_n = A_n p_{n+1} + C_n p_{n-1} - (A_n + C_n -+ B_n/d) p_n``;
* for zero deformation, the terminating 3F2 of the classical family.

The upper sign everywhere belongs to ``Branch.TOP``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BreakdownAtN, DegenerateIndices, PoleInSum

DEGEN_TOL = 1e-10


@dataclass(frozen=True)
class TridiagonalRecurrence:
    """``lhs_shift * f_n = diag[n] f_n + sup[n] f_{n+1} + sub[n] f_{n-1}``."""

    kind: str
    diag: np.ndarray
    sub: np.ndarray
    sup: np.ndarray
    lhs_shift: float

    def __len__(self):
        return len(self.diag)

    def offdiag_products(self):
        """``sup[n-1] * sub[n]`` for n >= 1, the products whose sign fixes orthogonality."""
        return self.sup[:-1] * self.sub[1:]


@dataclass(frozen=True)
class CoefficientSequence:
    values: np.ndarray
    family: object = None

    def __post_init__(self):
        if self.values[0] != 1:
            raise ValueError("coefficient sequences are normalized to f_0 = 1")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]


def _guard(value, n):
    if abs(value) < DEGEN_TOL:
        raise DegenerateIndices(f"vanishing denominator at n={n}")


def tra_coefficients(n, p, basis):
    """``(L, D_n, T_n, S_n)`` read off the operator recursion."""
    mu, nu, chi, s = basis.mu, basis.nu, basis.chi, basis.branch.sign
    S = 2 * n + mu + nu
    _guard(S, n)
    _guard(S + 2, n)
    K = (mu + nu) / 2 + 1 - s * chi
    L = (mu + 1 + s * (p.b + p.r * p.c)) / 2
    Dn = (
        s * hahn_B(n, mu, nu, chi, p.D) / p.d
        + mu + 1
        + (nu - mu) * n * (n + mu + nu + 1) / (S * (S + 2))
        - 0.5 * (1 + (mu * mu - nu * nu) / (S * (S + 2))) * K
    )
    Tn = -(n + mu + 1) * (n + mu + nu + 1) / ((S + 1) * (S + 2)) * (n + (mu + nu) / 2 + 1 + s * chi)
    if n == 0:
        Sn = 0.0
    else:
        Sn = n * (n + nu) / (S * (S + 1)) * (n + (mu + nu) / 2 - s * chi)
    return L, Dn, Tn, Sn


def tra_recurrence(N, p, basis):
    rows = [tra_coefficients(n, p, basis) for n in range(N + 1)]
    L = rows[0][0] if rows else (basis.mu + 1 + basis.branch.sign * (p.b + p.r * p.c)) / 2
    return TridiagonalRecurrence(
        kind="tra",
        diag=np.array([row[1] for row in rows]),
        sub=np.array([row[3] for row in rows]),
        sup=np.array([row[2] for row in rows]),
        lhs_shift=L,
    )


def hahn_B(n, mu, nu, chi, D):
    """Deformation numerator ``(n + (mu+nu+1)/2)^2 - (chi - 1/2)^2 + D``."""
    return (n + (mu + nu + 1) / 2) ** 2 - (chi - 0.5) ** 2 + D


def hahn_AC(n, fam):
    """Classical continuous Hahn ``(A_n, C_n)``, computed from the pairwise sums only."""
    lr, ls, tr, ts, tot = fam.pair_sums()
    den_a = (2 * n + tot - 1) * (2 * n + tot)
    _guard(den_a, n)
    An = -(n + tot - 1) * (n + lr) * (n + ls) / den_a
    if n == 0:
        return An, 0.0
    den_c = (2 * n + tot - 2) * (2 * n + tot - 1)
    _guard(den_c, n)
    Cn = n * (n + tr - 1) * (n + ts - 1) / den_c
    return An, Cn


def hahn_diag(n, fam):
    An, Cn = hahn_AC(n, fam)
    Bn = hahn_B(n, fam.mu, fam.nu, fam.chi, fam.D)
    return -(An + Cn) + fam.branch.sign * fam.deform * Bn


def hahn_recurrence(N, fam):
    diag, sub, sup = [], [], []
    for n in range(N + 1):
        An, Cn = hahn_AC(n, fam)
        Bn = hahn_B(n, fam.mu, fam.nu, fam.chi, fam.D)
        diag.append(-(An + Cn) + fam.branch.sign * fam.deform * Bn)
        sup.append(An)
        sub.append(Cn)
    return TridiagonalRecurrence(
        kind="deformed_hahn",
        diag=np.array(diag),
        sub=np.array(sub),
        sup=np.array(sup),
        lhs_shift=fam.zeta,
    )


def forward(rec, N, zeta=None):
    """Run ``rec`` forward from ``f_0 = 1, f_{-1} = 0``; returns ``f_0 .. f_N``.

    ``zeta`` overrides ``rec.lhs_shift`` and may be complex.
    """
    shift = rec.lhs_shift if zeta is None else zeta
    dtype = complex if np.iscomplexobj(shift) else float
    out = np.zeros(N + 1, dtype=dtype)
    out[0] = 1.0
    prev = 0.0
    for n in range(N):
        if rec.sup[n] == 0:
            raise BreakdownAtN(n)
        out[n + 1] = ((shift - rec.diag[n]) * out[n] - rec.sub[n] * prev) / rec.sup[n]
        prev = out[n]
    return out


def deformed_hahn_sequence(N, fam, zeta_eval=None):
    """Values ``p~_0 .. p~_N`` of the deformed family at ``zeta_eval`` (default ``fam.zeta``)."""
    rec = hahn_recurrence(max(N, 0), fam)
    values = forward(rec, N, fam.zeta if zeta_eval is None else zeta_eval)
    return CoefficientSequence(values, fam)


def continuous_hahn_3f2(n, lam, tau, rho, sigma, zeta):
    """Terminating ``3F2(-n, n+lam+tau+rho+sigma-1, zeta; lam+rho, lam+sigma; 1)``."""
    upper = n + lam + tau + rho + sigma - 1
    lo1, lo2 = lam + rho, lam + sigma
    term = 1.0
    total = 1.0
    for k in range(n):
        den = (lo1 + k) * (lo2 + k)
        if den == 0:
            raise PoleInSum(f"lower parameter hits -{k} inside the terminating range")
        term = term * (-n + k) * (upper + k) * (zeta + k) / (den * (k + 1))
        total = total + term
    return total


def classical_sequence(N, fam, zeta_eval=None):
    zeta = fam.zeta if zeta_eval is None else zeta_eval
    return np.array(
        [continuous_hahn_3f2(n, fam.lam, fam.tau, fam.rho, fam.sigma, zeta) for n in range(N + 1)]
    )


@dataclass(frozen=True)
class EquivalenceReport:
    rows: list
    max_discrepancy: float

    @property
    def columns(self):
        return ("n", "L", "D_n", "T_n", "S_n", "A_n", "C_n", "B_n", "residual")


def equivalence_report(p, basis, fam, N):
    """Compare ``(L - D_n, T_n, S_n)`` with ``(zeta - alpha_n, A_n, C_n)`` for n <= N."""
    rows = []
    worst = 0.0
    for n in range(N + 1):
        L, Dn, Tn, Sn = tra_coefficients(n, p, basis)
        An, Cn = hahn_AC(n, fam)
        Bn = hahn_B(n, fam.mu, fam.nu, fam.chi, fam.D)
        alpha = -(An + Cn) + fam.branch.sign * fam.deform * Bn
        gap = max(
            abs((L - Dn) - (fam.zeta - alpha)) / max(1.0, abs(L - Dn)),
            abs(Tn - An) / max(1.0, abs(Tn)),
            abs(Sn - Cn) / max(1.0, abs(Sn)),
        )
        worst = max(worst, gap)
        rows.append((n, L, Dn, Tn, Sn, An, Cn, Bn, gap))
    return EquivalenceReport(rows, worst)
