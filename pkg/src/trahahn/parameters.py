"""Canonical ODE parameters, their constraints, and the derived basis/Hahn parameters.

The canonical equation is

    x(1-x)(r-x) [y'' + (a/x - b/(1-x) - c/(r-x) + d) y']
        + (A/x - B/(1-x) - C/(r-x) + xD - E) y = 0.

A tridiagonal action of this operator on the Jacobi basis requires
``4C = r(r-1)c(c-2)`` and a closed-form ``E``; the remaining eight parameters
are free up to two inequality bounds on ``A`` and ``B``.
"""

import enum
import math
from dataclasses import dataclass, field

from .errors import ComplexIndex, IndexOutOfRange

EQ_TOL = 1e-12
INEQ_SLACK = 1e-14


class Branch(enum.Enum):
    """Damping choice of the basis: TOP has delta = 0, BOTTOM has delta = d.

    ``sign`` is the upper/lower choice of every paired +- in the coefficient
    formulas (+1 for TOP).
    """

    TOP = "top"
    BOTTOM = "bottom"

    @property
    def sign(self):
        return 1 if self is Branch.TOP else -1

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


def derive_dependent(a, b, c, d, r, A, B, D):
    """Return the constrained ``(C, E)`` for the eight free parameters."""
    C = r * (r - 1) * c * (c - 2) / 4
    E = (
        A / r
        + B / (r - 1)
        + r * D
        - r * c / 2 * (a + b + c + d * (r - 1) - 2)
        + c / 2 * (a + c / 2 - 1)
    )
    return C, E


@dataclass(frozen=True)
class CanonicalParams:
    a: float
    b: float
    c: float
    d: float
    r: float
    A: float
    B: float
    C: float
    D: float
    E: float

    @classmethod
    def from_free(cls, a, b, c, d, r, A, B, D):
        C, E = derive_dependent(a, b, c, d, r, A, B, D)
        return cls(a=a, b=b, c=c, d=d, r=r, A=A, B=B, C=C, D=D, E=E)

    @property
    def chi(self):
        return (self.a + self.b + self.c) / 2

    def replace(self, **changes):
        values = {k: getattr(self, k) for k in "abcdrABCDE"}
        values.update(changes)
        return CanonicalParams(**values)


@dataclass(frozen=True)
class ConstraintResult:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    results: tuple = field(default_factory=tuple)

    @property
    def ok(self):
        return all(res.passed for res in self.results)

    @property
    def failed(self):
        return [res.name for res in self.results if not res.passed]

    def __getitem__(self, name):
        for res in self.results:
            if res.name == name:
                return res
        raise KeyError(name)


def _close(lhs, rhs, tol=EQ_TOL):
    return abs(lhs - rhs) <= tol * max(1.0, abs(lhs), abs(rhs))


def validate(p):
    """Check every constraint; never raises.

    Inequality residuals are signed margins (nonnegative when satisfied),
    equality residuals are ``lhs - rhs``.
    """
    results = []
    results.append(ConstraintResult("r", p.r > 1, p.r - 1, "r > 1"))
    results.append(ConstraintResult("d", p.d != 0, abs(p.d), "d != 0"))
    if p.r > 1:
        a_margin = p.r * (1 - p.a) ** 2 - 4 * p.A
        b_margin = 4 * p.B + (p.r - 1) * (1 - p.b) ** 2
        C_exp, E_exp = derive_dependent(p.a, p.b, p.c, p.d, p.r, p.A, p.B, p.D)
        results.append(ConstraintResult("A", a_margin >= -INEQ_SLACK, a_margin, "4A <= r(1-a)^2"))
        results.append(ConstraintResult("B", b_margin >= -INEQ_SLACK, b_margin, "4B >= -(r-1)(1-b)^2"))
        results.append(ConstraintResult("C", _close(p.C, C_exp), p.C - C_exp, "4C = r(r-1)c(c-2)"))
        results.append(ConstraintResult("E", _close(p.E, E_exp), p.E - E_exp, "closed-form E"))
    else:
        for name in "ABCE":
            results.append(ConstraintResult(name, False, math.nan, "undefined for r <= 1"))
    return ValidationReport(tuple(results))


def index_squares(p):
    """``(mu**2, nu**2)`` of the Jacobi indices."""
    mu2 = (1 - p.b) ** 2 + 4 * p.B / (p.r - 1)
    nu2 = (1 - p.a) ** 2 - 4 * p.A / p.r
    return mu2, nu2


@dataclass(frozen=True)
class BasisParams:
    """Exponents of x, (1-x), (r-x), damping, and Jacobi indices of the basis."""

    e0: float
    e1: float
    er: float
    delta: float
    mu: float
    nu: float
    branch: Branch
    chi: float
    r: float


def _root(square, sign, name):
    if square < -EQ_TOL * max(1.0, abs(square)):
        raise ComplexIndex(f"{name}^2 = {square} is negative")
    root = math.sqrt(max(square, 0.0))
    if sign < 0:
        root = -root
    if root <= -1:
        raise IndexOutOfRange(f"{name} = {root} must exceed -1")
    return root


def basis_params(p, branch=Branch.TOP, root_sign_mu=1, root_sign_nu=1):
    branch = Branch.parse(branch)
    mu2, nu2 = index_squares(p)
    mu = _root(mu2, root_sign_mu, "mu")
    nu = _root(nu2, root_sign_nu, "nu")
    return BasisParams(
        e0=(nu + 1 - p.a) / 2,
        e1=(mu + 1 - p.b) / 2,
        er=-p.c / 2,
        delta=0.0 if branch is Branch.TOP else p.d,
        mu=mu,
        nu=nu,
        branch=branch,
        chi=p.chi,
        r=p.r,
    )


@dataclass(frozen=True)
class HahnFamily:
    """Parameters of the (deformed) continuous Hahn polynomials.

    Only ``lam + i z`` is fixed by the ODE; it is stored as ``zeta`` and the
    split between ``lam`` and ``z`` is a free choice.  ``deform`` multiplies
    ``branch.sign * B_n`` on the recursion diagonal; 0 recovers the classical
    family.
    """

    lam: float
    tau: float
    rho: float
    sigma: float
    zeta: float
    deform: float
    branch: Branch
    mu: float
    nu: float
    chi: float
    D: float

    @property
    def z(self):
        return -1j * (self.zeta - self.lam)

    @property
    def total(self):
        return self.lam + self.tau + self.rho + self.sigma

    def pair_sums(self):
        """``(lam+rho, lam+sigma, tau+rho, tau+sigma, total)``."""
        return (
            self.lam + self.rho,
            self.lam + self.sigma,
            self.tau + self.rho,
            self.tau + self.sigma,
            self.total,
        )

    def with_deform(self, deform):
        return _replace(self, deform=deform)

    def with_lambda(self, lam):
        return _family(self.mu, self.nu, self.chi, self.D, self.zeta, self.deform, self.branch, lam)


def _replace(fam, **changes):
    values = dict(fam.__dict__)
    values.update(changes)
    return HahnFamily(**values)


def _family(mu, nu, chi, D, zeta, deform, branch, lam):
    s = branch.sign
    return HahnFamily(
        lam=lam,
        tau=lam + (nu - mu) / 2 - s * chi,
        rho=-lam + (mu + nu) / 2 + 1 + s * chi,
        sigma=-lam + mu + 1,
        zeta=zeta,
        deform=deform,
        branch=branch,
        mu=mu,
        nu=nu,
        chi=chi,
        D=D,
    )


def hahn_family(p, basis, lambda_choice=None, deform=None):
    """Map ODE and basis parameters to a :class:`HahnFamily`.

    By default ``lam = zeta`` (so ``z = 0``) and ``deform = 1/d``.
    """
    s = basis.branch.sign
    zeta = (basis.mu + 1 + s * (p.b + p.r * p.c)) / 2
    lam = zeta if lambda_choice is None else float(lambda_choice)
    if deform is None:
        deform = 1.0 / p.d
    return _family(basis.mu, basis.nu, p.chi, p.D, zeta, deform, basis.branch, lam)


def symmetric_lambda(basis):
    """The ``lam`` giving rho = lam and sigma = tau when mu = nu."""
    return (basis.mu + 1 + basis.branch.sign * basis.chi) / 2


def symmetric_case_residual(p):
    lhs = p.A / p.r + p.B / (p.r - 1)
    rhs = (p.a - p.b) / 2 * ((p.a + p.b) / 2 - 1)
    return lhs - rhs


def symmetric_case_check(p, tol=EQ_TOL):
    """True when the extra restriction for a real-line (rho=lam, sigma=tau) family holds."""
    if abs(symmetric_case_residual(p)) > tol * max(1.0, abs(p.A / p.r), abs(p.B / (p.r - 1))):
        return False
    basis = basis_params(p)
    return abs(basis.mu - basis.nu) <= tol * max(1.0, basis.mu)


def sample_admissible(rng, symmetric=False):
    """Draw a random parameter set satisfying every constraint.

    a, b, c, D uniform in [-2, 2]; |d| in [0.5, 3] with random sign;
    r in [1.2, 5]; A and B sit between 0.05 and 3 below/above their bounds
    (keeps the Jacobi indices away from zero).  With ``symmetric`` B is
    solved from the real-line restriction instead.
    """
    a, b, c, D = rng.uniform(-2, 2, size=4)
    d = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 3)
    r = rng.uniform(1.2, 5)
    A = r * (1 - a) ** 2 / 4 - r * rng.uniform(0.05, 3) / 4
    if symmetric:
        B = (r - 1) * ((a - b) / 2 * ((a + b) / 2 - 1) - A / r)
    else:
        B = -(r - 1) * (1 - b) ** 2 / 4 + (r - 1) * rng.uniform(0.05, 3) / 4
    return CanonicalParams.from_free(
        float(a), float(b), float(c), float(d), float(r), float(A), float(B), float(D)
    )


REFERENCE = CanonicalParams.from_free(0.0, 0.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0)
