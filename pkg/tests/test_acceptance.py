"""End-to-end acceptance checks, one test per criterion.

Each test carries ``@pytest.mark.acceptance(k)``; the terminal summary prints
one PASS/FAIL line per criterion.
"""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
import sympy as sp
from numpy.polynomial import polynomial as P

from trahahn.canonical import canonicalize, reconstruct
from trahahn.coefficients import equivalence_report, hahn_AC, hahn_B, hahn_recurrence, tra_coefficients
from trahahn.jacobi import derivative_table, gauss_jacobi, jacobi_eval, jacobi_ode_residual, jacobi_table
from trahahn.parameters import Branch, basis_params, derive_dependent, hahn_family, symmetric_lambda, validate
from trahahn.series import build_series
from trahahn.spectral import gauss_measure, orthonormal_table, zeros, zline_matrix
from trahahn.verify import (
    chebyshev_grid,
    limit_check,
    series_integrator_error,
    tridiagonal_identity_check,
    truncation_residual_check,
)

from conftest import draws, random_spec

GRID = chebyshev_grid(0.05, 0.95, 50)
DRAWS = draws(20)
DATA = Path(__file__).parent / "data"


@pytest.mark.acceptance(1)
def test_constraint_closure():
    """Constraint closure: 100 random draws validate, equality residuals <= 1e-12."""
    for p in draws(100, seed=1):
        C, E = derive_dependent(p.a, p.b, p.c, p.d, p.r, p.A, p.B, p.D)
        assert (C, E) == (p.C, p.E)
        rep = validate(p)
        assert rep.ok, rep.failed
        assert abs(rep["C"].residual) <= 1e-12 and abs(rep["E"].residual) <= 1e-12


@pytest.mark.acceptance(2)
def test_tridiagonal_identity():
    """Tridiagonal identity <= 1e-8 on 20 draws, both branches, n <= 15; E+0.01 breaks it by >= 1e-4."""
    worst, broken = 0.0, []
    for p in DRAWS:
        for branch in Branch:
            basis = basis_params(p, branch)
            worst = max(worst, *(tridiagonal_identity_check(n, p, basis, GRID) for n in range(16)))
            bad = p.replace(E=p.E + 0.01)
            broken.append(max(tridiagonal_identity_check(n, bad, basis, GRID) for n in range(16)))
    assert worst <= 1e-8
    assert min(broken) >= 1e-4


@pytest.mark.acceptance(3)
def test_recursion_equivalence(ref):
    """Recursion equivalence <= 1e-12 for n <= 50 on the draws; reference hand values to 1e-14."""
    for p in DRAWS:
        for branch in Branch:
            basis = basis_params(p, branch)
            assert equivalence_report(p, basis, hahn_family(p, basis), 50).max_discrepancy <= 1e-12
    for branch, D0 in ((Branch.TOP, 3.0), (Branch.BOTTOM, -1.0)):
        basis = basis_params(ref, branch)
        fam = hahn_family(ref, basis)
        L, Dn, Tn, Sn = tra_coefficients(0, ref, basis)
        A0, C0 = hahn_AC(0, fam)
        got = np.array([L, Dn, Tn, Sn, A0, C0, hahn_B(0, fam.mu, fam.nu, fam.chi, fam.D)])
        np.testing.assert_allclose(got, [1, D0, -1, 0, -1, 0, 2], rtol=0, atol=1e-14)


@pytest.mark.acceptance(4)
def test_truncation_residual():
    """Truncation residual matches the two boundary terms to 1e-8 for N in {5, 10, 20} (telescoped, N=2 confirmed)."""
    # symbolic telescoping at N = 2
    N = 2
    f, Dh, Sh, Th, phi = (sp.symbols(f"{s}0:{N + 2}") for s in ("f", "D", "S", "T", "phi"))
    total = sum(f[n] * (Dh[n] * phi[n] + Th[n] * phi[n + 1] - (Sh[n] * phi[n - 1] if n else 0)) for n in range(N + 1))
    rec = {Dh[m]: (f[m + 1] * Sh[m + 1] - (f[m - 1] * Th[m - 1] if m else 0)) / f[m] for m in range(N + 1)}
    assert sp.simplify(total.subs(rec) - (Th[N] * f[N] * phi[N + 1] + Sh[N + 1] * f[N + 1] * phi[N])) == 0
    for p in DRAWS:
        for branch in Branch:
            assert truncation_residual_check(build_series(p, branch, 2), GRID) <= 1e-10
            for N in (5, 10, 20):
                assert truncation_residual_check(build_series(p, branch, N), GRID) <= 1e-8


@pytest.mark.acceptance(5)
def test_limit_recovery(ref):
    """Limit recovery: error at d=1e6 <= 1e-4 for n <= 10, log-log slope -1 +- 0.1."""
    for branch in Branch:
        rep = limit_check(ref, basis_params(ref, branch), 10, (1e3, 1e4, 1e5, 1e6))
        assert rep.errors[-1] <= 1e-4
        assert abs(rep.slope + 1) <= 0.1


@pytest.mark.acceptance(6)
def test_jacobi_layer():
    """Jacobi layer: ODE residual <= 1e-9, derivative identity vs differences <= 1e-6, Gram <= 1e-10, P_1 = 4x-2."""
    x = np.linspace(0.05, 0.95, 10)
    for mu, nu in ((1.0, 1.0), (0.4, 2.2), (-0.5, 0.7)):
        for n in range(11):
            assert np.max(np.abs(jacobi_ode_residual(n, mu, nu, x))) <= 1e-9
        # central differences; h balances h^2 truncation against rounding
        h = 1e-6
        analytic = derivative_table(10, mu, nu, x)
        fd = (jacobi_table(10, mu, nu, x + h) - jacobi_table(10, mu, nu, x - h)) / (2 * h)
        assert np.max(np.abs(analytic - fd) / np.maximum(1, np.abs(fd))) <= 1e-6
        nodes, weights = gauss_jacobi(42, mu, nu)
        table = jacobi_table(20, mu, nu, nodes)
        gram = (table * weights) @ table.T
        scale = np.sqrt(np.outer(np.diag(gram), np.diag(gram)))
        assert np.max(np.abs(gram - np.diag(np.diag(gram))) / scale) <= 1e-10
    assert np.max(np.abs(jacobi_eval(1, 1.0, 1.0, x) - (4 * x - 2))) <= 1e-14


@pytest.mark.acceptance(7)
def test_integrator_cross_validation(ref):
    """Integrator cross-validation on [0.3, 0.7]: reference set, N=40, both branches, <= 1e-6."""
    for branch in Branch:
        assert series_integrator_error(build_series(ref, branch, 40)) <= 1e-6


@pytest.mark.acceptance(8)
def test_spectral(ref):
    """Spectral: N=1 zero at 3, diagonal collapse, zeros on Re = lam, z-line +-1/sqrt(5), weights, Gram."""
    top = hahn_family(ref, basis_params(ref, Branch.TOP))
    z1 = zeros(1, top)
    assert abs(z1[0] - 3) <= 1e-12
    basis = basis_params(ref, Branch.TOP)
    sym = hahn_family(ref, basis, symmetric_lambda(basis), deform=0.0)
    rec = hahn_recurrence(50, sym)
    assert np.max(np.abs(rec.sup + rec.sub + sym.lam)) <= 1e-12
    assert np.max(np.abs(zeros(30, sym).real - sym.lam)) <= 1e-8
    ev = np.linalg.eigvalsh(zline_matrix(2, sym).dense())
    np.testing.assert_allclose(ev, [-1 / np.sqrt(5), 1 / np.sqrt(5)], rtol=0, atol=1e-12)
    for N in (1, 2, 10, 20, 30):
        assert abs(gauss_measure(N, sym)[1].sum() - 1) <= 1e-12
    nodes, weights = gauss_measure(20, sym)
    q = orthonormal_table(zline_matrix(20, sym), 9, nodes)
    assert np.max(np.abs((q * weights) @ q.T - np.eye(10))) <= 1e-8


@pytest.mark.acceptance(9)
def test_canonicalization_round_trip():
    """Canonicalization round trip: 50 random cubic specs reconstruct pointwise to <= 1e-10."""
    rng = np.random.default_rng(9)
    xs = np.linspace(-6, 6, 25)
    for _ in range(50):
        spec = random_spec(rng)
        p, shift, scale = canonicalize(spec)
        pi0, pi2, pihat2, pi1 = reconstruct(p, shift, scale)
        assert abs(pi0 - spec.pi0) <= 1e-10 * max(1, abs(spec.pi0))
        for orig, back in ((spec.pi2, pi2), (spec.pihat2, pihat2), (spec.pi1, pi1)):
            want = P.polyval(xs, orig)
            assert np.max(np.abs(P.polyval(xs, back) - want)) <= 1e-10 * max(1, np.max(np.abs(want)))


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "trahahn.cli", *argv], capture_output=True, text=True)


@pytest.mark.acceptance(10)
def test_cli_contract(tmp_path):
    """CLI contract: byte-identical reruns and exit codes 0/1/2 on three canned configs."""
    expected = {"reference.cfg": 0, "perturbed.cfg": 1, "missing_r.cfg": 2}
    for name, code in expected.items():
        cfg = str(DATA / name)
        for command in ("validate", "verify"):
            outs = []
            for k in range(2):
                target = tmp_path / f"{command}-{name}-{k}.json"
                proc = _cli(command, "--config", cfg, "--branch", "both", "--format", "json", "--out", str(target))
                assert proc.returncode == code, (command, name, proc.stderr)
                outs.append(target.read_bytes() if target.exists() else b"")
            assert outs[0] == outs[1]
    for command in ("coeffs", "series-eval", "spectral", "sweep"):
        assert _cli(command, "--config", str(DATA / "missing_r.cfg")).returncode == 2
        runs = [_cli(command, "--config", str(DATA / "reference.cfg"), "--N", "6", "--branch", "both")
                for _ in range(2)]
        assert runs[0].returncode == 0 and runs[0].stdout == runs[1].stdout and runs[0].stdout
    assert _cli("verify").returncode == 2
