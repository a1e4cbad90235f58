"""Monte Carlo check of quadratic forms in independent GUE matrices."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .exactalg import ExactMatrix

DEFAULT_Z = 4.0


def to_complex_matrix(A):
    if isinstance(A, ExactMatrix):
        return np.array([[complex(A[i, j]) for j in range(A.n)] for i in range(A.n)])
    return np.asarray(A, dtype=complex)


@dataclass
class MatrixModel:
    """n independent GUE(N) matrices combined by the coefficient matrix A."""

    N: int
    A: object
    seed: int = 0

    def __post_init__(self):
        self.coeffs = to_complex_matrix(self.A)
        if self.coeffs.ndim != 2 or self.coeffs.shape[0] != self.coeffs.shape[1]:
            raise ValueError("coefficient matrix must be square")
        if not np.allclose(self.coeffs, self.coeffs.conj().T, atol=1e-12):
            raise ValueError("coefficient matrix must be selfadjoint")
        if self.N < 1:
            raise ValueError("N must be positive")

    @property
    def n(self):
        return self.coeffs.shape[0]

    def rng(self, trial):
        return np.random.default_rng(np.random.SeedSequence([self.seed, trial]))


def gue(N, rng):
    """Hermitian matrix with E|x_ij|^2 = 1/N, so the spectrum fills [-2, 2]."""
    g = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    return (g + g.conj().T) / (2 * np.sqrt(N))


def sample_form(model, rng):
    X = [gue(model.N, rng) for _ in range(model.n)]
    Q = np.zeros((model.N, model.N), dtype=complex)
    for k in range(model.n):
        for l in range(model.n):
            a = model.coeffs[k, l]
            if a != 0:
                Q += a * (X[k] @ X[l])
    return Q


def trace_moments(Q, rmax):
    out = []
    P = np.eye(Q.shape[0], dtype=complex)
    for _ in range(rmax):
        P = P @ Q
        out.append(np.trace(P).real / Q.shape[0])
    return out


def empirical_moments(model, rmax, trials):
    """Per order (mean, standard error) of Tr(Q^r)/N over independent trials."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    data = np.empty((trials, rmax))
    for t in range(trials):
        Q = sample_form(model, model.rng(t))
        if not np.allclose(Q, Q.conj().T, atol=1e-8):
            raise ValueError("sampled form is not Hermitian")
        data[t] = trace_moments(Q, rmax)
    mean = data.mean(axis=0)
    if trials > 1:
        err = data.std(axis=0, ddof=1) / np.sqrt(trials)
    else:
        err = np.zeros(rmax)
    return [(float(m), float(e)) for m, e in zip(mean, err)]


def compare_with_prediction(model, law, rmax, trials, z_threshold=DEFAULT_Z):
    """z-scores of empirical trace moments against the exact moments of ``law``."""
    exact = law.moments(rmax)
    emp = empirical_moments(model, rmax, trials)
    rows = []
    ok = True
    for r, (ex, (m, e)) in enumerate(zip(exact, emp), 1):
        ex = float(ex)
        if e > 0:
            z = (m - ex) / e
        else:
            z = 0.0 if abs(m - ex) < 1e-9 * max(1.0, abs(ex)) else float("inf")
        passed = abs(z) <= z_threshold
        ok = ok and passed
        rows.append({"r": r, "exact": ex, "empirical": m, "stderr": e, "z": z, "pass": passed})
    return {"N": model.N, "trials": trials, "seed": model.seed, "z_threshold": z_threshold,
            "law": law.name, "orders": rows, "pass": ok}


def report_csv(report):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["r", "exact", "empirical", "stderr", "z", "pass"])
    w.writeheader()
    for row in report["orders"]:
        w.writerow(row)
    return buf.getvalue()
