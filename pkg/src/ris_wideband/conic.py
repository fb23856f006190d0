"""Conic backends for the convexified inner problem.

Standard form: maximize gamma + eta*<G, S> over Hermitian S and scalar gamma
subject to diag(S) = 1, S PSD, and linear rows <M_t, S> + c_t >= gamma - 1.
The production backend hand-assembles the SCS cone program over the real
embedding of the Hermitian PSD cone; a CVXPY backend provides the
small-instance cross-check (compile times make it unusable at scale).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp


class SolverError(RuntimeError):
    def __init__(self, status, context=""):
        super().__init__(f"conic solve failed: {status} {context}".strip())
        self.status = status


@dataclass
class P7Data:
    constraint_mats: np.ndarray    # (T, N, N) Hermitian
    constraint_consts: np.ndarray  # (T,)
    grad: np.ndarray               # (N, N) Hermitian
    eta: float


@dataclass
class P7Solution:
    gamma: float
    S: np.ndarray
    status: str
    iterations: int
    objective: float


@lru_cache(maxsize=8)
def _structure(n: int):
    """Cached index plumbing for the real embedding at size n."""
    iu = np.triu_indices(n, k=1)
    t_off = iu[0].size
    nvar = 1 + n + 2 * t_off
    # zero cone: unit diagonal
    a_zero = sp.csc_matrix((np.ones(n), (np.arange(n), 1 + np.arange(n))),
                           shape=(n, nvar))
    # psd cone: svec of [[X, -Y], [Y, X]], SCS convention (column-major lower
    # triangle, off-diagonal * sqrt(2))
    d = 2 * n
    rl, cl = np.tril_indices(d)
    order = np.lexsort((rl, cl))
    rl, cl = rl[order], cl[order]
    svec = -np.ones((d, d), dtype=np.int64)
    svec[rl, cl] = np.arange(rl.size)
    sq2 = math.sqrt(2.0)
    rows, cols, vals = [], [], []
    for i in range(n):
        rows += [svec[i, i], svec[n + i, n + i]]
        cols += [1 + i, 1 + i]
        vals += [-1.0, -1.0]
    for t in range(t_off):
        i, j = int(iu[0][t]), int(iu[1][t])
        rows += [svec[j, i], svec[n + j, n + i]]
        cols += [1 + n + t] * 2
        vals += [-sq2, -sq2]
        rows += [svec[n + i, j], svec[n + j, i]]
        cols += [1 + n + t_off + t] * 2
        vals += [-sq2, sq2]
    a_psd = sp.csc_matrix((vals, (rows, cols)), shape=(rl.size, nvar))
    return iu, t_off, nvar, a_zero, a_psd, rl.size


def herm_inner_rows(mats: np.ndarray) -> np.ndarray:
    """Rows r with r @ x = Re tr(M^H S(x)) for stacked Hermitian mats."""
    m = np.asarray(mats, np.complex128)
    if m.ndim == 2:
        m = m[None]
    n = m.shape[1]
    iu, t_off, nvar, *_ = _structure(n)
    rows = np.empty((m.shape[0], nvar))
    rows[:, 0] = 0.0
    rows[:, 1:1 + n] = np.real(m[:, np.arange(n), np.arange(n)])
    rows[:, 1 + n:1 + n + t_off] = 2.0 * np.real(m[:, iu[0], iu[1]])
    rows[:, 1 + n + t_off:] = 2.0 * np.imag(m[:, iu[0], iu[1]])
    return rows


def _unpack(x: np.ndarray, n: int):
    iu, t_off, *_ = _structure(n)
    gam = float(x[0])
    X = np.zeros((n, n))
    Y = np.zeros((n, n))
    X[np.diag_indices(n)] = x[1:1 + n]
    X[iu] = x[1 + n:1 + n + t_off]
    X = X + X.T - np.diag(np.diag(X))
    Y[iu] = x[1 + n + t_off:]
    Y = Y - Y.T
    return gam, X + 1j * Y


class ScsDirectBackend:
    """Hand-assembled SCS cone program; warm-started across inner iterations."""

    def __init__(self, n: int, *, max_iters: int = 20000, verbose: bool = False):
        self.n = n
        self.max_iters = max_iters
        self.verbose = verbose
        self._warm = None

    def reset_warm_start(self):
        self._warm = None

    def solve(self, data: P7Data, eps: float) -> P7Solution:
        import scs

        n = self.n
        iu, t_off, nvar, a_zero, a_psd, m_psd = _structure(n)
        rows = herm_inner_rows(data.constraint_mats)
        rn = np.linalg.norm(rows, axis=1)
        rn[rn == 0.0] = 1.0
        a_pos = -(rows / rn[:, None])
        a_pos[:, 0] = 1.0 / rn
        b_pos = (1.0 + np.asarray(data.constraint_consts, float)) / rn
        c = -data.eta * herm_inner_rows(data.grad[None])[0]
        c[0] = -1.0
        A = sp.vstack([a_zero, sp.csc_matrix(a_pos), a_psd], format="csc")
        b = np.concatenate([np.ones(n), b_pos, np.zeros(m_psd)])
        cone = dict(z=n, l=len(b_pos), s=[2 * n])
        solver = scs.SCS(dict(A=A, b=b, c=c), cone, eps_abs=eps, eps_rel=eps,
                         verbose=self.verbose, max_iters=self.max_iters)
        if self._warm is not None:
            sol = solver.solve(warm_start=True, **self._warm)
        else:
            sol = solver.solve()
        status = sol["info"]["status"]
        if "solved" not in status.lower():
            # one retry on rescaled data, then surface the solver status
            scale = float(np.max(np.abs(data.constraint_consts))) or 1.0
            retry = P7Data(constraint_mats=data.constraint_mats / scale,
                           constraint_consts=data.constraint_consts / scale,
                           grad=data.grad, eta=data.eta)
            self._warm = None
            rows = herm_inner_rows(retry.constraint_mats)
            rn = np.linalg.norm(rows, axis=1)
            rn[rn == 0.0] = 1.0
            a_pos = -(rows / rn[:, None])
            a_pos[:, 0] = 1.0 / (rn * scale)
            b_pos = (1.0 / scale + np.asarray(retry.constraint_consts, float)) / rn
            A = sp.vstack([a_zero, sp.csc_matrix(a_pos), a_psd], format="csc")
            b = np.concatenate([np.ones(n), b_pos, np.zeros(m_psd)])
            solver = scs.SCS(dict(A=A, b=b, c=c), cone, eps_abs=eps, eps_rel=eps,
                             verbose=self.verbose, max_iters=self.max_iters)
            sol = solver.solve()
            status = sol["info"]["status"]
            if "solved" not in status.lower():
                raise SolverError(status)
        self._warm = dict(x=sol["x"], y=sol["y"], s=sol["s"])
        gam, S = _unpack(sol["x"], n)
        return P7Solution(gamma=gam, S=S, status=status,
                          iterations=int(sol["info"]["iter"]),
                          objective=float(-np.dot(c, sol["x"])))


class CvxpyBackend:
    """Reference backend; used for small-instance cross-checks in tests."""

    def __init__(self, n: int):
        self.n = n

    def reset_warm_start(self):
        pass

    def solve(self, data: P7Data, eps: float) -> P7Solution:
        import cvxpy as cp

        n = self.n
        S = cp.Variable((n, n), hermitian=True)
        gam = cp.Variable()
        cons = [S >> 0, cp.diag(S) == 1]
        for M, cc in zip(data.constraint_mats, data.constraint_consts):
            cons.append(cp.real(cp.trace(M.conj().T @ S)) + cc >= gam - 1.0)
        obj = cp.Maximize(gam + data.eta * cp.real(cp.trace(data.grad.conj().T @ S)))
        prob = cp.Problem(obj, cons)
        prob.solve(solver=cp.SCS, eps=eps, verbose=False)
        if S.value is None:
            raise SolverError(prob.status)
        return P7Solution(gamma=float(gam.value), S=np.asarray(S.value),
                          status=prob.status, iterations=-1,
                          objective=float(prob.value))


def make_backend(name: str, n: int):
    if name == "scs":
        return ScsDirectBackend(n)
    if name == "cvxpy":
        return CvxpyBackend(n)
    raise ValueError(f"unknown conic backend {name!r}")
