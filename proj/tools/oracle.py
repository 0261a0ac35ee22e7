#!/usr/bin/env python3
"""Regenerates tests/data/oracle_fixtures.json with an independent solver stack.

Models come from the qbayes CLI (``qbayes zoo``); every bound is then recomputed
here from the raw model JSON with numpy/scipy and cvxpy (Clarabel), sharing no
code with the C++ library. Usage:

    python3 tools/oracle.py build/qbayes tests/data/oracle_fixtures.json
"""

import json
import subprocess
import sys

import cvxpy as cp
import numpy as np
import scipy.linalg as sla

MODELS = [
    ("classical_binary", [1.0, 0.6], 0),
    ("correlated_pair", [1.0, 0.6], 0),
    ("qubit_xy", [0.5, 4], 0),
    ("qubit_xy", [0.8, 6], 0),
    ("qubit_z_line", [5], 0),
    ("random_model", [1, 2, 11], 0),
    ("random_model", [2, 2, 12], 0),
    ("random_model", [2, 2, 13, 5], 0),
    ("random_model", [2, 3, 14], 0),
    ("random_model", [3, 2, 15], 0),
    ("random_model", [3, 3, 16, 4], 0),
    ("random_model", [2, 2, 17, 4, 1], 0),
    ("random_model", [3, 2, 18, 5, 1], 0),
]


def cmat(rows):
    return np.array([[complex(*e) if isinstance(e, list) else complex(e) for e in r] for r in rows])


def load(doc):
    pts = doc["points"]
    thetas = np.array([p["theta"] for p in pts], float)
    weights = np.array([p["weight"] for p in pts], float)
    states = [cmat(p["rho"]) for p in pts]
    w = doc["weight"]
    if "constant" in w:
        ws = [np.array(w["constant"], float)] * len(pts)
        constant = True
    else:
        ws = [np.array(x, float) for x in w["per_point"]]
        constant = False
    return thetas, weights, states, ws, constant


def psd_sqrt(a):
    vals, vecs = np.linalg.eigh((a + a.conj().T) / 2)
    return (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T


SOLVER_LOG = []


def solve(obj, cons):
    prob = cp.Problem(cp.Minimize(obj), cons)
    attempts = [
        ("CLARABEL", dict(solver=cp.CLARABEL, tol_gap_abs=1e-9, tol_gap_rel=1e-9, tol_feas=1e-9)),
        ("CVXOPT", dict(solver=cp.CVXOPT, abstol=1e-10, reltol=1e-10, feastol=1e-10, kktsolver="robust")),
        ("CLARABEL-1e-8", dict(solver=cp.CLARABEL, tol_gap_abs=1e-8, tol_gap_rel=1e-8, tol_feas=1e-8)),
    ]
    for name, kwargs in attempts:
        try:
            prob.solve(**kwargs)
        except (cp.SolverError, ArithmeticError):
            continue
        if prob.status == cp.OPTIMAL:
            SOLVER_LOG.append(name)
            return float(prob.value)
    prob.solve(solver=cp.SCS, eps=1e-10, max_iters=200000)
    if prob.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        SOLVER_LOG.append("SCS" if prob.status == cp.OPTIMAL else "SCS-inaccurate")
        return float(prob.value)
    raise RuntimeError(f"no solver reached optimality ({prob.status})")


def moments(thetas, weights, states, ws):
    n = thetas.shape[1]
    s_b = sum(p * s for p, s in zip(weights, states))
    d_b = [sum(p * t[j] * s for p, t, s in zip(weights, thetas, states)) for j in range(n)]
    m = sum(p * np.outer(t, t) for p, t in zip(weights, thetas))
    d_bar = [sum(p * (w[j] @ t) * s for p, t, s, w in zip(weights, thetas, states, ws)) for j in range(n)]
    s_bar = sum(p * np.kron(w, s) for p, s, w in zip(weights, states, ws))
    w_bar = sum(p * t @ w @ t for p, t, w in zip(weights, thetas, ws))
    return s_b, d_b, m, d_bar, s_bar, w_bar


def sld(s_b, d_b, m, w):
    ls = [sla.solve_sylvester(s_b / 2, s_b / 2, d) for d in d_b]
    n = len(ls)
    k = np.array([[np.trace(s_b @ ls[i] @ ls[j]).real for j in range(n)] for i in range(n)])
    return float(np.trace(w @ (m - k)))


def linear_term(d_bar, xs):
    return -2 * sum(cp.real(cp.trace(db @ x)) for db, x in zip(d_bar, xs))


def nh(n, d, d_bar, s_bar, w_bar):
    big_l = cp.Variable((n * d, n * d), hermitian=True)
    xs = [cp.Variable((d, d), hermitian=True) for _ in range(n)]
    cons = []
    for j in range(n):
        for k in range(j + 1, n):
            cons.append(big_l[j * d:(j + 1) * d, k * d:(k + 1) * d] == big_l[k * d:(k + 1) * d, j * d:(j + 1) * d])
    col = cp.vstack(xs)
    cons.append(cp.bmat([[big_l, col], [col.H, np.eye(d)]]) >> 0)
    obj = cp.real(cp.trace(s_bar @ big_l)) + linear_term(d_bar, xs)
    return solve(obj + w_bar, cons)


def holevo(n, d, d_bar, w_bar, blocks_spec):
    """blocks_spec: list of (R, sqrt_S, cost) giving V ⪰ M M† with row j of M = vec(Σ_k R_jk √S X_k)."""
    xs = [cp.Variable((d, d), hermitian=True) for _ in range(n)]
    cons = []
    obj = linear_term(d_bar, xs)
    for r, sq, cost in blocks_spec:
        v = cp.Variable((n, n), symmetric=True)
        rows = []
        for j in range(n):
            y = sum(r[j, k] * (sq @ xs[k]) for k in range(n))
            rows.append(cp.reshape(y, (1, d * d), order="F"))
        m = cp.vstack(rows)
        cons.append(cp.bmat([[v, m], [m.H, np.eye(d * d)]]) >> 0)
        obj = obj + cp.trace(cost @ v)
    return solve(obj + w_bar, cons)


def main():
    qbayes, out = sys.argv[1], sys.argv[2]
    fixtures = []
    for name, params, grid in MODELS:
        args = [qbayes, "zoo", name] + [repr(p) for p in params]
        if grid:
            args += ["--grid", str(grid)]
        text = subprocess.run(args, check=True, capture_output=True, text=True).stdout
        doc = json.loads(text)
        thetas, weights, states, ws, constant = load(doc)
        n, d = thetas.shape[1], states[0].shape[0]
        s_b, d_b, m, d_bar, s_bar, w_bar = moments(thetas, weights, states, ws)
        entry = {"label": f"{name} {params}", "model": doc}
        SOLVER_LOG.clear()
        entry["nh"] = nh(n, d, d_bar, s_bar, w_bar)
        per_point = [(psd_sqrt(w), psd_sqrt(s), p * np.eye(n)) for p, s, w in zip(weights, states, ws) if p > 0]
        entry["holevo_per_point"] = holevo(n, d, d_bar, w_bar, per_point)
        if constant:
            entry["sld"] = sld(s_b, d_b, m, ws[0])
            entry["holevo_collapsed"] = holevo(n, d, d_bar, w_bar, [(np.eye(n), psd_sqrt(s_b), ws[0])])
        entry["solvers"] = sorted(set(SOLVER_LOG))
        fixtures.append(entry)
        print(entry["label"], {k: v for k, v in entry.items() if k not in ("model", "label")})
    with open(out, "w") as f:
        json.dump({"fixtures": fixtures}, f, indent=1)


if __name__ == "__main__":
    main()
