"""Freeze random LPs and their HiGHS optima into tests/data/random_lps.json.

The C++ simplex is checked against these values; HiGHS (via scipy) is the
independent solver.  Re-run only when the fixture needs to change:

    python3 tests/oracles/lp_oracle.py
"""
import json
import pathlib

import numpy as np
from scipy.optimize import linprog

OUT = pathlib.Path(__file__).resolve().parents[1] / "data" / "random_lps.json"


def random_lp(rng, n=20, m=30):
    x0 = rng.uniform(-3.0, 3.0, n)
    lower = np.where(rng.random(n) < 0.8, x0 - rng.uniform(0.5, 4.0, n), -np.inf)
    upper = np.where(rng.random(n) < 0.8, x0 + rng.uniform(0.5, 4.0, n), np.inf)
    a = rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.5)
    act = a @ x0
    rel = rng.choice(["<=", ">=", "="], size=m, p=[0.45, 0.4, 0.15])
    rhs = np.where(rel == "<=", act + rng.uniform(0.0, 2.0, m),
                   np.where(rel == ">=", act - rng.uniform(0.0, 2.0, m), act))
    c = rng.normal(size=n)
    return dict(c=c, a=a, rel=rel, rhs=rhs, lower=lower, upper=upper)


def solve(lp):
    ub_rows, ub_rhs, eq_rows, eq_rhs, order = [], [], [], [], []
    for i, (row, r, b) in enumerate(zip(lp["a"], lp["rel"], lp["rhs"])):
        if r == "<=":
            ub_rows.append(row); ub_rhs.append(b); order.append(("ub", len(ub_rows) - 1, 1.0))
        elif r == ">=":
            ub_rows.append(-row); ub_rhs.append(-b); order.append(("ub", len(ub_rows) - 1, -1.0))
        else:
            eq_rows.append(row); eq_rhs.append(b); order.append(("eq", len(eq_rows) - 1, 1.0))
    bounds = [(None if not np.isfinite(l) else l, None if not np.isfinite(u) else u)
              for l, u in zip(lp["lower"], lp["upper"])]
    res = linprog(lp["c"], A_ub=np.array(ub_rows) if ub_rows else None, b_ub=ub_rhs or None,
                  A_eq=np.array(eq_rows) if eq_rows else None, b_eq=eq_rhs or None,
                  bounds=bounds, method="highs")
    if res.status != 0:
        return None
    duals = []
    for kind, k, sign in order:
        marg = res.ineqlin.marginals[k] if kind == "ub" else res.eqlin.marginals[k]
        duals.append(float(sign * marg))
    return float(res.fun), [float(v) for v in res.x], duals


def enc(v):
    return None if not np.isfinite(v) else float(v)


def main():
    rng = np.random.default_rng(20240611)
    cases = []
    while len(cases) < 12:
        lp = random_lp(rng)
        sol = solve(lp)
        if sol is None:
            continue
        obj, x, duals = sol
        cases.append(dict(
            c=[float(v) for v in lp["c"]],
            a=[[float(v) for v in row] for row in lp["a"]],
            rel=[str(r) for r in lp["rel"]],
            rhs=[float(v) for v in lp["rhs"]],
            lower=[enc(v) for v in lp["lower"]],
            upper=[enc(v) for v in lp["upper"]],
            objective=obj, x=x, duals=duals))
    OUT.write_text(json.dumps({"solver": "scipy-highs", "cases": cases}, indent=1))
    print(f"wrote {len(cases)} cases to {OUT}")


if __name__ == "__main__":
    main()
