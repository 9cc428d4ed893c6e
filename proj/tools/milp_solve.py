#!/usr/bin/env python3
"""Solve a CPLEX-LP file with scipy's HiGHS MILP backend.

Usage: milp_solve.py MODEL.lp SOLUTION.txt [--time-limit S] [--mip-gap G]

The solution file starts with a status word (optimal / feasible / infeasible /
timeout / unbounded / error), then "objective V", then one "name value" line
per variable. Supports the LP subset common to most exporters: single-line
objective and constraints, Bounds / Generals / Binaries sections, inf
keywords.
"""

import argparse
import math
import re
import sys

import numpy as np
from scipy import optimize, sparse

TOKEN = re.compile(
    r"[A-Za-z_][A-Za-z0-9_.]*|\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|<=|>=|[=+:-]"
)
SECTIONS = {
    "maximize": "objective",
    "maximise": "objective",
    "max": "objective",
    "minimize": "objective",
    "minimise": "objective",
    "min": "objective",
    "subject to": "constraints",
    "such that": "constraints",
    "st": "constraints",
    "s.t.": "constraints",
    "bounds": "bounds",
    "bound": "bounds",
    "generals": "generals",
    "general": "generals",
    "gen": "generals",
    "binaries": "binaries",
    "binary": "binaries",
    "bin": "binaries",
    "end": "end",
}


def is_number(tok):
    return tok[0].isdigit() or tok[0] == "."


def parse_terms(tokens):
    """Token list -> (dict name -> coef, constant)."""
    coeffs, const, sign, i = {}, 0.0, 1.0, 0
    while i < len(tokens):
        t = tokens[i]
        if t == "+":
            sign = 1.0
        elif t == "-":
            sign = -sign
        elif is_number(t):
            if i + 1 < len(tokens) and not is_number(tokens[i + 1]) and tokens[i + 1] not in "+-":
                coeffs[tokens[i + 1]] = coeffs.get(tokens[i + 1], 0.0) + sign * float(t)
                i += 1
            else:
                const += sign * float(t)
            sign = 1.0
        else:
            coeffs[t] = coeffs.get(t, 0.0) + sign
            sign = 1.0
        i += 1
    return coeffs, const


def bound_value(text):
    s = text.replace(" ", "").lower()
    if s in ("inf", "+inf", "infinity", "+infinity"):
        return math.inf
    if s in ("-inf", "-infinity"):
        return -math.inf
    return float(s)


class Problem:
    def __init__(self):
        self.maximize = True
        self.obj = {}
        self.obj_const = 0.0
        self.rows = []  # (coeffs, sense, rhs)
        self.bounds = {}  # name -> [lb, ub]
        self.explicit = set()
        self.generals = set()
        self.binaries = set()


def parse_lp(path):
    prob = Problem()
    section = None
    with open(path) as f:
        for raw in f:
            line = raw.split("\\", 1)[0].strip()
            if not line:
                continue
            key = SECTIONS.get(line.lower())
            if key:
                if key == "objective":
                    prob.maximize = line.lower().startswith("max")
                section = key
                if key == "end":
                    break
                continue
            if section == "objective":
                tokens = TOKEN.findall(line)
                if len(tokens) >= 2 and tokens[1] == ":":
                    tokens = tokens[2:]
                coeffs, const = parse_terms(tokens)
                for k, v in coeffs.items():
                    prob.obj[k] = prob.obj.get(k, 0.0) + v
                prob.obj_const += const
            elif section == "constraints":
                tokens = TOKEN.findall(line)
                if len(tokens) >= 2 and tokens[1] == ":":
                    tokens = tokens[2:]
                rel = next((i for i, t in enumerate(tokens) if t in ("<=", ">=", "=")), None)
                if rel is None:
                    raise ValueError("constraint without relation: " + line)
                lhs, lc = parse_terms(tokens[:rel])
                rhs_terms, rc = parse_terms(tokens[rel + 1 :])
                if rhs_terms:
                    raise ValueError("variables on constraint rhs: " + line)
                prob.rows.append((lhs, tokens[rel], rc - lc))
            elif section == "bounds":
                m = re.match(r"^(.+?)<=\s*(\w+)\s*<=(.+)$", line)
                if m:
                    prob.bounds[m.group(2)] = [bound_value(m.group(1)), bound_value(m.group(3))]
                    prob.explicit.add(m.group(2))
                    continue
                m = re.match(r"^(\w+)\s+free$", line, re.IGNORECASE)
                if m:
                    prob.bounds[m.group(1)] = [-math.inf, math.inf]
                    prob.explicit.add(m.group(1))
                    continue
                m = re.match(r"^(\w+)\s*(<=|>=|=)(.+)$", line)
                if m:
                    v = bound_value(m.group(3))
                    if m.group(2) == "=":
                        prob.bounds[m.group(1)] = [v, v]
                    elif m.group(2) == "<=":
                        prob.bounds.setdefault(m.group(1), [0.0, math.inf])[1] = v
                    else:
                        prob.bounds.setdefault(m.group(1), [0.0, math.inf])[0] = v
                    prob.explicit.add(m.group(1))
                    continue
                raise ValueError("unparsed bound line: " + line)
            elif section == "generals":
                prob.generals.update(TOKEN.findall(line))
            elif section == "binaries":
                prob.binaries.update(TOKEN.findall(line))
    return prob


def solve(prob, time_limit, mip_gap):
    cols = {}
    for name in prob.obj:
        cols.setdefault(name, len(cols))
    for coeffs, _, _ in prob.rows:
        for name in coeffs:
            cols.setdefault(name, len(cols))
    for name in list(prob.bounds) + sorted(prob.generals) + sorted(prob.binaries):
        cols.setdefault(name, len(cols))
    n = len(cols)
    if n == 0:
        return "optimal", prob.obj_const, {}

    lb = np.zeros(n)
    ub = np.full(n, math.inf)
    integrality = np.zeros(n)
    for name in prob.binaries:
        j = cols[name]
        integrality[j] = 1
        if name not in prob.explicit:
            lb[j], ub[j] = 0.0, 1.0
    for name in prob.generals:
        integrality[cols[name]] = 1
    for name, (lo, hi) in prob.bounds.items():
        j = cols[name]
        lb[j], ub[j] = lo, hi
        if name in prob.binaries:
            lb[j], ub[j] = max(lo, 0.0), min(hi, 1.0)

    c = np.zeros(n)
    for name, coef in prob.obj.items():
        c[cols[name]] = -coef if prob.maximize else coef

    constraints = None
    if prob.rows:
        data, ri, ci = [], [], []
        lo = np.empty(len(prob.rows))
        hi = np.empty(len(prob.rows))
        for r, (coeffs, sense, rhs) in enumerate(prob.rows):
            for name, coef in coeffs.items():
                data.append(coef)
                ri.append(r)
                ci.append(cols[name])
            lo[r] = rhs if sense in (">=", "=") else -math.inf
            hi[r] = rhs if sense in ("<=", "=") else math.inf
        A = sparse.csr_matrix((data, (ri, ci)), shape=(len(prob.rows), n))
        constraints = optimize.LinearConstraint(A, lo, hi)

    res = optimize.milp(
        c,
        constraints=constraints,
        integrality=integrality,
        bounds=optimize.Bounds(lb, ub),
        options={"time_limit": time_limit, "mip_rel_gap": mip_gap},
    )

    if res.status == 0:
        status = "optimal"
    elif res.status == 1:
        status = "feasible" if res.x is not None else "timeout"
    elif res.status == 2:
        status = "infeasible"
    elif res.status == 3:
        status = "unbounded"
    else:
        status = "error"

    values = {}
    objective = prob.obj_const
    if res.x is not None:
        order = sorted(cols.items(), key=lambda kv: kv[1])
        values = {name: res.x[j] for name, j in order}
        obj_val = -res.fun if prob.maximize else res.fun
        objective += obj_val
    return status, objective, values


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("--time-limit", type=float, default=600.0)
    ap.add_argument("--mip-gap", type=float, default=0.0)
    args = ap.parse_args()

    try:
        prob = parse_lp(args.model)
        status, objective, values = solve(prob, args.time_limit, args.mip_gap)
    except Exception as exc:  # report through the solution file
        with open(args.solution, "w") as f:
            f.write("error\n")
            f.write(str(exc).replace("\n", " ") + "\n")
        print("milp_solve: " + str(exc), file=sys.stderr)
        return 1

    with open(args.solution, "w") as f:
        f.write(status + "\n")
        if values or status in ("optimal", "feasible"):
            f.write("objective %.12g\n" % objective)
        for name, val in values.items():
            f.write("%s %.12g\n" % (name, val))
    return 0


if __name__ == "__main__":
    sys.exit(main())
