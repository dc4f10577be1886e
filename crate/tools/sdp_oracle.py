#!/usr/bin/env python3
"""Solve SDPA sparse (.dat-s) files with an interior-point solver.

Reads the manifest written by the `sdp_fixtures` example, solves every
instance with cvxpy (Clarabel by default), and writes the oracle fixture
consumed by the Rust test suite.

    cargo run -p kyfan-core --example sdp_fixtures -- /tmp/sdp
    python3 tools/sdp_oracle.py /tmp/sdp crates/core/tests/fixtures/sdp_oracle.json
"""

import argparse
import hashlib
import json
import re
import sys
from collections import defaultdict
from pathlib import Path

import cvxpy as cp
import numpy as np


def parse_sdpa(text):
    lines = [l.strip() for l in text.splitlines()]
    lines = [l for l in lines if l and not l.startswith(("*", '"'))]
    tok = lambda l: [t for t in re.split(r"[\s,(){}]+", l) if t]
    m_dim = int(tok(lines[0])[0])
    n_block = int(tok(lines[1])[0])
    blocks = [int(t) for t in tok(lines[2])[:n_block]]
    c = np.array([float(t) for t in tok(lines[3])[:m_dim]])
    entries = defaultdict(list)
    for l in lines[4:]:
        mat, blk, i, j, v = tok(l)[:5]
        entries[(int(mat), int(blk))].append((int(i) - 1, int(j) - 1, float(v)))
    return c, blocks, entries


def solve_sdpa(text, solver):
    c, blocks, entries = parse_sdpa(text)
    x = cp.Variable(len(c))
    constraints = []
    for b, size in enumerate(blocks, start=1):
        dim = abs(size)

        def dense(mat):
            f = np.zeros((dim, dim))
            for i, j, v in entries.get((mat, b), []):
                f[i, j] = v
                f[j, i] = v
            return f

        if size > 0:
            expr = -dense(0)
            for var in range(1, len(c) + 1):
                if (var, b) in entries:
                    expr = expr + x[var - 1] * dense(var)
            sym = (expr + expr.T) / 2
            constraints.append(sym >> 0)
        else:
            rows = np.zeros((dim, len(c)))
            rhs = np.zeros(dim)
            for i, _, v in entries.get((0, b), []):
                rhs[i] = v
            for (var, blk), items in entries.items():
                if blk != b or var == 0:
                    continue
                for i, _, v in items:
                    rows[i, var - 1] += v
            constraints.append(rows @ x - rhs >= 0)
    prob = cp.Problem(cp.Minimize(c @ x), constraints)
    opts = {}
    if solver == "CLARABEL":
        opts = dict(tol_gap_abs=1e-9, tol_gap_rel=1e-9, tol_feas=1e-9, max_iter=500)
    prob.solve(solver=solver, **opts)
    if prob.status not in ("optimal",):
        raise RuntimeError(f"solver status {prob.status}")
    return prob.value


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("instances", type=Path, help="directory with manifest.json and .dat-s files")
    ap.add_argument("output", type=Path)
    ap.add_argument("--solver", default="CLARABEL")
    args = ap.parse_args()

    manifest = json.loads((args.instances / "manifest.json").read_text())
    out = []
    for inst in manifest["instances"]:
        text = (args.instances / inst["file"]).read_text()
        digest = hashlib.sha256(text.encode()).hexdigest()
        if digest != inst["sha256"]:
            sys.exit(f"{inst['name']}: hash mismatch")
        value = solve_sdpa(text, args.solver)
        print(f"{inst['name']}: {value:.12g}")
        out.append({k: inst[k] for k in ("name", "k", "theta", "a", "sha256")} | {"optimum": value})
    fixture = {"solver": f"cvxpy {cp.__version__} {args.solver}", "instances": out}
    args.output.write_text(json.dumps(fixture, indent=1) + "\n")


if __name__ == "__main__":
    main()
