"""MILP model for the minimum t-spanning control set.

Variables: ``y_p`` in [0, 1] per primitive, binary ``x_i_j`` per lattice
edge, continuous ``z_v`` per vertex (path length in the selected tree).
Rows, in export order:

* ``xy``   x_ij - y_p <= 0                              one per (p, (i,j) in S_p)
* ``cost`` z_i - z_j + M_ij x_ij <= M_ij - c_ij           one per edge
* ``span`` z_j <= t c_j                                   one per non-root j
* ``tree`` sum_i x_ij = 1                                 one per non-root j

with ``M_ij = t c_i + c_ij - c_j``.  Roots have ``z = 0``.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import sparse

from ..lattice import Lattice, check_almost_metric


class ModelError(ValueError):
    pass


@dataclass
class MilpModel:
    t: float
    n_vertices: int
    roots: tuple[int, ...]
    y_ids: list[int]
    edges: np.ndarray
    costs: np.ndarray
    big_m: np.ndarray
    tighten: bool = True
    names: list[str] = field(default_factory=list)
    # (family, {var: coeff}, sense, rhs) in export order
    rows: list[tuple[str, dict[int, float], str, float]] = field(default_factory=list)
    lower: np.ndarray = None
    upper: np.ndarray = None
    integer: np.ndarray = None
    objective: np.ndarray = None

    @property
    def n_vars(self) -> int:
        return len(self.names)

    @property
    def y_slice(self) -> slice:
        return slice(0, len(self.y_ids))

    @property
    def x_slice(self) -> slice:
        k = len(self.y_ids)
        return slice(k, k + len(self.edges))

    @property
    def z_slice(self) -> slice:
        k = len(self.y_ids) + len(self.edges)
        return slice(k, k + self.n_vertices)

    def family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for fam, *_ in self.rows:
            out[fam] = out.get(fam, 0) + 1
        return out

    def matrix(self):
        data, ri, ci, lo, hi = [], [], [], [], []
        for r, (_, coeffs, sense, rhs) in enumerate(self.rows):
            for v, a in coeffs.items():
                ri.append(r)
                ci.append(v)
                data.append(a)
            lo.append(rhs if sense in ("=", ">=") else -np.inf)
            hi.append(rhs if sense in ("=", "<=") else np.inf)
        A = sparse.csr_matrix((data, (ri, ci)), shape=(len(self.rows), self.n_vars))
        return A, np.array(lo), np.array(hi)


def build_model(lattice: Lattice, t: float, tighten: bool = True) -> MilpModel:
    """Assemble the MILP for ``lattice`` at stretch ``t``.

    Refuses lattices whose costs are not an almost-metric, since the
    big-M constants could then go negative.
    """
    if t < 1.0:
        raise ModelError("t must be at least 1")
    bad = check_almost_metric(lattice)
    if bad is not None:
        raise ModelError(f"costs are not an almost-metric: {bad}")
    c = lattice.costs
    y_ids = lattice.primitives
    edges = lattice.edges
    n = lattice.n
    ypos = {p: k for k, p in enumerate(y_ids)}
    ny, nx = len(y_ids), len(edges)
    ids = [v + 1 for v in range(n)]
    pairs = [(int(i), int(j)) for i, j, _ in edges]
    dup = len(set(pairs)) != len(pairs)
    names = [f"y_{ids[p]}" for p in y_ids]
    for i, j, p in edges:
        names.append(f"x_{ids[i]}_{ids[j]}" + (f"_{ids[p]}" if dup else ""))
    names += [f"z_{ids[v]}" for v in range(n)]

    big_m = t * c[edges[:, 0]] + c[edges[:, 2]] - c[edges[:, 1]] if nx else np.zeros(0)
    # a tight triangle at t = 1 is exactly zero; drop the summation residue
    big_m[(big_m < 0) & (big_m > -1e-9 * (1.0 + c[edges[:, 1]]))] = 0.0
    model = MilpModel(t, n, tuple(lattice.roots), list(y_ids), edges, c.copy(), big_m, tighten, names)
    rows = model.rows
    zoff = ny + nx
    for e, (i, j, p) in enumerate(edges):
        rows.append(("xy", {ny + e: 1.0, ypos[int(p)]: -1.0}, "<=", 0.0))
    for e, (i, j, p) in enumerate(edges):
        coeffs: dict[int, float] = {}
        coeffs[zoff + int(i)] = coeffs.get(zoff + int(i), 0.0) + 1.0
        coeffs[zoff + int(j)] = coeffs.get(zoff + int(j), 0.0) - 1.0
        coeffs[ny + e] = float(big_m[e])
        rows.append(("cost", coeffs, "<=", float(big_m[e] - c[p])))
    non_roots = [v for v in range(n) if not lattice.is_root(v)]
    for j in non_roots:
        rows.append(("span", {zoff + j: 1.0}, "<=", float(t * c[j])))
    incoming: dict[int, list[int]] = {j: [] for j in non_roots}
    for e, (i, j, p) in enumerate(edges):
        if int(j) in incoming:
            incoming[int(j)].append(e)
    for j in non_roots:
        rows.append(("tree", {ny + e: 1.0 for e in incoming[j]}, "=", 1.0))

    nv = len(names)
    lower = np.zeros(nv)
    upper = np.ones(nv)
    upper[zoff:] = np.inf
    for r in lattice.roots:
        upper[zoff + r] = 0.0
    if tighten:
        lower[zoff:] = c
    integer = np.zeros(nv, dtype=bool)
    integer[ny:zoff] = True
    obj = np.zeros(nv)
    obj[:ny] = 1.0
    model.lower, model.upper, model.integer, model.objective = lower, upper, integer, obj
    return model


def _fmt(v: float) -> str:
    r = repr(float(v))
    return r[:-2] if r.endswith(".0") else r


def _terms(coeffs, names) -> list[str]:
    out = []
    for k, (v, a) in enumerate(sorted(coeffs.items())):
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        body = names[v] if mag == 1.0 else f"{_fmt(mag)} {names[v]}"
        out.append(f"{sign} {body}" if k else (f"- {body}" if a < 0 else body))
    return out


def _wrap(head: str, terms: list[str], tail: str, out) -> None:
    line = head
    for term in terms:
        if len(line) + len(term) > 240:
            out.write(line.rstrip() + "\n")
            line = "   "
        line += term + " "
    out.write((line + tail).rstrip() + "\n")


def export_lp(model: MilpModel, destination=None) -> str:
    """Write the model in CPLEX LP format; return the text.

    Rows appear family by family (xy, cost, span, tree) in index order.
    """
    out = io.StringIO()
    names = model.names
    out.write(f"\\ minimum t-spanning control set, t = {_fmt(model.t)}\n")
    out.write("Minimize\n")
    obj_terms = _terms({v: 1.0 for v in range(len(model.y_ids))}, names)
    _wrap(" obj: ", obj_terms or ["0"], "", out)
    out.write("Subject To\n")
    counters: dict[str, int] = {}
    for fam, coeffs, sense, rhs in model.rows:
        counters[fam] = counters.get(fam, 0) + 1
        terms = _terms({v: a for v, a in coeffs.items() if a != 0.0}, names)
        if not terms:
            terms = [f"0 {names[0]}"] if names else []
        if not terms:
            continue
        _wrap(f" {fam}_{counters[fam]}: ", terms, f"{sense} {_fmt(rhs)}", out)
    out.write("Bounds\n")
    for v, name in enumerate(names):
        lo, hi = model.lower[v], model.upper[v]
        if model.integer[v]:
            continue
        if lo == hi:
            out.write(f" {name} = {_fmt(lo)}\n")
        elif np.isinf(hi):
            out.write(f" {name} >= {_fmt(lo)}\n")
        else:
            out.write(f" {_fmt(lo)} <= {name} <= {_fmt(hi)}\n")
    xs = [names[v] for v in range(len(names)) if model.integer[v]]
    if xs:
        out.write("Binaries\n")
        for k in range(0, len(xs), 8):
            out.write(" " + " ".join(xs[k:k + 8]) + "\n")
    out.write("End\n")
    text = out.getvalue()
    if destination is not None:
        Path(destination).write_text(text)
    return text


@dataclass
class MilpSolution:
    status: str
    objective: Optional[float]
    values: Optional[np.ndarray]
    wall_time: float

    def selected(self, model: MilpModel) -> list[int]:
        # unused y_p may rest anywhere in [0, 1]; the tree edges decide
        x = self.values[model.x_slice]
        return sorted({int(model.edges[e, 2]) for e in np.flatnonzero(x > 0.5)})


def solve_milp(model: MilpModel, time_limit: Optional[float] = None) -> MilpSolution:
    """Solve with HiGHS through :func:`scipy.optimize.milp`."""
    from scipy.optimize import Bounds, LinearConstraint, milp

    t0 = time.perf_counter()
    if model.n_vars == 0:
        return MilpSolution("optimal", 0.0, np.zeros(0), 0.0)
    A, lo, hi = model.matrix()
    opts = {}
    if time_limit is not None:
        opts["time_limit"] = float(time_limit)
    res = milp(
        model.objective,
        constraints=LinearConstraint(A, lo, hi) if A.shape[0] else None,
        integrality=model.integer.astype(int),
        bounds=Bounds(model.lower, model.upper),
        options=opts,
    )
    status = {0: "optimal", 1: "budget_exhausted", 2: "infeasible"}.get(res.status, "error")
    if res.status == 1 and res.x is not None:
        status = "feasible"
    return MilpSolution(status, None if res.x is None else float(res.fun), res.x, time.perf_counter() - t0)


def solve_lp_file(path, time_limit: Optional[float] = None) -> MilpSolution:
    """Read an LP file with HiGHS (``highspy``) and solve it."""
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if time_limit is not None:
        h.setOptionValue("time_limit", float(time_limit))
    t0 = time.perf_counter()
    if h.readModel(str(path)) != highspy.HighsStatus.kOk:
        raise ModelError(f"HiGHS could not read {path}")
    h.run()
    ms = h.getModelStatus()
    status = {
        highspy.HighsModelStatus.kOptimal: "optimal",
        highspy.HighsModelStatus.kInfeasible: "infeasible",
        highspy.HighsModelStatus.kTimeLimit: "budget_exhausted",
    }.get(ms, "error")
    info = h.getInfo()
    obj = info.objective_function_value if status == "optimal" else None
    vals = np.array(h.getSolution().col_value) if status == "optimal" else None
    return MilpSolution(status, obj, vals, time.perf_counter() - t0)
