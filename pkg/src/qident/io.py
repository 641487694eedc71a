"""Deterministic CSV / JSON / VTK emission for study and solve runs.

Numbers are serialized with 6 significant digits in scientific notation so
repeated runs with identical configuration produce byte-identical files.
"""

import json
from pathlib import Path


def fmt(x) -> str:
    if x is None or x == "":
        return ""
    return f"{float(x):.5e}"


def _write_lines(path, lines):
    Path(path).write_text("\n".join(lines) + "\n")


HISTORY_HEADER = "ell,rho,h,delta,iterations,tolerance,Gamma,Delta,Sigma,Xi,Lambda"


def write_history_csv(path, results, include_lambda=True):
    lines = [HISTORY_HEADER]
    for r in results:
        lam = fmt(r.metrics["Lambda"]) if include_lambda else ""
        lines.append(",".join([
            str(r.ell), fmt(r.rho), fmt(r.h), fmt(r.delta),
            str(r.record.iterations), fmt(r.record.tolerance[-1]),
            fmt(r.metrics["Gamma"]), fmt(r.metrics["Delta"]),
            fmt(r.metrics["Sigma"]), fmt(r.metrics["Xi"]), lam,
        ]))
    _write_lines(path, lines)


def write_eoc_csv(path, results, eoc_table):
    names = ["Gamma", "Delta", "Sigma", "Xi", "Lambda"]
    lines = ["ell," + ",".join(f"EOC_{n}" for n in names)]
    for i, r in enumerate(results):
        cells = [str(r.ell)]
        for n in names:
            if n in eoc_table and i >= 1:
                cells.append(fmt(eoc_table[n][0][i - 1]))
            else:
                cells.append("")
        lines.append(",".join(cells))
    mean_cells = ["mean"] + [fmt(eoc_table[n][1]) if n in eoc_table else ""
                             for n in names]
    lines.append(",".join(mean_cells))
    _write_lines(path, lines)


def write_milestones_csv(path, milestones):
    lines = ["Iterations,Tolerances,Gamma,Delta,Sigma,Xi"]
    for row in milestones:
        lines.append(",".join([str(row["iteration"]), fmt(row["tolerance"]),
                               fmt(row["Gamma"]), fmt(row["Delta"]),
                               fmt(row["Sigma"]), fmt(row["Xi"])]))
    _write_lines(path, lines)


def write_run_json(path, result, spec):
    record = result.record
    payload = {
        "schema": "1",
        "config": {
            "example": spec.example,
            "ell": result.ell,
            "rho": float(result.rho),
            "h": float(result.h),
            "delta": float(result.delta),
            "q_lo": spec.K.q_lo,
            "q_hi": spec.K.q_hi,
            "max_iters": spec.max_iters,
            "tol": spec.tol,
        },
        "iterations": [
            {"m": m, "alpha": a, "beta": b, "gamma": g, "tolerance": t}
            for m, a, b, g, t in zip(record.m, record.alpha, record.beta,
                                     record.gamma, record.tolerance)
        ],
        "stop_reason": record.stop_reason,
        "errors": {k: float(v) for k, v in result.metrics.items()},
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def write_qfield_csv(path, field):
    lines = ["tri_id,q11,q12,q22"]
    for t, (q11, q12, q22) in enumerate(field):
        lines.append(f"{t},{fmt(q11)},{fmt(q12)},{fmt(q22)}")
    _write_lines(path, lines)


def write_state_csv(path, mesh, u):
    lines = ["node_id,x1,x2,u"]
    for n in range(mesh.n_nodes):
        x1, x2 = mesh.nodes[n]
        lines.append(f"{n},{fmt(x1)},{fmt(x2)},{fmt(u[n])}")
    _write_lines(path, lines)


def write_mesh_csv(nodes_path, tris_path, mesh):
    lines = ["node_id,x1,x2"]
    for n in range(mesh.n_nodes):
        lines.append(f"{n},{fmt(mesh.nodes[n, 0])},{fmt(mesh.nodes[n, 1])}")
    _write_lines(nodes_path, lines)
    lines = ["tri_id,n0,n1,n2"]
    for t, (a, b, c) in enumerate(mesh.triangles):
        lines.append(f"{t},{a},{b},{c}")
    _write_lines(tris_path, lines)


def write_vtk(path, mesh, u, field):
    """Legacy ASCII VTK unstructured grid with the state as point data and
    the coefficient entries as cell data."""
    lines = ["# vtk DataFile Version 3.0", "qident output", "ASCII",
             "DATASET UNSTRUCTURED_GRID",
             f"POINTS {mesh.n_nodes} double"]
    for x1, x2 in mesh.nodes:
        lines.append(f"{fmt(x1)} {fmt(x2)} 0.00000e+00")
    lines.append(f"CELLS {mesh.n_tris} {4 * mesh.n_tris}")
    for a, b, c in mesh.triangles:
        lines.append(f"3 {a} {b} {c}")
    lines.append(f"CELL_TYPES {mesh.n_tris}")
    lines.extend(["5"] * mesh.n_tris)
    lines.append(f"POINT_DATA {mesh.n_nodes}")
    lines.append("SCALARS u double 1")
    lines.append("LOOKUP_TABLE default")
    lines.extend(fmt(v) for v in u)
    lines.append(f"CELL_DATA {mesh.n_tris}")
    for name, col in (("q11", 0), ("q12", 1), ("q22", 2)):
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines.extend(fmt(v) for v in field[:, col])
    _write_lines(path, lines)
