import json
from enum import Enum
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import yaml

from models.manifest import RunManifest

YAML_SUFFIXES = (".yaml", ".yml")


def to_builtin(value):
    """
    Convert numpy scalars and arrays, enums and paths inside nested
    containers to plain Python values that json and yaml can dump.
    """
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    return value


def write_report(path: Union[str, Path], data: dict) -> None:
    """
    Write a structured report. YAML for .yaml/.yml files, JSON otherwise.

    Args:
        path: Output file
        data: Report content
    """
    path = Path(path)
    data = to_builtin(data)
    with open(path, "w") as f:
        if path.suffix.lower() in YAML_SUFFIXES:
            yaml.safe_dump(data, f, sort_keys=False)
        else:
            json.dump(data, f, indent=2)
            f.write("\n")


def write_manifest(path: Union[str, Path], manifest: RunManifest) -> None:
    with open(path, "w") as f:
        yaml.safe_dump(to_builtin(manifest.to_dict()), f, sort_keys=False)


def load_manifest(path: Union[str, Path]) -> RunManifest:
    with open(path, "r") as f:
        data = yaml.safe_load(f)
    return RunManifest.from_dict(data)


def _table(headers: List[str], rows: List[List[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(headers, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in rows]
    return "\n".join(lines)


def format_hierarchy(hierarchy: Dict) -> str:
    """Per-level table followed by the two complexities."""
    rows = [[str(s["level"]), str(s["unknowns"]), str(s["nnz"]), f"{s['nnz_per_row']:.2f}",
             str(s["rows_without_interpolation"])]
            for s in hierarchy["levels"]]
    table = _table(["level", "unknowns", "nnz", "nnz/row", "no-interp"], rows)
    return (f"{table}\n"
            f"grid complexity {hierarchy['grid_complexity']:.3f}, "
            f"operator complexity {hierarchy['operator_complexity']:.3f}")


def format_solve(result: Dict) -> str:
    lines = []
    if result.get("hierarchy"):
        lines.append(format_hierarchy(result["hierarchy"]))
        lines.append("")
    status = "converged" if result["converged"] else "NOT converged"
    if result.get("stagnated"):
        status += " (stagnated)"
    lines.append(f"{result['method']}: {status} in {result['iterations']} iterations, "
                 f"relative residual {result['relative_residual']:.3e}")
    lines.append(f"setup {result['setup_seconds']:.3f}s, solve {result['solve_seconds']:.3f}s, "
                 f"{result['rate_munknowns_per_second']:.3f} Munknowns/s")
    if result.get("manifest"):
        lines.append("")
        lines.append(yaml.safe_dump({"manifest": to_builtin(result["manifest"])}, sort_keys=False).rstrip())
    return "\n".join(lines)


def format_bench(result: Dict) -> str:
    rows = []
    for row in result["rows"]:
        if "error" in row:
            rows.append([row["cycle"], row["smoother"], str(row["size"]), "-", "-", "-", "-",
                         f"error: {row['error']}"])
            continue
        rows.append([row["cycle"], row["smoother"], str(row["size"]), str(row["levels"]),
                     f"{row['setup_seconds']:.3f}", f"{row['solve_seconds']:.3f}", str(row["iterations"]),
                     "yes" if row["converged"] else "no"])
    lines = [_table(["cycle", "smoother", "size", "levels", "setup[s]", "solve[s]", "iters", "converged"], rows)]
    for entry in result.get("grid_independence", []):
        ratio = entry["ratio"]
        lines.append(f"{entry['cycle']}/{entry['smoother']}: iterations {entry['min_iterations']}"
                     f"-{entry['max_iterations']}, ratio {ratio:.2f}" if ratio is not None
                     else f"{entry['cycle']}/{entry['smoother']}: no converged rows")
    refresh = result.get("refresh")
    if refresh:
        lines.append(f"galerkin refresh on {refresh['size']}: cached {refresh['cached_seconds']:.4f}s, "
                     f"direct {refresh['direct_seconds']:.4f}s, speedup {refresh['speedup']:.1f}x")
    return "\n".join(lines)
