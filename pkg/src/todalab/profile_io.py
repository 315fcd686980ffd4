"""Flat-file formats for radial profiles.

CSV rows carry the full grid at 17 significant digits under the header
``r,u1[,u2,...],du1[,...],sigma1[,...]``; the JSON form additionally
carries the originating shot parameters so a profile can be reloaded or
re-run exactly.  Leading ``#`` comment lines in the CSV hold the resolved
run configuration for reproducibility.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .ode_engine import RadialProfile, ShootSpec, TerminationReason
from .systems import SystemKind, Variant

FORMAT_VERSION = 1


def _header(n: int) -> list[str]:
    cols = ["r"]
    cols += [f"u{i + 1}" for i in range(n)]
    cols += [f"du{i + 1}" for i in range(n)]
    cols += [f"sigma{i + 1}" for i in range(n)]
    return cols


def write_profile_csv(p: RadialProfile, path, config: dict | None = None) -> None:
    n = p.n_components
    lines = []
    if config is not None:
        blob = json.dumps(config, sort_keys=True)
        lines.append(f"# config {blob}")
    lines.append(f"# reason {p.reason.value}")
    lines.append(",".join(_header(n)))
    table = np.column_stack([p.grid, p.values, p.derivs, p.masses])
    for row in table:
        lines.append(",".join(f"{x:.17g}" for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def profile_to_json_dict(p: RadialProfile, config: dict | None = None) -> dict:
    d = {
        "format_version": FORMAT_VERSION,
        "variant": p.system.variant.value,
        "singular_weights": list(p.system.singular_weights),
        "reason": p.reason.value,
        "provenance": p.provenance,
        "shoot_spec": None if p.spec is None else p.spec.to_json_dict(),
        "grid": p.grid.tolist(),
        "values": p.values.tolist(),
        "derivs": p.derivs.tolist(),
        "masses": p.masses.tolist(),
    }
    if config is not None:
        d["config"] = config
    return d


def write_profile_json(p: RadialProfile, path, config: dict | None = None) -> None:
    Path(path).write_text(json.dumps(profile_to_json_dict(p, config)) + "\n")


def profile_from_json_dict(d: dict) -> RadialProfile:
    system = SystemKind(
        Variant(d["variant"]), tuple(d.get("singular_weights") or ())
    )
    spec = d.get("shoot_spec")
    return RadialProfile(
        system=system,
        grid=np.asarray(d["grid"], dtype=float),
        values=np.asarray(d["values"], dtype=float),
        derivs=np.asarray(d["derivs"], dtype=float),
        masses=np.asarray(d["masses"], dtype=float),
        reason=TerminationReason(d["reason"]),
        spec=None if spec is None else ShootSpec.from_json_dict(spec),
        provenance=d.get("provenance", "loaded"),
    )


def read_profile_json(path) -> RadialProfile:
    return profile_from_json_dict(json.loads(Path(path).read_text()))


def write_series(path, xs, ys, x_label: str, y_labels: list[str]) -> None:
    """Two-or-more column whitespace-separated series file for plotting."""
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    if ys.shape[0] != len(xs):
        ys = ys.T
    lines = ["# " + " ".join([x_label] + y_labels)]
    for x, row in zip(xs, ys):
        lines.append(" ".join(f"{v:.17g}" for v in [x, *np.atleast_1d(row)]))
    Path(path).write_text("\n".join(lines) + "\n")
