"""Grid workspace mapping with feasibility and singularity labels.

A box is sampled on a regular grid; each point is tested for inverse
feasibility and every real solution branch is classified through the
velocity model.  The output is a flat, deterministically ordered list of
samples ready for CSV/JSON export (plot-ready point clouds rather than
figures).

Branches where a distal link folds onto the X axis have no finite
velocity model (the cotangent rows diverge); they are DOF-losing fold
configurations and are labelled serial, with no determinant contribution.

Every reachable pose also admits inverse branches whose chain-1/2 roots
agree, which places the rails exactly at the planar-loop parallel
singularity regardless of the pose; classifying those would paint the
entire workspace singular.  Labels therefore come from the working
(non-degenerate) assemblies, with the degenerate ones consulted only when
nothing else exists (exact boundary poses).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import ik, jacobian
from .errors import CotangentSingular, InvalidParameter, OutOfRange, Unreachable
from .jacobian import SingularityKind
from .params import Pose, ValidatedParams

_SEVERITY = {
    SingularityKind.REGULAR: 0,
    SingularityKind.SERIAL: 1,
    SingularityKind.PARALLEL: 2,
    SingularityKind.COMPREHENSIVE: 3,
}

CSV_HEADER = "x,y,z,feasible,real_solution_count,min_norm_det_jp,min_norm_det_jq,class"


@dataclass(frozen=True)
class ScanSpec:
    """Axis-aligned box, per-axis point count, and classification threshold."""

    x_range: tuple[float, float]
    y_range: tuple[float, float]
    z_range: tuple[float, float]
    resolution: int = 41
    singularity_threshold: float = jacobian.SINGULARITY_THRESHOLD

    def __post_init__(self):
        for name in ("x_range", "y_range", "z_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InvalidParameter(name, f"needs finite min < max, got ({lo}, {hi})")
        if not isinstance(self.resolution, int) or self.resolution < 2:
            raise InvalidParameter("resolution", f"must be an integer >= 2, got {self.resolution!r}")
        if not (math.isfinite(self.singularity_threshold) and self.singularity_threshold > 0):
            raise InvalidParameter(
                "singularity_threshold", f"must be > 0, got {self.singularity_threshold!r}"
            )


@dataclass(frozen=True)
class WorkspaceSample:
    pose: Pose
    feasible: bool
    real_solution_count: int
    #: smallest |normalised det| over classifiable branches; NaN if none.
    min_norm_det_jp: float
    min_norm_det_jq: float
    #: worst class over branches; None when infeasible.
    kind: SingularityKind | None


def _axis_values(bounds: tuple[float, float], n: int) -> list[float]:
    lo, hi = bounds
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def sample_point(pose: Pose, params: ValidatedParams, threshold: float) -> WorkspaceSample:
    """Feasibility plus worst-case singularity label of one pose."""
    try:
        solutions = ik.solve(pose, params, check_roundtrip=False)
    except Unreachable:
        solutions = []
    if not solutions:
        return WorkspaceSample(pose, False, 0, math.nan, math.nan, None)
    working = [s for s in solutions if not s.parallel_singular]
    worst = SingularityKind.REGULAR
    min_jp = math.nan
    min_jq = math.nan
    for solution in working or solutions:
        try:
            pair = jacobian.build(pose, solution, params)
        except CotangentSingular:
            if _SEVERITY[SingularityKind.SERIAL] > _SEVERITY[worst]:
                worst = SingularityKind.SERIAL
            continue
        cls = jacobian.classify(pair, params, threshold)
        if _SEVERITY[cls.kind] > _SEVERITY[worst]:
            worst = cls.kind
        if math.isnan(min_jp) or abs(cls.norm_det_jp) < min_jp:
            min_jp = abs(cls.norm_det_jp)
        if math.isnan(min_jq) or abs(cls.norm_det_jq) < min_jq:
            min_jq = abs(cls.norm_det_jq)
    return WorkspaceSample(pose, True, len(solutions), min_jp, min_jq, worst)


def _sample_chunk(args) -> list[WorkspaceSample]:
    poses, params, threshold = args
    return [sample_point(pose, params, threshold) for pose in poses]


def scan(spec: ScanSpec, params: ValidatedParams, *, workers: int = 1) -> list[WorkspaceSample]:
    """One sample per grid point in row-major (x, then y, then z) order.

    ``workers > 1`` fans the per-point work over processes; the output
    order and values are identical regardless of worker count.
    """
    xs = _axis_values(spec.x_range, spec.resolution)
    ys = _axis_values(spec.y_range, spec.resolution)
    zs = _axis_values(spec.z_range, spec.resolution)
    poses = [Pose(x, y, z) for x in xs for y in ys for z in zs]
    return _map_samples(poses, params, spec.singularity_threshold, workers)


def _map_samples(poses, params, threshold, workers) -> list[WorkspaceSample]:
    if workers <= 1:
        return [sample_point(pose, params, threshold) for pose in poses]
    chunk = max(1, (len(poses) + workers - 1) // workers)
    chunks = [(poses[i:i + chunk], params, threshold) for i in range(0, len(poses), chunk)]
    out: list[WorkspaceSample] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_sample_chunk, chunks):
            out.extend(part)
    return out


_AXES = {"x": 0, "y": 1, "z": 2}


def cross_section(
    spec: ScanSpec,
    params: ValidatedParams,
    axis: str,
    value: float,
    *,
    workers: int = 1,
) -> list[WorkspaceSample]:
    """Planar slice with the same per-point semantics as :func:`scan`.

    ``axis`` is one of "x", "y", "z"; ``value`` must lie within the spec's
    (inclusive) range on that axis, else :class:`OutOfRange`.  Samples run
    row-major over the two remaining axes.
    """
    key = axis.lower()
    if key not in _AXES:
        raise InvalidParameter("axis", f"must be one of x, y, z, got {axis!r}")
    bounds = (spec.x_range, spec.y_range, spec.z_range)[_AXES[key]]
    if not (bounds[0] <= value <= bounds[1]):
        raise OutOfRange(f"{key} = {value:g} outside scan range [{bounds[0]:g}, {bounds[1]:g}]")
    xs = _axis_values(spec.x_range, spec.resolution)
    ys = _axis_values(spec.y_range, spec.resolution)
    zs = _axis_values(spec.z_range, spec.resolution)
    if key == "x":
        poses = [Pose(value, y, z) for y in ys for z in zs]
    elif key == "y":
        poses = [Pose(x, value, z) for x in xs for z in zs]
    else:
        poses = [Pose(x, y, value) for x in xs for y in ys]
    return _map_samples(poses, params, spec.singularity_threshold, workers)


def _float_repr(value: float) -> str:
    return repr(value)


def _csv_lines(samples) -> list[str]:
    lines = [CSV_HEADER]
    for s in samples:
        lines.append(",".join((
            _float_repr(s.pose.x),
            _float_repr(s.pose.y),
            _float_repr(s.pose.z),
            "true" if s.feasible else "false",
            str(s.real_solution_count),
            _float_repr(s.min_norm_det_jp),
            _float_repr(s.min_norm_det_jq),
            s.kind.value if s.kind is not None else "none",
        )))
    return lines


def _json_records(samples) -> list[dict]:
    records = []
    for s in samples:
        records.append({
            "x": s.pose.x,
            "y": s.pose.y,
            "z": s.pose.z,
            "feasible": s.feasible,
            "real_solution_count": s.real_solution_count,
            "min_norm_det_jp": None if math.isnan(s.min_norm_det_jp) else s.min_norm_det_jp,
            "min_norm_det_jq": None if math.isnan(s.min_norm_det_jq) else s.min_norm_det_jq,
            "class": s.kind.value if s.kind is not None else "none",
        })
    return records


def export(samples: list[WorkspaceSample], fmt: str, destination) -> None:
    """Write samples as CSV or JSON; bit-stable for identical inputs."""
    if fmt not in ("csv", "json"):
        raise InvalidParameter("format", f"must be csv or json, got {fmt!r}")
    if fmt == "csv":
        payload = "\n".join(_csv_lines(samples)) + "\n"
    else:
        payload = json.dumps(_json_records(samples), indent=1) + "\n"
    try:
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"writing {destination}: {exc}") from exc


def summary(samples: list[WorkspaceSample]) -> dict[str, int]:
    """Counts by label: total, feasible, and one bucket per class."""
    out = {
        "total": len(samples),
        "feasible": 0,
        "regular": 0,
        "serial": 0,
        "parallel": 0,
        "comprehensive": 0,
    }
    for s in samples:
        if s.feasible:
            out["feasible"] += 1
            out[s.kind.value] += 1
    return out
