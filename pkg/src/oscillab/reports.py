"""Experiment configs, verification reports and their on-disk form.

A run produces ``report.json`` (deterministic: sorted keys, no clock),
``metadata.json`` (timestamp, versions, argv) and optional CSV side files.
All files are written to a temporary name and renamed into place.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import platform
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Annotated, Any, Literal, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

SCHEMA_VERSION = "1.0"

Basis = Literal["exact", "closed-form", "independent-oracle", "empirical", "note"]


def to_jsonable(value: Any) -> Any:
    """numpy scalars/arrays and complex numbers to plain JSON types.

    Complex numbers become ``[re, im]``; non-finite floats become strings.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if value is None or isinstance(value, str):
        return value
    raise TypeError(f"cannot serialize {type(value).__name__}")


class ResultRow(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    value: Any
    tolerance: float | None
    passed: bool
    basis: Basis = "empirical"
    detail: str = ""

    @field_validator("value", mode="before")
    @classmethod
    def _plain(cls, v):
        return to_jsonable(v)


class VerificationReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: str = SCHEMA_VERSION
    experiment_id: str
    command: str
    inputs: dict[str, Any]
    results: list[ResultRow] = Field(default_factory=list)
    anchors: list[str] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def add(self, name: str, value, tolerance: float | None, passed: bool, basis: Basis = "empirical", detail: str = ""):
        self.results.append(
            ResultRow(name=name, value=value, tolerance=None if tolerance is None else float(tolerance), passed=bool(passed), basis=basis, detail=detail)
        )
        return passed

    def failures(self) -> list[ResultRow]:
        return [r for r in self.results if not r.passed]

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


# -- configs ----------------------------------------------------------------


class _Base(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    output_dir: str | None = None


class EigenConfig(_Base):
    command: Literal["eigen"] = "eigen"
    potential: Literal["harmonic", "shifted", "case_a", "case_b"] = "harmonic"
    shift: float = 1.0
    theta: float = 0.0
    N: int = Field(32, ge=4, le=256)
    count: int = Field(5, ge=0)
    tol: float = Field(1e-10, gt=0)
    vector_tol: float = Field(1e-6, gt=0)

    @model_validator(mode="after")
    def _count(self):
        if self.count > self.N:
            raise ValueError("count must not exceed N")
        if self.potential == "case_b" and not -math.pi / 2 < self.theta < math.pi / 2:
            raise ValueError("theta must lie in (-pi/2, pi/2)")
        return self


class NonlinearConfig(_Base):
    command: Literal["nonlinear"] = "nonlinear"
    k: int = Field(3, ge=2)
    u0: float = Field(0.3, gt=0)
    N: int = Field(64, ge=8, le=256)
    noise: float = Field(0.01, ge=0)
    max_iter: int = Field(8, ge=1)
    tol_l2: float = Field(1e-6, gt=0)
    tol_residual: float = Field(1e-11, gt=0)
    continuation_from: float | None = Field(None, gt=0)
    continuation_steps: int = Field(5, ge=1)


class SingularitiesConfig(_Base):
    command: Literal["singularities"] = "singularities"
    case: Literal["B", "C"] = "C"
    theta: float = 0.0
    k: int = Field(3, ge=2)
    u0: float = Field(0.3, gt=0)
    count: int = Field(8, ge=1, le=60)
    tol: float = Field(1e-9, gt=0)
    trend_width: float = Field(0.15, gt=0)
    census_radius: float | None = Field(None, gt=1.0)


class DecayConfig(_Base):
    command: Literal["decay"] = "decay"
    target: Literal["hermite", "case_a", "case_c"] = "hermite"
    n: int = Field(0, ge=0)
    k: int = Field(3, ge=2)
    u0: float = Field(0.3, gt=0)
    window: tuple[float, float] = (2.0, 5.0)
    samples: int = Field(41, ge=8)
    c_min: float = 0.499
    c_max: float = 0.501


class NormsConfig(_Base):
    command: Literal["norms"] = "norms"
    target: Literal["hermite", "harmonic_series"] = "hermite"
    n: int = Field(0, ge=0)
    length: int = Field(40, ge=1)
    s: int = Field(0, ge=0)
    eps: list[float] = Field(default_factory=lambda: [0.05, 0.1, 0.2])
    N_values: list[int] = Field(default_factory=lambda: [1, 8, 16, 20, 24])
    N_max: int = Field(24, ge=8)
    quad_order: int = Field(3, ge=0, le=8)
    expect_threshold_positive: bool = True


class SectorConfig(_Base):
    command: Literal["sector"] = "sector"
    target: Literal["hermite", "case_b", "case_c"] = "hermite"
    n: int = Field(0, ge=0)
    theta: float = 0.0
    k: int = Field(3, ge=2)
    u0: float = Field(0.3, gt=0)
    eps: float = Field(0.3, gt=0)
    c: float = 0.3
    x_max: float = Field(8.0, gt=0)
    rays: int = Field(5, ge=1)
    n_x: int = Field(46, ge=2)
    expect_singularity: bool | None = False
    certify: bool = True
    order: int = Field(12, ge=2, le=40)


SymbolName = Literal["tanh", "tanh_rotated", "rational", "exp", "polynomial"]
MetricName = Literal["hyperboloid1", "hyperboloid2", "euclidean1", "euclidean2", "growing"]


class SymbolsConfig(_Base):
    command: Literal["symbols"] = "symbols"
    functions: list[SymbolName] = Field(default_factory=lambda: ["tanh", "rational", "exp"])
    metrics: list[MetricName] = Field(default_factory=lambda: ["hyperboloid1", "euclidean1", "growing"])
    K: int = Field(16, ge=1, le=40)
    metric_K: int = Field(12, ge=1, le=20)
    extent: float = Field(20.0, gt=0)
    step: float = Field(0.25, gt=0)
    metric_extent: float = Field(30.0, gt=0)
    theta: float = 0.3


class EllipticConfig(_Base):
    command: Literal["elliptic"] = "elliptic"
    symbol: Literal["harmonic", "harmonic_plus", "xi_squared"] = "harmonic"
    m: float = 2.0
    R: float = Field(1.0, gt=0)
    r_max: float = Field(50.0, gt=0)
    n_r: int = Field(200, ge=2)
    n_theta: int = Field(400, ge=8)
    expected: float | None = 0.125
    tol: float = Field(1e-3, gt=0)
    lower_bound: float | None = None


class IdentitiesConfig(_Base):
    command: Literal["identities"] = "identities"
    top: int = Field(5, ge=1, le=6)
    dims: list[int] = Field(default_factory=lambda: [1, 2, 3])
    operator_order: int = Field(4, ge=0, le=8)
    fd_points: int = Field(5, ge=1)
    fd_order: int = Field(8, ge=0, le=12)
    reflection_points: int = Field(20, ge=1)
    hyperbola_points: int = Field(50, ge=1)

    @field_validator("dims")
    @classmethod
    def _dims(cls, v):
        if not v or any(d not in (1, 2, 3) for d in v):
            raise ValueError("dims must be a nonempty subset of {1, 2, 3}")
        return v


ExperimentConfig = Annotated[
    Union[
        EigenConfig,
        NonlinearConfig,
        SingularitiesConfig,
        DecayConfig,
        NormsConfig,
        SectorConfig,
        SymbolsConfig,
        EllipticConfig,
        IdentitiesConfig,
    ],
    Field(discriminator="command"),
]
CONFIG_ADAPTER = TypeAdapter(ExperimentConfig)
COMMANDS = ("eigen", "nonlinear", "singularities", "decay", "norms", "sector", "symbols", "elliptic", "identities")


def load_config(path: str | os.PathLike, command: str | None = None, seed: int | None = None):
    """Read a YAML or JSON mapping and validate it.

    A missing ``command`` key is filled from ``command``; a conflicting one
    is an error. ``seed`` overrides the file.
    """
    text = Path(path).read_text()
    data = yaml.safe_load(text) if text.strip() else {}
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValueError("config must be a key-value mapping")
    if command is not None:
        if data.get("command", command) != command:
            raise ValueError(f"config command {data['command']!r} does not match {command!r}")
        data["command"] = command
    if seed is not None:
        data["seed"] = seed
    return CONFIG_ADAPTER.validate_python(data)


def experiment_id(config) -> str:
    blob = json.dumps(config.model_dump(mode="json", exclude={"output_dir"}), sort_keys=True)
    return f"{config.command}-{hashlib.sha256(blob.encode()).hexdigest()[:12]}"


# -- files ------------------------------------------------------------------


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_outputs(report: VerificationReport, out_dir: str | os.PathLike, tables: dict[str, tuple[list[str], list]] | None = None, argv=None) -> list[Path]:
    out = Path(out_dir)
    written = []
    p = out / "report.json"
    atomic_write(p, report.to_json())
    written.append(p)
    for name, (header, rows) in sorted((tables or {}).items()):
        p = out / f"{name}.csv"
        atomic_write(p, csv_text(header, rows))
        written.append(p)
    from . import __version__

    meta = {
        "experiment_id": report.experiment_id,
        "created": datetime.now(timezone.utc).isoformat(),
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "argv": list(argv) if argv is not None else None,
        "files": [w.name for w in written],
    }
    p = out / "metadata.json"
    atomic_write(p, json.dumps(meta, sort_keys=True, indent=2) + "\n")
    written.append(p)
    return written
