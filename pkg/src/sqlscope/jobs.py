"""Job specifications: validation and execution shared by CLI and service.

A job binds a dataset to either a discovery run (target + measure + search)
or a summarization run (prediction attribute + K + search). Validation
collects every problem before anything runs, so callers can surface complete
field-level reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from sqlscope.errors import ConfigError
from sqlscope.quality import MEASURE_KINDS, QualityMeasureSpec, build_measure
from sqlscope.schema import Role
from sqlscope.search import SearchConfig, discover
from sqlscope.summarize import summarize
from sqlscope.table import DataTable

PUBLIC_MEASURES = tuple(k for k in MEASURE_KINDS if k != "fidelity_gain")


@dataclass(frozen=True)
class JobSpec:
    dataset_id: str
    mode: str = "discover"  # discover | summarize
    target_attr: str | None = None
    measure: QualityMeasureSpec = field(default_factory=lambda: QualityMeasureSpec(kind="wracc"))
    search: SearchConfig = field(default_factory=SearchConfig)
    exclusions: frozenset[str] = field(default_factory=frozenset)
    prediction_attr: str | None = None
    k: int = 3
    restrict_to: tuple[str, int] | None = None  # (job_id, subgroup index) provenance

    def to_json(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "mode": self.mode,
            "target_attr": self.target_attr,
            "measure": self.measure.to_json(),
            "search": self.search.to_json(),
            "exclusions": sorted(self.exclusions),
            "prediction_attr": self.prediction_attr,
            "k": self.k,
            "restrict_to": (
                {"job_id": self.restrict_to[0], "subgroup": self.restrict_to[1]}
                if self.restrict_to
                else None
            ),
        }

    @staticmethod
    def from_json(obj: dict) -> "JobSpec":
        restrict = obj.get("restrict_to")
        return JobSpec(
            dataset_id=obj.get("dataset_id", ""),
            mode=obj.get("mode", "discover"),
            target_attr=obj.get("target_attr"),
            measure=QualityMeasureSpec.from_json(obj.get("measure", {"kind": "wracc"})),
            search=SearchConfig.from_json(obj.get("search", {})),
            exclusions=frozenset(obj.get("exclusions", ())),
            prediction_attr=obj.get("prediction_attr"),
            k=int(obj.get("k", 3)),
            restrict_to=(restrict["job_id"], int(restrict["subgroup"])) if restrict else None,
        )


def validate_job(spec: JobSpec, table: DataTable) -> list[str]:
    """Every validation problem, as 'field: message' strings."""
    errors: list[str] = []
    if spec.mode not in ("discover", "summarize"):
        errors.append(f"mode: must be 'discover' or 'summarize', got {spec.mode!r}")
        return errors
    errors += [f"search: {e}" for e in spec.search.validate()]

    for name in sorted(spec.exclusions):
        if name not in table.schema:
            errors.append(f"exclusions: unknown attribute {name!r}")
        elif table.attribute(name).role is not Role.DESCRIPTIVE:
            errors.append(f"exclusions: attribute {name!r} is not descriptive")

    if spec.mode == "discover":
        errors += [f"measure: {e}" for e in spec.measure.validate()]
        if spec.measure.kind not in PUBLIC_MEASURES:
            errors.append(
                f"measure: kind must be one of {', '.join(PUBLIC_MEASURES)} for discover jobs"
            )
        if spec.target_attr is None:
            errors.append("target_attr: required for discover jobs")
        elif spec.target_attr not in table.schema:
            errors.append(f"target_attr: unknown attribute {spec.target_attr!r}")
        elif table.attribute(spec.target_attr).role is Role.META:
            errors.append(f"target_attr: {spec.target_attr!r} is a meta attribute")
        elif not errors:
            # Constructing the measure validates kind/target compatibility and
            # the positive class without running anything.
            try:
                build_measure(spec.measure, table.with_target(spec.target_attr))
            except Exception as exc:  # MeasureError and schema errors alike
                errors.append(f"measure: {exc}")
    else:
        if spec.prediction_attr is None:
            errors.append("prediction_attr: required for summarize jobs")
        elif spec.prediction_attr not in table.schema:
            errors.append(f"prediction_attr: unknown attribute {spec.prediction_attr!r}")
        elif table.attribute(spec.prediction_attr).kind.value != "nominal":
            errors.append(f"prediction_attr: {spec.prediction_attr!r} must be nominal")
        if spec.k < 1:
            errors.append(f"k: must be >= 1, got {spec.k}")
    return errors


def run_job(spec: JobSpec, table: DataTable) -> dict:
    """Execute a validated job; returns the result payload."""
    errors = validate_job(spec, table)
    if errors:
        raise ConfigError(errors)
    config = replace(spec.search, exclude_attrs=spec.search.exclude_attrs | spec.exclusions)
    if spec.mode == "discover":
        result = discover(
            table.with_target(spec.target_attr), spec.measure, config, dataset_id=spec.dataset_id
        )
        return result.to_json()
    summary = summarize(table, spec.prediction_attr, spec.k, config, dataset_id=spec.dataset_id)
    return summary.to_json()
