"""Campaign configuration and run reports (JSON documents with a schema tag)."""
from __future__ import annotations

import copy
import fnmatch
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .instances import make_instance
from .limits import AbsoluteSchedule
from .verifier import SampleSpec

CONFIG_SCHEMA = "emergent-config/1"
REPORT_SCHEMA = "emergent-report/1"


PROPERTIES = ("LIN", "COLIN", "SHUFFLE", "theorem2", "theorem3")


class ConfigError(ValueError):
    pass


DEFAULT_CONFIG = {
    "schema": CONFIG_SCHEMA,
    "instances": ["vector:1", "vector:3", "unipotent:2", "unipotent:3", "unipotent:4",
                  "unipotent:5", "sphere"],
    # what "property all" runs
    "properties": list(PROPERTIES),
    "sample": {"seed": 0, "count": 1000, "scalar_range": [0.25, 4.0]},
    # per-kind sampler spread; the sphere default keeps chained dilations inside exp/log range
    "spread": {"sphere": 0.5},
    "schedule": {"start": 0.5, "ratio": 0.5, "max_steps": 48},
    "tolerances": {"pass": 1e-9, "fail": 1e-3, "limit": 1e-6},
    # the (em) campaign nests two limits per sample, so it runs on fewer samples;
    # unipotent n >= 3 is evaluated in exact rational arithmetic
    "em": {"count": 50, "exact_count": 8, "exact_unipotent": True},
    "expected": {
        "vector:*": {"LIN": "pass", "COLIN": "pass", "SHUFFLE": "pass"},
        "flat:*": {"LIN": "pass", "COLIN": "pass", "SHUFFLE": "pass"},
        "unipotent:2": {"LIN": "pass", "COLIN": "pass", "SHUFFLE": "pass"},
        "unipotent:[3-8]": {"LIN": "pass", "COLIN": "fail", "SHUFFLE": "fail"},
        "sphere": {"LIN": "fail"},
    },
    "curvature": {"a": [0.2, 0.1, 0.05, 0.025], "slope": [1.85, 2.15]},
}


@dataclass
class CampaignConfig:
    instances: list
    properties: list
    sample: SampleSpec
    schedule: AbsoluteSchedule
    pass_tol: float
    fail_tol: float
    limit_tol: float
    spread: dict
    em: dict
    expected: dict
    curvature: dict
    raw: dict = field(repr=False, default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        merged = copy.deepcopy(DEFAULT_CONFIG)
        for key, val in d.items():
            if isinstance(val, dict) and isinstance(merged.get(key), dict) and key != "expected":
                merged[key].update(val)
            else:
                merged[key] = val
        if merged.get("schema") != CONFIG_SCHEMA:
            raise ConfigError(f"unsupported config schema {merged.get('schema')!r}")
        try:
            for desc in merged["instances"]:
                make_instance(desc)
            s = merged["sample"]
            sample = SampleSpec(int(s["seed"]), int(s["count"]), tuple(s["scalar_range"]))
            schedule = AbsoluteSchedule(**merged["schedule"])
            tols = merged["tolerances"]
            pass_tol, fail_tol = float(tols["pass"]), float(tols["fail"])
            limit_tol = float(tols["limit"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        unknown = [p for p in merged["properties"] if p not in PROPERTIES]
        if unknown:
            raise ConfigError(f"unknown properties {unknown}; expected a subset of {list(PROPERTIES)}")
        if not 0 < pass_tol < fail_tol:
            raise ConfigError("tolerances must satisfy 0 < pass < fail")
        for pattern, exp in merged["expected"].items():
            for law, verdict in exp.items():
                if verdict not in ("pass", "fail"):
                    raise ConfigError(f"expected verdict for {pattern}/{law} must be pass or fail")
        return cls(list(merged["instances"]), list(merged["properties"]), sample, schedule,
                   pass_tol, fail_tol, limit_tol,
                   dict(merged["spread"]), dict(merged["em"]), dict(merged["expected"]),
                   dict(merged["curvature"]), merged)

    @classmethod
    def load(cls, path) -> "CampaignConfig":
        try:
            d = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(d)

    def sample_for(self, descriptor: str, count=None) -> SampleSpec:
        kind = descriptor.partition(":")[0]
        s = self.sample
        return SampleSpec(s.seed, count or s.count, s.scalar_range, self.spread.get(kind))

    def expectation(self, descriptor: str, law: str):
        for pattern, exp in self.expected.items():
            if fnmatch.fnmatchcase(descriptor, pattern) and law in exp:
                return exp[law]
        return None

    def echo(self) -> dict:
        out = copy.deepcopy(self.raw)
        out["instances"] = list(self.instances)
        out["sample"] = {"seed": self.sample.seed, "count": self.sample.count,
                         "scalar_range": list(self.sample.scalar_range)}
        out["schedule"] = asdict(self.schedule)
        out["tolerances"] = {"pass": self.pass_tol, "fail": self.fail_tol, "limit": self.limit_tol}
        return out


@dataclass
class RunReport:
    command: str
    seed: int
    config: dict
    results: dict = field(default_factory=dict)       # instance -> property -> PropertyReport dict
    expectations: list = field(default_factory=list)  # {instance, property, expected, verdict, met}
    solver: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)        # name -> {"columns": [...], "rows": [[...]]}
    exit_code: int = 0
    timings: dict = field(default_factory=dict)
    tool_version: str = __version__
    schema: str = REPORT_SCHEMA

    def to_dict(self) -> dict:
        return asdict(self)

    def body(self) -> dict:
        d = self.to_dict()
        d.pop("timings")
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "RunReport":
        d = json.loads(text)
        if d.get("schema") != REPORT_SCHEMA:
            raise ConfigError(f"unsupported report schema {d.get('schema')!r}")
        return cls(**d)

    def write_tables(self, directory):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name, table in self.tables.items():
            lines = [",".join(table["columns"])]
            lines += [",".join(repr(v) for v in row) for row in table["rows"]]
            (directory / f"{name}.csv").write_text("\n".join(lines) + "\n")
