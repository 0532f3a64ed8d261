"""Run configuration, stored as JSON.

Schema (all keys optional; defaults shown)::

    {
      "eps":        [1e-2, 1e-3, 1e-4, 1e-6, 1e-8],
      "b_id":       "one",
      "f_id":       "one",
      "mesh_kinds": ["shishkin", "exp", "bs", "uniform"],
      "N":          [16, 32, 64, 128, 256],
      "quad_order": 5,
      "oracle_N":   null,          # null: 16 * max(N), rounded up to >= 4096
      "out_dir":    "out",
      "seed":       0,
      "jobs":       1
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

from ..errors import BadN, EpsilonOutOfRange
from ..mesh import MeshKind
from ..problem import get_coefficient

DEFAULT_EPS = (1e-2, 1e-3, 1e-4, 1e-6, 1e-8)
DEFAULT_N = (16, 32, 64, 128, 256)
DEFAULT_KINDS = ("shishkin", "exp", "bs", "uniform")


@dataclass(frozen=True)
class RunConfig:
    eps: tuple = DEFAULT_EPS
    b_id: str = "one"
    f_id: str = "one"
    mesh_kinds: tuple = DEFAULT_KINDS
    N: tuple = DEFAULT_N
    quad_order: int = 5
    oracle_N: int | None = None
    out_dir: str = "out"
    seed: int = 0
    jobs: int = 1
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        object.__setattr__(self, "N", tuple(int(n) for n in self.N))
        kinds = tuple(MeshKind.parse(k).value for k in self.mesh_kinds)
        object.__setattr__(self, "mesh_kinds", kinds)
        self.validate()

    def validate(self):
        for e in self.eps:
            if not (0.0 < e <= 1.0) or not math.isfinite(e):
                raise EpsilonOutOfRange(f"epsilon must lie in (0, 1], got {e!r}")
        for n in self.N:
            if n < 4 or n % 4:
                raise BadN(f"N must be >= 4 and divisible by 4, got {n}")
        get_coefficient(self.b_id)
        get_coefficient(self.f_id)
        if self.quad_order < 2:
            raise ValueError("quad_order must be >= 2")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.oracle_N is not None and (self.oracle_N % 4 or self.oracle_N < 4096):
            raise ValueError("oracle_N must be divisible by 4 and >= 4096")

    @property
    def effective_oracle_N(self) -> int:
        if self.oracle_N is not None:
            return self.oracle_N
        return max(4096, 16 * max(self.N, default=256))

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        d["eps"] = list(self.eps)
        d["N"] = list(self.N)
        d["mesh_kinds"] = list(self.mesh_kinds)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__ if f != "extra"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())
