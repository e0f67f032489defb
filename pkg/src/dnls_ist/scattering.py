"""The scattering-data model: reflection coefficients on a real grid, a finite
list of poles with norming constants, and the lower bound c0 entering the
negative-axis positivity constraint.

Structural constraints carried by the data:

    r-(z) = 4 z r+(z)                       (reflection relation)
    1 + conj(r+) r- >= 1      for z > 0
    1 + conj(r+) r- >= c0^2   for z < 0

Both sides of the positivity constraint equal 1/|a(z)|^2 on data produced by the
forward map; c0 is stored because the inverse side has no access to a. Time
evolution is exact and closed-form:

    r±(z; t) = r±(z; 0) e^{4 i z^2 t},    c_k(t) = c_k(0) e^{4 i z_k^2 t},

poles and c0 unchanged. The persistence assumption behind the evolution (the
solution staying in H^2 ∩ H^{1,1} with no resonances and simple eigenvalues on
the time interval) is not observable from the data and is recorded here as an
assumption only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConstraintError, SchemaError, ValidationError
from .grids import GridFunction, RealGrid
from .solitons import first_quadrant_sqrt

RELATION_TOL = 1e-12        # r- = 4 z r+ holds by construction; checked on load
POSITIVITY_SLACK = 1e-9     # numerical slack on the >= constraints


@dataclass(frozen=True)
class PoleData:
    """One simple pole: z in the upper half plane, lam^2 = z in the first
    quadrant, nonzero norming constant c."""

    z: complex
    lam: complex
    c: complex

    def __post_init__(self):
        if self.z.imag <= 0:
            raise ValidationError(f"pole must satisfy Im z > 0, got {self.z}")
        if abs(self.lam**2 - self.z) > 1e-12*max(1.0, abs(self.z)):
            raise ValidationError(f"lam^2 != z for pole {self.z}")
        if self.lam.real < 0 or self.lam.imag < 0:
            raise ValidationError(f"lam must lie in the first quadrant, got {self.lam}")
        if self.c == 0:
            raise ValidationError("norming constant must be nonzero")

    @classmethod
    def from_z_c(cls, z: complex, c: complex) -> "PoleData":
        return cls(z=complex(z), lam=first_quadrant_sqrt(z), c=complex(c))


@dataclass(frozen=True)
class ScatteringData:
    """{r±; (z_k, lam_k, c_k); c0} on a real z-grid. Immutable value type."""

    zgrid: RealGrid
    r_plus: GridFunction
    r_minus: GridFunction
    poles: tuple[PoleData, ...] = ()
    c0: float = 1.0

    def __post_init__(self):
        if self.r_plus.grid != self.zgrid or self.r_minus.grid != self.zgrid:
            raise ValidationError("reflection coefficients must live on zgrid")
        if not (0.0 < self.c0 <= 1.0 + 1e-12):
            raise ValidationError(f"c0 must lie in (0, 1], got {self.c0}")
        zs = [p.z for p in self.poles]
        if len(set(np.round(np.array(zs), 14))) != len(zs):
            raise ValidationError("poles must be pairwise distinct")

    @classmethod
    def reflectionless(cls, poles, zgrid: RealGrid | None = None,
                       c0: float = 1.0) -> "ScatteringData":
        if zgrid is None:
            zgrid = RealGrid.symmetric(30.0, 256)
        pd = tuple(p if isinstance(p, PoleData) else PoleData.from_z_c(*p)
                   for p in poles)
        return cls(zgrid=zgrid, r_plus=GridFunction.zeros(zgrid),
                   r_minus=GridFunction.zeros(zgrid), poles=pd, c0=c0)

    # --- constraints ---

    def validate(self) -> list[tuple[str, bool, float]]:
        """Per-constraint (name, passed, worst violation); pure report."""
        z = self.zgrid.points()
        rp, rm = self.r_plus.values, self.r_minus.values
        rel = np.abs(rm - 4*z*rp)
        scale = max(1.0, float(np.max(np.abs(rm))))
        rel_worst = float(np.max(rel))/scale
        body = 1.0 + np.conj(rp)*rm
        imag_worst = float(np.max(np.abs(body.imag)))
        pos = z > 0
        neg = z < 0
        pos_worst = float(np.max(np.maximum(1.0 - body.real[pos], 0.0))) if pos.any() else 0.0
        neg_worst = float(np.max(np.maximum(self.c0**2 - body.real[neg], 0.0))) if neg.any() else 0.0
        checks = [
            ("reflection relation r- = 4 z r+", rel_worst <= RELATION_TOL, rel_worst),
            ("1 + conj(r+) r- is real", imag_worst <= 1e-10, imag_worst),
            ("1 + conj(r+) r- >= 1 on z > 0", pos_worst <= POSITIVITY_SLACK, pos_worst),
            ("1 + conj(r+) r- >= c0^2 on z < 0", neg_worst <= POSITIVITY_SLACK, neg_worst),
        ]
        lam_worst = max((abs(p.lam**2 - p.z) for p in self.poles), default=0.0)
        checks.append(("lam_k^2 = z_k", lam_worst <= 1e-12, lam_worst))
        return checks

    def require_valid(self) -> None:
        failed = [(name, worst) for name, ok, worst in self.validate() if not ok]
        if failed:
            raise ConstraintError("scattering data violate: " + "; ".join(
                f"{name} (worst {worst:.3e})" for name, worst in failed))

    def reflection_size(self) -> float:
        return float(max(np.max(np.abs(self.r_plus.values)),
                         np.max(np.abs(self.r_minus.values))))

    # --- exact time evolution ---

    def evolve(self, t: float) -> "ScatteringData":
        """Advance the data by time t: r± pick up e^{4iz^2 t}, c_k pick up
        e^{4 i z_k^2 t}; poles and c0 are invariants of the flow."""
        z = self.zgrid.points()
        phase = np.exp(4j*z**2*t)
        poles = tuple(replace(p, c=p.c*np.exp(4j*p.z**2*t)) for p in self.poles)
        return ScatteringData(
            zgrid=self.zgrid,
            r_plus=GridFunction(self.zgrid, self.r_plus.values*phase),
            r_minus=GridFunction(self.zgrid, self.r_minus.values*phase),
            poles=poles, c0=self.c0)

    # --- serialization (JSON document, version dnls-ist/1) ---

    def to_dict(self) -> dict:
        return {
            "version": "dnls-ist/1",
            "grid": {"z_min": self.zgrid.z_min, "z_max": self.zgrid.z_max,
                     "n": self.zgrid.n},
            "r_plus": [[v.real, v.imag] for v in self.r_plus.values],
            "r_minus": [[v.real, v.imag] for v in self.r_minus.values],
            "poles": [{"z": [p.z.real, p.z.imag],
                       "lambda": [p.lam.real, p.lam.imag],
                       "c": [p.c.real, p.c.imag]} for p in self.poles],
            "c0": self.c0,
        }

    @classmethod
    def from_dict(cls, doc: dict, strict: bool = True) -> "ScatteringData":
        if doc.get("version") != "dnls-ist/1":
            raise SchemaError(f"unsupported document version {doc.get('version')!r}")
        try:
            g = doc["grid"]
            grid = RealGrid(float(g["z_min"]), float(g["z_max"]), int(g["n"]))
            rp = np.array([complex(a, b) for a, b in doc["r_plus"]])
            rm = np.array([complex(a, b) for a, b in doc["r_minus"]])
            poles = []
            for p in doc["poles"]:
                z = complex(*p["z"])
                if z.imag <= 0:
                    raise SchemaError(f"pole {z} not in the upper half plane")
                c = complex(*p["c"])
                if "lambda" in p:
                    lam = complex(*p["lambda"])
                    if abs(lam**2 - z) > 1e-12*max(1.0, abs(z)):
                        lam = first_quadrant_sqrt(z)   # stale field: recompute
                else:
                    lam = first_quadrant_sqrt(z)
                poles.append(PoleData(z=z, lam=lam, c=c))
            c0 = float(doc["c0"])
        except (KeyError, TypeError, IndexError) as exc:
            raise SchemaError(f"malformed scattering-data document: {exc}") from exc
        data = cls(zgrid=grid, r_plus=GridFunction(grid, rp),
                   r_minus=GridFunction(grid, rm), poles=tuple(poles), c0=c0)
        if strict:
            data.require_valid()
        return data

    def to_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f)

    @classmethod
    def from_json(cls, path, strict: bool = True) -> "ScatteringData":
        with open(path) as f:
            return cls.from_dict(json.load(f), strict=strict)
