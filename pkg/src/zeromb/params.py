"""Problem parameters and the horizontal wavenumber lattice of the periodic layer."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Mapping


class BC(str, Enum):
    """Boundary-condition kind at the two horizontal walls z = 0, 1."""

    RIGID = "rigid"
    STRESS_FREE = "stress-free"

    @classmethod
    def parse(cls, value: "BC | str") -> "BC":
        if isinstance(value, BC):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"rigid": cls.RIGID, "no-slip": cls.RIGID, "stress-free": cls.STRESS_FREE,
                   "stressfree": cls.STRESS_FREE, "free": cls.STRESS_FREE}
        if key not in aliases:
            raise ValueError(f"unknown bc {value!r}; expected 'rigid' or 'stress-free'")
        return aliases[key]


@dataclass(frozen=True)
class Params:
    """Dimensionless parameters of the linearized zero-resistivity problem.

    ``R`` is the square root of the Rayleigh number, ``Q`` the Chandrasekhar
    number, ``P_theta`` the Prandtl number and ``tau`` the viscosity weight of
    the linearized family.  Horizontal periods are ``2*pi*L1`` and ``2*pi*L2``.
    """

    R: float
    Q: float = 0.0
    P_theta: float = 1.0
    tau: float = 1.0
    L1: float = 1.0
    L2: float = 1.0
    bc: BC = BC.RIGID

    def __post_init__(self):
        object.__setattr__(self, "bc", BC.parse(self.bc))
        for name in ("R", "Q", "P_theta", "tau", "L1", "L2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.R <= 0:
            raise ValueError("R must be positive")
        if self.Q < 0:
            raise ValueError("Q must be nonnegative")
        if self.P_theta <= 0:
            raise ValueError("P_theta must be positive")
        if not 0 < self.tau <= 1:
            raise ValueError("tau must lie in (0,1]")
        if self.L1 <= 0:
            raise ValueError("L1 must be positive")
        if self.L2 <= 0:
            raise ValueError("L2 must be positive")

    def replace(self, **changes) -> "Params":
        fields = asdict(self)
        fields.update(changes)
        return Params(**fields)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["bc"] = self.bc.value
        return d


def validate_params(raw: Mapping[str, Any]) -> Params:
    """Build :class:`Params` from a loose record (e.g. parsed CLI or config values)."""
    known = {"R", "Q", "P_theta", "tau", "L1", "L2", "bc"}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    if "R" not in raw:
        raise ValueError("R is required")
    kwargs = {}
    for key, value in raw.items():
        if key == "bc":
            kwargs[key] = BC.parse(value)
        else:
            try:
                kwargs[key] = float(value)
            except (TypeError, ValueError):
                raise ValueError(f"{key} must be a real number, got {value!r}") from None
    return Params(**kwargs)


@dataclass(frozen=True)
class Wavenumber:
    k1: float
    k2: float
    a: float
    continuous_flag: bool = False
    n1: int = 0
    n2: int = 0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("wavenumber magnitude must be positive")

    @classmethod
    def continuous(cls, a: float) -> "Wavenumber":
        return cls(k1=float(a), k2=0.0, a=float(a), continuous_flag=True)


def build_lattice(params: Params, a_max: float) -> list[Wavenumber]:
    """All lattice modes with ``0 < a <= a_max``, one per sign class, sorted by (a, k1, k2)."""
    if not a_max > 0:
        raise ValueError("a_max must be positive")
    L1, L2 = params.L1, params.L2
    n1_max = int(math.floor(a_max * L1)) + 1
    n2_max = int(math.floor(a_max * L2)) + 1
    modes = []
    for n1 in range(n1_max + 1):
        for n2 in range(n2_max + 1):
            if n1 == 0 and n2 == 0:
                continue
            k1, k2 = n1 / L1, n2 / L2
            a = math.hypot(k1, k2)
            if a <= a_max:
                modes.append(Wavenumber(k1=k1, k2=k2, a=a, n1=n1, n2=n2))
    modes.sort(key=lambda w: (w.a, w.k1, w.k2))
    return modes
