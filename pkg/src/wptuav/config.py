"""Scenario configuration and the flat key = value config file format.

All powers are linear milliwatts and all gains are linear ratios inside the
package; decibel forms exist only at the parsing boundary. A config file is
one `key = value` per line with `#` comments. Keys suffixed `_db` or `_dbm`
are converted to the linear field they name (`beta0_db = -40` sets
`beta0 = 1e-4`).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass


class ConfigError(ValueError):
    """Raised for unknown keys, malformed lines, or out-of-range values."""


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical and protocol parameters for one scenario.

    L: number of APs; N: antennas per AP (the cellular BS has L*N).
    H: UAV altitude in meters; area_side: side of the square deployment area.
    tau_c, tau_p: channel uses per coherence block and per pilot phase.
    rho: fraction of the non-pilot block used for downlink energy transfer.
    kappa: hardware quality factor in [0, 1] (1 = ideal hardware).
    beta0: channel gain at 1 m reference distance (linear).
    sigma2: noise power (mW). p_d_cf, p_d_c: downlink powers (mW) for the
    cell-free APs and the cellular BS. sc_power_scale: multiplier applied to
    p_d_cf for the single small-cell AP (None means L, i.e. the same total
    radiated power as the cell-free deployment).
    p0_pilot: slot-0 pilot power (mW) from the UAV's initial energy.
    V_hor, T_block: UAV speed (m/s) and block duration (s); the per-slot step
    is their product. M: angle-search candidate count. N_slot_max: slot cap.
    d_H: antenna spacing in wavelengths; asd_deg: angular standard deviation
    of local scattering; n_clusters: scattering cluster count.
    p_te, p_te_u: terrestrial user pilot and data powers (mW); tue_enabled
    switches terrestrial interference on. sc_tue_serving: which AP's
    terrestrial pickup enters the small-cell harvested energy ("energy" =
    the energy-serving AP, "se" = caller-tracked data-serving AP).
    bs_x, bs_y: cellular base-station coordinates; None places it at the
    square center.
    tabu_radius_factor: angle-search revisit radius as a fraction of d_min;
    smaller values let the planner dwell longer near high-SE regions before
    the no-revisit rule forces it onward.
    """

    L: int = 20
    N: int = 2
    H: float = 20.0
    area_side: float = 100.0
    tau_c: float = 200.0
    tau_p: float = 1.0
    rho: float = 0.5
    kappa: float = 0.98
    beta0: float = 1e-4
    sigma2: float = 10.0 ** (-9.6)
    p_d_cf: float = 1000.0
    p_d_c: float = 1000.0
    sc_power_scale: float | None = None
    p0_pilot: float = 10.0 ** 0.1
    V_hor: float = 20.0
    T_block: float = 0.002
    M: int = 10
    N_slot_max: int = 20000
    d_H: float = 0.5
    asd_deg: float = 10.0
    n_clusters: int = 6
    p_te: float = 10.0 ** 0.1
    p_te_u: float = 10.0 ** 0.1
    tue_enabled: bool = False
    sc_tue_serving: str = "energy"
    bs_x: float | None = None
    bs_y: float | None = None
    tabu_radius_factor: float = 0.5
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.L < 1 or self.N < 1:
            raise ConfigError("L and N must be >= 1")
        if not (0.0 <= self.rho <= 1.0):
            raise ConfigError("rho must lie in [0, 1]")
        if not (0.0 <= self.kappa <= 1.0):
            raise ConfigError("kappa must lie in [0, 1]")
        if self.tau_p < 1.0:
            raise ConfigError("tau_p must be >= 1")
        if self.tau_c <= self.tau_p:
            raise ConfigError("tau_c must exceed tau_p")
        if self.area_side < 0.0:
            raise ConfigError("area_side must be >= 0")
        if self.H <= 0.0:
            raise ConfigError("H must be > 0")
        if self.V_hor * self.T_block <= 0.0:
            raise ConfigError("V_hor * T_block must be > 0")
        if self.sigma2 <= 0.0:
            raise ConfigError("sigma2 must be > 0")
        for name in ("beta0", "p_d_cf", "p_d_c", "p0_pilot", "p_te", "p_te_u"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} must be >= 0")
        if self.sc_power_scale is not None and self.sc_power_scale <= 0.0:
            raise ConfigError("sc_power_scale must be > 0")
        if self.M < 2:
            raise ConfigError("M must be >= 2")
        if self.n_clusters < 1:
            raise ConfigError("n_clusters must be >= 1")
        if self.asd_deg < 0.0:
            raise ConfigError("asd_deg must be >= 0")
        if not (0.0 < self.d_H <= 0.5):
            raise ConfigError("d_H must lie in (0, 0.5]")
        if self.sc_tue_serving not in ("energy", "se"):
            raise ConfigError("sc_tue_serving must be 'energy' or 'se'")
        if self.tabu_radius_factor <= 0.0:
            raise ConfigError("tabu_radius_factor must be > 0")

    @property
    def tau_e(self) -> float:
        """Energy-harvest channel uses, real-valued by design."""
        return self.rho * (self.tau_c - self.tau_p)

    @property
    def d_min(self) -> float:
        """Per-slot UAV displacement in meters."""
        return self.V_hor * self.T_block

    @property
    def prelog(self) -> float:
        return (self.tau_c - self.tau_p - self.tau_e) / self.tau_c

    @property
    def pilot_share(self) -> float:
        """Share of harvested energy reserved for the next pilot."""
        return self.tau_p / (self.tau_c - self.tau_e)

    @property
    def p_d_sc(self) -> float:
        scale = self.L if self.sc_power_scale is None else self.sc_power_scale
        return scale * self.p_d_cf

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["tau_e"] = self.tau_e
        out["d_min"] = self.d_min
        return out


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}
_INT_FIELDS = {"L", "N", "M", "N_slot_max", "n_clusters", "rng_seed"}
_BOOL_FIELDS = {"tue_enabled"}
_STR_FIELDS = {"sc_tue_serving"}

# Keys accepted with a decibel suffix; value converted to the linear field.
_DB_KEYS = {
    "beta0_db": "beta0",
    "sigma2_dbm": "sigma2",
    "p_d_cf_dbm": "p_d_cf",
    "p_d_c_dbm": "p_d_c",
    "p0_pilot_dbm": "p0_pilot",
    "p_te_dbm": "p_te",
    "p_te_u_dbm": "p_te_u",
}


def _parse_scalar(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _BOOL_FIELDS:
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if key in _STR_FIELDS:
            return raw
        if key in _INT_FIELDS:
            return int(raw)
        if key in ("sc_power_scale", "bs_x", "bs_y") and raw.lower() == "none":
            return None
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc


def config_from_pairs(pairs: dict[str, str], base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Build a config from raw string pairs, resolving decibel-suffixed keys."""
    values = dataclasses.asdict(base) if base is not None else {}
    if not values:
        values = dataclasses.asdict(ScenarioConfig())
    for key, raw in pairs.items():
        if key in _DB_KEYS:
            target = _DB_KEYS[key]
            values[target] = db_to_linear(_parse_scalar(target, raw))
        elif key in _FIELD_TYPES:
            values[key] = _parse_scalar(key, raw)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return ScenarioConfig(**values)


def parse_config_text(text: str) -> dict[str, str]:
    """Parse `key = value` lines into raw string pairs.

    Blank lines and `#` comments (full-line or trailing) are ignored.
    Duplicate keys are an error so typos do not silently win.
    """
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = body.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = raw.strip()
    return pairs


def load_config(path: str, overrides: dict[str, str] | None = None) -> ScenarioConfig:
    """Load a config file, then apply overrides (CLI flags beat file keys)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    pairs = parse_config_text(text)
    cfg = config_from_pairs(pairs)
    if overrides:
        cfg = config_from_pairs(overrides, base=cfg)
    return cfg
