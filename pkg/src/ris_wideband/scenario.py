"""Experiment configuration: arrays, regions, frequency plan, RF constants.

A Scenario is immutable after construction and safe to share across workers.
Config files are TOML or JSON with sections [arrays], [regions], [frequency],
[rf], [lc], [hyper] (and optionally [channel] / [[reflectors]]). Lengths are
meters, frequencies Hz; powers cross the interface in dBm and are converted
to linear units internally.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .constants import SPEED_OF_LIGHT, db_to_linear, dbm_to_watt

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover - py310 path
    import tomli as tomllib


class ConfigError(ValueError):
    """Config file failed to parse or violated a scenario invariant."""


@dataclass(frozen=True)
class FrequencyPlan:
    center_hz: float
    bandwidth_hz: float
    subcarrier_bandwidth_hz: float
    design_grid: int
    eval_grid: int

    def validate(self):
        if self.center_hz <= 0:
            raise ConfigError("frequency: center_hz must be > 0")
        if not 0 < self.bandwidth_hz < 2 * self.center_hz:
            raise ConfigError("frequency: bandwidth must satisfy 0 < W < 2*f_c")
        if self.subcarrier_bandwidth_hz <= 0:
            raise ConfigError("frequency: subcarrier bandwidth must be > 0")
        if self.design_grid < 1:
            raise ConfigError("frequency: design_grid must be >= 1")
        if self.eval_grid < self.design_grid:
            raise ConfigError("frequency: eval_grid must be >= design_grid")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.center_hz


def frequency_grids(plan: FrequencyPlan):
    """Uniform design/eval grids spanning [f_c - W/2, f_c + W/2] inclusive.

    A one-point grid degenerates to {f_c}.
    """

    def grid(n):
        if n == 1:
            return np.array([plan.center_hz])
        return np.linspace(plan.center_hz - plan.bandwidth_hz / 2,
                           plan.center_hz + plan.bandwidth_hz / 2, n)

    return grid(plan.design_grid), grid(plan.eval_grid)


@dataclass(frozen=True)
class Region:
    lo: tuple
    hi: tuple
    grid: tuple

    def validate(self, name="region"):
        if len(self.lo) != 3 or len(self.hi) != 3 or len(self.grid) != 3:
            raise ConfigError(f"{name}: bounds and grid must be 3-dimensional")
        for a, (l, h) in enumerate(zip(self.lo, self.hi)):
            if l > h:
                raise ConfigError(f"{name}: min > max on axis {a}")
        if any(g < 1 for g in self.grid):
            raise ConfigError(f"{name}: grid counts must be >= 1")

    def overlaps(self, other: "Region") -> bool:
        return all(l1 <= h2 and l2 <= h1
                   for l1, h1, l2, h2 in zip(self.lo, self.hi, other.lo, other.hi))


def sample_region(region: Region) -> np.ndarray:
    """Cartesian grid of sample points, x-major then y then z.

    Singleton axes sample the box midpoint; axes with >= 2 counts include the
    endpoints (linspace).
    """
    axes = []
    for l, h, g in zip(region.lo, region.hi, region.grid):
        if g == 1:
            axes.append(np.array([(l + h) / 2.0]))
        else:
            axes.append(np.linspace(l, h, g))
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)


@dataclass(frozen=True)
class RfConstants:
    transmit_power_w: float
    noise_psd_w_hz: float
    noise_figure: float            # linear
    reference_distance_m: float
    pathloss_exponents: tuple      # (BS-MU, BS-RIS, RIS-MU)
    blockage_loss_db: float
    kbar: tuple = (0.0, 0.1, 0.1)     # deterministic K-factors per channel kind
    ktilde: tuple = (0.0, 0.1, 0.1)   # stochastic K-factors per channel kind

    def validate(self):
        if self.transmit_power_w <= 0:
            raise ConfigError("rf: transmit power must be > 0")
        if self.noise_psd_w_hz <= 0 or self.noise_figure <= 0:
            raise ConfigError("rf: noise PSD and noise figure must be > 0")
        if self.reference_distance_m <= 0:
            raise ConfigError("rf: reference distance must be > 0")
        if len(self.pathloss_exponents) != 3:
            raise ConfigError("rf: pathloss_exponents must be a triple")
        if any(k < 0 for k in self.kbar) or any(k < 0 for k in self.ktilde):
            raise ConfigError("rf: K-factors must be >= 0")

    def noise_power_w(self, subcarrier_bandwidth_hz: float) -> float:
        """sigma_n^2 = W_k * N_0 * N_f."""
        return subcarrier_bandwidth_hz * self.noise_psd_w_hz * self.noise_figure


@dataclass(frozen=True)
class LcMaterial:
    eps_parallel: float
    eps_perp: float
    length_m: float
    voltage_v: tuple          # monotone sample grid of bias voltages
    phase_rad: tuple          # h(v) samples, nondecreasing, range [0, 2*pi]

    def validate(self):
        if not self.eps_parallel >= self.eps_perp > 0:
            raise ConfigError("lc material: need eps_parallel >= eps_perp > 0")
        ph = np.asarray(self.phase_rad)
        if np.any(np.diff(ph) < 0):
            raise ConfigError("lc material: h(v) must be nondecreasing")
        if len(self.voltage_v) != len(self.phase_rad):
            raise ConfigError("lc material: voltage/phase tables differ in length")

    @property
    def birefringence(self) -> float:
        return math.sqrt(self.eps_parallel) - math.sqrt(self.eps_perp)


@dataclass(frozen=True)
class LcParams:
    beta: float
    amplitude: float = 1.0
    material: LcMaterial | None = None

    def validate(self):
        if not 0.0 <= self.amplitude <= 1.0:
            raise ConfigError("lc: amplitude must lie in [0, 1]")
        if self.material is not None:
            self.material.validate()


@dataclass(frozen=True)
class HyperParams:
    eta0: float = 0.0018
    penalty_growth: float = 5.0
    t_max: int = 10
    sdp_j_max: int = 2
    sdp_i_max: int = 9
    scalable_j_max: int = 14
    scalable_i_max: int = 50
    mu: float = 0.05
    gamma0: float = 1.0
    rng_seed: int = 1

    def validate(self):
        if self.eta0 <= 0:
            raise ConfigError("hyper: eta0 must be > 0")
        if self.penalty_growth <= 1:
            raise ConfigError("hyper: penalty_growth must be > 1")
        if self.mu <= 0:
            raise ConfigError("hyper: mu must be > 0")
        if self.gamma0 < 1:
            raise ConfigError("hyper: gamma0 must be >= 1")
        for name in ("t_max", "sdp_j_max", "sdp_i_max", "scalable_j_max", "scalable_i_max"):
            if getattr(self, name) < 1:
                raise ConfigError(f"hyper: {name} must be >= 1")


@dataclass(frozen=True)
class Reflector:
    point: tuple                 # a point on the plane
    normal: tuple                # unit normal
    kbar_scale: float = 1.0      # multiplies the channel-kind K-factor
    ktilde_scale: float = 1.0

    def validate(self):
        n = np.asarray(self.normal, float)
        if not math.isclose(float(np.linalg.norm(n)), 1.0, rel_tol=1e-6):
            raise ConfigError("reflector: normal must be a unit vector")
        if self.kbar_scale < 0 or self.ktilde_scale < 0:
            raise ConfigError("reflector: K-factor scales must be >= 0")


@dataclass(frozen=True)
class Scenario:
    ris_elements: int
    ris_center: tuple
    ris_spacing_m: float
    bs_shape: tuple              # UPA (nx, nz) in the x-z plane
    bs_center: tuple
    bs_spacing_m: float
    user_region: Region
    eve_region: Region
    freq_plan: FrequencyPlan
    rf: RfConstants
    lc: LcParams
    hyper: HyperParams
    reflectors: tuple = ()
    n_random_reflectors: int = 9
    ground_plane_z: float | None = -5.0

    def validate(self):
        if self.ris_elements < 1:
            raise ConfigError("arrays: RIS needs at least one element")
        if any(s < 1 for s in self.bs_shape):
            raise ConfigError("arrays: BS shape counts must be >= 1")
        if self.ris_spacing_m <= 0 or self.bs_spacing_m <= 0:
            raise ConfigError("arrays: element spacings must be > 0")
        self.user_region.validate("user region")
        self.eve_region.validate("eve region")
        if self.user_region.overlaps(self.eve_region):
            raise ConfigError("regions overlap")
        self.freq_plan.validate()
        self.rf.validate()
        self.lc.validate()
        self.hyper.validate()
        for r in self.reflectors:
            r.validate()

    # -- geometry ---------------------------------------------------------
    @property
    def n_bs(self) -> int:
        return self.bs_shape[0] * self.bs_shape[1]

    def ris_positions(self) -> np.ndarray:
        """ULA along y, centered on ris_center."""
        n = self.ris_elements
        pos = np.tile(np.asarray(self.ris_center, float), (n, 1))
        pos[:, 1] += (np.arange(n) - (n - 1) / 2.0) * self.ris_spacing_m
        return pos

    def bs_positions(self) -> np.ndarray:
        """UPA in the x-z plane, centered on bs_center."""
        nx, nz = self.bs_shape
        ox = (np.arange(nx) - (nx - 1) / 2.0) * self.bs_spacing_m
        oz = (np.arange(nz) - (nz - 1) / 2.0) * self.bs_spacing_m
        gx, gz = np.meshgrid(ox, oz, indexing="ij")
        pos = np.tile(np.asarray(self.bs_center, float), (nx * nz, 1))
        pos[:, 0] += gx.ravel()
        pos[:, 2] += gz.ravel()
        return pos

    def user_points(self) -> np.ndarray:
        return sample_region(self.user_region)

    def eve_points(self) -> np.ndarray:
        return sample_region(self.eve_region)

    @property
    def noise_power_w(self) -> float:
        return self.rf.noise_power_w(self.freq_plan.subcarrier_bandwidth_hz)

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return asdict(self)

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=float)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _scenario_from_dict(d: dict) -> Scenario:
    """Rebuild a Scenario from to_dict() output (round-trip identity)."""
    d = dict(d)
    d["user_region"] = Region(**{k: tuple(v) for k, v in d["user_region"].items()})
    d["eve_region"] = Region(**{k: tuple(v) for k, v in d["eve_region"].items()})
    d["freq_plan"] = FrequencyPlan(**d["freq_plan"])
    rf = dict(d["rf"])
    rf["pathloss_exponents"] = tuple(rf["pathloss_exponents"])
    rf["kbar"] = tuple(rf["kbar"])
    rf["ktilde"] = tuple(rf["ktilde"])
    d["rf"] = RfConstants(**rf)
    lc = dict(d["lc"])
    if lc.get("material"):
        m = dict(lc["material"])
        m["voltage_v"] = tuple(m["voltage_v"])
        m["phase_rad"] = tuple(m["phase_rad"])
        lc["material"] = LcMaterial(**m)
    d["lc"] = LcParams(**lc)
    d["hyper"] = HyperParams(**d["hyper"])
    d["reflectors"] = tuple(
        Reflector(point=tuple(r["point"]), normal=tuple(r["normal"]),
                  kbar_scale=r.get("kbar_scale", 1.0), ktilde_scale=r.get("ktilde_scale", 1.0))
        for r in d.get("reflectors", ())
    )
    for key in ("ris_center", "bs_center", "bs_shape"):
        d[key] = tuple(d[key])
    sc = Scenario(**d)
    sc.validate()
    return sc


def _parse_config_text(text: str, suffix: str) -> dict:
    if suffix == ".json":
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"malformed JSON config: {e}") from e
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"malformed TOML config: {e}") from e


def load_scenario(path) -> Scenario:
    """Load and validate a scenario config (TOML or JSON).

    Raises ConfigError naming the violated invariant; omitted hyperparameters
    take the documented defaults.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    raw = _parse_config_text(path.read_text(), path.suffix.lower())

    if "scenario" in raw:  # emitted round-trip format
        return _scenario_from_dict(raw["scenario"])

    freq = raw.get("frequency", {})
    plan = FrequencyPlan(
        center_hz=float(freq.get("center_hz", 60e9)),
        bandwidth_hz=float(freq.get("bandwidth_hz", 8.64e9)),
        subcarrier_bandwidth_hz=float(freq.get("subcarrier_bandwidth_hz", 4.2e6)),
        design_grid=int(freq.get("design_grid", 9)),
        eval_grid=int(freq.get("eval_grid", 101)),
    )
    half_lam = plan.wavelength_m / 2.0

    arrays = raw.get("arrays", {})
    regions = raw.get("regions", {})

    def region_of(key, default_lo, default_hi, default_grid):
        r = regions.get(key, {})
        return Region(lo=tuple(float(x) for x in r.get("min", default_lo)),
                      hi=tuple(float(x) for x in r.get("max", default_hi)),
                      grid=tuple(int(x) for x in r.get("grid", default_grid)))

    rf_raw = raw.get("rf", {})
    rf = RfConstants(
        transmit_power_w=dbm_to_watt(float(rf_raw.get("transmit_power_dbm", 40.0))),
        noise_psd_w_hz=dbm_to_watt(float(rf_raw.get("noise_psd_dbm_hz", -174.0))),
        noise_figure=db_to_linear(float(rf_raw.get("noise_figure_db", 6.0))),
        reference_distance_m=float(rf_raw.get("reference_distance_m", 1.0)),
        pathloss_exponents=tuple(float(x) for x in rf_raw.get("pathloss_exponents", (2.0, 2.0, 2.0))),
        blockage_loss_db=float(rf_raw.get("blockage_loss_db", 40.0)),
        kbar=tuple(float(x) for x in raw.get("channel", {}).get("kbar", (0.0, 0.1, 0.1))),
        ktilde=tuple(float(x) for x in raw.get("channel", {}).get("ktilde", (0.0, 0.1, 0.1))),
    )

    lc_raw = raw.get("lc", {})
    material = None
    if "material" in lc_raw:
        m = lc_raw["material"]
        material = LcMaterial(
            eps_parallel=float(m["eps_parallel"]),
            eps_perp=float(m["eps_perp"]),
            length_m=float(m["length_m"]),
            voltage_v=tuple(float(x) for x in m["voltage_v"]),
            phase_rad=tuple(float(x) for x in m["phase_rad"]),
        )
    lc = LcParams(beta=float(lc_raw.get("beta", 2.4)),
                  amplitude=float(lc_raw.get("amplitude", 1.0)),
                  material=material)

    hyper_raw = raw.get("hyper", {})
    allowed = set(HyperParams.__dataclass_fields__)
    unknown = set(hyper_raw) - allowed
    if unknown:
        raise ConfigError(f"hyper: unknown keys {sorted(unknown)}")
    hyper = HyperParams(**hyper_raw)

    chan = raw.get("channel", {})
    reflectors = tuple(
        Reflector(point=tuple(float(x) for x in r["point"]),
                  normal=tuple(float(x) for x in r["normal"]),
                  kbar_scale=float(r.get("kbar_scale", 1.0)),
                  ktilde_scale=float(r.get("ktilde_scale", 1.0)))
        for r in raw.get("reflectors", [])
    )

    sc = Scenario(
        ris_elements=int(arrays.get("ris_elements", 100)),
        ris_center=tuple(float(x) for x in arrays.get("ris_center", (0.0, 0.0, 0.0))),
        ris_spacing_m=float(arrays.get("ris_spacing_m", half_lam)),
        bs_shape=tuple(int(x) for x in arrays.get("bs_shape", (16, 16))),
        bs_center=tuple(float(x) for x in arrays.get("bs_center", (10.0, 10.0, 5.0))),
        bs_spacing_m=float(arrays.get("bs_spacing_m", half_lam)),
        user_region=region_of("user", (5.0, 0.0, -5.0), (7.0, 2.0, -5.0), (3, 3, 1)),
        eve_region=region_of("eve", (5.0, -2.0, -5.0), (6.0, -1.0, -5.0), (2, 2, 1)),
        freq_plan=plan,
        rf=rf,
        lc=lc,
        hyper=hyper,
        reflectors=reflectors,
        n_random_reflectors=int(chan.get("n_random_reflectors", 9)),
        ground_plane_z=chan.get("ground_plane_z", -5.0),
    )
    sc.validate()
    return sc


def save_scenario(scenario: Scenario, path) -> None:
    """Emit a JSON scenario that load_scenario round-trips bit-identically."""
    Path(path).write_text(json.dumps({"scenario": scenario.to_dict()}, indent=2, default=float))


def paper_scenario(**overrides) -> Scenario:
    """The bundled desk-scale reproduction scenario."""
    path = Path(__file__).parent / "data" / "paper_v.toml"
    sc = load_scenario(path)
    if overrides:
        d = sc.to_dict()
        for k, v in overrides.items():
            d[k] = v
        sc = _scenario_from_dict(d)
    return sc
