"""Experiment description: tiers, bands, blanking, propagation, user population.

All dB quantities from external config are converted once, here: powers are
stored in mW, biases as linear ratios, bandwidths in Hz. Downstream modules
never see dB except where a field name says so (``amc_floor_db``).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional


class ConfigError(ValueError):
    """Scenario validation failure; ``key`` names the offending config entry."""

    def __init__(self, key: str, message: str = ""):
        self.key = key
        super().__init__(f"{self.__class__.__name__}: {key}" + (f" ({message})" if message else ""))


class MissingField(ConfigError):
    pass


class BadReference(ConfigError):
    pass


class OutOfRange(ConfigError):
    pass


class Variant(str, Enum):
    """Macro-muting mode for offloaded small-cell users."""

    OFF = "off"
    RE_ONLY_IN_BLANK = "re_only_in_blank"
    ALL_SUBFRAMES = "all_subframes"


def db_to_linear(x_db: float) -> float:
    """dB -> linear power ratio."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Linear power ratio -> dB. Requires x > 0."""
    return 10.0 * math.log10(x)


def dbm_to_mw(p_dbm: float) -> float:
    return 10.0 ** (p_dbm / 10.0)


def mw_to_dbm(p_mw: float) -> float:
    return 10.0 * math.log10(p_mw)


@dataclass(frozen=True)
class BandConfig:
    band_id: int
    bandwidth_hz: float
    noise_mw: float  # total thermal noise over the band


@dataclass(frozen=True)
class TierConfig:
    tier_id: int
    density_per_km2: float
    tx_power_mw: float
    bias: float  # linear ratio; configured in dB
    band_id: int
    is_macro: bool = False


@dataclass(frozen=True)
class BlankingConfig:
    eta: float = 0.0  # fraction of muted macro subframes
    variant: Variant = Variant.OFF


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated, immutable description of one simulated deployment.

    The square region is treated as a torus; ``tiers`` keeps its configured
    order, which is also the tie-break order for tier-level association.
    """

    region_side_km: float
    tiers: tuple[TierConfig, ...]
    bands: tuple[BandConfig, ...]
    user_density_per_km2: float
    pathloss_exponent: float
    min_distance_m: float
    blanking: BlankingConfig = BlankingConfig()
    amc_floor_db: Optional[float] = None
    full_buffer_interference: bool = True

    @property
    def area_km2(self) -> float:
        return self.region_side_km * self.region_side_km

    def band_by_id(self, band_id: int) -> BandConfig:
        for band in self.bands:
            if band.band_id == band_id:
                return band
        raise BadReference(f"band.{band_id}", "no such band")

    def band_index(self, band_id: int) -> int:
        for i, band in enumerate(self.bands):
            if band.band_id == band_id:
                return i
        raise BadReference(f"band.{band_id}", "no such band")

    def tier_by_id(self, tier_id: int) -> TierConfig:
        for tier in self.tiers:
            if tier.tier_id == tier_id:
                return tier
        raise BadReference(f"tier.{tier_id}", "no such tier")

    def macro_tier_ids(self) -> tuple[int, ...]:
        return tuple(t.tier_id for t in self.tiers if t.is_macro)

    def with_small_cell_bias_db(self, bias_db: float) -> "ScenarioConfig":
        """Copy with every non-macro tier's bias set to ``bias_db``."""
        bias = db_to_linear(bias_db)
        tiers = tuple(
            t if t.is_macro else dataclasses.replace(t, bias=bias) for t in self.tiers
        )
        return dataclasses.replace(self, tiers=tiers)

    def with_blanking(self, eta: float, variant: Variant) -> "ScenarioConfig":
        return dataclasses.replace(self, blanking=BlankingConfig(eta=eta, variant=variant))

    def with_small_cell_density(self, density_per_km2: float) -> "ScenarioConfig":
        """Copy with every non-macro tier's density set to ``density_per_km2``."""
        tiers = tuple(
            t if t.is_macro else dataclasses.replace(t, density_per_km2=density_per_km2)
            for t in self.tiers
        )
        return dataclasses.replace(self, tiers=tiers)


def _require(section: dict, section_name: str, key: str) -> str:
    if key not in section:
        raise MissingField(f"{section_name}.{key}")
    return section[key]


def _as_float(value, key: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise OutOfRange(key, f"not a number: {value!r}")


def _as_bool(value, key: str) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("true", "yes", "on", "1"):
        return True
    if text in ("false", "no", "off", "0"):
        return False
    raise OutOfRange(key, f"not a boolean: {value!r}")


_VARIANT_NAMES = {
    "off": Variant.OFF,
    "re_only_in_blank": Variant.RE_ONLY_IN_BLANK,
    "all_subframes": Variant.ALL_SUBFRAMES,
}


def validate(raw_config: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from the sectioned raw form the CLI parses.

    Expected sections: ``region``, ``band.N``, ``tier.N``, ``users``,
    ``blanking`` (optional), plus CLI-owned ``solver``/``mc`` which are
    ignored here. dB fields are converted to linear/mW on the way in.

    Raises MissingField / BadReference / OutOfRange naming the offending key.
    """
    if "region" not in raw_config:
        raise MissingField("region")
    region = raw_config["region"]
    side = _as_float(_require(region, "region", "side_km"), "region.side_km")
    alpha = _as_float(region.get("pathloss_exponent", 3.5), "region.pathloss_exponent")
    min_dist = _as_float(region.get("min_distance_m", 1.0), "region.min_distance_m")
    if side <= 0:
        raise OutOfRange("region.side_km", "must be > 0")
    if alpha <= 2:
        raise OutOfRange("region.pathloss_exponent", "must be > 2")
    if min_dist <= 0:
        raise OutOfRange("region.min_distance_m", "must be > 0")

    bands = []
    for name in sorted(k for k in raw_config if k.startswith("band.")):
        section = raw_config[name]
        band_id = int(name.split(".", 1)[1])
        if "bandwidth_hz" in section:
            bandwidth_hz = _as_float(section["bandwidth_hz"], f"{name}.bandwidth_hz")
        else:
            bandwidth_hz = 1e6 * _as_float(_require(section, name, "bandwidth_mhz"),
                                           f"{name}.bandwidth_mhz")
        if "noise_mw" in section:
            noise_mw = _as_float(section["noise_mw"], f"{name}.noise_mw")
        else:
            noise_mw = dbm_to_mw(_as_float(_require(section, name, "noise_dbm"),
                                           f"{name}.noise_dbm"))
        if bandwidth_hz <= 0:
            raise OutOfRange(f"{name}.bandwidth_mhz", "must be > 0")
        if noise_mw < 0:
            raise OutOfRange(f"{name}.noise_mw", "must be >= 0")
        bands.append(BandConfig(band_id=band_id, bandwidth_hz=bandwidth_hz,
                                noise_mw=noise_mw))
    if not bands:
        raise MissingField("band.1")
    band_ids = [b.band_id for b in bands]
    if len(set(band_ids)) != len(band_ids):
        raise OutOfRange("band", "duplicate band_id")

    tiers = []
    for name in sorted(k for k in raw_config if k.startswith("tier.")):
        section = raw_config[name]
        tier_id = int(name.split(".", 1)[1])
        density = _as_float(_require(section, name, "density_per_km2"), f"{name}.density_per_km2")
        if "tx_power_mw" in section:
            power_mw = _as_float(section["tx_power_mw"], f"{name}.tx_power_mw")
        else:
            power_mw = dbm_to_mw(_as_float(_require(section, name, "tx_power_dbm"),
                                           f"{name}.tx_power_dbm"))
        if "bias_linear" in section:
            bias = _as_float(section["bias_linear"], f"{name}.bias_linear")
        else:
            bias = db_to_linear(_as_float(section.get("bias_db", 0.0), f"{name}.bias_db"))
        band_ref = int(_as_float(_require(section, name, "band"), f"{name}.band"))
        is_macro = _as_bool(section.get("macro", False), f"{name}.macro")
        if density < 0:
            raise OutOfRange(f"{name}.density_per_km2", "must be >= 0")
        if power_mw <= 0:
            raise OutOfRange(f"{name}.tx_power_mw", "must be > 0")
        if bias <= 0:
            raise OutOfRange(f"{name}.bias_linear", "must be > 0")
        if band_ref not in band_ids:
            raise BadReference(f"{name}.band", f"band {band_ref} not defined")
        if is_macro and bias != 1.0:
            raise OutOfRange(f"{name}.bias_db", "macro tier bias is fixed at 0 dB")
        tiers.append(TierConfig(tier_id=tier_id, density_per_km2=density,
                                tx_power_mw=power_mw, bias=bias, band_id=band_ref,
                                is_macro=is_macro))
    if not tiers:
        raise MissingField("tier.1")
    tier_ids = [t.tier_id for t in tiers]
    if len(set(tier_ids)) != len(tier_ids):
        raise OutOfRange("tier", "duplicate tier_id")

    users = raw_config.get("users", {})
    user_density = _as_float(users.get("density_per_km2", 0.0), "users.density_per_km2")
    if user_density < 0:
        raise OutOfRange("users.density_per_km2", "must be >= 0")
    amc_floor_db = None
    if "amc_floor_db" in users:
        amc_floor_db = _as_float(users["amc_floor_db"], "users.amc_floor_db")
    full_buffer = _as_bool(users.get("full_buffer_interference", True),
                           "users.full_buffer_interference")

    blanking_raw = raw_config.get("blanking", {})
    eta = _as_float(blanking_raw.get("eta", 0.0), "blanking.eta")
    variant_name = str(blanking_raw.get("variant", "off")).strip().lower()
    if variant_name not in _VARIANT_NAMES:
        raise OutOfRange("blanking.variant", f"unknown variant {variant_name!r}")
    variant = _VARIANT_NAMES[variant_name]
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange("blanking.eta", "must be in [0, 1]")
    if variant == Variant.OFF:
        eta = 0.0

    scenario = ScenarioConfig(
        region_side_km=side,
        tiers=tuple(tiers),
        bands=tuple(bands),
        user_density_per_km2=user_density,
        pathloss_exponent=alpha,
        min_distance_m=min_dist,
        blanking=BlankingConfig(eta=eta, variant=variant),
        amc_floor_db=amc_floor_db,
        full_buffer_interference=full_buffer,
    )
    return scenario


def to_raw(scenario: ScenarioConfig) -> dict:
    """Inverse of validate(), in the unit-exact key spelling.

    Linear/mW keys are emitted instead of dB so the round trip through
    ``validate`` reproduces every field bit-for-bit (dB conversions are not
    guaranteed ulp-stable). Hand-written configs normally use the dB keys.
    """
    raw: dict = {
        "region": {
            "side_km": scenario.region_side_km,
            "pathloss_exponent": scenario.pathloss_exponent,
            "min_distance_m": scenario.min_distance_m,
        },
        "users": {
            "density_per_km2": scenario.user_density_per_km2,
            "full_buffer_interference": scenario.full_buffer_interference,
        },
        "blanking": {
            "eta": scenario.blanking.eta,
            "variant": scenario.blanking.variant.value,
        },
    }
    if scenario.amc_floor_db is not None:
        raw["users"]["amc_floor_db"] = scenario.amc_floor_db
    for band in scenario.bands:
        raw[f"band.{band.band_id}"] = {
            "bandwidth_hz": band.bandwidth_hz,
            "noise_mw": band.noise_mw,
        }
    for tier in scenario.tiers:
        raw[f"tier.{tier.tier_id}"] = {
            "density_per_km2": tier.density_per_km2,
            "tx_power_mw": tier.tx_power_mw,
            "bias_linear": tier.bias,
            "band": tier.band_id,
            "macro": tier.is_macro,
        }
    return raw


def reference_scenario(
    small_cell_density_per_km2: float = 5.0,
    user_density_per_km2: float = 30.0,
    region_side_km: float = 10.0,
    amc_floor_db: Optional[float] = None,
) -> ScenarioConfig:
    """Co-channel macro + pico deployment used throughout the experiments.

    Macro 46 dBm at 1 BS/km^2, picos 23 dBm at 5 BSs/km^2 (23 dB power gap,
    5x density ratio), one 10 MHz band with -95 dBm noise (thermal -174
    dBm/Hz + 9 dB noise figure), alpha 3.5, 30 users/km^2 on a 10 km torus.
    """
    return ScenarioConfig(
        region_side_km=region_side_km,
        tiers=(
            TierConfig(tier_id=1, density_per_km2=1.0, tx_power_mw=dbm_to_mw(46.0),
                       bias=1.0, band_id=1, is_macro=True),
            TierConfig(tier_id=2, density_per_km2=small_cell_density_per_km2,
                       tx_power_mw=dbm_to_mw(23.0), bias=1.0, band_id=1),
        ),
        bands=(BandConfig(band_id=1, bandwidth_hz=10e6, noise_mw=dbm_to_mw(-95.0)),),
        user_density_per_km2=user_density_per_km2,
        pathloss_exponent=3.5,
        min_distance_m=1.0,
        amc_floor_db=amc_floor_db,
    )


def out_of_band_scenario(
    small_cell_density_per_km2: float = 5.0,
    user_density_per_km2: float = 30.0,
    region_side_km: float = 10.0,
    amc_floor_db: Optional[float] = None,
) -> ScenarioConfig:
    """Reference deployment with the small-cell tier on its own 20 MHz band.

    Macro and small cells never interfere; the second band carries -92 dBm
    noise (same -174 dBm/Hz + 9 dB figure over 20 MHz).
    """
    ref = reference_scenario(small_cell_density_per_km2, user_density_per_km2,
                             region_side_km, amc_floor_db)
    tiers = tuple(
        t if t.is_macro else dataclasses.replace(t, band_id=2) for t in ref.tiers
    )
    bands = ref.bands + (BandConfig(band_id=2, bandwidth_hz=20e6, noise_mw=dbm_to_mw(-92.0)),)
    return dataclasses.replace(ref, tiers=tiers, bands=bands)


def single_tier_scenario(
    density_per_km2: float = 1.0,
    tx_power_dbm: float = 46.0,
    user_density_per_km2: float = 30.0,
    region_side_km: float = 10.0,
    noise_dbm: Optional[float] = -95.0,
) -> ScenarioConfig:
    """Macro-only deployment; ``noise_dbm=None`` gives the noise-free (SIR) case."""
    noise_mw = 0.0 if noise_dbm is None else dbm_to_mw(noise_dbm)
    return ScenarioConfig(
        region_side_km=region_side_km,
        tiers=(TierConfig(tier_id=1, density_per_km2=density_per_km2,
                          tx_power_mw=dbm_to_mw(tx_power_dbm), bias=1.0,
                          band_id=1, is_macro=True),),
        bands=(BandConfig(band_id=1, bandwidth_hz=10e6, noise_mw=noise_mw),),
        user_density_per_km2=user_density_per_km2,
        pathloss_exponent=3.5,
        min_distance_m=1.0,
    )
