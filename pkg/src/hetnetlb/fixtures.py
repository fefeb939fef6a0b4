"""Frozen small-instance fixtures with oracle-computed expectations.

Each expected value is produced here by an independent route (exhaustive
search or closed-form hand algebra scripted below), tagged TRIVIAL or
DERIVED, and committed under tests/fixtures/. Regeneration is deterministic,
so CI can diff bytes instead of re-deriving ground truth.
"""

from __future__ import annotations

import csv
import math
import os
import sys

import numpy as np

from .assoc import brute_force_log_utility
from .scenario import dbm_to_mw

ORACLE_RATES = np.array([[4.0, 1.0], [4.0, 1.0], [1.0, 4.0]])

# single-user switching geometry: one macro, one pico, both on the x axis
SWITCH_REGION_KM = 4.0
SWITCH_USER_XY = (1.0, 1.0)
SWITCH_MACRO_XY = (1.5, 1.0)   # 0.5 km from the user
SWITCH_PICO_XY = (1.0, 1.3)    # 0.3 km from the user
SWITCH_MACRO_DBM = 46.0
SWITCH_PICO_DBM = 23.0
SWITCH_ALPHA = 3.5

EMPTY_TIER_CONFIG = """\
# all-zero BS densities with users present: generation must fail
[region]
side_km = 3.0

[band.1]
bandwidth_mhz = 10
noise_dbm = -95

[tier.1]
density_per_km2 = 0
tx_power_dbm = 46
band = 1
macro = true

[users]
density_per_km2 = 1.0
"""


def _write_rows(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def switching_bias_db() -> float:
    """Closed-form bias at which the pico's biased power overtakes the macro.

    Pure hand algebra on the power-law model, independent of the radio
    module: bias* = (P_macro / P_pico) * (d_pico / d_macro)^alpha.
    """
    d_macro_m = 1e3 * math.dist(SWITCH_USER_XY, SWITCH_MACRO_XY)
    d_pico_m = 1e3 * math.dist(SWITCH_USER_XY, SWITCH_PICO_XY)
    p_macro = dbm_to_mw(SWITCH_MACRO_DBM) * d_macro_m ** (-SWITCH_ALPHA)
    p_pico = dbm_to_mw(SWITCH_PICO_DBM) * d_pico_m ** (-SWITCH_ALPHA)
    return 10.0 * math.log10(p_macro / p_pico)


def generate_fixtures(directory: str) -> None:
    """Write every fixture file into ``directory`` (created if missing)."""
    os.makedirs(directory, exist_ok=True)

    _write_rows(os.path.join(directory, "oracle_3users_2bs_rates.csv"),
                ["user", "bs", "rate_bps"],
                [(u, b, repr(ORACLE_RATES[u, b]))
                 for u in range(ORACLE_RATES.shape[0])
                 for b in range(ORACLE_RATES.shape[1])])

    oracle_assoc, oracle_obj = brute_force_log_utility(ORACLE_RATES)
    rows = [("objective_nats", repr(oracle_obj), "DERIVED")]
    rows += [(f"serving_user{u}", int(b), "DERIVED")
             for u, b in enumerate(oracle_assoc.serving)]
    _write_rows(os.path.join(directory, "oracle_3users_2bs_expected.csv"),
                ["name", "value", "provenance"], rows)

    _write_rows(os.path.join(directory, "single_user_switching_expected.csv"),
                ["name", "value", "provenance"],
                [("region_side_km", repr(SWITCH_REGION_KM), "TRIVIAL"),
                 ("user_x_km", repr(SWITCH_USER_XY[0]), "TRIVIAL"),
                 ("user_y_km", repr(SWITCH_USER_XY[1]), "TRIVIAL"),
                 ("macro_x_km", repr(SWITCH_MACRO_XY[0]), "TRIVIAL"),
                 ("macro_y_km", repr(SWITCH_MACRO_XY[1]), "TRIVIAL"),
                 ("pico_x_km", repr(SWITCH_PICO_XY[0]), "TRIVIAL"),
                 ("pico_y_km", repr(SWITCH_PICO_XY[1]), "TRIVIAL"),
                 ("macro_tx_dbm", repr(SWITCH_MACRO_DBM), "TRIVIAL"),
                 ("pico_tx_dbm", repr(SWITCH_PICO_DBM), "TRIVIAL"),
                 ("pathloss_exponent", repr(SWITCH_ALPHA), "TRIVIAL"),
                 ("switching_bias_db", repr(switching_bias_db()), "DERIVED")])

    with open(os.path.join(directory, "empty_tier.ini"), "w", newline="") as fh:
        fh.write(EMPTY_TIER_CONFIG)

    _write_rows(os.path.join(directory, "empty_tier_expected.csv"),
                ["name", "value", "provenance"],
                [("error", "DegenerateScenario", "TRIVIAL")])


def load_expected(path: str) -> dict:
    """Read a name,value,provenance fixture into {name: str value}."""
    with open(path, newline="") as fh:
        return {row["name"]: row["value"] for row in csv.DictReader(fh)}


if __name__ == "__main__":
    generate_fixtures(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures")
