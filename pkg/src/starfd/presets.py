"""Ready-made experiment definitions for the command-line runner.

Each preset is a complete flat key-value experiment file (the same format
``starfd run`` accepts from disk), so ``starfd presets show <name>`` output
can be saved, edited and re-run. Only keys that differ from the documented
defaults are listed.
"""

from __future__ import annotations

from typing import Dict

__all__ = ["PRESETS", "PRESET_NOTES", "preset_text"]

# One-line purpose per preset, shown by `starfd presets list`.
PRESET_NOTES: Dict[str, str] = {
    "default": "single-point smoke run of the baseline cell (cf + mc)",
    "snr-sweep": "ergodic rates versus transmit SNR for all three phase designs",
    "sic-sweep": "rate degradation versus the residual SIC error factor",
    "si-sweep": "rate degradation versus the self-interference coefficient",
    "elements-sweep": "ergodic rates versus the number of surface elements",
    "power-split-sweep":
        "sum rate versus the downlink power share under edge-rate targets",
    "bidir-snr-sweep": "relayed-connection rates versus transmit SNR",
    "bidir-elements-sweep": "relayed-connection rates versus surface size",
    "bidir-power-split-sweep":
        "relayed-connection rates versus the downlink power share",
}

PRESETS: Dict[str, Dict[str, str]] = {
    "default": {
        "sweep_variable": "snr_db",
        "sweep_grid": "30",
        "designs": "aligned",
        "estimators": "cf, mc",
        "output": "default.csv",
    },
    "snr-sweep": {
        "sweep_variable": "snr_db",
        "sweep_grid": "0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50",
        "designs": "pgam, aligned, random",
        "estimators": "cf, mc",
        "output": "snr-sweep.csv",
    },
    "sic-sweep": {
        "total_power_dbw": "40",
        "sweep_variable": "xi",
        "sweep_grid": "0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1",
        "designs": "aligned",
        "estimators": "cf, mc",
        "output": "sic-sweep.csv",
    },
    "si-sweep": {
        "total_power_dbw": "40",
        "sweep_variable": "beta",
        "sweep_grid": "0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1",
        "designs": "aligned",
        "estimators": "cf, mc",
        "output": "si-sweep.csv",
    },
    "elements-sweep": {
        "sweep_variable": "n_elements",
        "sweep_grid": "16, 36, 64, 100",
        "designs": "pgam, aligned, random",
        "estimators": "cf, mc",
        "output": "elements-sweep.csv",
    },
    # Calibrated so both targets are reachable over most of the split
    # range: a compact center disk and a large aligned surface keep the
    # edge-user channel strong, and the small ul_split protects the
    # center DL user from its co-located UL neighbour.
    "power-split-sweep": {
        "cell_radius_m": "10",
        "edge_radius_m": "30",
        "bs_surface_distance_m": "12",
        "n_elements": "144",
        "total_power_dbw": "50",
        "ul_split": "0.05",
        "sweep_variable": "tau",
        "sweep_grid": ("0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, "
                       "0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, "
                       "0.95"),
        "designs": "aligned",
        "power_scheme": "tau-dl-target",
        "dl_target_cases": "6, 3",
        "target_ul_rate": "0.5",
        "estimators": "cf",
        "output": "power-split-sweep.csv",
    },
    "bidir-snr-sweep": {
        "scenario": "bidirectional",
        "sweep_variable": "snr_db",
        "sweep_grid": "0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50",
        "designs": "pgam, aligned, random",
        "estimators": "cf, mc",
        "output": "bidir-snr-sweep.csv",
    },
    "bidir-elements-sweep": {
        "scenario": "bidirectional",
        "sweep_variable": "n_elements",
        "sweep_grid": "16, 36, 64, 100",
        "designs": "pgam, aligned, random",
        "estimators": "cf, mc",
        "output": "bidir-elements-sweep.csv",
    },
    "bidir-power-split-sweep": {
        "scenario": "bidirectional",
        "sweep_variable": "tau",
        "sweep_grid": "0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9",
        "designs": "aligned, random",
        "estimators": "cf, mc",
        "output": "bidir-power-split-sweep.csv",
    },
}


def preset_text(name: str) -> str:
    """Render one preset as a runnable experiment file."""
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown preset {name!r} (available: {known})")
    lines = [f"# preset: {name}", f"# {PRESET_NOTES[name]}"]
    lines += [f"{key} = {value}" for key, value in PRESETS[name].items()]
    return "\n".join(lines) + "\n"
