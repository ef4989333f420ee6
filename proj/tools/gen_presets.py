#!/usr/bin/env python3
"""Regenerates the scenario presets in presets/.

Run from the repository root:  python3 tools/gen_presets.py
"""

import json
import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "presets"

# The model's source term is a temperature rate: physical W/m^3 must be
# divided by the volumetric heat capacity rho*c_p. Soft tissue:
# 1050 kg/m^3 * 3600 J/(kg K).
RHO_CP = 1050.0 * 3600.0

STATIC_CENTERS = {"A": [40, 40, 50], "B": [35, 35, 45], "C": [30, 30, 40]}
STATIC_DENSITIES = {1: 1.0, 2: 0.8, 3: 0.6, 4: 0.4}
STATIC_NOISE = {1: 0.01, 5: 0.05, 10: 0.10}

DYNAMIC_CENTERS = {"A": [40, 40, 50], "B": [35, 35, 45]}
DYNAMIC_DENSITIES = {1: 2.2, 2: 1.8}
DYNAMIC_NOISE = {1: 0.01, 3: 0.03}
# The amplitude cutoff is chosen per location: at B the boundary amplitude
# sits near 8e-4, so the default 0.02 would reject every bin.
DYNAMIC_AMP_THRESHOLD = {"A": 0.02, "B": 2e-4}


def unit(v):
    n = math.sqrt(sum(c * c for c in v))
    return [c / n for c in v]


def static_preset(center, density, percent):
    return {
        "units": "dimensionless",
        "medium": {"alpha": 2.0},
        "domain": {"ball_radius": 100.0, "grid_spacing": 10.0, "flat_face_normal": "+z"},
        "boundary": {"robin_coeff": 0.005, "ambient": 20.0},
        "sources": [
            {
                "center": center,
                "radius": 10.0,
                "signal": {"dc": {"density": density}},
            }
        ],
        "schedule": {"stages": [{"dt": 7.5, "duration": 15000.0}]},
        "extraction": {
            "radius": 90.0,
            "cap_direction": unit(center),
            "cap_angle_deg": 30.0,
            "angular_spacing": 0.015,
        },
        "noise": {"percent": percent, "seed": 1},
        "reconstruction": {
            "grid": {"n_r": 20, "n_theta": 20, "n_phi": 20, "r_min": 40.0, "r_max": 85.0},
            "nav": 60,
        },
    }


def dynamic_preset(loc, center, density, percent):
    return {
        "units": "dimensionless",
        "medium": {"alpha": 2.0},
        "domain": {"ball_radius": 100.0, "grid_spacing": 4.0, "flat_face_normal": "+z"},
        "boundary": {"robin_coeff": 0.005, "ambient": 20.0},
        "sources": [
            {
                "center": center,
                "radius": 10.0,
                "signal": {
                    "dc": {"density": density},
                    "harmonics": [
                        {"amplitude": {"density": density}, "frequency": 0.2, "phase": 0.0}
                    ],
                },
            }
        ],
        "schedule": {
            "stages": [
                {"dt": 1.2, "duration": 5000.0},
                {"dt": 0.1, "duration": 150.0},
                {"dt": 0.05, "duration": 10.0, "sample_rate": 10.0},
            ]
        },
        "extraction": {
            "radius": 85.0,
            "cap_direction": unit(center),
            "cap_angle_deg": 30.0,
            "angular_spacing": 0.0055,
        },
        "noise": {"percent": percent, "seed": 1},
        "reconstruction": {
            "grid": {"n_r": 20, "n_theta": 20, "n_phi": 20, "r_min": 40.0, "r_max": 80.0},
            "amp_threshold": DYNAMIC_AMP_THRESHOLD[loc],
            "min_patch_points": 900,
            "anchor_k": 9,
            "phase_normalization": "std-match",
        },
    }


def forward_example():
    return {
        "units": "dimensionless",
        "medium": {"alpha": 2.0},
        "sources": [
            {
                "center": [0.0, 0.0, 60.0],
                "radius": 0.0,
                "signal": {
                    "dc": {"total": 4000.0},
                    "harmonics": [
                        {"amplitude": {"total": 2000.0}, "frequency": 0.2, "phase": 0.3}
                    ],
                },
            }
        ],
        "forward": {
            "points": [[0.0, 0.0, 90.0], [20.0, 0.0, 85.0], [0.0, 30.0, 80.0]],
            "times": [100.0, 400.0, 1600.0],
        },
    }


def distinguishability_static():
    # Tumor-like source: 29 kW/m^3 in a 1 cm ball, map over tissue
    # diffusivities, temperature contrast against a point 5 cm away.
    return {
        "units": "SI",
        "medium": {"alpha": 1.4e-7},
        "distinguishability": {
            "power": {"density": 29000.0 / RHO_CP},
            "source_radius": 0.01,
            "depths": {"min": 0.015, "max": 0.07, "count": 23},
            "diffusivities": [0.98e-7, 1.31e-7, 1.4e-7, 2.0e-7, 4.0e-7],
            "frequency": 0.0,
            "offset": 0.05,
        },
    }


def distinguishability_dynamic():
    # Same source modulated at 0.5 Hz. Thermal waves at this frequency die
    # within millimetres at tissue diffusivity, so the alpha axis runs two
    # decades up to where the oscillation reaches centimetre depths.
    return {
        "units": "SI",
        "medium": {"alpha": 1.4e-7},
        "distinguishability": {
            "power": {"density": 29000.0 / RHO_CP},
            "source_radius": 0.01,
            "depths": {"min": 0.012, "max": 0.05, "count": 20},
            "diffusivities": [1.0e-7, 3.16e-7, 1.0e-6, 3.16e-6, 1.0e-5],
            "frequency": 0.5,
            "offset": 0.05,
        },
    }


def si_tissue_static():
    # End-to-end SI sanity scenario: 10 cm body, 1 cm tumor-like source at
    # 5 cm depth, hours-long settling.
    return {
        "units": "SI",
        "medium": {"alpha": 1.4e-7},
        "domain": {"ball_radius": 0.1, "grid_spacing": 0.005, "flat_face_normal": "+z"},
        "boundary": {"robin_coeff": 19.0, "ambient": 33.0},
        "sources": [
            {
                "center": [0.0, 0.0, 0.05],
                "radius": 0.01,
                "signal": {"dc": {"density": 29000.0 / RHO_CP}},
            }
        ],
        "schedule": {"stages": [{"dt": 25.0, "duration": 36000.0}]},
        "extraction": {
            "radius": 0.09,
            "cap_direction": [0.0, 0.0, 1.0],
            "cap_angle_deg": 35.0,
            "angular_spacing": 0.02,
        },
        "noise": {"percent": 0.0, "seed": 1},
        "reconstruction": {
            "grid": {"n_r": 16, "n_theta": 16, "n_phi": 16, "r_min": 0.02, "r_max": 0.08},
            "nav": 30,
        },
    }


def main():
    OUT.mkdir(exist_ok=True)
    presets = {}

    for loc, center in STATIC_CENTERS.items():
        for qi, density in STATIC_DENSITIES.items():
            presets[f"paper_static_{loc}{qi}"] = static_preset(center, density, 0.0)
            for tag, pct in STATIC_NOISE.items():
                presets[f"paper_static_{loc}{qi}_noise{tag}"] = static_preset(
                    center, density, pct
                )

    for loc, center in DYNAMIC_CENTERS.items():
        for si, density in DYNAMIC_DENSITIES.items():
            presets[f"paper_dynamic_{loc}{si}"] = dynamic_preset(loc, center, density, 0.0)
            for tag, pct in DYNAMIC_NOISE.items():
                presets[f"paper_dynamic_{loc}{si}_noise{tag}"] = dynamic_preset(
                    loc, center, density, pct
                )

    presets["forward_example"] = forward_example()
    presets["distinguishability_static"] = distinguishability_static()
    presets["distinguishability_dynamic"] = distinguishability_dynamic()
    presets["si_tissue_static"] = si_tissue_static()

    for name, cfg in sorted(presets.items()):
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(cfg, indent=2) + "\n")
    print(f"wrote {len(presets)} presets to {OUT}")


if __name__ == "__main__":
    main()
