#!/usr/bin/env python3
"""Write data/reference_synthetic.yaml.

The series are synthetic. They only imitate the usual shapes of a sample day
per season: solar bell curves, a night-heavy wind profile, a morning and an
evening price peak with a solar dip around noon, and three flexible demand
profiles (flat, morning, evening). Unit parameters use the `reference`
keyword; the CSP startup multiplier and turbine minimum are set here.

Deterministic: rerunning produces the same file byte for byte.
"""

import argparse
import math
from pathlib import Path

T = 24
HOURS = range(T)

SEASONS = {
    # price level, noon dip, evening peak, wind mean, pv peak, sf peak, daylight
    "winter": dict(price=72.0, dip=6.0, peak=30.0, wind=30.0, pv=26.0, sf=150.0, day=9.5),
    "spring": dict(price=52.0, dip=18.0, peak=26.0, wind=25.0, pv=42.0, sf=240.0, day=12.5),
    "summer": dict(price=64.0, dip=14.0, peak=34.0, wind=16.0, pv=47.0, sf=295.0, day=14.5),
    "autumn": dict(price=66.0, dip=9.0, peak=28.0, wind=23.0, pv=33.0, sf=195.0, day=11.0),
}

# Relative deviation per regime: favorable (moderate), unfavorable (large).
GEN_DEV = {"favorable": 0.12, "unfavorable": 0.30}
FD_DEV = {"favorable": 0.05, "unfavorable": 0.12}


def bell(peak, width_hours, centre=13.0):
    """Solar-style bell: zero outside the daylight window."""
    half = width_hours / 2.0
    out = []
    for h in HOURS:
        x = (h + 0.5 - centre) / half
        out.append(peak * math.cos(x * math.pi / 2) ** 2 if abs(x) < 1 else 0.0)
    return out


def bump(h, centre, width):
    return math.exp(-(((h - centre) / width) ** 2))


def prices(p):
    dam = [
        p["price"]
        - 14.0 * bump(h, 3.5, 2.5)
        + 0.55 * p["peak"] * bump(h, 8.5, 1.8)
        - p["dip"] * bump(h, 13.5, 2.2)
        + p["peak"] * bump(h, 20.5, 1.8)
        for h in HOURS
    ]
    sr_up = [9.0 + 0.12 * x for x in dam]
    sr_dn = [6.0 + 0.06 * x for x in dam]
    return {
        "dam_median": dam,
        "dam_down_dev": [0.14 * x for x in dam],
        "dam_up_dev": [0.11 * x for x in dam],
        "sr_up": sr_up,
        "sr_down": sr_dn,
        "sr_up_dev": [0.25 * x for x in sr_up],
        "sr_down_dev": [0.25 * x for x in sr_dn],
    }


def wind(mean):
    # Stronger at night, weakest mid-afternoon; capped at 50 MW.
    return [min(50.0, mean * (1.0 + 0.35 * math.cos(2 * math.pi * (h - 2) / 24))) for h in HOURS]


def fd_profiles(level):
    flat = [level] * T
    morning = [level * (0.75 + 0.6 * bump(h, 9.0, 2.5)) for h in HOURS]
    evening = [level * (0.75 + 0.6 * bump(h, 20.0, 2.5)) for h in HOURS]
    return [flat, morning, evening]


def fmt(values):
    return "[" + ", ".join(f"{round(v, 3):g}" for v in values) + "]"


def deviation_block(upper, rel, indent):
    pad = " " * indent
    lines = [f"{pad}deviation:"]
    for regime, r in rel.items():
        lines.append(f"{pad}  {regime}: {fmt([r * v for v in upper])}")
    return lines


def render(fd_level):
    out = [
        "# Synthetic sample days, one per season. Shapes only; not measured data.",
        "# Generated by scripts/make_synthetic.py; edit the script, not this file.",
        "schema_version: 1",
        "name: reference_synthetic",
        'description: "Synthetic 24-period sample days with the reference unit data"',
        "grid: {period_count: 24, delta_t: 1}",
        "storage_module: reference",
        "units:",
        "  - {name: hydro, class: drs, technology: hydro, parameters: reference, energy_limits: reference}",
        "  - {name: biomass, class: drs, technology: biomass, parameters: reference}",
        "  - {name: wind, class: ndrs, technology: wind, parameters: reference}",
        "  - {name: pv, class: ndrs, technology: solar_pv, parameters: reference}",
        "  # Startup multiplier and turbine minimum are not reference data.",
        "  - {name: csp, class: csp, parameters: reference, startup_loss_mult: 0.5, turbine_p_min: 11}",
        "  - {name: fd, class: fd, flexibility_margin: 0.1}",
        "seasons:",
    ]
    for season, p in SEASONS.items():
        out.append(f"  {season}:")
        out.append("    prices:")
        for key, v in prices(p).items():
            out.append(f"      {key}: {fmt(v)}")
        out.append("    series:")
        for name, upper in (
            ("wind", wind(p["wind"])),
            ("pv", bell(p["pv"], p["day"])),
            ("csp", bell(p["sf"], p["day"])),
        ):
            out.append(f"      {name}:")
            out.append(f"        upper: {fmt(upper)}")
            out.extend(deviation_block(upper, GEN_DEV, 8))
        profiles = fd_profiles(fd_level)
        out.append("      fd:")
        out.append("        profiles:")
        for prof in profiles:
            out.append(f"          - {fmt(prof)}")
        out.extend(deviation_block(profiles[0], FD_DEV, 8))
    return "\n".join(out) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "reference_synthetic.yaml"))
    ap.add_argument("--fd-level", type=float, default=30.0, help="flat FD profile level, MW")
    args = ap.parse_args()
    Path(args.out).write_text(render(args.fd_level))


if __name__ == "__main__":
    main()
