#!/usr/bin/env python3
"""Regenerates the example household data, DAGs and query specs under data/.

The households are simulated; the DAGs are illustrative reconstructions of
the 18 household-energy queries, not transcriptions of any published figure.

    python3 data/make_examples.py
"""

import json
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent
SEED = 2024
N_HOMES = 212


def simulate_homes(rng):
    n = N_HOMES
    region = rng.choice(["north", "south", "east", "west"], size=n)
    north = region == "north"
    south = region == "south"
    urban = (rng.random(n) < 0.6).astype(int)
    education = rng.choice(["primary", "secondary", "tertiary"], size=n, p=[0.2, 0.5, 0.3])
    education_years = np.select(
        [education == "primary", education == "secondary"], [9, 12], 16
    ) + rng.integers(0, 3, size=n)
    behaviour = rng.normal(size=n)  # never written out

    income = (
        14000 + 900 * education_years + 3000 * urban + 2500 * behaviour + rng.normal(0, 3000, n)
    )
    tenants = 1 + rng.poisson(1.5, n)
    room_area = 14 + 0.0002 * income + rng.normal(0, 3, n)
    wall_height = 2.4 + 0.3 * north + rng.normal(0, 0.15, n)
    room_volume = room_area * wall_height
    windows = np.maximum(1, np.round(4 + 0.00012 * income + 0.3 * tenants + rng.normal(0, 1.5, n)))
    openable_windows = np.round(windows * rng.uniform(0.5, 0.9, n))
    exterior_doors = 1 + (rng.random(n) < 0.4 + 0.2 * (1 - urban)).astype(int)
    exterior_walls = 2 + rng.binomial(2, 0.5 + 0.3 * (1 - urban))
    drying_space = np.maximum(0, 0.05 * room_volume * rng.beta(2, 5, n) + 0.2 * tenants)
    trv_share = np.clip(0.3 + 0.00001 * income + rng.normal(0, 0.2, n), 0, 1)
    electric_heaters = rng.poisson(1 + 0.5 * north + 0.3 * (1 - urban))
    fans_or_ac = (
        rng.random(n) < 1 / (1 + np.exp(-(-1 + 0.00005 * (income - 25000) + 0.8 * south)))
    ).astype(int)

    avg_consumption = (
        5
        + 0.08 * room_volume
        + 0.6 * tenants
        + 0.3 * openable_windows
        + 0.2 * exterior_doors
        + 0.15 * exterior_walls
        + 0.00004 * income
        + 0.1 * education_years
        - 0.4 * urban
        + 0.8 * behaviour
        + 0.5 * drying_space
        - 1.0 * trv_share
        + 0.9 * electric_heaters
        + rng.normal(0, 1, n)
    )
    winter_consumption = avg_consumption + 2.0 + 1.2 * electric_heaters + 0.5 * north + rng.normal(0, 1, n)
    winter_temperature = (
        18 + 0.6 * electric_heaters - 0.05 * openable_windows + 0.5 * trv_share - 0.7 * north
        + 0.3 * behaviour + rng.normal(0, 0.8, n)
    )
    summer_consumption = avg_consumption - 1 + 1.5 * fans_or_ac + 0.6 * south + rng.normal(0, 1, n)
    summer_temperature = 25 + 1.0 * south - 1.2 * fans_or_ac + 0.00002 * income + rng.normal(0, 0.8, n)

    income_col = [f"{v:.0f}" for v in income]
    for i in rng.choice(n, size=n // 12, replace=False):
        income_col[i] = ""

    columns = {
        "home_id": [f"H{i + 1:03d}" for i in range(n)],
        "region": list(region),
        "urban": list(urban),
        "education": list(education),
        "education_years": list(education_years),
        "income": income_col,
        "tenants": list(tenants),
        "room_area": [f"{v:.2f}" for v in room_area],
        "wall_height": [f"{v:.2f}" for v in wall_height],
        "room_volume": [f"{v:.2f}" for v in room_volume],
        "windows": [f"{v:.0f}" for v in windows],
        "openable_windows": [f"{v:.0f}" for v in openable_windows],
        "exterior_doors": list(exterior_doors),
        "exterior_walls": list(exterior_walls),
        "drying_space": [f"{v:.3f}" for v in drying_space],
        "trv_share": [f"{v:.3f}" for v in trv_share],
        "electric_heaters": list(electric_heaters),
        "fans_or_ac": list(fans_or_ac),
        "avg_consumption": [f"{v:.3f}" for v in avg_consumption],
        "winter_consumption": [f"{v:.3f}" for v in winter_consumption],
        "winter_temperature": [f"{v:.2f}" for v in winter_temperature],
        "summer_consumption": [f"{v:.3f}" for v in summer_consumption],
        "summer_temperature": [f"{v:.2f}" for v in summer_temperature],
    }
    return columns, room_volume


def simulate_periods(rng, room_volume):
    rows = []
    for i, volume in enumerate(room_volume):
        for _ in range(2):
            outdoor = rng.normal(10, 5)
            winter_time = int(rng.random() < 1 / (1 + np.exp((outdoor - 10) / 2)))
            consumption = 6 + 0.06 * volume - 0.25 * outdoor + 0.8 * winter_time + rng.normal(0, 1)
            rows.append(
                {
                    "home_id": f"H{i + 1:03d}",
                    "winter_time": winter_time,
                    "outdoor_temperature": f"{outdoor:.2f}",
                    "room_volume": f"{volume:.2f}",
                    "consumption": f"{consumption:.3f}",
                }
            )
    return rows


def write_csv(path, columns):
    names = list(columns)
    n = len(columns[names[0]])
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        out.write(",".join(names) + "\n")
        for i in range(n):
            out.write(",".join(str(columns[c][i]) for c in names) + "\n")


# id, treatment label, label source (None when already binary), outcome, context,
# confounders (parents of both treatment and outcome), outcome-only parents.
QUERIES = [
    (1, "high_income", "income", "avg_consumption", "SI",
     ["education_years", "urban"], ["tenants", "room_volume"]),
    (2, "high_education", "education_years", "avg_consumption", "SI",
     ["region", "urban"], ["tenants", "income"]),
    (3, "many_windows", "windows", "avg_consumption", "ADC",
     ["income", "tenants"], ["room_volume", "region"]),
    (4, "many_openable_windows", "openable_windows", "avg_consumption", "EI",
     ["income", "region", "tenants"], ["room_volume", "urban"]),
    (5, "many_exterior_doors", "exterior_doors", "avg_consumption", "ADC",
     ["urban"], ["tenants", "room_volume", "income"]),
    (6, "many_exterior_walls", "exterior_walls", "avg_consumption", "ADC",
     ["urban"], ["tenants", "room_volume", "income"]),
    (7, "large_room_volume", "room_volume", "avg_consumption", "ADC",
     ["income", "region"], ["tenants", "urban"]),
    (8, "large_room_area", "room_area", "avg_consumption", "ADC",
     ["income"], ["tenants", "region", "urban"]),
    (9, "high_walls", "wall_height", "avg_consumption", "ADC",
     ["region"], ["tenants", "income"]),
    (10, "large_drying_space", "drying_space", "avg_consumption", "AUR",
     ["tenants", "room_volume"], ["income", "urban"]),
    (11, "large_trv_space", "trv_share", "avg_consumption", "AUR,EI",
     ["income"], ["tenants", "room_volume", "region"]),
    (12, "many_tenants", "tenants", "avg_consumption", "AUR",
     ["income", "urban"], ["room_volume"]),
    (13, "urban", None, "avg_consumption", "EC",
     ["region"], ["tenants", "room_volume"]),
    (15, "many_electric_heaters", "electric_heaters", "winter_consumption", "EI",
     ["region", "urban"], ["tenants", "room_volume", "income"]),
    (16, "many_electric_heaters", "electric_heaters", "winter_temperature", "EI",
     ["region", "urban"], ["trv_share", "openable_windows"]),
    (17, "fans_or_ac", None, "summer_consumption", "EI",
     ["income", "region"], ["tenants", "room_volume"]),
    (18, "fans_or_ac", None, "summer_temperature", "EI",
     ["income", "region"], []),
]

ALL_ESTIMATORS = ["regression_adjustment", "psm", "ipw", "stratification"]
ALL_METALEARNERS = [f"{l}:{b}" for b in ("linear", "gbt") for l in "STXR"]
ALL_REFUTERS = ["placebo_treatment", "random_common_cause", "data_subset", "unobserved_confounder"]


def graph_text(qid, treatment, outcome, confounders, outcome_parents):
    lines = [
        f"# Query {qid}: {treatment} -> {outcome}.",
        "# Illustrative reconstruction; U stands for occupants' environmental behaviour.",
        f"@treatment {treatment}",
        f"@outcome {outcome}",
        "@unobserved U",
        f"{treatment} -> {outcome}",
    ]
    for c in confounders:
        lines.append(f"{c} -> {treatment}")
        lines.append(f"{c} -> {outcome}")
    for c in outcome_parents:
        lines.append(f"{c} -> {outcome}")
    # U reaches the treatment only through an observed confounder when one is
    # available; otherwise it touches the outcome alone.
    if "income" in confounders:
        lines.append("U -> income")
    lines.append(f"U -> {outcome}")
    return "\n".join(lines) + "\n"


def query_spec(qid, name, data, graph, treatment, source, outcome, context, description):
    spec = {
        "name": name,
        "context": context,
        "description": description,
        "data": data,
        "graph": graph,
        "treatment": treatment,
        "outcome": outcome,
        "estimators": ALL_ESTIMATORS,
        "metalearners": ALL_METALEARNERS,
        "refuters": ALL_REFUTERS,
        "seed": 1000 + qid,
    }
    if source is not None:
        spec["label_rules"] = [{"source": source, "target": treatment, "comparator": "above_mean"}]
    return spec


def main():
    rng = np.random.default_rng(SEED)
    homes, room_volume = simulate_homes(rng)
    write_csv(ROOT / "homes.csv", homes)
    periods = simulate_periods(rng, room_volume)
    write_csv(ROOT / "home_periods.csv", {k: [r[k] for r in periods] for k in periods[0]})

    (ROOT / "graphs").mkdir(exist_ok=True)
    (ROOT / "queries").mkdir(exist_ok=True)
    for qid, treatment, source, outcome, context, confounders, outcome_parents in QUERIES:
        name = f"query{qid:02d}"
        (ROOT / "graphs" / f"{name}.graph").write_text(
            graph_text(qid, treatment, outcome, confounders, outcome_parents), encoding="utf-8"
        )
        spec = query_spec(qid, name, "../homes.csv", f"../graphs/{name}.graph", treatment, source,
                          outcome, context, f"effect of {treatment.replace('_', ' ')} on {outcome.replace('_', ' ')}")
        (ROOT / "queries" / f"{name}.json").write_text(json.dumps(spec, indent=2) + "\n", encoding="utf-8")

    name = "query14"
    (ROOT / "graphs" / f"{name}.graph").write_text(
        "\n".join([
            "# Query 14: switch to winter time -> consumption, on home-period rows.",
            "# Illustrative reconstruction.",
            "@treatment winter_time",
            "@outcome consumption",
            "winter_time -> consumption",
            "outdoor_temperature -> winter_time",
            "outdoor_temperature -> consumption",
            "room_volume -> consumption",
        ]) + "\n",
        encoding="utf-8",
    )
    spec = query_spec(14, name, "../home_periods.csv", f"../graphs/{name}.graph", "winter_time", None,
                      "consumption", "EC", "effect of the switch to winter time on consumption")
    (ROOT / "queries" / f"{name}.json").write_text(json.dumps(spec, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
