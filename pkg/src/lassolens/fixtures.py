"""Deterministic synthetic stand-ins for the four evaluation datasets.

The originals are public downloads that are not redistributed with this
package. These generators rebuild each dataset with the same shape (row
count, column schema, class/cluster structure) and calibrate the group-level
statistics that analyses of the originals report, e.g. the bank term-deposit
split's call-duration means (537 s vs 223 s) and balance means (1804 vs
1280), or the Gentoo penguins' body-mass and flipper-length means. Where a
documented value exists the generated data reproduces it exactly (integer
sums are forced); everything else is plausible filler.

The fixtures are statistically calibrated, not record-level replicas: row
order, individual values, and any statistic not listed here will differ
from the originals. Generation is fully seeded, so repeated calls write
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def _force_sum(values: np.ndarray, target_sum: int, minimum: int | None = None):
    """Nudge integer values by +-1 until they sum to target_sum exactly."""
    values = values.astype(np.int64).copy()
    diff = int(target_sum - values.sum())
    step = 1 if diff > 0 else -1
    i = 0
    while diff != 0:
        j = i % values.size
        candidate = values[j] + step
        if minimum is None or candidate >= minimum:
            values[j] = candidate
            diff -= step
        i += 1
    return values


def _int_column(rng, n: int, mean: float, sd: float, minimum: int) -> np.ndarray:
    raw = np.round(rng.normal(mean, sd, size=n)).astype(np.int64)
    raw = np.maximum(raw, minimum)
    return _force_sum(raw, round(mean * n), minimum=minimum)


def _skewed_int_column(rng, n: int, mean: float, minimum: int) -> np.ndarray:
    raw = np.round(rng.gamma(2.0, mean / 2.0, size=n)).astype(np.int64)
    raw = np.maximum(raw, minimum)
    return _force_sum(raw, round(mean * n), minimum=minimum)


def _categorical(rng, n: int, shares: dict[str, float]) -> list[str]:
    """Exact integer allocation of categories by share, order shuffled."""
    names = list(shares)
    counts = [int(round(shares[c] * n)) for c in names]
    counts[-1] = n - sum(counts[:-1])
    tokens = np.repeat(names, counts)
    rng.shuffle(tokens)
    return tokens.tolist()


def _write(out_dir: Path, name: str, header: list[str], columns: list, context: dict):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    data_path = out_dir / f"{name}.csv"
    context_path = out_dir / f"{name}.context.json"
    n = len(columns[0])
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(str(col[i]) for col in columns))
    data_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    context_path.write_text(json.dumps(context, indent=2) + "\n", encoding="utf-8")
    return data_path, context_path


def write_penguins(out_dir: str | Path):
    """333 penguins, 3 species; Gentoo body mass mean exactly 5092 g and
    flipper length mean 25847/119 ~= 217.2 mm."""
    rng = np.random.default_rng(20_240_101)
    species_spec = [
        # name, n, culmen_len, culmen_depth, flipper(mean), body(mean)
        ("Adelie", 146, (38.8, 2.7), (18.3, 1.2), 190.1, 3706),
        ("Chinstrap", 68, (48.8, 3.3), (18.4, 1.1), 195.8, 3733),
        ("Gentoo", 119, (47.5, 3.1), (15.0, 1.0), 217.2, 5092),
    ]
    islands = {
        "Adelie": ["Torgersen"] * 47 + ["Biscoe"] * 44 + ["Dream"] * 55,
        "Chinstrap": ["Dream"] * 68,
        "Gentoo": ["Biscoe"] * 119,
    }

    rows_species, rows_island, rows_sex = [], [], []
    culmen_len, culmen_depth, flipper, body = [], [], [], []
    for name, n, (cl_m, cl_s), (cd_m, cd_s), fl_m, bm_m in species_spec:
        rows_species.extend([name] * n)
        island = list(islands[name])
        rng.shuffle(island)
        rows_island.extend(island)
        sexes = ["male"] * (n // 2) + ["female"] * (n - n // 2)
        rng.shuffle(sexes)
        rows_sex.extend(sexes)
        culmen_len.append(np.round(rng.normal(cl_m, cl_s, n), 1))
        culmen_depth.append(np.round(rng.normal(cd_m, cd_s, n), 1))
        flipper.append(_int_column(rng, n, fl_m, 6.5, minimum=170))
        body.append(_int_column(rng, n, bm_m, 460, minimum=2500))

    header = [
        "island", "culmen_length_mm", "culmen_depth_mm",
        "flipper_length_mm", "body_mass_g", "sex", "species",
    ]
    columns = [
        rows_island,
        np.concatenate(culmen_len).tolist(),
        np.concatenate(culmen_depth).tolist(),
        np.concatenate(flipper).tolist(),
        np.concatenate(body).tolist(),
        rows_sex,
        rows_species,
    ]
    context = {
        "_domain": "Morphological measurements of penguins observed on three "
                   "Antarctic islands.",
        "_label": "species",
        "island": "island where the penguin was observed",
        "culmen_length_mm": "length of the culmen (bill length) in millimeters",
        "culmen_depth_mm": "depth of the culmen (bill depth) in millimeters",
        "flipper_length_mm": "flipper length in millimeters",
        "body_mass_g": "body mass in grams",
        "sex": "sex of the penguin (male or female)",
        "species": "penguin species (Adelie, Chinstrap, or Gentoo)",
    }
    return _write(Path(out_dir), "penguins", header, columns, context)


# Term-deposit campaign: 5289 subscribers / 5873 non-subscribers. Calibrated:
# duration 537 vs 223, balance 1804 vs 1280, housing "no" 57.0% vs 36.6%.
_BANK_YES = 5289
_BANK_NO = 5873


def write_bank_marketing(out_dir: str | Path):
    rng = np.random.default_rng(20_240_102)
    n = _BANK_YES + _BANK_NO

    def side(n_side: int, duration_mean: int, balance_mean: int,
             housing_no: float, tertiary: float, cellular: float,
             success: float, loan_no: float):
        return {
            "age": _int_column(rng, n_side, 41.2, 11.0, minimum=18),
            "job": _categorical(rng, n_side, {
                "admin.": 0.12, "blue-collar": 0.17, "entrepreneur": 0.03,
                "housemaid": 0.03, "management": 0.22, "retired": 0.06,
                "self-employed": 0.04, "services": 0.08, "student": 0.03,
                "technician": 0.17, "unemployed": 0.03, "unknown": 0.02,
            }),
            "marital": _categorical(rng, n_side, {
                "married": 0.57, "single": 0.31, "divorced": 0.12,
            }),
            "education": _categorical(rng, n_side, {
                "secondary": 0.52 - (tertiary - 0.29), "tertiary": tertiary,
                "primary": 0.14, "unknown": 0.05,
            }),
            "default": _categorical(rng, n_side, {"no": 0.985, "yes": 0.015}),
            "balance": _force_sum(
                np.round(rng.normal(balance_mean, 2600, n_side)).astype(np.int64),
                balance_mean * n_side,
            ),
            "housing": _categorical(rng, n_side, {
                "no": housing_no, "yes": 1.0 - housing_no,
            }),
            "loan": _categorical(rng, n_side, {"no": loan_no, "yes": 1.0 - loan_no}),
            "contact": _categorical(rng, n_side, {
                "cellular": cellular, "telephone": 0.07,
                "unknown": 0.93 - cellular,
            }),
            "day": rng.integers(1, 32, size=n_side),
            "month": _categorical(rng, n_side, {
                "jan": 0.03, "feb": 0.07, "mar": 0.03, "apr": 0.08, "may": 0.25,
                "jun": 0.11, "jul": 0.13, "aug": 0.12, "sep": 0.03, "oct": 0.04,
                "nov": 0.09, "dec": 0.02,
            }),
            "duration": _force_sum(
                np.maximum(
                    np.round(rng.gamma(1.8, duration_mean / 1.8, n_side)), 2
                ).astype(np.int64),
                duration_mean * n_side,
                minimum=1,
            ),
            "campaign": _skewed_int_column(rng, n_side, 2.5, minimum=1),
            "pdays": None,  # filled below, tied to previous
            "previous": None,
            "poutcome": _categorical(rng, n_side, {
                "unknown": 0.74 - (success - 0.05), "failure": 0.12,
                "other": 0.09, "success": success,
            }),
            "emp_var_rate": np.round(rng.normal(0.1, 1.5, n_side), 1),
            "euribor3m": np.round(rng.uniform(0.63, 5.05, n_side), 3),
        }

    yes = side(_BANK_YES, 537, 1804, housing_no=0.57, tertiary=0.38,
               cellular=0.82, success=0.19, loan_no=0.92)
    no = side(_BANK_NO, 223, 1280, housing_no=0.366, tertiary=0.29,
              cellular=0.70, success=0.05, loan_no=0.85)

    for part, contacted_share in ((yes, 0.42), (no, 0.20)):
        size = len(part["age"])
        contacted = rng.random(size) < contacted_share
        pdays = np.where(contacted, rng.integers(1, 400, size=size), -1)
        previous = np.where(contacted, rng.integers(1, 16, size=size), 0)
        part["pdays"] = pdays
        part["previous"] = previous

    header = [
        "age", "job", "marital", "education", "default", "balance", "housing",
        "loan", "contact", "day", "month", "duration", "campaign", "pdays",
        "previous", "poutcome", "emp_var_rate", "euribor3m", "deposit",
    ]
    columns = []
    for key in header[:-1]:
        merged = list(yes[key]) + list(no[key])
        columns.append(merged)
    columns.append(["yes"] * _BANK_YES + ["no"] * _BANK_NO)

    context = {
        "_domain": "Direct-marketing phone campaign of a retail bank; each row "
                   "is one contacted client and whether they subscribed to a "
                   "term deposit.",
        "_label": "deposit",
        "age": "client age in years",
        "job": "type of job",
        "marital": "marital status",
        "education": "education level",
        "default": "has credit in default (yes/no)",
        "balance": "average yearly account balance in euros",
        "housing": "has a housing loan (yes/no)",
        "loan": "has a personal loan (yes/no)",
        "contact": "contact communication type",
        "day": "day of month of the last contact",
        "month": "month of the last contact",
        "duration": "duration of the last contact call in seconds",
        "campaign": "number of contacts performed during this campaign",
        "pdays": "days since the client was last contacted in a previous "
                 "campaign (-1 means never)",
        "previous": "number of contacts performed before this campaign",
        "poutcome": "outcome of the previous marketing campaign",
        "emp_var_rate": "employment variation rate at contact time",
        "euribor3m": "euribor 3 month rate at contact time",
        "deposit": "subscribed to a term deposit (yes/no)",
    }
    return _write(Path(out_dir), "bank_marketing", header, columns, context)


def write_food_nutrition(out_dir: str | Path):
    """7,499 foods in 7 nutrient-profile clusters, 12 attributes."""
    rng = np.random.default_rng(20_240_103)
    clusters = [
        # name, n, per-100g means for the 12 nutrients
        ("grains",     1500, dict(calories=350, total_fat=4, saturated_fat=1, protein=11, carbohydrates=72, sugar=3, fiber=9, sodium=8, calcium=35, iron=3.5, cholesterol=0, water=10)),
        ("meats",      1400, dict(calories=240, total_fat=15, saturated_fat=5, protein=24, carbohydrates=1, sugar=0.5, fiber=0.2, sodium=430, calcium=18, iron=2.2, cholesterol=85, water=58)),
        ("vegetables", 1200, dict(calories=42, total_fat=0.4, saturated_fat=0.1, protein=2.4, carbohydrates=8, sugar=3.5, fiber=2.8, sodium=35, calcium=45, iron=0.9, cholesterol=0, water=90)),
        ("fruits",     1100, dict(calories=60, total_fat=0.3, saturated_fat=0.1, protein=0.9, carbohydrates=15, sugar=11, fiber=2.3, sodium=3, calcium=15, iron=0.4, cholesterol=0, water=84)),
        ("dairy",       900, dict(calories=190, total_fat=12, saturated_fat=7.5, protein=10, carbohydrates=8, sugar=7, fiber=0.1, sodium=520, calcium=420, iron=0.3, cholesterol=40, water=64)),
        ("oils",        800, dict(calories=780, total_fat=86, saturated_fat=16, protein=0.4, carbohydrates=1, sugar=0.3, fiber=0.1, sodium=240, calcium=8, iron=0.2, cholesterol=25, water=8)),
        ("snacks",      599, dict(calories=480, total_fat=24, saturated_fat=8, protein=7, carbohydrates=58, sugar=22, fiber=2.5, sodium=640, calcium=55, iron=1.8, cholesterol=12, water=4)),
    ]
    nutrients = [
        "calories", "total_fat", "saturated_fat", "protein", "carbohydrates",
        "sugar", "fiber", "sodium", "calcium", "iron", "cholesterol", "water",
    ]
    labels: list[str] = []
    data = {k: [] for k in nutrients}
    for name, n, means in clusters:
        labels.extend([name] * n)
        for nutrient in nutrients:
            mean = means[nutrient]
            values = rng.normal(mean, 0.25 * mean + 0.5, size=n)
            data[nutrient].append(np.round(np.maximum(values, 0.0), 2))

    header = nutrients + ["cluster"]
    columns = [np.concatenate(data[k]).tolist() for k in nutrients] + [labels]
    context = {
        "_domain": "Nutrient content per 100 g of food items, grouped into "
                   "seven nutrient-profile clusters.",
        "_label": "cluster",
        "calories": "energy in kilocalories",
        "total_fat": "total fat in grams",
        "saturated_fat": "saturated fat in grams",
        "protein": "protein in grams",
        "carbohydrates": "carbohydrates in grams",
        "sugar": "sugars in grams",
        "fiber": "dietary fiber in grams",
        "sodium": "sodium in milligrams",
        "calcium": "calcium in milligrams",
        "iron": "iron in milligrams",
        "cholesterol": "cholesterol in milligrams",
        "water": "water content in grams",
    }
    return _write(Path(out_dir), "food_nutrition", header, columns, context)


# Customer segmentation: 2,212 households in 4 clusters. Sizes satisfy
# n1 + n2 = n0 + n3 so the income calibration below is exact: cluster c1
# mean income 75k vs 45k rest, cluster c2 mean 30k vs 60k rest.
_CUSTOMER_SIZES = {"c0": 560, "c1": 480, "c2": 626, "c3": 546}
_CUSTOMER_INCOME = {"c0": 55_000, "c1": 75_000, "c2": 30_000, "c3": None}
# c3 income balances the books: (45000*(n0+n2+n3) - n0*55000 - n2*30000)/n3
_CUSTOMER_INCOME["c3"] = (
    45_000 * (560 + 626 + 546) - 560 * 55_000 - 626 * 30_000
) / 546  # = 51941.39...; kept as an exact sum below

# Spending components per cluster (means); totals are their sums, giving
# c1 total exactly 1385 vs 388-ish rest and c2 exactly 99 vs exactly 788
# rest; wines c0 exactly 471 vs 227 rest. The fractional means are exact
# integer sums divided by the cluster size, so nothing rounds away.
_CUSTOMER_SPEND = {
    #        wines fruits meat fish sweets gold   -> total
    "c0": (471, 25, 90, 30, 14, 20),   # 650
    "c1": (245_424 / 480, 80, 450, 120, 73.7, 150),  # 1385
    "c2": (50, 8, 20, 6, 5, 10),       # 99
    "c3": (180, 25, 120, 30, 10_758 / 546, 30),  # 404.7033...
}


def write_customer_analysis(out_dir: str | Path):
    rng = np.random.default_rng(20_240_104)
    spend_names = ["wines", "fruits", "meat", "fish", "sweets", "gold"]

    cluster_rows = {
        "c0": dict(age=(52, 8), kid=0.15, teen=0.85, partner=0.72, response=0.19,
                   store=7.75, web=6.5, catalog=3.5, deals=2.5, visits=5.0),
        "c1": dict(age=(48, 9), kid=0.05, teen=0.08, partner=0.68, response=0.17,
                   store=7.8, web=5.2, catalog=6.0, deals=1.8, visits=3.2),
        "c2": dict(age=(32, 6), kid=0.82, teen=0.10, partner=0.60, response=0.17,
                   store=3.0, web=2.1, catalog=0.8, deals=2.2, visits=6.8),
        "c3": dict(age=(46, 9), kid=0.40, teen=0.55, partner=0.65, response=0.046,
                   store=4.5, web=4.0, catalog=1.6, deals=3.1, visits=6.2),
    }

    columns: dict[str, list] = {}
    labels: list[str] = []

    def extend(name, values):
        columns.setdefault(name, []).extend(
            values.tolist() if isinstance(values, np.ndarray) else values
        )

    for cluster, n in _CUSTOMER_SIZES.items():
        spec = cluster_rows[cluster]
        labels.extend([cluster] * n)

        extend("age", _int_column(rng, n, spec["age"][0], spec["age"][1], minimum=18))
        extend("education", _categorical(rng, n, {
            "graduation": 0.50, "phd": 0.22, "master": 0.17,
            "basic": 0.05, "second_cycle": 0.06,
        }))
        extend("marital_status", _categorical(rng, n, {
            "married": 0.39, "together": 0.26, "single": 0.21,
            "divorced": 0.10, "widow": 0.04,
        }))
        extend("partner", _categorical(rng, n, {
            "yes": spec["partner"], "no": 1.0 - spec["partner"],
        }))

        income_mean = _CUSTOMER_INCOME[cluster]
        income_sum = round(income_mean * n)
        incomes = np.maximum(
            np.round(rng.normal(income_mean, 0.22 * income_mean, n)), 2_000
        ).astype(np.int64)
        extend("income", _force_sum(incomes, income_sum, minimum=2_000))

        kid = (rng.random(n) < spec["kid"]).astype(int) + (rng.random(n) < 0.06)
        teen = (rng.random(n) < spec["teen"]).astype(int) + (rng.random(n) < 0.05)
        extend("kidhome", kid)
        extend("teenhome", teen)
        children = kid + teen
        extend("children", children)
        partner_flag = np.array(columns["partner"][-n:]) == "yes"
        extend("family_size", children + 1 + partner_flag.astype(int))
        extend("is_parent", ["yes" if c > 0 else "no" for c in children])

        extend("recency", rng.integers(0, 100, size=n))
        extend("customer_tenure_days", rng.integers(100, 2500, size=n))

        spend_cols = []
        for mean, name in zip(_CUSTOMER_SPEND[cluster], spend_names):
            col = _force_sum(
                np.maximum(np.round(rng.gamma(1.6, mean / 1.6, n)), 0).astype(np.int64),
                round(mean * n),
                minimum=0,
            )
            spend_cols.append(col)
            extend(name, col)
        extend("total_spent", np.sum(spend_cols, axis=0))

        extend("num_deals_purchases", _skewed_int_column(rng, n, spec["deals"], 0))
        extend("num_web_purchases", _skewed_int_column(rng, n, spec["web"], 0))
        extend("num_catalog_purchases", _skewed_int_column(rng, n, spec["catalog"], 0))
        extend("num_store_purchases", _skewed_int_column(rng, n, spec["store"], 0))
        extend("num_web_visits", _skewed_int_column(rng, n, spec["visits"], 0))

        for cmp_name, rate in (
            ("accepted_cmp1", 0.06), ("accepted_cmp2", 0.013),
            ("accepted_cmp3", 0.073), ("accepted_cmp4", 0.074),
            ("accepted_cmp5", 0.072),
        ):
            extend(cmp_name, _categorical(rng, n, {"yes": rate, "no": 1 - rate}))
        extend("complain", _categorical(rng, n, {"yes": 0.009, "no": 0.991}))
        extend("response", _categorical(rng, n, {
            "yes": spec["response"], "no": 1 - spec["response"],
        }))

    header = [
        "age", "education", "marital_status", "partner", "income", "kidhome",
        "teenhome", "children", "family_size", "is_parent", "recency",
        "customer_tenure_days", "wines", "fruits", "meat", "fish", "sweets",
        "gold", "total_spent", "num_deals_purchases", "num_web_purchases",
        "num_catalog_purchases", "num_store_purchases", "num_web_visits",
        "accepted_cmp1", "accepted_cmp2", "accepted_cmp3", "accepted_cmp4",
        "accepted_cmp5", "complain", "response", "cluster",
    ]
    ordered: list = [columns[name] for name in header[:-1]] + [labels]
    context = {
        "_domain": "Household purchasing behaviour of a food retailer's "
                   "customers, segmented into four behavioural clusters.",
        "_label": "cluster",
        "age": "age of the household's main customer in years",
        "education": "education level of the customer",
        "marital_status": "marital status of the customer",
        "partner": "lives with a partner (yes/no)",
        "income": "yearly household income",
        "kidhome": "number of small children in the household",
        "teenhome": "number of teenagers in the household",
        "children": "total number of children and teenagers at home",
        "family_size": "total number of people in the household",
        "is_parent": "household has children (yes/no)",
        "recency": "days since the last purchase",
        "customer_tenure_days": "days since enrollment as a customer",
        "wines": "amount spent on wine in the last two years",
        "fruits": "amount spent on fruit in the last two years",
        "meat": "amount spent on meat in the last two years",
        "fish": "amount spent on fish in the last two years",
        "sweets": "amount spent on sweets in the last two years",
        "gold": "amount spent on gold products in the last two years",
        "total_spent": "total amount spent across all product groups",
        "num_deals_purchases": "purchases made with a discount",
        "num_web_purchases": "purchases made through the web site",
        "num_catalog_purchases": "purchases made using a catalogue",
        "num_store_purchases": "purchases made directly in stores",
        "num_web_visits": "web site visits in the last month",
        "accepted_cmp1": "accepted the offer in the first campaign (yes/no)",
        "accepted_cmp2": "accepted the offer in the second campaign (yes/no)",
        "accepted_cmp3": "accepted the offer in the third campaign (yes/no)",
        "accepted_cmp4": "accepted the offer in the fourth campaign (yes/no)",
        "accepted_cmp5": "accepted the offer in the fifth campaign (yes/no)",
        "complain": "complained in the last two years (yes/no)",
        "response": "accepted the offer in the last campaign (yes/no)",
    }
    return _write(Path(out_dir), "customer_analysis", header, ordered, context)


FIXTURES = {
    "penguins": write_penguins,
    "bank_marketing": write_bank_marketing,
    "food_nutrition": write_food_nutrition,
    "customer_analysis": write_customer_analysis,
}


def write_all(out_dir: str | Path) -> dict[str, tuple[Path, Path]]:
    return {name: writer(out_dir) for name, writer in FIXTURES.items()}
