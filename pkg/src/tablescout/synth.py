"""Seeded synthetic corpora: random pools, planted-relevance benchmarks and
the small demo fixture used by the service tests and the web console.

Tables are drawn from a handful of themed schemas so that same-theme tables
have overlapping columns and vocabularies (high table scores) while the
constraint phrase embedded in a planted table's caption is what ties it to
the query's NL condition (high condition score after training). Each query
gets exactly one planted table (grade 2), one partially relevant table
(grade 1) and two hard distractors: same schema as the planted table but a
different constraint phrase (grade 0).
"""

from __future__ import annotations

import itertools

import numpy as np

from .tables import (
    Benchmark,
    ColumnData,
    GoldLabel,
    QueryMode,
    QuerySpec,
    TableMetadata,
    TablePool,
    TableRecord,
)

_PEOPLE = ["alice", "bob", "carol", "david", "emma", "frank", "grace", "henry", "ivy", "jonas",
           "karen", "leo", "mia", "noah", "olga", "peter", "quinn", "rosa", "sam", "tina"]

TOPICS: dict[str, dict] = {
    "students": {
        "caption": ["students", "enrollment records", "academic roster"],
        "id_column": "student_id",
        "columns": {
            "name": ("vocab", _PEOPLE),
            "major": ("vocab", ["biology", "physics", "history", "economics", "literature",
                                "chemistry", "engineering", "art"]),
            "grade": ("int", 40, 100),
            "enrollment_year": ("int", 2010, 2024),
            "credits": ("int", 0, 180),
            "scholarship": ("vocab", ["full", "partial", "none", "merit"]),
        },
        "phrases": [
            "average grade above 80", "grade below 50", "enrolled after 2020",
            "majoring in physics", "merit scholarship winners", "credits over 120",
            "freshmen enrolled in 2024", "failing students needing support",
            "honors candidates with distinction", "exchange visitors from abroad",
            "graduating seniors this spring", "tuition waivers granted", "thesis defenses scheduled", "dormitory assignments posted", "internship placements confirmed", "alumni mentors matched",
        ],
    },
    "weather": {
        "caption": ["weather observations", "climate log", "daily forecast"],
        "id_column": "station_id",
        "columns": {
            "city": ("vocab", ["oslo", "cairo", "lima", "tokyo", "perth", "quito", "reykjavik", "mumbai"]),
            "temperature": ("int", -30, 45),
            "humidity": ("int", 10, 100),
            "wind_speed": ("int", 0, 120),
            "rainfall": ("int", 0, 300),
            "condition": ("vocab", ["sunny", "cloudy", "rain", "snow", "storm", "fog"]),
        },
        "phrases": [
            "temperature above 30 degrees", "heavy rainfall over 200 millimeters",
            "humidity below 20 percent", "storm warnings issued", "snow cover in winter",
            "wind speed exceeding 90", "foggy mornings recorded", "heatwave alerts active",
            "freezing nights below zero", "monsoon season totals", "drought affected regions",
            "coastal stations reporting gales", "hailstorms damaging crops", "uv index peaking midday", "barometric pressure dropping", "visibility reduced by haze",
        ],
    },
    "sales": {
        "caption": ["sales ledger", "retail transactions", "quarterly revenue"],
        "id_column": "order_id",
        "columns": {
            "product": ("vocab", ["laptop", "phone", "monitor", "keyboard", "camera", "printer",
                                  "router", "tablet"]),
            "region": ("vocab", ["north", "south", "east", "west", "central"]),
            "amount": ("int", 10, 5000),
            "quantity": ("int", 1, 50),
            "discount": ("int", 0, 60),
            "quarter": ("vocab", ["q1", "q2", "q3", "q4"]),
        },
        "phrases": [
            "revenue above 4000", "bulk orders over 40 units", "discounts above 50 percent",
            "electronics sold in q4", "returns processed last month", "wholesale pricing applied",
            "flagship laptop bundles", "clearance items below 100", "subscription renewals billed",
            "premium camera kits", "holiday promotions active", "loyalty rewards redeemed", "invoices reconciled quarterly", "backorders awaiting stock", "gift wrapping requested", "extended warranties attached",
        ],
    },
    "movies": {
        "caption": ["movie catalog", "film archive", "box office listing"],
        "id_column": "movie_id",
        "columns": {
            "title_word": ("vocab", ["midnight", "voyage", "garden", "echo", "horizon", "ember",
                                     "harbor", "signal"]),
            "genre": ("vocab", ["drama", "comedy", "thriller", "documentary", "animation", "noir"]),
            "rating": ("int", 1, 10),
            "release_year": ("int", 1950, 2024),
            "runtime": ("int", 60, 220),
            "budget": ("int", 1, 300),
        },
        "phrases": [
            "rating above 8", "released before 1980", "runtime longer than 180 minutes",
            "animated features for families", "low budget independent productions",
            "award season contenders", "noir classics restored", "sequels released in 2020",
            "documentaries about nature", "directorial debuts praised", "cult favorites revived",
            "streaming exclusives launched", "festival premieres announced", "remastered editions shipped", "soundtrack albums charting", "ensemble casts celebrated",
        ],
    },
    "flights": {
        "caption": ["flight schedule", "airline departures", "route manifest"],
        "id_column": "flight_id",
        "columns": {
            "origin": ("vocab", ["ams", "jfk", "nrt", "syd", "gru", "dxb", "cdg", "sfo"]),
            "destination": ("vocab", ["lhr", "hnd", "lax", "fra", "sin", "yyz", "mex", "del"]),
            "delay": ("int", 0, 240),
            "duration": ("int", 45, 900),
            "passengers": ("int", 20, 520),
            "aircraft": ("vocab", ["a320", "b737", "a350", "b787", "e190"]),
        },
        "phrases": [
            "delays over 120 minutes", "long haul routes beyond 10 hours", "full cabins above 500 passengers",
            "widebody aircraft deployed", "red eye departures scheduled", "regional jets operating",
            "cancelled connections rebooked", "on time performance leaders", "cargo capacity reserved",
            "transpacific crossings listed", "seasonal charters added", "hub airports ranked", "codeshare agreements signed", "turbulence reports filed", "gate changes broadcast", "frequent flyer upgrades cleared",
        ],
    },
    "restaurants": {
        "caption": ["restaurant guide", "dining directory", "kitchen inspections"],
        "id_column": "venue_id",
        "columns": {
            "cuisine": ("vocab", ["italian", "sichuan", "mexican", "ethiopian", "japanese", "greek"]),
            "district": ("vocab", ["harbor", "old town", "midtown", "riverside", "uptown"]),
            "price_level": ("int", 1, 5),
            "stars": ("int", 1, 5),
            "seats": ("int", 10, 300),
            "inspection_score": ("int", 50, 100),
        },
        "phrases": [
            "five star reviews", "inspection score above 95", "seating over 200 guests",
            "budget friendly menus", "waterfront terraces open", "vegan options certified",
            "michelin recommendations earned", "late night kitchens", "family brunch specials",
            "chef tasting menus offered", "rooftop reservations available", "historic taverns preserved", "farm to table sourcing", "sommelier pairings curated", "outdoor heaters installed", "reservation waitlists growing",
        ],
    },
    "housing": {
        "caption": ["housing listings", "property registry", "real estate survey"],
        "id_column": "listing_id",
        "columns": {
            "neighborhood": ("vocab", ["brookside", "hillcrest", "lakeview", "meadows", "parkside", "sunset"]),
            "price": ("int", 80, 2500),
            "bedrooms": ("int", 1, 6),
            "area": ("int", 30, 400),
            "built_year": ("int", 1900, 2024),
            "type": ("vocab", ["apartment", "townhouse", "bungalow", "loft", "duplex"]),
        },
        "phrases": [
            "built before 1950", "price under 200 thousand", "more than 4 bedrooms",
            "floor area above 250", "new construction completed", "garden plots included",
            "renovated lofts downtown", "energy efficient certificates", "corner units with balconies",
            "gated communities listed", "short commute locations", "heritage facades protected", "open house weekends planned", "mortgage rates locked", "rooftop decks permitted", "basement conversions approved",
        ],
    },
    "energy": {
        "caption": ["energy output", "grid telemetry", "power generation"],
        "id_column": "plant_id",
        "columns": {
            "source": ("vocab", ["solar", "wind", "hydro", "nuclear", "coal", "geothermal"]),
            "output_mw": ("int", 5, 4000),
            "efficiency": ("int", 10, 95),
            "downtime": ("int", 0, 400),
            "commissioned": ("int", 1960, 2024),
            "operator": ("vocab", ["northgrid", "helios", "aquapower", "terrawatt", "voltcore"]),
        },
        "phrases": [
            "output above 3000 megawatts", "efficiency over 90 percent", "downtime under 24 hours",
            "renewable portfolio expanded", "commissioned after 2015", "offshore turbines spinning",
            "baseload reactors online", "peak demand records", "carbon capture retrofits",
            "grid storage batteries", "decommissioning schedules set", "maintenance windows planned", "transmission losses measured", "fuel stockpiles audited", "emission permits traded", "substation upgrades funded",
        ],
    },
}


def _column_values(rng: np.random.Generator, kind: tuple, n_rows: int) -> list[str]:
    if kind[0] == "vocab":
        return [str(v) for v in rng.choice(kind[1], size=n_rows)]
    if kind[0] == "int":
        # quantize wide ranges to a ~12-value grid so two tables drawn from the
        # same schema share values (that overlap is what the scorers measure)
        lo, hi = kind[1], kind[2]
        step = max(1, (hi - lo) // 12)
        return [str(lo + step * int(v)) for v in rng.integers(0, (hi - lo) // step + 1, size=n_rows)]
    if kind[0] == "idrange":
        lo, hi = kind[1], kind[2]
        return [str(v) for v in rng.integers(lo, hi, size=n_rows)]
    raise ValueError(f"unknown column kind {kind[0]!r}")


def _make_table(
    rng: np.random.Generator,
    table_id: str,
    topic: str,
    column_names: list[str],
    n_rows: int,
    caption: str,
    description: str = "",
    id_range: tuple[int, int] | None = None,
) -> TableRecord:
    scheme = TOPICS[topic]
    columns = []
    for name in column_names:
        if name == scheme["id_column"]:
            lo, hi = id_range if id_range else (10_000, 99_999)
            values = _column_values(rng, ("idrange", lo, hi), n_rows)
        else:
            values = _column_values(rng, scheme["columns"][name], n_rows)
        columns.append(ColumnData.from_values(name, values))
    return TableRecord(
        id=table_id,
        columns=columns,
        row_count=n_rows,
        metadata=TableMetadata(caption=caption, description=description),
    )


def random_pool(n_tables: int, seed: int = 0, pool_id: str = "synthetic") -> TablePool:
    """Pool of themed random tables; deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    pool = TablePool(pool_id=pool_id)
    topics = list(TOPICS)
    for i in range(n_tables):
        topic = topics[int(rng.integers(len(topics)))]
        scheme = TOPICS[topic]
        names = [scheme["id_column"], *scheme["columns"].keys()]
        n_cols = int(rng.integers(4, len(names) + 1))
        chosen = [names[j] for j in sorted(rng.choice(len(names), size=n_cols, replace=False))]
        n_rows = int(rng.integers(20, 41))
        caption = str(rng.choice(scheme["caption"]))
        pool.add(_make_table(rng, f"t{i:05d}", topic, chosen, n_rows, caption))
    return pool


def _query_table_for(
    rng: np.random.Generator, topic: str, mode: QueryMode, qnum: int
) -> tuple[TableRecord, list[str], tuple[int, int]]:
    """The user's seed table plus its column selection and join-id range."""
    scheme = TOPICS[topic]
    others = list(scheme["columns"].keys())
    picked = [others[j] for j in sorted(rng.choice(len(others), size=3, replace=False))]
    # a narrow per-query id range: tables sharing it overlap heavily on key
    # values, tables from other queries not at all
    base = 100_000 + qnum * 1_000
    id_range = (base, base + 16)
    names = [scheme["id_column"], *picked]
    table = _make_table(
        rng,
        table_id=f"query-{qnum:03d}",
        topic=topic,
        column_names=names,
        n_rows=30,
        caption=f"my {topic} worksheet",
        id_range=id_range,
    )
    return table, names, id_range


def planted_benchmark(
    n_queries: int = 100,
    pool_size: int = 500,
    seed: int = 0,
    modes: tuple[QueryMode, ...] = (QueryMode.UNION, QueryMode.JOIN),
    k: int = 10,
) -> tuple[TablePool, Benchmark]:
    """Pool + benchmark where each query has exactly one planted grade-2 table.

    Layout per query: planted (schema/key match AND caption carries the
    query's constraint phrase), partial (weaker overlap, right phrase,
    grade 1), two distractors (planted's schema, wrong phrase, grade 0).
    Remaining pool capacity is filled with random themed tables.
    """
    rng = np.random.default_rng(seed)
    # the last few phrases of each topic are reserved for distractor captions
    # so no distractor ever carries a phrase some other query searches for
    combos = [(t, p) for t in TOPICS for p in TOPICS[t]["phrases"][:-3]]
    if n_queries > len(combos):
        raise ValueError(f"at most {len(combos)} distinct (topic, phrase) queries supported")
    order = rng.permutation(len(combos))
    chosen = [combos[i] for i in order[:n_queries]]

    pool = TablePool(pool_id=f"planted-{seed}")
    queries: list[QuerySpec] = []
    qrels: list[GoldLabel] = []
    counter = itertools.count()

    for qnum, (topic, phrase) in enumerate(chosen):
        scheme = TOPICS[topic]
        mode = modes[qnum % len(modes)]
        qid = f"q{qnum:03d}"
        qtable, qnames, id_range = _query_table_for(rng, topic, mode, qnum)
        other_cols = [c for c in scheme["columns"] if c not in qnames]
        mode_word = "unionable" if mode is QueryMode.UNION else "joinable"
        condition = f"Find {mode_word} tables containing {topic} with {phrase}"

        def add(table_id_prefix: str, columns: list[str], caption: str, grade: int | None,
                table_id_range=None):
            tid = f"t{next(counter):04d}-{table_id_prefix}"
            pool.add(_make_table(rng, tid, topic, columns, 30, caption, id_range=table_id_range))
            if grade is not None:
                qrels.append(GoldLabel(query_id=qid, table_id=tid, relevance=grade))
            return tid

        if mode is QueryMode.UNION:
            planted_cols = qnames + other_cols[:1]
            partial_cols = qnames[:2] + other_cols[:2]
        else:
            planted_cols = [scheme["id_column"], *other_cols[:3]]
            partial_cols = [scheme["id_column"], *other_cols[:2]]
        wrong = scheme["phrases"][-3:]

        add("planted", planted_cols, f"{topic} {phrase}", 2,
            table_id_range=id_range)
        add("partial", partial_cols, f"{scheme['caption'][0]} {phrase}", 1,
            table_id_range=None if mode is QueryMode.JOIN else id_range)
        for di in range(2):
            w = wrong[int(rng.integers(len(wrong)))]
            add(f"distract{di}", planted_cols, f"{topic} {w}", 0, table_id_range=id_range)

        queries.append(
            QuerySpec(
                mode=mode,
                query_table=qtable,
                condition=condition,
                key_column=scheme["id_column"] if mode is QueryMode.JOIN else None,
                k=k,
                query_id=qid,
            )
        )

    topics = list(TOPICS)
    while len(pool) < pool_size:
        topic = topics[int(rng.integers(len(topics)))]
        scheme = TOPICS[topic]
        names = [scheme["id_column"], *scheme["columns"].keys()]
        n_cols = int(rng.integers(4, len(names) + 1))
        cols = [names[j] for j in sorted(rng.choice(len(names), size=n_cols, replace=False))]
        caption = f"{rng.choice(scheme['caption'])} {rng.choice(['archive', 'snapshot', 'extract', 'digest'])}"
        pool.add(_make_table(rng, f"t{next(counter):04d}-filler", topic, cols, 30, caption))

    benchmark = Benchmark(queries=queries, qrels=qrels, max_grade=2)
    return pool, benchmark


def mixed_mode_queries(
    pool: TablePool,
    n: int,
    seed: int = 0,
    k: int = 10,
    modes: tuple[QueryMode, ...] = (QueryMode.NL_ONLY, QueryMode.UNION, QueryMode.JOIN),
    with_condition: bool = True,
) -> list[QuerySpec]:
    """Random well-formed queries over an existing pool (for benchmarks that
    need load, not judgments). Query tables are column subsets of pool
    tables; NL-only queries always carry a condition."""
    rng = np.random.default_rng(seed)
    tables = list(pool)
    topics = list(TOPICS)
    out: list[QuerySpec] = []
    for i in range(n):
        mode = modes[i % len(modes)]
        topic = topics[int(rng.integers(len(topics)))]
        phrase = str(rng.choice(TOPICS[topic]["phrases"]))
        condition = f"Find tables containing {topic} with {phrase}"
        if mode is QueryMode.NL_ONLY:
            out.append(QuerySpec(mode=mode, condition=condition, k=k, query_id=f"m{i:03d}"))
            continue
        base = tables[int(rng.integers(len(tables)))]
        n_cols = int(rng.integers(1, len(base.columns) + 1))
        picked = sorted(rng.choice(len(base.columns), size=n_cols, replace=False))
        columns = [base.columns[j] for j in picked]
        qtable = TableRecord(id=f"query-m{i:03d}", columns=columns, row_count=base.row_count,
                             metadata=TableMetadata())
        out.append(
            QuerySpec(
                mode=mode,
                query_table=qtable,
                condition=condition if with_condition else None,
                key_column=columns[0].name if mode is QueryMode.JOIN else None,
                k=k,
                query_id=f"m{i:03d}",
            )
        )
    return out


# --------------------------------------------------------------------------
# demo fixture (service tests + web console)
# --------------------------------------------------------------------------

DEMO_CONDITION = "Find unionable tables containing students with an average grade above 80"


def demo_fixture(seed: int = 7, pool_size: int = 50) -> tuple[TablePool, TableRecord]:
    """50-table pool with a planted 'scholarship' table unionable with the
    returned student query table, plus an 'english_grades' near-miss that
    matches on schema but not on the condition."""
    rng = np.random.default_rng(seed)
    pool = TablePool(pool_id="demo")

    # a narrow shared id range makes the planted tables genuinely unionable
    # with the query on values, not just on column names
    ids = (500, 516)
    student_cols = ["student_id", "name", "major", "grade"]
    query = _make_table(rng, "student_query", "students", student_cols, 30,
                        caption="", id_range=ids)

    pool.add(_make_table(rng, "scholarship", "students", student_cols + ["scholarship"], 30,
                         caption="scholarship",
                         description="students with average grade above 80 holding scholarships",
                         id_range=ids))
    pool.add(_make_table(rng, "english_grades", "students", ["student_id", "name", "grade"], 30,
                         caption="english grades",
                         description="students failing english with grade below 50",
                         id_range=ids))
    filler = random_pool(pool_size - 2, seed=seed + 1, pool_id="ignored")
    for t in filler:
        pool.add(t)
    return pool, query
