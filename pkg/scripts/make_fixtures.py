"""Generate the checked-in data fixtures.

Deterministic (seeded) so regenerating produces byte-identical files.  Run
from the repo root:

    python scripts/make_fixtures.py
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "tandem" / "envs" / "fixtures"
SEED = 20260814

# name, state, longitude, latitude
CITIES = [
    ("Los Angeles", "California", -118.24, 34.05),
    ("San Francisco", "California", -122.42, 37.77),
    ("San Diego", "California", -117.16, 32.72),
    ("Sacramento", "California", -121.49, 38.58),
    ("Portland", "Oregon", -122.68, 45.52),
    ("Eugene", "Oregon", -123.09, 44.05),
    ("Seattle", "Washington", -122.33, 47.61),
    ("Spokane", "Washington", -117.43, 47.66),
    ("Las Vegas", "Nevada", -115.14, 36.17),
    ("Reno", "Nevada", -119.81, 39.53),
    ("Phoenix", "Arizona", -112.07, 33.45),
    ("Tucson", "Arizona", -110.97, 32.22),
    ("New York City", "New York", -74.01, 40.71),
    ("Buffalo", "New York", -78.88, 42.89),
    ("Boston", "Massachusetts", -71.06, 42.36),
    ("Chicago", "Illinois", -87.63, 41.88),
    ("Austin", "Texas", -97.74, 30.27),
    ("Houston", "Texas", -95.37, 29.76),
    ("Denver", "Colorado", -104.99, 39.74),
    ("New Orleans", "Louisiana", -90.07, 29.95),
]

ATTRACTION_FORMS = [
    ("{c} Museum of Art", "museum"),
    ("{c} Science Center", "museum"),
    ("Old Town {c}", "landmark"),
    ("{c} Botanical Garden", "park"),
    ("{c} Riverwalk", "park"),
    ("{c} Observatory", "landmark"),
    ("{c} Aquarium", "zoo"),
    ("{c} Heritage Park", "park"),
    ("{c} Gallery District", "gallery"),
]

RESTAURANTS = [
    "The Copper Kettle", "Juniper & Sage", "Harbor Line", "Blue Finch",
    "Casa Mirasol", "Golden Wok", "Trattoria Lume", "The Brass Owl",
    "Saffron House", "Pine & Salt", "Magnolia Table", "The Tin Lantern",
    "Verde Cocina", "Night Market Kitchen", "Smokestack BBQ", "Lotus Garden",
    "The Gilded Fork", "Driftwood Diner", "Ember & Oak", "Cielo Azul",
]
CUISINES = ["italian", "mexican", "thai", "vegetarian", "seafood", "bbq", "indian", "japanese", "american"]

LODGING_WORDS = [
    "Harborview", "Cascade", "Meridian", "Juniper", "Lakeside", "Summit",
    "Magnolia", "Redwood", "Beacon", "Canyon", "Prairie", "Atlas",
]
LODGING_FORMS = [("Hotel {w}", "hotel"), ("The {w} Inn", "inn"), ("{w} Suites", "hotel"), ("{w} Lodge", "lodge"), ("{w} Hostel", "hostel")]

FLIGHT_DATES = [f"2026-09-0{d}" for d in range(1, 8)]
ROUTES = [
    ("Los Angeles", "San Francisco"), ("Los Angeles", "Portland"),
    ("Los Angeles", "Las Vegas"), ("Los Angeles", "New York City"),
    ("San Francisco", "Seattle"), ("San Francisco", "Portland"),
    ("San Diego", "Phoenix"), ("Seattle", "Denver"), ("Seattle", "Chicago"),
    ("Portland", "Denver"), ("Las Vegas", "Austin"), ("Phoenix", "Houston"),
    ("New York City", "Boston"), ("New York City", "Chicago"),
    ("Boston", "Buffalo"), ("Chicago", "Denver"), ("Chicago", "New Orleans"),
    ("Austin", "New Orleans"), ("Denver", "Los Angeles"), ("Houston", "New York City"),
]


def grid(lon: float, lat: float) -> tuple[int, int]:
    return round(lon * 53), round(lat * 69)


def make_travel(rng: random.Random) -> dict:
    cities = []
    for name, state, lon, lat in CITIES:
        x, y = grid(lon, lat)
        forms = rng.sample(ATTRACTION_FORMS, k=rng.randint(3, 5))
        attractions = [
            {"name": f.format(c=name), "kind": kind, "rating": round(rng.uniform(3.5, 4.9), 1)}
            for f, kind in forms
        ]
        names = rng.sample(RESTAURANTS, k=rng.randint(4, 6))
        cuisines = rng.sample(CUISINES, k=len(names))
        if "vegetarian" not in cuisines:  # keep one veggie option everywhere
            cuisines[0] = "vegetarian"
        restaurants = [
            {
                "name": n,
                "cuisine": c,
                "price": rng.choice(["$", "$$", "$$$"]),
                "rating": round(rng.uniform(3.4, 4.8), 1),
            }
            for n, c in zip(names, cuisines)
        ]
        lodging = []
        for form, kind in rng.sample(LODGING_FORMS, k=rng.randint(3, 4)):
            word = rng.choice(LODGING_WORDS)
            price = rng.randrange(60, 330, 5) if kind != "hostel" else rng.randrange(30, 80, 5)
            lodging.append(
                {
                    "name": form.format(w=word),
                    "kind": kind,
                    "price_per_night": price,
                    "rating": round(rng.uniform(3.2, 4.7), 1),
                }
            )
        cities.append(
            {
                "name": name,
                "state": state,
                "x": x,
                "y": y,
                "attractions": attractions,
                "restaurants": restaurants,
                "accommodations": lodging,
            }
        )

    coords = {c["name"]: (c["x"], c["y"]) for c in cities}
    flights = []
    n = 0
    for a, b in ROUTES:
        for origin, dest in ((a, b), (b, a)):
            (x1, y1), (x2, y2) = coords[origin], coords[dest]
            miles = math.hypot(x1 - x2, y1 - y2)
            minutes = int(miles / 8.0) + 40
            for date in FLIGHT_DATES:
                for _ in range(rng.randint(0, 2)):
                    n += 1
                    dep_h, dep_m = rng.randint(6, 20), rng.choice([0, 10, 15, 25, 30, 40, 45, 55])
                    arr = dep_h * 60 + dep_m + minutes
                    flights.append(
                        {
                            "flight_no": f"TD{n:03d}",
                            "origin": origin,
                            "destination": dest,
                            "date": date,
                            "depart": f"{dep_h:02d}:{dep_m:02d}",
                            "arrive": f"{(arr // 60) % 24:02d}:{arr % 60:02d}",
                            "price": int(60 + miles * 0.11) + rng.randrange(-15, 40, 5),
                        }
                    )
    return {"cities": cities, "flights": flights}


TRAVEL_INSTANCES = [
    {
        "instance_id": "trip-oregon-3day",
        "task_id": "travel",
        "query": (
            "Plan a 3-day trip to Oregon departing from Los Angeles on "
            "2026-09-02. Pick one city, a place to stay, and at least two "
            "attractions, then write the day-by-day plan in the editor."
        ),
        "hidden_info": [
            "The total budget is $1800 and cannot be exceeded.",
            "The traveler is vegetarian, so at least one vegetarian restaurant must be in the plan.",
        ],
        "checklist": ["portland|eugene", "day 1", "day 2", "day 3", "vegetarian"],
    },
    {
        "instance_id": "trip-two-city-southwest",
        "task_id": "travel",
        "query": (
            "Plan a week visiting two cities in the Southwest (Arizona or "
            "Nevada), starting 2026-09-01 from San Diego. Compare driving "
            "distance between the two cities and include it in the plan."
        ),
        "hidden_info": [
            "The traveler refuses to drive more than 600 miles total.",
            "Museums are strongly preferred over outdoor attractions.",
        ],
        "checklist": ["(phoenix|tucson|las vegas|reno)", "mi", "museum"],
    },
    {
        "instance_id": "trip-east-coast-food",
        "task_id": "travel",
        "query": (
            "Plan a foodie weekend in Boston or New York City for 2026-09-05, "
            "flying from Chicago. Include three restaurants and one attraction "
            "in the editor plan."
        ),
        "hidden_info": [
            "Seafood is the priority; at least two of the restaurants should serve it if possible.",
        ],
        "checklist": ["(boston|new york city)", "restaurant", "flight"],
    },
]


PAPER_TOPICS = [
    (
        "teaming",
        [
            "human-agent teaming", "mixed-initiative interaction", "shared control",
            "turn-taking", "initiative", "collaboration",
        ],
        [
            "Studies how people and software agents split control during shared tasks.",
            "Reports that balanced initiative improves both outcomes and trust.",
            "Analyzes communication timing between human and machine teammates.",
        ],
    ),
    (
        "dialogue",
        [
            "dialogue systems", "clarification questions", "grounding",
            "conversational repair", "task-oriented dialogue",
        ],
        [
            "Examines when assistants should ask instead of act.",
            "Measures grounding failures in long task-oriented conversations.",
            "Proposes a model of repair moves in assistant conversations.",
        ],
    ),
    (
        "code-agents",
        [
            "program synthesis", "code generation", "notebook agents",
            "execution feedback", "debugging",
        ],
        [
            "Uses execution traces to steer iterative code generation.",
            "Benchmarks agents that write and run analysis notebooks.",
            "Shows error messages are an effective learning signal for synthesis.",
        ],
    ),
    (
        "data-analysis",
        [
            "data analysis", "tabular data", "automated insights",
            "exploratory analysis", "visualization recommendation",
        ],
        [
            "Automates exploratory passes over tabular datasets.",
            "Ranks candidate insights for analyst review.",
            "Couples chart recommendation with natural language summaries.",
        ],
    ),
    (
        "planning",
        [
            "travel planning", "itinerary generation", "constraint satisfaction",
            "preference elicitation", "recommendation",
        ],
        [
            "Builds itineraries under budget and distance constraints.",
            "Elicits latent preferences through targeted questions.",
            "Combines search tools with plan repair for trip design.",
        ],
    ),
    (
        "evaluation",
        [
            "evaluation", "benchmarks", "simulated users",
            "human studies", "interactive evaluation",
        ],
        [
            "Argues static benchmarks miss interaction quality.",
            "Simulates users to scale interactive evaluation.",
            "Compares simulated and real user studies on the same tasks.",
        ],
    ),
]

SURNAMES = [
    "Okafor", "Lindqvist", "Marchetti", "Tanaka", "Beaumont", "Kowalski",
    "Ferreira", "Nguyen", "Adeyemi", "Halvorsen", "Castellanos", "Bishop",
    "Iyer", "Novak", "Petrov", "Sandoval", "Whitfield", "Moreau",
]
VENUES = [
    "Journal of Interactive Agents",
    "Symposium on Mixed-Initiative Systems",
    "Conference on Language Interfaces",
    "Workshop on Analysis Tooling",
    "Annals of Automation Research",
]

TITLE_FORMS = [
    "{K0} with {k1}: a study of {k2}",
    "Rethinking {k1} for {k2}",
    "{K0} under real-world constraints",
    "From {k1} to {k2}: lessons for {k0}",
    "A framework for {k1} in {k2}",
    "Measuring {k1} during {k2}",
]


def make_papers(rng: random.Random) -> dict:
    papers = []
    pid = 0
    for topic, keywords, sentences in PAPER_TOPICS:
        for _ in range(8):  # 6 topics x 8 = 48 papers
            pid += 1
            ks = rng.sample(keywords, k=3)
            form = rng.choice(TITLE_FORMS)
            title = form.format(
                K0=ks[0].capitalize(), k0=ks[0], k1=ks[1], k2=ks[2]
            )
            n_auth = rng.randint(1, 4)
            authors = [
                f"{rng.choice('ABCDEFGHJKLMNPRST')}. {s}"
                for s in rng.sample(SURNAMES, k=n_auth)
            ]
            abstract = " ".join(rng.sample(sentences, k=2)) + (
                f" Keywords: {', '.join(ks)}."
            )
            papers.append(
                {
                    "paper_id": f"P{pid:03d}",
                    "title": title,
                    "authors": authors,
                    "year": rng.randint(2015, 2025),
                    "venue": rng.choice(VENUES),
                    "topic": topic,
                    "abstract": abstract,
                }
            )
    return {"papers": papers}


RELATED_WORK_INSTANCES = [
    {
        "instance_id": "rw-mixed-initiative",
        "task_id": "related_work",
        "query": (
            "Draft a short related-work section about mixed-initiative "
            "interaction between people and software agents. Curate at least "
            "four papers in the shared library, then put the draft with a "
            "references list in the editor."
        ),
        "hidden_info": [
            "The draft must cite paper P001 because it is the advisor's own work.",
        ],
        "checklist": ["references:", "\\[1\\]", "\\[4\\]"],
    },
    {
        "instance_id": "rw-interactive-eval",
        "task_id": "related_work",
        "query": (
            "Draft a related-work paragraph on evaluating interactive "
            "assistants with simulated users. Keep the library to three "
            "highly relevant papers and include the references list."
        ),
        "hidden_info": [
            "Papers older than 2018 should be dropped from the library.",
        ],
        "checklist": ["simulated", "references:", "\\[3\\]"],
    },
]


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def make_tabular_instances(rng: random.Random) -> list[dict]:
    months = ["Jan", "Feb", "Mar", "Apr", "May", "Jun"]

    regions = {"North": ["N1", "N2"], "South": ["S1", "S2"], "West": ["W1", "W2"]}
    sales_rows = []
    for region, stores in regions.items():
        base = {"North": 210, "South": 260, "West": 180}[region]
        for store in stores:
            for m in months:
                units = base + rng.randint(-40, 60)
                price = rng.choice([9, 11, 12, 14])
                sales_rows.append([store, region, m, units, units * price])
    sales_csv = csv_text(["store", "region", "month", "units", "revenue"], sales_rows)

    air_rows = []
    for city in ["Seattle", "Denver", "Houston", "Chicago", "Phoenix", "Boston"]:
        base = rng.randint(6, 14)
        for m in months:
            air_rows.append([city, m, base + rng.randint(0, 9), round(rng.uniform(0.02, 0.07), 3)])
    air_csv = csv_text(["city", "month", "pm25", "ozone"], air_rows)

    marathon_rows = []
    for i in range(1, 61):
        group = rng.choice(["18-29", "30-39", "40-49", "50+"])
        base = {"18-29": 205, "30-39": 212, "40-49": 224, "50+": 238}[group]
        marathon_rows.append([f"R{i:03d}", group, base + rng.randint(-25, 45)])
    marathon_csv = csv_text(["runner_id", "age_group", "finish_minutes"], marathon_rows)

    return [
        {
            "instance_id": "tab-store-sales",
            "task_id": "tabular",
            "query": (
                "Using store_sales.csv, find which region has the highest "
                "total revenue and how large the gap to the runner-up is. "
                "Write the answer with numbers into the report editor."
            ),
            "hidden_info": [
                "Only the first quarter (Jan, Feb, Mar) matters for this report.",
            ],
            "checklist": ["(north|south|west)", "revenue", "[0-9]"],
            "data": {"files": {"store_sales.csv": sales_csv}},
        },
        {
            "instance_id": "tab-air-quality",
            "task_id": "tabular",
            "query": (
                "Using city_air.csv, rank the cities by average pm25 and "
                "report the cleanest and dirtiest city in the editor."
            ),
            "hidden_info": [
                "Phoenix readings from May onward are suspect and should be excluded.",
            ],
            "checklist": ["pm25", "[0-9]"],
            "data": {"files": {"city_air.csv": air_csv}},
        },
        {
            "instance_id": "tab-marathon",
            "task_id": "tabular",
            "query": (
                "Using marathon.csv, compare median finish time across age "
                "groups and state the fastest group in the report editor."
            ),
            "hidden_info": [
                "The report is for the 50+ newsletter, so call out that group explicitly.",
            ],
            "checklist": ["median|minutes", "50\\+"],
            "data": {"files": {"marathon.csv": marathon_csv}},
        },
    ]


TOY_INSTANCES = [
    {
        "instance_id": "toy-board",
        "task_id": "toy",
        "query": "Agree on a motto and post it in the shared editor.",
        "hidden_info": ["The motto must mention rivers."],
        "checklist": ["river"],
    }
]


def dump(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    print(f"wrote {path}")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    dump(OUT / "travel_fixture.json", make_travel(rng))
    dump(OUT / "travel_instances.json", TRAVEL_INSTANCES)
    dump(OUT / "related_work_fixture.json", make_papers(rng))
    dump(OUT / "related_work_instances.json", RELATED_WORK_INSTANCES)
    dump(OUT / "tabular_instances.json", make_tabular_instances(rng))
    dump(OUT / "toy_instances.json", TOY_INSTANCES)


if __name__ == "__main__":
    main()
