"""Trip-planning environment.

Search tools (cities, attractions, restaurants, accommodations, flights,
driving distances) write into the actor's private results pane; the itinerary
editor is shared.  All data comes from a checked-in fixture so sessions are
reproducible.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from pathlib import Path
from typing import Any

from tandem.envs.actions import FINISH, ActionSpec, Parameter, ParsedAction
from tandem.envs.core import (
    PRIVATE,
    PUBLIC,
    ApplyResult,
    ComponentSpec,
    TaskEnvironment,
    TaskEnvironmentSpec,
    TaskInstance,
    TeamMember,
    checklist_score,
)
from tandem.envs.registry import FIXTURES_DIR

TRAVEL_ACTIONS: tuple[ActionSpec, ...] = (
    ActionSpec.build(
        "CITY_SEARCH",
        (Parameter("state"),),
        "List the cities covered in a given US state.",
    ),
    ActionSpec.build(
        "ATTRACTION_SEARCH",
        (Parameter("city"),),
        "Look up attractions in a city.",
    ),
    ActionSpec.build(
        "RESTAURANT_SEARCH",
        (Parameter("city"),),
        "Look up restaurants in a city with cuisine and price band.",
    ),
    ActionSpec.build(
        "ACCOMMODATION_SEARCH",
        (Parameter("city"),),
        "Look up places to stay in a city with nightly price.",
    ),
    ActionSpec.build(
        "FLIGHT_SEARCH",
        (Parameter("origin"), Parameter("destination"), Parameter("date")),
        "Find flights between two cities on a date (YYYY-MM-DD).",
    ),
    ActionSpec.build(
        "DISTANCE_MATRIX",
        (Parameter("origins"), Parameter("destinations")),
        "Driving distances between city lists (separate names with ';').",
    ),
    ActionSpec.build(
        "EDITOR_UPDATE",
        (Parameter("text"),),
        "Replace the shared itinerary text.",
    ),
    FINISH,
)

TRAVEL_SCHEMA: tuple[ComponentSpec, ...] = (
    ComponentSpec("editor", PUBLIC),
    ComponentSpec("search_results", PRIVATE),
)


@lru_cache(maxsize=1)
def load_travel_fixture() -> dict:
    path = FIXTURES_DIR / "travel_fixture.json"
    return json.loads(path.read_text())


def travel_spec(step_limit: int = 30) -> TaskEnvironmentSpec:
    return TaskEnvironmentSpec(
        task_id="travel",
        task_description=(
            "Plan a trip together. Use the search tools to gather options and "
            "keep the shared editor updated with the itinerary. The task is "
            "delivered only if the editor holds the final plan."
        ),
        action_specs=TRAVEL_ACTIONS,
        observation_schema=TRAVEL_SCHEMA,
        step_limit=step_limit,
    )


class TravelEnvironment(TaskEnvironment):
    def __init__(self, instance: TaskInstance, team=None, fixture: dict | None = None, step_limit: int = 30):
        self.fixture = fixture if fixture is not None else load_travel_fixture()
        self._cities = {c["name"].lower(): c for c in self.fixture["cities"]}
        kwargs: dict[str, Any] = {"scorer": checklist_score}
        if team is not None:
            kwargs["team"] = team
        super().__init__(travel_spec(step_limit), instance, **kwargs)

    def _initial_components(self) -> dict[str, Any]:
        return {"editor": "", "search_results": self._empty_private("")}

    def _apply(self, role: str, action: ParsedAction) -> ApplyResult:
        if action.name == "EDITOR_UPDATE":
            self.state.components["editor"] = action["text"]
            return ApplyResult(changed=("editor",), private=False)
        text = self._run_search(action)
        self.state.components["search_results"][role] = text
        return ApplyResult(changed=("search_results",), private=True)

    # -- search tools --------------------------------------------------------

    def _run_search(self, action: ParsedAction) -> str:
        if action.name == "CITY_SEARCH":
            return self._city_search(action["state"])
        if action.name == "ATTRACTION_SEARCH":
            return self._place_search("attractions", action["city"], self._fmt_attraction)
        if action.name == "RESTAURANT_SEARCH":
            return self._place_search("restaurants", action["city"], self._fmt_restaurant)
        if action.name == "ACCOMMODATION_SEARCH":
            return self._place_search("accommodations", action["city"], self._fmt_accommodation)
        if action.name == "FLIGHT_SEARCH":
            return self._flight_search(action["origin"], action["destination"], action["date"])
        if action.name == "DISTANCE_MATRIX":
            return self._distance_matrix(action["origins"], action["destinations"])
        raise AssertionError(f"unhandled action {action.name}")

    def _city_search(self, state: str) -> str:
        names = [
            c["name"]
            for c in self.fixture["cities"]
            if c["state"].lower() == state.strip().lower()
        ]
        if not names:
            return f"No cities found in {state.strip()}."
        return f"Cities in {state.strip()}: " + ", ".join(sorted(names)) + "."

    def _city(self, city: str) -> dict | None:
        return self._cities.get(city.strip().lower())

    def _place_search(self, kind: str, city: str, fmt) -> str:
        record = self._city(city)
        if record is None:
            return f"No results: unknown city {city.strip()}."
        rows = record.get(kind, [])
        if not rows:
            return f"No {kind} listed for {record['name']}."
        lines = [f"{kind.capitalize()} in {record['name']}:"]
        lines += [fmt(r) for r in rows]
        return "\n".join(lines)

    @staticmethod
    def _fmt_attraction(r: dict) -> str:
        return f"- {r['name']} ({r['kind']}), rating {r['rating']:.1f}"

    @staticmethod
    def _fmt_restaurant(r: dict) -> str:
        return f"- {r['name']} ({r['cuisine']}, {r['price']}), rating {r['rating']:.1f}"

    @staticmethod
    def _fmt_accommodation(r: dict) -> str:
        return f"- {r['name']} ({r['kind']}), ${r['price_per_night']}/night, rating {r['rating']:.1f}"

    def _flight_search(self, origin: str, destination: str, date: str) -> str:
        o, d, day = origin.strip().lower(), destination.strip().lower(), date.strip()
        rows = [
            f
            for f in self.fixture["flights"]
            if f["origin"].lower() == o and f["destination"].lower() == d and f["date"] == day
        ]
        if not rows:
            return f"No flights from {origin.strip()} to {destination.strip()} on {day}."
        lines = [f"Flights {rows[0]['origin']} -> {rows[0]['destination']} on {day}:"]
        for f in sorted(rows, key=lambda f: f["depart"]):
            lines.append(
                f"- {f['flight_no']} {f['depart']}-{f['arrive']}, ${f['price']}"
            )
        return "\n".join(lines)

    def _distance_matrix(self, origins: str, destinations: str) -> str:
        def split(raw: str) -> list[str]:
            parts = [p.strip() for p in raw.replace(";", ",").split(",")]
            return [p for p in parts if p]

        lines = []
        for o in split(origins):
            for d in split(destinations):
                lines.append(self._distance_line(o, d))
        return "\n".join(lines) if lines else "No city pairs given."

    def _distance_line(self, origin: str, destination: str) -> str:
        a, b = self._city(origin), self._city(destination)
        if a is None:
            return f"{origin}: unknown city."
        if b is None:
            return f"{destination}: unknown city."
        miles = driving_miles(a, b)
        return f"{a['name']} -> {b['name']}: {miles} mi driving"


def driving_miles(a: dict, b: dict) -> int:
    dx = a["x"] - b["x"]
    dy = a["y"] - b["y"]
    # road factor over straight-line grid distance, rounded for stability
    return int(round(math.hypot(dx, dy) * 1.22))


def make_travel_environment(instance: TaskInstance, team: tuple[TeamMember, ...] | None = None) -> TravelEnvironment:
    return TravelEnvironment(instance, team=team)
