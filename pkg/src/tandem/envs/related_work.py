"""Literature-survey environment.

Paper search is private to whoever ran it; the citation library and the draft
editor are shared.  The corpus is a checked-in fixture so that ranking is
reproducible.
"""

from __future__ import annotations

import json
import re
from functools import lru_cache
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
from tandem.errors import SemanticActionError

RELATED_WORK_ACTIONS: tuple[ActionSpec, ...] = (
    ActionSpec.build(
        "SEARCH_PAPER",
        (Parameter("query"),),
        "Search the paper corpus; top matches land in your private results.",
    ),
    ActionSpec.build(
        "LIBRARY_ADD_PAPER",
        (Parameter("paper_id"),),
        "Add a paper to the shared citation library by id.",
    ),
    ActionSpec.build(
        "LIBRARY_DROP_PAPER",
        (Parameter("paper_id"),),
        "Remove a paper from the shared citation library.",
    ),
    ActionSpec.build(
        "LIBRARY_TO_DRAFT",
        (),
        "Append the current library as a references list to the draft.",
    ),
    ActionSpec.build(
        "EDITOR_UPDATE",
        (Parameter("text"),),
        "Replace the shared draft text.",
    ),
    FINISH,
)

RELATED_WORK_SCHEMA: tuple[ComponentSpec, ...] = (
    ComponentSpec("editor", PUBLIC),
    ComponentSpec("library", PUBLIC),
    ComponentSpec("search_results", PRIVATE),
)

TOP_K = 5


@lru_cache(maxsize=1)
def load_paper_corpus() -> tuple[dict, ...]:
    path = FIXTURES_DIR / "related_work_fixture.json"
    return tuple(json.loads(path.read_text())["papers"])


def related_work_spec(step_limit: int = 30) -> TaskEnvironmentSpec:
    return TaskEnvironmentSpec(
        task_id="related_work",
        task_description=(
            "Write a related-work section together. Search the corpus, curate "
            "the shared library, and keep the draft in the shared editor; only "
            "the editor text counts as the final deliverable."
        ),
        action_specs=RELATED_WORK_ACTIONS,
        observation_schema=RELATED_WORK_SCHEMA,
        step_limit=step_limit,
    )


def _tokens(text: str) -> set[str]:
    return set(re.findall(r"[a-z0-9]+", text.lower()))


def rank_papers(query: str, corpus: tuple[dict, ...], top_k: int = TOP_K) -> list[dict]:
    """Token-overlap ranking, stable under ties via paper_id."""
    q = _tokens(query)
    scored = []
    for paper in corpus:
        hay = _tokens(paper["title"]) | _tokens(paper["abstract"])
        score = len(q & hay)
        if score > 0:
            scored.append((score, paper["paper_id"], paper))
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [p for _, _, p in scored[:top_k]]


def short_authors(authors: list[str]) -> str:
    if len(authors) == 1:
        return authors[0]
    if len(authors) == 2:
        return f"{authors[0]} and {authors[1]}"
    return f"{authors[0]} et al."


class RelatedWorkEnvironment(TaskEnvironment):
    def __init__(self, instance: TaskInstance, team=None, corpus: tuple[dict, ...] | None = None, step_limit: int = 30):
        self.corpus = corpus if corpus is not None else load_paper_corpus()
        self._by_id = {p["paper_id"]: p for p in self.corpus}
        kwargs: dict[str, Any] = {"scorer": checklist_score}
        if team is not None:
            kwargs["team"] = team
        super().__init__(related_work_spec(step_limit), instance, **kwargs)

    def _initial_components(self) -> dict[str, Any]:
        return {"editor": "", "library": [], "search_results": self._empty_private("")}

    def _apply(self, role: str, action: ParsedAction) -> ApplyResult:
        if action.name == "SEARCH_PAPER":
            self.state.components["search_results"][role] = self._search(action["query"])
            return ApplyResult(changed=("search_results",), private=True)
        if action.name == "LIBRARY_ADD_PAPER":
            return self._add(action["paper_id"])
        if action.name == "LIBRARY_DROP_PAPER":
            return self._drop(action["paper_id"])
        if action.name == "LIBRARY_TO_DRAFT":
            return self._to_draft()
        if action.name == "EDITOR_UPDATE":
            self.state.components["editor"] = action["text"]
            return ApplyResult(changed=("editor",), private=False)
        raise AssertionError(f"unhandled action {action.name}")

    def _search(self, query: str) -> str:
        hits = rank_papers(query, self.corpus)
        if not hits:
            return f"No papers matched: {query.strip()}"
        lines = [f"Top matches for: {query.strip()}"]
        for p in hits:
            lines.append(
                f"- {p['paper_id']}: {p['title']} ({short_authors(p['authors'])}, {p['year']})"
            )
        return "\n".join(lines)

    def _library(self) -> list[dict]:
        return self.state.components["library"]

    def _add(self, paper_id: str) -> ApplyResult:
        pid = paper_id.strip()
        paper = self._by_id.get(pid)
        if paper is None:
            raise SemanticActionError(f"no paper with id {pid!r}")
        if any(p["paper_id"] == pid for p in self._library()):
            return ApplyResult(changed=(), private=False)  # already there, nothing to announce
        self._library().append(
            {
                "paper_id": pid,
                "title": paper["title"],
                "authors": list(paper["authors"]),
                "year": paper["year"],
                "venue": paper["venue"],
            }
        )
        return ApplyResult(changed=("library",), private=False)

    def _drop(self, paper_id: str) -> ApplyResult:
        pid = paper_id.strip()
        library = self._library()
        kept = [p for p in library if p["paper_id"] != pid]
        if len(kept) == len(library):
            raise SemanticActionError(f"paper {pid!r} is not in the library")
        self.state.components["library"] = kept
        return ApplyResult(changed=("library",), private=False)

    def _to_draft(self) -> ApplyResult:
        library = self._library()
        if not library:
            raise SemanticActionError("the library is empty; add papers first")
        lines = ["References:"]
        for i, p in enumerate(library, start=1):
            lines.append(
                f"[{i}] {short_authors(p['authors'])} ({p['year']}). {p['title']}. {p['venue']}."
            )
        editor = self.state.components["editor"]
        sep = "\n\n" if editor.strip() else ""
        self.state.components["editor"] = f"{editor}{sep}" + "\n".join(lines)
        return ApplyResult(changed=("editor",), private=False)


def make_related_work_environment(
    instance: TaskInstance, team: tuple[TeamMember, ...] | None = None
) -> RelatedWorkEnvironment:
    return RelatedWorkEnvironment(instance, team=team)
