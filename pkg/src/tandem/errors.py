"""Exception types shared across the framework."""

from __future__ import annotations


class TandemError(Exception):
    """Base class for all framework errors."""


class UnknownTaskError(TandemError):
    pass


class FixtureError(TandemError):
    """Fixture data missing or malformed."""


class InvalidActionError(TandemError):
    """Action string matches no registered action spec."""

    def __init__(self, raw: str, reason: str = "no action spec matches"):
        super().__init__(f"invalid action {raw!r}: {reason}")
        self.raw = raw
        self.reason = reason


class AmbiguousActionError(TandemError):
    """Action string matches more than one spec: the grammar is misconfigured."""

    def __init__(self, raw: str, names: list[str]):
        super().__init__(f"action {raw!r} matches multiple specs: {names}")
        self.raw = raw
        self.names = names


class EpisodeFinishedError(TandemError):
    """Step attempted after the episode ended."""


class UnknownRoleError(TandemError):
    pass


class ActionNotPermittedError(TandemError):
    """The action exists but the role may not take it."""


class SemanticActionError(TandemError):
    """Action parsed fine but its parameters are invalid for the current state
    (e.g. dropping a paper that is not in the library)."""


class BusClosedError(TandemError):
    pass


class PayloadTooLargeError(TandemError):
    pass


class BackendError(TandemError):
    """Completion backend failed (timeout, malformed response, transcript miss)."""


class TranscriptMissError(BackendError):
    """Replay backend has no recorded completion for this prompt."""


class ExecutorUnavailableError(TandemError):
    pass


class TamperedTrajectoryError(TandemError):
    """Hash chain verification failed while loading a trajectory."""

    def __init__(self, index: int, detail: str = "digest mismatch"):
        super().__init__(f"trajectory event {index}: {detail}")
        self.index = index


class ReplayDivergenceError(TandemError):
    """Re-applying recorded actions produced a different state than recorded."""

    def __init__(self, index: int, expected: str, actual: str):
        super().__init__(
            f"replay diverged at event {index}: expected digest {expected[:12]}…, got {actual[:12]}…"
        )
        self.index = index
        self.expected = expected
        self.actual = actual
