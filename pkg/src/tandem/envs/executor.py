"""Cell executors for the tabular-analysis environment.

The environment itself stays deterministic and picklable; running code is
delegated here.  ``SubprocessExecutor`` gives notebook-like semantics by
replaying previously successful cells into a fresh interpreter before the new
cell, so state carries forward without keeping a live kernel around.
``MockExecutor`` is a deterministic stand-in for tests.
"""

from __future__ import annotations

import hashlib
import json
import subprocess
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from tandem.errors import ExecutorUnavailableError

OK = "ok"
ERROR = "error"
TIMEOUT = "timeout"

# Runs inside the child interpreter.  Prior cells execute with stdout
# swallowed; the new cell echoes its trailing expression like a notebook.
_RUNNER = r"""
import ast, contextlib, io, json, sys

payload = json.loads(sys.stdin.read())
ns = {"__name__": "__main__"}

for code in payload["prior"]:
    with contextlib.redirect_stdout(io.StringIO()):
        exec(compile(code, "<prior>", "exec"), ns)

buf = io.StringIO()
cell = payload["cell"]
try:
    tree = ast.parse(cell, "<cell>", "exec")
    tail = None
    if tree.body and isinstance(tree.body[-1], ast.Expr):
        tail = ast.Expression(tree.body.pop().value)
    with contextlib.redirect_stdout(buf):
        exec(compile(tree, "<cell>", "exec"), ns)
        if tail is not None:
            value = eval(compile(tail, "<cell>", "eval"), ns)
            if value is not None:
                print(repr(value))
    print(json.dumps({"status": "ok", "output": buf.getvalue()}), file=sys.stderr)
except BaseException as exc:
    out = buf.getvalue() + f"{type(exc).__name__}: {exc}"
    print(json.dumps({"status": "error", "output": out}), file=sys.stderr)
"""


@dataclass(frozen=True)
class CellResult:
    output: str
    status: str  # OK, ERROR or TIMEOUT


class SubprocessExecutor:
    """Executes cells in a clean child interpreter per call."""

    def __init__(self, timeout: float = 15.0):
        self.timeout = timeout

    def run(self, prior: list[str], cell: str, files: dict[str, str]) -> CellResult:
        with tempfile.TemporaryDirectory(prefix="tandem-cells-") as workdir:
            for name, content in files.items():
                target = Path(workdir) / name
                if target.resolve().parent != Path(workdir).resolve():
                    raise ExecutorUnavailableError(f"bad dataset filename {name!r}")
                target.write_text(content)
            payload = json.dumps({"prior": prior, "cell": cell})
            try:
                proc = subprocess.run(
                    [sys.executable, "-c", _RUNNER],
                    input=payload,
                    capture_output=True,
                    text=True,
                    timeout=self.timeout,
                    cwd=workdir,
                )
            except subprocess.TimeoutExpired:
                return CellResult(output="cell timed out", status=TIMEOUT)
        line = proc.stderr.strip().splitlines()[-1] if proc.stderr.strip() else ""
        try:
            doc = json.loads(line)
            return CellResult(output=doc["output"], status=doc["status"])
        except (json.JSONDecodeError, KeyError):
            out = (proc.stdout + proc.stderr).strip() or "interpreter crashed"
            return CellResult(output=out, status=ERROR)


class MockExecutor:
    """Deterministic fake: echoes a digest of the cell, fails on request.

    A cell containing ``raise`` reports an error; one containing ``sleep``
    reports a timeout.  Everything else succeeds with a stable tag, so tests
    exercise notebook bookkeeping without a real interpreter.
    """

    def run(self, prior: list[str], cell: str, files: dict[str, str]) -> CellResult:
        if "raise" in cell:
            return CellResult(output="MockError: raised on request", status=ERROR)
        if "sleep" in cell:
            return CellResult(output="cell timed out", status=TIMEOUT)
        tag = hashlib.sha256(cell.encode()).hexdigest()[:8]
        return CellResult(output=f"ok[{tag}] after {len(prior)} prior cells", status=OK)
