"""Wire protocol loop: newline-delimited JSON over stdin/stdout.

The bridge emits exactly one hello record, then one response per
request. Per-request model failures become error records and the loop
continues; only a shutdown record (or end of input) ends the process.
Every emitted line must parse as JSON; the conformance fuzz suite
holds the bridge to that.
"""

from __future__ import annotations

import json
import math
import sys
from typing import TextIO

from .config import HORIZON, INPUT_SIZE, BridgeConfig
from .models import ForecastFn


def _emit(record: dict, out: TextIO) -> None:
    out.write(json.dumps(record) + "\n")
    out.flush()


def _error(request_id, message: str, out: TextIO) -> None:
    _emit({"type": "error", "request_id": request_id, "message": message}, out)


def serve_forecaster(
    config: BridgeConfig,
    forecast: ForecastFn,
    stdin: TextIO | None = None,
    stdout: TextIO | None = None,
) -> int:
    """Serve requests until shutdown; returns the exit code."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    _emit(
        {
            "type": "hello",
            "name": config.name,
            "input_size": INPUT_SIZE,
            "horizon": HORIZON,
        },
        stdout,
    )

    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("not an object")
        except ValueError:
            _error(None, f"unparseable request line: {line[:200]!r}", stdout)
            continue

        kind = record.get("type")
        if kind == "shutdown":
            return 0
        if kind != "forecast":
            _error(record.get("request_id"),
                   f"unexpected record type {kind!r}", stdout)
            continue

        request_id = record.get("request_id")
        context = record.get("context")
        if (
            not isinstance(request_id, int)
            or not isinstance(context, list)
            or len(context) != INPUT_SIZE
        ):
            _error(request_id, "bad forecast request "
                   f"(need int request_id and {INPUT_SIZE}-value context)",
                   stdout)
            continue

        try:
            values = [float(v) for v in forecast(context, request_id)]
            if len(values) != HORIZON or not all(
                math.isfinite(v) for v in values
            ):
                raise ValueError(
                    f"model produced {len(values)} values, finite="
                    f"{all(math.isfinite(v) for v in values)}"
                )
        except Exception as exc:  # keep serving after a bad request
            _error(request_id, f"{type(exc).__name__}: {exc}", stdout)
            continue
        _emit(
            {"type": "forecast_result", "request_id": request_id,
             "forecast": values},
            stdout,
        )
    return 0
