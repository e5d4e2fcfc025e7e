"""Host side of the external-forecaster wire protocol.

Any executable that speaks newline-delimited JSON records over
stdin/stdout can act as a forecaster in the backtest: it announces
itself with a hello record, then answers one forecast request at a time.
The child is spawned once per run and reused for every day; stderr is
passed through for its logs.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass, field

import numpy as np

from .data import HourlySeries
from .errors import (
    ChildCrashed,
    ForecastFailed,
    HandshakeFailed,
    ProtocolError,
    SpawnFailed,
    Timeout,
)
from .forecasters import Forecaster

HORIZON = 24


@dataclass(frozen=True)
class ForecastRequest:
    request_id: int
    zone: str
    context: np.ndarray
    context_end: str  # yyyy-MM-ddTHH of the last context value
    horizon: int = HORIZON

    def to_wire(self) -> str:
        return json.dumps(
            {
                "type": "forecast",
                "request_id": self.request_id,
                "zone": self.zone,
                "context": [float(v) for v in self.context],
                "context_end": self.context_end,
            }
        )


@dataclass(frozen=True)
class ForecastResponse:
    request_id: int
    forecast: np.ndarray


_EOF = object()


class ExternalForecasterClient:
    """One child process, strict request/response alternation."""

    def __init__(
        self,
        command: str | list[str],
        timeout: float = 60.0,
        input_size: int = 168,
        handshake_timeout: float | None = None,
    ):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.handshake_timeout = handshake_timeout or max(timeout, 120.0)
        self.input_size = input_size
        self.name: str | None = None
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()
        self._reader: threading.Thread | None = None

    # -- lifecycle -------------------------------------------------------

    def start(self) -> None:
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=None,  # inherit: child logs go to our stderr
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise SpawnFailed(f"{self.command}: {exc}") from exc
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()
        hello = self._next_line(self.handshake_timeout, HandshakeFailed)
        try:
            record = json.loads(hello)
        except json.JSONDecodeError as exc:
            self._kill()
            raise HandshakeFailed(f"unparseable hello line: {hello!r}") from exc
        if (
            not isinstance(record, dict)
            or record.get("type") != "hello"
            or not isinstance(record.get("name"), str)
            or not isinstance(record.get("input_size"), int)
            or not isinstance(record.get("horizon"), int)
        ):
            self._kill()
            raise HandshakeFailed(f"bad hello record: {hello!r}")
        if record["input_size"] != self.input_size or record["horizon"] != HORIZON:
            self._kill()
            raise HandshakeFailed(
                f"child wants input_size={record['input_size']} "
                f"horizon={record['horizon']}, host configured "
                f"{self.input_size}/{HORIZON}"
            )
        self.name = record["name"]

    def close(self) -> None:
        proc = self._proc
        if proc is None:
            return
        if proc.poll() is None:
            try:
                proc.stdin.write(json.dumps({"type": "shutdown"}) + "\n")
                proc.stdin.flush()
            except (BrokenPipeError, OSError, ValueError):
                pass
            try:
                proc.wait(timeout=10.0)
            except subprocess.TimeoutExpired:
                self._kill()
        self._proc = None

    def __enter__(self) -> "ExternalForecasterClient":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _kill(self) -> None:
        proc = self._proc
        if proc is not None and proc.poll() is None:
            proc.kill()
            proc.wait()

    # -- protocol --------------------------------------------------------

    def _read_loop(self) -> None:
        proc = self._proc
        assert proc is not None and proc.stdout is not None
        for line in proc.stdout:
            self._lines.put(line.rstrip("\n"))
        self._lines.put(_EOF)

    def _next_line(self, timeout: float, timeout_error=Timeout) -> str:
        try:
            item = self._lines.get(timeout=timeout)
        except queue.Empty:
            self._kill()
            raise timeout_error(f"no response within {timeout}s; child killed")
        if item is _EOF:
            code = self._proc.wait() if self._proc else None
            raise ChildCrashed(f"child exited prematurely (exit code {code})")
        return item

    def forecast(self, request: ForecastRequest) -> ForecastResponse:
        proc = self._proc
        if proc is None or proc.poll() is not None:
            raise ChildCrashed("child process is not running")
        if len(request.context) != self.input_size:
            raise ProtocolError(
                f"request {request.request_id}: context length "
                f"{len(request.context)} != {self.input_size}"
            )
        try:
            proc.stdin.write(request.to_wire() + "\n")
            proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            code = proc.poll()
            raise ChildCrashed(f"write failed (exit code {code}): {exc}") from exc

        line = self._next_line(self.timeout)
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("not an object")
        except ValueError as exc:
            raise ProtocolError(
                f"request {request.request_id}: unparseable line {line!r}"
            ) from exc

        kind = record.get("type")
        if kind == "error":
            raise ForecastFailed(
                f"request {request.request_id}: child reported "
                f"{record.get('message')!r}"
            )
        if kind != "forecast_result":
            raise ProtocolError(
                f"request {request.request_id}: unexpected record type {kind!r}"
            )
        if record.get("request_id") != request.request_id:
            raise ProtocolError(
                f"request {request.request_id}: response carries id "
                f"{record.get('request_id')!r}"
            )
        forecast = record.get("forecast")
        if not isinstance(forecast, list) or len(forecast) != request.horizon:
            n = len(forecast) if isinstance(forecast, list) else "?"
            raise ProtocolError(
                f"request {request.request_id}: expected {request.horizon} "
                f"values, got {n}"
            )
        values = np.array([float(v) for v in forecast])
        if not np.all(np.isfinite(values)):
            raise ProtocolError(
                f"request {request.request_id}: non-finite forecast value"
            )
        return ForecastResponse(request.request_id, values)


def run_external_forecaster(command, requests, timeout: float = 60.0):
    """Drive a child over an ordered request stream, yielding responses.

    Spawns once, handshakes, sends requests strictly one at a time, and
    shuts the child down at end of stream.
    """
    first = True
    client = None
    try:
        for request in requests:
            if first:
                client = ExternalForecasterClient(
                    command, timeout, input_size=len(request.context)
                )
                client.start()
                first = False
            yield client.forecast(request)
    finally:
        if client is not None:
            client.close()


@dataclass
class ExternalModelForecaster(Forecaster):
    """Backtest handle that proxies to an external child process."""

    command: str | list[str] = ""
    name: str = "external"
    input_hours: int = 168
    timeout: float = 60.0
    zone: str = ""
    _client: ExternalForecasterClient | None = field(default=None, repr=False)
    _next_id: int = field(default=0, repr=False)

    def start(self) -> None:
        self._client = ExternalForecasterClient(
            self.command, self.timeout, input_size=self.input_hours
        )
        self._client.start()

    def close(self) -> None:
        if self._client is not None:
            self._client.close()
            self._client = None

    def __enter__(self) -> "ExternalModelForecaster":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def forecast(self, training: HourlySeries) -> np.ndarray:
        if self._client is None:
            self.start()
        self._next_id += 1
        request = ForecastRequest(
            request_id=self._next_id,
            zone=self.zone or training.zone,
            context=training.values[-self.input_hours:],
            context_end=f"{training.end_day.isoformat()}T23",
        )
        return self._client.forecast(request).forecast
