"""Client for out-of-process evaluators speaking newline-delimited JSON.

Protocol (UTF-8, one JSON document per line, over the child's stdio):

- handshake: the evaluator's first line is
  ``{"hello": {"name": <string>, "concurrent": <bool>}}``
- request:   ``{"id": <u64>, "alpha": <f64>, "beta": <f64>, "r": <f64>,
  "block": "down0|down1|down2|mid", "cx": <f64>, "cy": <f64>,
  "seed": <u64>, "prompt": <string>}``
- response:  ``{"id": <u64>, "s_text": <f64>, "s_img": <f64>}`` or
  ``{"id": <u64>, "error": <string>}``

Responses may arrive out of order and are matched by id. Failures
surface as TransportError (spawn, EOF, timeout, malformed handshake),
ContractError (malformed response documents), or EvaluationFailed
(explicit error responses).
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
import time

from .search import ContractError, EvalRequest, EvaluationFailed, TransportError

__all__ = ["ExternalEvaluator", "DEFAULT_TIMEOUT_S"]

DEFAULT_TIMEOUT_S = 300.0

_EOF = object()


class ExternalEvaluator:
    """Launches the evaluator command and scores requests over its stdio."""

    def __init__(self, command, timeout_s: float = DEFAULT_TIMEOUT_S):
        if isinstance(command, str):
            command = shlex.split(command)
        self._command = list(command)
        self._timeout_s = float(timeout_s)
        self._next_id = 0
        self._pending: dict[int, dict] = {}
        try:
            self._proc = subprocess.Popen(
                self._command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as err:
            raise TransportError(f"failed to launch evaluator {self._command!r}: {err}") from err
        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        self._handshake()

    def _pump(self) -> None:
        try:
            for line in self._proc.stdout:
                self._lines.put(line)
        finally:
            self._lines.put(_EOF)

    def _next_line(self, deadline: float) -> str:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise TransportError("evaluator timed out")
        try:
            item = self._lines.get(timeout=remaining)
        except queue.Empty:
            raise TransportError(
                f"evaluator timed out after {self._timeout_s:.1f} s"
            ) from None
        if item is _EOF:
            raise TransportError("evaluator closed its output stream")
        return item

    def _handshake(self) -> None:
        deadline = time.monotonic() + self._timeout_s
        line = self._next_line(deadline)
        try:
            message = json.loads(line)
            hello = message["hello"]
            self.name = str(hello["name"])
            self.concurrent = bool(hello["concurrent"])
        except (json.JSONDecodeError, KeyError, TypeError) as err:
            self.close()
            raise TransportError(f"invalid evaluator handshake {line!r}: {err}") from err

    def score(self, request: EvalRequest) -> tuple[float, float]:
        self._next_id += 1
        request_id = self._next_id
        payload = {
            "id": request_id,
            "alpha": request.alpha,
            "beta": request.beta,
            "r": request.r,
            "block": request.block,
            "cx": request.cx,
            "cy": request.cy,
            "seed": request.seed,
            "prompt": request.prompt,
        }
        try:
            self._proc.stdin.write(json.dumps(payload) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError, ValueError) as err:
            raise TransportError(f"failed to send request: {err}") from err

        deadline = time.monotonic() + self._timeout_s
        while True:
            if request_id in self._pending:
                return self._extract(self._pending.pop(request_id))
            line = self._next_line(deadline)
            try:
                message = json.loads(line)
            except json.JSONDecodeError as err:
                raise ContractError(f"evaluator sent invalid JSON {line!r}") from err
            if not isinstance(message, dict) or "id" not in message:
                raise ContractError(f"evaluator response lacks an id: {line!r}")
            msg_id = message["id"]
            if msg_id == request_id:
                return self._extract(message)
            self._pending[msg_id] = message  # out-of-order response

    @staticmethod
    def _extract(message: dict) -> tuple[float, float]:
        if "error" in message:
            raise EvaluationFailed(str(message["error"]))
        try:
            return float(message["s_text"]), float(message["s_img"])
        except (KeyError, TypeError, ValueError) as err:
            raise ContractError(f"malformed response {message!r}: {err}") from err

    def close(self) -> None:
        proc = getattr(self, "_proc", None)
        if proc is None or proc.poll() is not None:
            return
        try:
            proc.stdin.close()
        except OSError:
            pass
        try:
            proc.wait(timeout=2.0)
        except subprocess.TimeoutExpired:
            proc.terminate()
            try:
                proc.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()
        return False
