"""Clients for external summarizer and embedder providers.

Both share one transport contract: an ``http(s)://`` endpoint receives a
JSON POST per request, anything else is treated as a command line for a
long-lived subprocess speaking one JSON object per line on stdin/stdout.
Responses must arrive within the configured timeout.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading

import requests

from .errors import ProviderError


class _HttpTransport:
    def __init__(self, endpoint: str, timeout: float, max_in_flight: int):
        self.endpoint = endpoint
        self.timeout = timeout
        self.session = requests.Session()
        self._slots = threading.Semaphore(max_in_flight)

    def request(self, payload: dict) -> dict:
        with self._slots:
            try:
                response = self.session.post(self.endpoint, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                raise ProviderError(f"provider request failed: {exc}") from exc
        if response.status_code != 200:
            raise ProviderError(f"provider returned HTTP {response.status_code}")
        try:
            return response.json()
        except ValueError as exc:
            raise ProviderError(f"provider returned invalid JSON: {exc}") from exc

    def close(self):
        self.session.close()


class _LineTransport:
    """One JSON object per line over a child process's stdin/stdout."""

    def __init__(self, command: str, timeout: float):
        self.timeout = timeout
        try:
            self.process = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ProviderError(f"could not start provider {command!r}: {exc}") from exc
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        self._lock = threading.Lock()

    def _pump(self):
        assert self.process.stdout is not None
        for line in self.process.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def request(self, payload: dict) -> dict:
        with self._lock:
            if self.process.poll() is not None:
                raise ProviderError("provider process has exited")
            assert self.process.stdin is not None
            try:
                self.process.stdin.write(json.dumps(payload) + "\n")
                self.process.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise ProviderError(f"provider pipe broke: {exc}") from exc
            try:
                line = self._lines.get(timeout=self.timeout)
            except queue.Empty:
                raise ProviderError(f"provider response timed out after {self.timeout}s")
        if line is None:
            raise ProviderError("provider closed its output stream")
        try:
            return json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProviderError(f"provider sent invalid JSON: {exc}") from exc

    def close(self):
        if self.process.poll() is None:
            self.process.terminate()
            try:
                self.process.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self.process.kill()


def _make_transport(endpoint: str, timeout: float, max_in_flight: int):
    if endpoint.startswith(("http://", "https://")):
        return _HttpTransport(endpoint, timeout, max_in_flight)
    return _LineTransport(endpoint, timeout)


class ExternalSummarizer:
    """Extractive summarizer contract: {text, max_sentences} -> {sentences}."""

    def __init__(self, endpoint: str, timeout: float = 10.0, max_in_flight: int = 4):
        self._transport = _make_transport(endpoint, timeout, max_in_flight)

    def summarize(self, text: str, max_sentences: int) -> list[str]:
        reply = self._transport.request({"text": text, "max_sentences": max_sentences})
        sentences = reply.get("sentences")
        if not isinstance(sentences, list) or not all(isinstance(s, str) for s in sentences):
            raise ProviderError("summarizer response must carry a 'sentences' string list")
        return sentences

    def close(self):
        self._transport.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class ExternalEmbedder:
    """Embedding contract: {kind, payload} -> {vector}; dimension is fixed
    by the first response of the session."""

    def __init__(self, endpoint: str, timeout: float = 10.0, max_in_flight: int = 4):
        self._transport = _make_transport(endpoint, timeout, max_in_flight)

    def embed(self, kind: str, payload: str) -> list[float]:
        if kind not in ("text", "image"):
            raise ProviderError(f"embed kind must be 'text' or 'image', not {kind!r}")
        reply = self._transport.request({"kind": kind, "payload": payload})
        vector = reply.get("vector")
        if not isinstance(vector, list) or not all(isinstance(v, (int, float)) for v in vector):
            raise ProviderError("embedder response must carry a numeric 'vector'")
        return [float(v) for v in vector]

    def close(self):
        self._transport.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
