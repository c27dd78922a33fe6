"""MediaWiki-compatible article retrieval.

The only network-touching operation in the package. Calls are serialized
per client with a configurable politeness delay, and transient failures
(HTTP 429/5xx) are retried a bounded number of times.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass

import requests

from .errors import FetchError, PageNotFoundError, RateLimitedError

ENDPOINT_ENV_VAR = "STORYWEAVER_WIKI_ENDPOINT"

_RETRIABLE_STATUS = {429, 500, 502, 503, 504}


@dataclass
class RawDocument:
    """Raw fetch result: untouched payload plus the parsed convenience fields."""

    title: str
    wikitext: str
    language: str
    source_url: str
    payload: bytes


class WikiClient:
    """Client for a GET ``action=parse`` style endpoint."""

    def __init__(
        self,
        endpoint: str | None = None,
        retries: int = 2,
        backoff: float = 0.5,
        politeness_delay: float = 0.0,
        timeout: float = 10.0,
        session: requests.Session | None = None,
    ):
        endpoint = endpoint or os.environ.get(ENDPOINT_ENV_VAR, "")
        if not endpoint:
            raise FetchError(f"no endpoint given and {ENDPOINT_ENV_VAR} is unset")
        self.endpoint = endpoint
        self.retries = retries
        self.backoff = backoff
        self.politeness_delay = politeness_delay
        self.timeout = timeout
        self.session = session or requests.Session()
        self._lock = threading.Lock()
        self._last_request = 0.0

    def _get(self, params: dict) -> requests.Response:
        with self._lock:
            wait = self._last_request + self.politeness_delay - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            attempt = 0
            while True:
                try:
                    response = self.session.get(self.endpoint, params=params, timeout=self.timeout)
                except requests.RequestException as exc:
                    raise FetchError(f"request to {self.endpoint} failed: {exc}") from exc
                finally:
                    self._last_request = time.monotonic()
                if response.status_code not in _RETRIABLE_STATUS:
                    return response
                if attempt >= self.retries:
                    if response.status_code == 429:
                        raise RateLimitedError(
                            f"rate limited by {self.endpoint} after {attempt + 1} attempts"
                        )
                    raise FetchError(
                        f"HTTP {response.status_code} from {self.endpoint} "
                        f"after {attempt + 1} attempts"
                    )
                attempt += 1
                time.sleep(self.backoff * attempt)

    def fetch_article(self, title: str) -> RawDocument:
        """Fetch one page; raises PageNotFoundError / FetchError / RateLimitedError."""
        if not title.strip():
            raise PageNotFoundError("article title must be non-empty")
        response = self._get(
            {"action": "parse", "page": title, "prop": "wikitext", "format": "json"}
        )
        if response.status_code != 200:
            raise FetchError(f"HTTP {response.status_code} from {self.endpoint}")
        try:
            data = json.loads(response.content)
        except json.JSONDecodeError as exc:
            raise FetchError(f"endpoint returned invalid JSON: {exc}") from exc

        if "error" in data:
            code = data["error"].get("code", "unknown")
            if code in ("missingtitle", "pagecannotexist", "invalidtitle"):
                raise PageNotFoundError(f"page {title!r} not found ({code})")
            raise FetchError(f"endpoint error {code}: {data['error'].get('info', '')}")

        parse = data.get("parse")
        if not isinstance(parse, dict):
            raise FetchError("endpoint response lacks a 'parse' object")
        wikitext = parse.get("wikitext")
        if isinstance(wikitext, dict):
            wikitext = wikitext.get("*", "")
        return RawDocument(
            title=parse.get("title", title),
            wikitext=wikitext or "",
            language=parse.get("pagelanguage", "en"),
            source_url=parse.get("canonicalurl", ""),
            payload=response.content,
        )


def fetch_article(title: str, endpoint: str | None = None, **kwargs) -> RawDocument:
    """One-shot convenience wrapper around WikiClient."""
    return WikiClient(endpoint, **kwargs).fetch_article(title)
