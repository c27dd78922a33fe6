"""Fetch client against a scriptable local stub server."""

import json

import pytest

from storyweaver.errors import FetchError, PageNotFoundError, RateLimitedError
from storyweaver.fetch import WikiClient

PARSE_OK = json.dumps(
    {
        "parse": {
            "title": "Orchard bee",
            "pagelanguage": "en",
            "canonicalurl": "https://example.org/wiki/Orchard_bee",
            "wikitext": {"*": "==Biology==\ntext."},
        }
    }
).encode()

MISSING = json.dumps({"error": {"code": "missingtitle", "info": "no such page"}}).encode()


def test_payload_passes_through_untouched(stub_server):
    url, server = stub_server
    server.script = [(200, PARSE_OK)]
    raw = WikiClient(url).fetch_article("Orchard bee")
    assert raw.payload == PARSE_OK
    assert raw.title == "Orchard bee"
    assert raw.wikitext == "==Biology==\ntext."
    assert raw.source_url == "https://example.org/wiki/Orchard_bee"


def test_missing_page_is_a_distinct_error(stub_server):
    url, server = stub_server
    server.script = [(200, MISSING)]
    with pytest.raises(PageNotFoundError):
        WikiClient(url).fetch_article("Nope")


def test_retries_until_success(stub_server):
    # Scripted to fail twice then succeed: exactly three requests go out.
    url, server = stub_server
    server.script = [(503, b""), (503, b""), (200, PARSE_OK)]
    raw = WikiClient(url, retries=2, backoff=0.0).fetch_article("Orchard bee")
    assert server.request_count == 3
    assert raw.payload == PARSE_OK


def test_retries_are_bounded(stub_server):
    url, server = stub_server
    server.script = [(503, b"")]
    with pytest.raises(FetchError):
        WikiClient(url, retries=2, backoff=0.0).fetch_article("X")
    assert server.request_count == 3


def test_rate_limit_surfaces_after_retries(stub_server):
    url, server = stub_server
    server.script = [(429, b"")]
    with pytest.raises(RateLimitedError):
        WikiClient(url, retries=1, backoff=0.0).fetch_article("X")


def test_endpoint_from_environment(monkeypatch, stub_server):
    url, server = stub_server
    server.script = [(200, PARSE_OK)]
    monkeypatch.setenv("STORYWEAVER_WIKI_ENDPOINT", url)
    raw = WikiClient().fetch_article("Orchard bee")
    assert raw.title == "Orchard bee"


def test_missing_endpoint_is_an_error(monkeypatch):
    monkeypatch.delenv("STORYWEAVER_WIKI_ENDPOINT", raising=False)
    with pytest.raises(FetchError, match="STORYWEAVER_WIKI_ENDPOINT"):
        WikiClient()


def test_empty_title_rejected(stub_server):
    url, _ = stub_server
    with pytest.raises(PageNotFoundError):
        WikiClient(url).fetch_article("  ")
