import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from storyweaver.article import Article, Section, assign_indices, attach_image_refs
from storyweaver.config import RunConfig

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = FIXTURES / "corpus"
GOLDEN = FIXTURES / "golden"

PRIMARY_ARTICLE = CORPUS / "silverleaf_fig.yaml"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture
def run_config() -> RunConfig:
    return RunConfig()


def make_article(
    title: str = "Test Article",
    overview: str = "",
    sections: list | None = None,
    images: list | None = None,
    source_url: str = "https://example.org/wiki/Test",
) -> Article:
    """Build an Article from a nested (title, text, [children...]) structure."""

    def to_section(spec, level: int) -> Section:
        name, text, children = spec
        return Section(
            title=name,
            text=text,
            level=level,
            children=[to_section(c, level + 1) for c in children],
        )

    root = Section(
        title=title,
        text=overview,
        level=0,
        children=[to_section(s, 1) for s in (sections or [])],
    )
    assign_indices(root)
    article = Article(
        title=title,
        description="",
        language="en",
        source_url=source_url,
        root=root,
        images=images or [],
    )
    attach_image_refs(article)
    return article


class StubHandler(BaseHTTPRequestHandler):
    """Scriptable HTTP stub: the server's `script` list supplies
    (status, body_bytes) per request, repeating the last entry."""

    def _reply(self):
        self.server.request_count += 1
        script = self.server.script
        status, body = script[min(self.server.request_count - 1, len(script) - 1)]
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        self._reply()

    def do_POST(self):
        self._reply()

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    """Start a scriptable local HTTP server; yields (url, server)."""
    server = ThreadingHTTPServer(("127.0.0.1", 0), StubHandler)
    server.script = [(200, b"{}")]
    server.request_count = 0
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/api.php", server
    server.shutdown()
    thread.join(timeout=2)
