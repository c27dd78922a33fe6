"""Command-line interface: build, fetch, validate, stats.

Exit codes: 0 success, 1 validation violations, 2 usage or input error,
3 environment or provider error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .article import emit_canonical
from .config import RunConfig, load_run_config
from .errors import (
    EnvironmentFailure,
    InputError,
    StoryweaverError,
)
from .fetch import WikiClient
from .pipeline import BuildOutcome, build_file
from .stats import collect_corpus_stats, render_stats_table, write_figures
from .validate import validate_bundle
from .wikitext import parse_wikitext

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INPUT = 2
EXIT_ENVIRONMENT = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storyweaver",
        description="Compile hierarchical articles into interlinked AMP Web Story bundles.",
    )
    parser.add_argument("--log-level", default=None, help="logging level (default INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="build story bundles from canonical article files")
    build.add_argument("--input", help="canonical article file, or a directory of them")
    build.add_argument("--out", help="output bundle directory")
    build.add_argument("--config", help="run configuration file (YAML)")
    build.add_argument("--endpoint", help="external summarizer endpoint override")
    build.add_argument("--max-pages", type=int, default=None, help="max pages per story")
    build.add_argument("--jobs", type=int, default=None, help="concurrent article builds")
    build.add_argument("--offline-assets", action="store_true", default=None,
                       help="copy/download image assets into the bundle")
    build.add_argument("--template-gallery", help="alternative layout template gallery")
    build.set_defaults(func=cmd_build)

    fetch = sub.add_parser("fetch", help="fetch an article from a MediaWiki endpoint")
    fetch.add_argument("title", help="page title to fetch")
    fetch.add_argument("--endpoint", help="api endpoint (or STORYWEAVER_WIKI_ENDPOINT)")
    fetch.add_argument("--out", help="write the canonical article file here (default stdout)")
    fetch.add_argument("--raw", action="store_true", help="write the raw payload instead")
    fetch.add_argument("--config", help="run configuration file (YAML)")
    fetch.set_defaults(func=cmd_fetch)

    validate = sub.add_parser("validate", help="validate a built story bundle")
    validate.add_argument("bundle", help="bundle directory")
    validate.set_defaults(func=cmd_validate)

    stats = sub.add_parser("stats", help="report corpus statistics")
    stats.add_argument("corpus", help="directory of bundles and/or article files")
    stats.add_argument("--out", help="write stats.tsv and figures under this directory")
    stats.add_argument("--config", help="run configuration file (YAML)")
    stats.set_defaults(func=cmd_stats)
    return parser


def _load_config(args, extra_overrides: dict | None = None) -> RunConfig:
    overrides = dict(extra_overrides or {})
    for key in ("input", "out", "endpoint", "max_pages", "jobs", "offline_assets", "template_gallery"):
        if hasattr(args, key):
            overrides.setdefault(key, getattr(args, key))
    if getattr(args, "log_level", None):
        overrides["log_level"] = args.log_level
    return load_run_config(getattr(args, "config", None), overrides)


def _print_outcome(outcome: BuildOutcome) -> None:
    for story in outcome.story_set.stories:
        print(f"{story.id}\t{story.kind}\t{len(story.pages)} pages")
    for warning in outcome.story_set.warnings:
        print(f"warning: {warning}", file=sys.stderr)


def cmd_build(args) -> int:
    cfg = _load_config(args)
    if not cfg.input or not cfg.out:
        raise InputError("build requires --input and --out (flag or config)")

    input_path = Path(cfg.input)
    out_dir = Path(cfg.out)
    if input_path.is_dir():
        files = sorted(
            p for p in input_path.iterdir() if p.is_file() and p.suffix in (".yaml", ".yml")
        )
        if not files:
            raise InputError(f"no article files found in {input_path}")
        out_dir.mkdir(parents=True, exist_ok=True)
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [
                (path, pool.submit(build_file, path, cfg, out_dir / path.stem))
                for path in files
            ]
            for path, future in futures:
                outcome = future.result()
                print(f"== {path.name} -> {out_dir / path.stem}")
                _print_outcome(outcome)
        return EXIT_OK

    if not input_path.is_file():
        raise InputError(f"input {input_path} does not exist")
    outcome = build_file(input_path, cfg, out_dir)
    _print_outcome(outcome)
    print(f"bundle written to {out_dir}")
    return EXIT_OK


def cmd_fetch(args) -> int:
    cfg = _load_config(args)
    client = WikiClient(
        cfg.endpoint,
        retries=cfg.fetch.retries,
        backoff=cfg.fetch.backoff,
        politeness_delay=cfg.fetch.politeness_delay,
        timeout=cfg.fetch.timeout,
    )
    raw = client.fetch_article(args.title)
    if args.raw:
        if args.out:
            Path(args.out).write_bytes(raw.payload)
        else:
            sys.stdout.buffer.write(raw.payload)
        return EXIT_OK
    article = parse_wikitext(
        raw.wikitext,
        title=raw.title,
        language=raw.language,
        source_url=raw.source_url,
    )
    document = emit_canonical(article)
    if args.out:
        Path(args.out).write_text(document, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(document, end="")
    for warning in article.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    violations = validate_bundle(args.bundle)
    for violation in violations:
        print(f"{violation.code}: {violation.message}")
    print(f"{len(violations)} violation(s)")
    return EXIT_OK if not violations else EXIT_VIOLATIONS


def cmd_stats(args) -> int:
    cfg = _load_config(args, {"out": None})
    stats = collect_corpus_stats(args.corpus, cfg)
    table = render_stats_table(stats)
    print(table, end="")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "stats.tsv").write_text(table, encoding="utf-8")
        for path in write_figures(stats, out_dir / "figures"):
            print(f"figure written to {path}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, (args.log_level or "INFO").upper(), logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except InputError as exc:
        stage = getattr(exc, "stage", None)
        prefix = f"[{stage}] " if stage else ""
        print(f"error: {prefix}{exc}", file=sys.stderr)
        return EXIT_INPUT
    except EnvironmentFailure as exc:
        stage = getattr(exc, "stage", None)
        prefix = f"[{stage}] " if stage else ""
        print(f"error: {prefix}{exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    except StoryweaverError as exc:
        stage = getattr(exc, "stage", None)
        prefix = f"[{stage}] " if stage else ""
        print(f"error: {prefix}{exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
