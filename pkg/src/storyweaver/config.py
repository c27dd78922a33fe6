"""Run configuration: one config file plus flag overrides; flags win.

Unknown keys are rejected by name so typos cannot silently change a build.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .errors import ConfigError
from .planner import PlannerConfig
from .summarize import SummarizerConfig

_TOP_KEYS = {
    "input",
    "out",
    "endpoint",
    "jobs",
    "offline_assets",
    "template_gallery",
    "log_level",
    "deterministic",
    "blocklist",
    "planner",
    "summarizer",
    "embedder",
    "fetch",
}
_PLANNER_KEYS = {"max_pages", "max_chars_per_page", "max_sentences_per_page"}
_SUMMARIZER_KEYS = {
    "min_words_to_summarize",
    "target_sentence_count",
    "external_endpoint",
    "timeout",
    "max_in_flight",
    "single_letter_abbreviations",
}
_EMBEDDER_KEYS = {"endpoint", "timeout", "max_in_flight"}
_FETCH_KEYS = {"retries", "backoff", "politeness_delay", "timeout"}


@dataclass(frozen=True)
class FetchConfig:
    retries: int = 2
    backoff: float = 0.5
    politeness_delay: float = 0.0
    timeout: float = 10.0


@dataclass(frozen=True)
class RunConfig:
    input: str | None = None
    out: str | None = None
    endpoint: str | None = None
    jobs: int = 1
    offline_assets: bool = False
    template_gallery: str | None = None
    log_level: str = "INFO"
    deterministic: bool = True  # seedless determinism; cannot be turned off
    blocklist: tuple[str, ...] | None = None
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    summarizer: SummarizerConfig = field(default_factory=SummarizerConfig)
    embedder_endpoint: str | None = None
    embedder_timeout: float = 10.0
    embedder_max_in_flight: int = 4
    fetch: FetchConfig = field(default_factory=FetchConfig)

    def __post_init__(self):
        if not self.deterministic:
            raise ConfigError("deterministic cannot be disabled")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


def _check_keys(data: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown config key(s) in {where}: {', '.join(unknown)}")


def _build(data: dict) -> RunConfig:
    _check_keys(data, _TOP_KEYS, "config")

    planner_raw = data.get("planner") or {}
    _check_keys(planner_raw, _PLANNER_KEYS, "planner")
    summarizer_raw = data.get("summarizer") or {}
    _check_keys(summarizer_raw, _SUMMARIZER_KEYS, "summarizer")
    embedder_raw = data.get("embedder") or {}
    _check_keys(embedder_raw, _EMBEDDER_KEYS, "embedder")
    fetch_raw = data.get("fetch") or {}
    _check_keys(fetch_raw, _FETCH_KEYS, "fetch")

    try:
        planner = PlannerConfig(
            n=int(planner_raw.get("max_pages", 10)),
            max_chars_per_page=int(planner_raw.get("max_chars_per_page", 200)),
            max_sentences_per_page=int(planner_raw.get("max_sentences_per_page", 2)),
        )
        summarizer = SummarizerConfig(
            min_words_to_summarize=int(summarizer_raw.get("min_words_to_summarize", 50)),
            target_sentence_count=int(summarizer_raw.get("target_sentence_count", 3)),
            external_endpoint=summarizer_raw.get("external_endpoint"),
            external_timeout=float(summarizer_raw.get("timeout", 10.0)),
            max_in_flight=int(summarizer_raw.get("max_in_flight", 4)),
            single_letter_abbreviations=bool(
                summarizer_raw.get("single_letter_abbreviations", True)
            ),
        )
        fetch = FetchConfig(
            retries=int(fetch_raw.get("retries", 2)),
            backoff=float(fetch_raw.get("backoff", 0.5)),
            politeness_delay=float(fetch_raw.get("politeness_delay", 0.0)),
            timeout=float(fetch_raw.get("timeout", 10.0)),
        )
        blocklist = data.get("blocklist")
        return RunConfig(
            input=data.get("input"),
            out=data.get("out"),
            endpoint=data.get("endpoint"),
            jobs=int(data.get("jobs", 1)),
            offline_assets=bool(data.get("offline_assets", False)),
            template_gallery=data.get("template_gallery"),
            log_level=str(data.get("log_level", "INFO")),
            deterministic=bool(data.get("deterministic", True)),
            blocklist=tuple(blocklist) if blocklist is not None else None,
            planner=planner,
            summarizer=summarizer,
            embedder_endpoint=embedder_raw.get("endpoint"),
            embedder_timeout=float(embedder_raw.get("timeout", 10.0)),
            embedder_max_in_flight=int(embedder_raw.get("max_in_flight", 4)),
            fetch=fetch,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_run_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Load the config file (YAML), then apply flag overrides on top."""
    data: dict = {}
    if path is not None:
        try:
            loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise ConfigError(f"config file {path}: invalid YAML: {exc}") from exc
        if loaded is not None:
            if not isinstance(loaded, dict):
                raise ConfigError(f"config file {path}: must be a mapping")
            data = loaded

    cfg = _build(data)
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    """Flag-level overrides; None values mean 'flag not given'."""
    simple = {}
    for key in ("input", "out", "endpoint", "jobs", "offline_assets", "template_gallery", "log_level"):
        if overrides.get(key) is not None:
            simple[key] = overrides[key]
    if overrides.get("max_pages") is not None:
        try:
            simple["planner"] = replace(cfg.planner, n=int(overrides["max_pages"]))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    unknown = sorted(
        k
        for k in overrides
        if k
        not in {
            "input", "out", "endpoint", "jobs", "offline_assets",
            "template_gallery", "log_level", "max_pages",
        }
    )
    if unknown:
        raise ConfigError(f"unknown override(s): {', '.join(unknown)}")
    return replace(cfg, **simple)
