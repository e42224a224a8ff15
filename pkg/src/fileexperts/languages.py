"""Language configuration: file-extension mapping and conditional keywords.

A static table replaces external language-classification tools. The bundled
``data/languages.json`` covers the six languages the default pipeline
targets; callers may load their own table with :func:`load_language_config`
and pass it anywhere a ``LanguageConfig`` is accepted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import UnknownLanguage

# Paths matching any of these globs are treated as vendored third-party code
# and dropped by the default source filter. '**' matches across separators.
DEFAULT_VENDOR_GLOBS = ("vendor/**", "node_modules/**", "third_party/**")


@dataclass(frozen=True)
class LanguageSpec:
    """Per-language lexical facts used for filtering and keyword counting."""

    name: str
    extensions: tuple[str, ...]
    conditional_keywords: tuple[str, ...]
    count_ternary: bool
    line_comments: tuple[str, ...]
    string_quotes: tuple[str, ...]


@dataclass(frozen=True)
class LanguageConfig:
    """A set of languages plus the derived extension lookup table."""

    languages: dict[str, LanguageSpec]
    by_extension: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.by_extension:
            for lang in self.languages.values():
                for ext in lang.extensions:
                    self.by_extension[ext.lower()] = lang.name

    def language_of(self, path: str) -> str | None:
        """Language name for a repository path, or None if unconfigured."""
        suffix = Path(path).suffix.lower()
        return self.by_extension.get(suffix)

    def spec(self, language: str) -> LanguageSpec:
        try:
            return self.languages[language]
        except KeyError:
            raise UnknownLanguage(f"no configuration for language {language!r}")


def load_language_config(path: str | Path | None = None) -> LanguageConfig:
    """Load a language table from JSON, defaulting to the bundled one.

    The JSON maps language name to an object with keys ``extensions``,
    ``conditional_keywords``, ``count_ternary``, ``line_comments``, and
    ``string_quotes``.
    """
    if path is None:
        raw = resources.files("fileexperts").joinpath("data/languages.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    table = json.loads(raw)
    languages = {
        name: LanguageSpec(
            name=name,
            extensions=tuple(entry["extensions"]),
            conditional_keywords=tuple(entry["conditional_keywords"]),
            count_ternary=bool(entry.get("count_ternary", False)),
            line_comments=tuple(entry.get("line_comments", ())),
            string_quotes=tuple(entry.get("string_quotes", ('"', "'"))),
        )
        for name, entry in table.items()
    }
    return LanguageConfig(languages=languages)


_DEFAULT: LanguageConfig | None = None


def default_language_config() -> LanguageConfig:
    """The bundled configuration, loaded once per process."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_language_config()
    return _DEFAULT
