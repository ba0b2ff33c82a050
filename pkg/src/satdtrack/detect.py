"""Single-line SATD detection via fuzzy task-annotation-tag matching.

A line counts as SATD when it carries one of the annotation tags
(TODO / FIXME / XXX / HACK by default) as a standalone word, case
insensitively, and a comment opener appears somewhere before the tag.
The comment-opener requirement is a language-independent approximation:
no per-language parsing is attempted, so tags inside string literals
that happen to follow marker-like text are accepted as false positives.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

DEFAULT_TAGS: tuple[str, ...] = ("TODO", "FIXME", "XXX", "HACK")

# Openers for the comment syntaxes of the mainstream languages; a tag only
# counts when one of these occurs earlier on the same line.
DEFAULT_COMMENT_MARKERS: tuple[str, ...] = (
    "//", "/*", "*", "#", "<!--", ";", "--", '"""', "'''",
)

# A tag must stand alone: not glued to identifier characters on either side,
# so "methodXXXCount" never matches while "XXX:", "xxx(" and bare "xxx" do.
_WORD_CHAR = r"[0-9A-Za-z_]"


@dataclass(frozen=True)
class SatdHit:
    """A positive detection: the matched tag and the stripped line text."""

    tag: str
    normalized_text: str


@dataclass(frozen=True)
class SatdDetector:
    """Configurable line classifier; the default mirrors the four-tag setup."""

    tags: tuple[str, ...] = DEFAULT_TAGS
    comment_markers: tuple[str, ...] = DEFAULT_COMMENT_MARKERS
    require_comment_marker: bool = True

    @cached_property
    def _tag_re(self) -> re.Pattern[str]:
        alternatives = "|".join(re.escape(t) for t in self.tags)
        return re.compile(
            rf"(?<!{_WORD_CHAR})({alternatives})(?!{_WORD_CHAR})", re.IGNORECASE
        )

    def _marker_pos(self, line: str) -> int:
        """Index of the earliest comment opener, or -1 when none occurs."""
        best = -1
        for marker in self.comment_markers:
            pos = line.find(marker)
            if pos != -1 and (best == -1 or pos < best):
                best = pos
        return best

    def detect(self, line: str) -> SatdHit | None:
        """Classify one line (no newline characters expected).

        Returns the first tag occurrence, scanning left to right, that
        satisfies the comment-marker requirement; at most one hit per line.
        """
        marker_pos = -1
        if self.require_comment_marker:
            marker_pos = self._marker_pos(line)
            if marker_pos == -1:
                return None
        for match in self._tag_re.finditer(line):
            if self.require_comment_marker and match.start() < marker_pos:
                continue
            return SatdHit(tag=match.group(1).upper(), normalized_text=line.strip())
        return None

    def __call__(self, line: str) -> SatdHit | None:
        return self.detect(line)


DEFAULT_DETECTOR = SatdDetector()


def detect(line: str) -> SatdHit | None:
    """Module-level shortcut using the default tag and marker sets."""
    return DEFAULT_DETECTOR.detect(line)
