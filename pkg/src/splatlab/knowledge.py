"""Titled text entries attached to a scene, searched by term overlap."""

from __future__ import annotations

import re
from dataclasses import dataclass

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _tokens(text: str) -> set[str]:
    return set(_TOKEN_RE.findall(text.lower()))


@dataclass(frozen=True)
class KnowledgeEntry:
    title: str
    body: str


@dataclass(frozen=True)
class KnowledgeBase:
    entries: tuple[KnowledgeEntry, ...] = ()

    def search(self, query: str, limit: int = 3) -> list[KnowledgeEntry]:
        """Entries sharing terms with the query, best overlap first.

        Title matches weigh double; zero-overlap entries are dropped.
        """
        q = _tokens(query)
        if not q:
            return []
        scored = []
        for pos, entry in enumerate(self.entries):
            score = 2 * len(q & _tokens(entry.title)) + len(q & _tokens(entry.body))
            if score > 0:
                scored.append((-score, pos, entry))
        scored.sort()
        return [entry for _, _, entry in scored[:limit]]

    def __len__(self) -> int:
        return len(self.entries)


__all__ = ["KnowledgeBase", "KnowledgeEntry"]
