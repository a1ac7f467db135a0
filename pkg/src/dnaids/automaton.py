"""Aho-Corasick multi-pattern matcher (goto / failure / output functions)."""

from __future__ import annotations

from collections import deque
from typing import Iterator, Sequence


class Automaton:
    """Finds every occurrence of every pattern in one left-to-right pass.

    Patterns are identified by their position in the constructor argument.
    Duplicate patterns are allowed and reported under each of their ids.
    """

    def __init__(self, patterns: Sequence[str]):
        self.patterns = tuple(patterns)
        goto: list[dict[str, int]] = [{}]
        out: list[list[int]] = [[]]
        for pid, pat in enumerate(self.patterns):
            if not pat:
                raise ValueError("empty pattern")
            state = 0
            for ch in pat:
                nxt = goto[state].get(ch)
                if nxt is None:
                    nxt = len(goto)
                    goto[state][ch] = nxt
                    goto.append({})
                    out.append([])
                state = nxt
            out[state].append(pid)

        fail = [0] * len(goto)
        # Breadth-first so every failure target is finalized before use.
        queue = deque(goto[0].values())
        while queue:
            state = queue.popleft()
            for ch, nxt in goto[state].items():
                queue.append(nxt)
                f = fail[state]
                while f and ch not in goto[f]:
                    f = fail[f]
                target = goto[f].get(ch, 0)
                fail[nxt] = target if target != nxt else 0
                out[nxt] = out[nxt] + out[fail[nxt]]

        self._goto = goto
        self._fail = fail
        self._out = [tuple(o) for o in out]

    def __len__(self):
        return len(self.patterns)

    @property
    def n_states(self) -> int:
        return len(self._goto)

    def iter_matches(self, text: str) -> Iterator[tuple[int, int]]:
        """Yield ``(start, pattern_id)`` for each occurrence, ordered by end position."""
        goto, fail, out, pats = self._goto, self._fail, self._out, self.patterns
        state = 0
        for i, ch in enumerate(text):
            while state and ch not in goto[state]:
                state = fail[state]
            state = goto[state].get(ch, 0)
            for pid in out[state]:
                yield i - len(pats[pid]) + 1, pid

    def find_all(self, text: str) -> set[tuple[int, int]]:
        return set(self.iter_matches(text))

    def matched_ids(self, text: str) -> set[int]:
        """Ids of patterns that occur at least once in ``text``."""
        goto, fail, out = self._goto, self._fail, self._out
        hits: set[int] = set()
        state = 0
        for ch in text:
            while state and ch not in goto[state]:
                state = fail[state]
            state = goto[state].get(ch, 0)
            if out[state]:
                hits.update(out[state])
        return hits

