"""Free-group words, finite presentations, and matrix representations.

Words are stored freely reduced as syllables ``(generator_index, exponent)``.
The commutator convention throughout is [a, b] = a b a^-1 b^-1, and word
reversal plays the role of the formal opposite: reversing a word reverses
the order of its letters without inverting them.

Presentation text format::

    gens: m n
    let w = n m^-1 n^-1 m
    rel: m w n^-1 w^-1

``let`` lines define macros usable in later ``let``/``rel`` lines.  A token
is a generator or macro name, optionally with ``^k``; a single uppercase
letter is shorthand for the inverse of the matching lowercase generator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .ring import RingMatrix


class WordError(ValueError):
    pass


_TOKEN = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class Word:
    """A freely reduced word; the constructor normalizes its syllables."""

    syllables: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        stack: list[list[int]] = []
        for gen, exp in self.syllables:
            gen, exp = int(gen), int(exp)
            if exp == 0:
                continue
            if stack and stack[-1][0] == gen:
                stack[-1][1] += exp
                if stack[-1][1] == 0:
                    stack.pop()
            else:
                stack.append([gen, exp])
        object.__setattr__(self, "syllables", tuple((g, e) for g, e in stack))

    @classmethod
    def identity(cls) -> "Word":
        return cls(())

    @classmethod
    def generator(cls, index: int, exp: int = 1) -> "Word":
        return cls(((index, exp),))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.syllables + other.syllables)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.syllables)))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        out = Word.identity()
        for _ in range(n):
            out = out * self
        return out

    def reversed(self) -> "Word":
        """Letters in opposite order, exponent signs kept."""
        return Word(tuple(reversed(self.syllables)))

    def letters(self):
        """Yield single-letter factors (gen, +1 or -1), left to right."""
        for gen, exp in self.syllables:
            sign = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                yield gen, sign

    @property
    def length(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def to_text(self, names) -> str:
        if not self.syllables:
            return "1"
        parts = []
        for g, e in self.syllables:
            parts.append(names[g] if e == 1 else f"{names[g]}^{e}")
        return " ".join(parts)


def parse_word(text: str, names, macros: dict[str, Word] | None = None) -> Word:
    """Parse whitespace-separated tokens into a freely reduced word."""
    macros = macros or {}
    index = {name: i for i, name in enumerate(names)}
    word = Word.identity()
    for token in text.split():
        if token == "1":
            continue
        m = _TOKEN.match(token)
        if not m:
            raise WordError(f"malformed token {token!r}")
        name, exp_text = m.group(1), m.group(2)
        exp = int(exp_text) if exp_text is not None else 1
        if name in index:
            word = word * Word.generator(index[name], exp)
        elif name in macros:
            word = word * (macros[name] ** exp)
        elif len(name) == 1 and name.isupper() and name.lower() in index:
            word = word * Word.generator(index[name.lower()], -exp)
        else:
            raise WordError(f"unknown generator {name!r}")
    return word


@dataclass(frozen=True)
class Presentation:
    """Generator names plus relators over them."""

    names: tuple[str, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise WordError("duplicate generator names")

    @property
    def rank(self) -> int:
        return len(self.names)

    @classmethod
    def from_text(cls, source: str) -> "Presentation":
        """Parse the ``gens:``/``let``/``rel:`` text format."""
        names: tuple[str, ...] | None = None
        macros: dict[str, Word] = {}
        relators: list[Word] = []
        for raw in source.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("gens:"):
                if names is not None:
                    raise WordError("duplicate gens: line")
                names = tuple(line[len("gens:"):].split())
                if not names:
                    raise WordError("gens: line lists no generators")
            elif line.startswith("let"):
                if names is None:
                    raise WordError("let before gens:")
                body = line[len("let"):].strip()
                if "=" not in body:
                    raise WordError(f"malformed let line {raw!r}")
                name, rhs = (part.strip() for part in body.split("=", 1))
                if not name.isidentifier() or name in names or name in macros:
                    raise WordError(f"bad macro name {name!r}")
                macros[name] = parse_word(rhs, names, macros)
            elif line.startswith("rel:"):
                if names is None:
                    raise WordError("rel: before gens:")
                relators.append(parse_word(line[len("rel:"):], names, macros))
            else:
                raise WordError(f"unrecognized line {raw!r}")
        if names is None:
            raise WordError("missing gens: line")
        return cls(names, tuple(relators))

    def word(self, text: str, macros: dict[str, Word] | None = None) -> Word:
        return parse_word(text, self.names, macros)


@dataclass
class Representation:
    """Images of the generators, exact (RingMatrix) or numeric (ndarray).

    Exact images live over Q[u, u^-1]; numeric images are complex matrices.
    Inverse images are cached, so repeated word evaluation stays cheap.
    """

    presentation: Presentation
    images: tuple
    mode: str
    _inverses: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.mode not in ("exact", "numeric"):
            raise WordError(f"unknown mode {self.mode!r}")
        self.images = tuple(self.images)
        if len(self.images) != self.presentation.rank:
            raise WordError("one image per generator required")
        dims = {m.dim if self.mode == "exact" else m.shape[0] for m in self.images}
        if len(dims) != 1:
            raise WordError("images must share a dimension")

    @property
    def dim(self) -> int:
        img = self.images[0]
        return img.dim if self.mode == "exact" else img.shape[0]

    def _inverse_image(self, index: int):
        if index not in self._inverses:
            img = self.images[index]
            self._inverses[index] = (
                img.inverse() if self.mode == "exact" else np.linalg.inv(img)
            )
        return self._inverses[index]

    def evaluate(self, word: Word):
        """Image of a word; identity word maps to the identity matrix."""
        if self.mode == "exact":
            out = RingMatrix.identity(self.dim)
            for gen, exp in word.syllables:
                base = self.images[gen] if exp > 0 else self._inverse_image(gen)
                for _ in range(abs(exp)):
                    out = out * base
            return out
        out = np.eye(self.dim, dtype=complex)
        for gen, exp in word.syllables:
            base = self.images[gen] if exp > 0 else self._inverse_image(gen)
            for _ in range(abs(exp)):
                out = out @ base
        return out

    def check_relations(self):
        """Exact mode: one bool per relator. Numeric mode: max |image - I|."""
        results = []
        for rel in self.presentation.relators:
            img = self.evaluate(rel)
            if self.mode == "exact":
                results.append(img.is_identity())
            else:
                results.append(float(np.max(np.abs(img - np.eye(self.dim)))))
        return results

    def at_angle(self, alpha: float) -> "Representation":
        """Numeric representation at u = e^{i*alpha} (exact mode only)."""
        if self.mode != "exact":
            raise WordError("at_angle requires an exact representation")
        return Representation(
            self.presentation,
            tuple(img.evaluate(alpha) for img in self.images),
            "numeric",
        )

    def to_json(self) -> dict:
        if self.mode != "exact":
            raise WordError("only exact representations serialize to JSON")
        return {
            "mode": "exact",
            "generators": list(self.presentation.names),
            "relators": [r.to_text(self.presentation.names) for r in self.presentation.relators],
            "images": [img.to_json() for img in self.images],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Representation":
        try:
            names = tuple(data["generators"])
            rel_texts = data["relators"]
            images = tuple(RingMatrix.from_json(m) for m in data["images"])
        except (TypeError, KeyError) as exc:
            raise WordError("representation JSON needs generators/relators/images") from exc
        pres = Presentation(names, tuple(parse_word(t, names) for t in rel_texts))
        return cls(pres, images, "exact")


def evaluate_word(word: Word, rep: Representation):
    return rep.evaluate(word)


def check_relations(rep: Representation):
    return rep.check_relations()


def reduced_words(num_gens: int, max_length: int, include_identity: bool = False):
    """Yield freely reduced words of length <= max_length.

    Order: by length, then lexicographically with letter order
    g0 < g0^-1 < g1 < g1^-1 < ...
    """
    if include_identity:
        yield Word.identity()
    letters = [(g, s) for g in range(num_gens) for s in (1, -1)]

    def grow(prefix: list[tuple[int, int]], remaining: int):
        if remaining == 0:
            yield Word(tuple(prefix))
            return
        last = prefix[-1] if prefix else None
        for gen, sign in letters:
            if last is not None and last[0] == gen and last[1] == -sign:
                continue
            prefix.append((gen, sign))
            yield from grow(prefix, remaining - 1)
            prefix.pop()

    for length in range(1, max_length + 1):
        yield from grow([], length)
