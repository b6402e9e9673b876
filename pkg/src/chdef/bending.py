"""Bending deformations along a block-diagonal stabilizer.

The twist matrix T_v = Diag(v^n, v^-1, ..., v^-1) on C^{n+1} has determinant
one and preserves Diag(1, ..., 1, -1); its ratio of eigenvalues is v^{n+1},
so over the ring the twist angle theta enters through v = e^{i*theta/n},
keeping every matrix entry a Laurent value in v.  T_v centralizes exactly
the block matrices Diag(unit, GL_n block), which is what makes the two
amalgam/HNN rewiring rules below well defined:

* amalgam over Delta: one factor is kept, the other is conjugated by T_v;
* HNN over Delta: the base is kept, the stable letter is premultiplied.

Exactness discipline: bending happens over the ring, relation checks on the
bent representation are exact, and the twist parameter only becomes a number
when a caller evaluates at a concrete angle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .ring import Laurent, ONE, RingMatrix, ZERO
from .words import Presentation, Representation, Word, WordError, parse_word


class BendingError(ValueError):
    pass


class DatumError(BendingError):
    """Malformed or inconsistent bending datum."""


class CentralizerError(BendingError):
    """A stabilizer generator is not centralized by the twist."""


class RelationError(BendingError):
    """The bent representation violates a relator."""


STABLE = "t"  # side tag for HNN stable letters


def twist_matrix(n: int) -> RingMatrix:
    """Diag(v^n, v^-1 I_n); raises for n < 2 (no room for a block to twist)."""
    if n < 2:
        raise BendingError(f"twist needs block size >= 2, got {n}")
    return RingMatrix.diagonal([Laurent.monomial(n)] + [Laurent.monomial(-1)] * n)


def standard_form(n: int) -> RingMatrix:
    """Diag(1, ..., 1, -1) on C^{n+1}."""
    return RingMatrix.diagonal([ONE] * n + [-ONE])


def verify_centralizes(twist: RingMatrix, rep: Representation, delta: tuple[Word, ...]) -> bool:
    """Exact check that the twist commutes with every stabilizer image."""
    if rep.mode != "exact":
        raise BendingError("centralizer check needs an exact representation")
    if rep.dim != twist.dim:
        raise BendingError("twist dimension does not match the representation")
    for word in delta:
        img = rep.evaluate(word)
        if twist * img != img * twist:
            return False
    return True


@dataclass(frozen=True)
class BendingDatum:
    """Presentation with side tags, stabilizer words, and peripheral crossing signs.

    kind       'amalgam' or 'hnn'
    sides      per-generator tag: 1 or 2 for amalgam factors; 1 or 't' for HNN
    delta      words generating the common stabilizer (must be side-1 words)
    crossings  peripheral word -> tuple of crossing signs (+1/-1)
    """

    kind: str
    presentation: Presentation
    sides: tuple
    delta: tuple[Word, ...]
    crossings: dict

    def __post_init__(self):
        if self.kind not in ("amalgam", "hnn"):
            raise DatumError(f"unknown kind {self.kind!r}")
        if len(self.sides) != self.presentation.rank:
            raise DatumError("one side tag per generator required")
        allowed = {1, 2} if self.kind == "amalgam" else {1, STABLE}
        bad = [s for s in self.sides if s not in allowed]
        if bad:
            raise DatumError(f"side tags {bad} not allowed for kind {self.kind!r}")
        if self.kind == "hnn" and STABLE not in self.sides:
            raise DatumError("hnn datum needs at least one stable letter")

    @classmethod
    def from_json(cls, data: dict) -> "BendingDatum":
        try:
            kind = data["kind"]
            gens = data["gens"]
            names = tuple(g["name"] for g in gens)
            sides = tuple(g["side"] for g in gens)
            relator_texts = data["relators"]
            delta_texts = data["delta"]
            crossing_map = data.get("crossings", {})
        except (TypeError, KeyError) as exc:
            raise DatumError(f"datum JSON missing field: {exc}") from exc
        try:
            pres = Presentation(names, tuple(parse_word(t, names) for t in relator_texts))
            delta = tuple(parse_word(t, names) for t in delta_texts)
            crossings = {
                text: tuple(int(s) for s in signs) for text, signs in crossing_map.items()
            }
        except WordError as exc:
            raise DatumError(str(exc)) from exc
        for text, signs in crossings.items():
            if any(s not in (1, -1) for s in signs):
                raise DatumError(f"crossing signs for {text!r} must be +1/-1")
        return cls(kind, pres, sides, delta, crossings)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "gens": [
                {"name": name, "side": side}
                for name, side in zip(self.presentation.names, self.sides)
            ],
            "relators": [r.to_text(self.presentation.names) for r in self.presentation.relators],
            "delta": [w.to_text(self.presentation.names) for w in self.delta],
            "crossings": {text: list(signs) for text, signs in self.crossings.items()},
        }


def load_datum(path) -> tuple[BendingDatum, Representation | None]:
    """Read a datum file; it may carry the base images under 'images'."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DatumError(f"cannot read datum: {exc}") from exc
    datum = BendingDatum.from_json(data)
    rep = None
    if "images" in data:
        names = datum.presentation.names
        try:
            images = tuple(RingMatrix.from_json(data["images"][name]) for name in names)
        except (TypeError, KeyError) as exc:
            raise DatumError("datum 'images' must map every generator name") from exc
        rep = Representation(datum.presentation, images, "exact")
    return datum, rep


def bend(datum: BendingDatum, base_rep: Representation, twist: RingMatrix | None = None) -> Representation:
    """Bent representation over the ring, exact in the twist variable.

    Preconditions checked here: the base representation is exact with
    constant entries, the twist centralizes every stabilizer image, and the
    bent images still satisfy all relators exactly.
    """
    if base_rep.mode != "exact":
        raise BendingError("bending needs an exact base representation")
    for img in base_rep.images:
        if any(not e.is_constant() for row in img.rows() for e in row):
            raise BendingError("base images must be constant matrices")
    if twist is None:
        twist = twist_matrix(base_rep.dim - 1)
    if not verify_centralizes(twist, base_rep, datum.delta):
        raise CentralizerError("twist does not centralize the stabilizer images")

    t_inv = twist.inverse()
    images = []
    for side, img in zip(datum.sides, base_rep.images):
        if side == 1:
            images.append(img)
        elif side == 2:
            images.append(twist * img * t_inv)
        else:  # STABLE
            images.append(twist * img)
    bent = Representation(datum.presentation, tuple(images), "exact")
    checks = bent.check_relations()
    if not all(checks):
        bad = [
            rel.to_text(datum.presentation.names)
            for rel, ok in zip(datum.presentation.relators, checks)
            if not ok
        ]
        raise RelationError(f"bent images violate relators: {bad}")
    return bent


def peripheral_rotation(word: Word, signs) -> dict:
    """Predicted cusp behavior of a bent peripheral element from crossing signs.

    The sign sum epsilon counts how often the peripheral word crosses the
    bending locus, with orientation.  epsilon = 0 leaves the element
    unipotent for every twist angle; otherwise the element acquires a
    rotation part of epsilon twist-units (the twist variable enters its
    eigenvalues with total exponent proportional to epsilon).
    """
    signs = tuple(int(s) for s in signs)
    if any(s not in (1, -1) for s in signs):
        raise BendingError("crossing signs must be +1/-1")
    epsilon = sum(signs)
    return {
        "word": word,
        "epsilon": epsilon,
        "predicted_class": "parabolic-unipotent" if epsilon == 0 else "ellipto-parabolic",
        "rotation_twist_units": epsilon,
    }
