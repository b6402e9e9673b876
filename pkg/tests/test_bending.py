"""Bending deformations: twist construction, centralizer checks, exactness."""

import math
from fractions import Fraction

import numpy as np
import pytest

from chdef.bending import (
    BendingDatum,
    BendingError,
    CentralizerError,
    DatumError,
    RelationError,
    bend,
    load_datum,
    peripheral_rotation,
    standard_form,
    twist_matrix,
    verify_centralizes,
)
from chdef.chgeom import HermitianForm, classify_isometry
from chdef.ring import Laurent, RingMatrix
from chdef.words import Presentation, Representation, Word, parse_word

U = Laurent.monomial(1)
U_INV = Laurent.monomial(-1)
ONE = Laurent.constant(1)


def _const(rows):
    return RingMatrix([[Laurent.constant(Fraction(x)) for x in row] for row in rows])


BOOST = _const(
    [
        [Fraction(5, 3), 0, 0, Fraction(4, 3)],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [Fraction(4, 3), 0, 0, Fraction(5, 3)],
    ]
)
BLOCK = _const(
    [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, Fraction(5, 4), Fraction(3, 4)],
        [0, 0, Fraction(3, 4), Fraction(5, 4)],
    ]
)


def test_twist_matrix_shape():
    t3 = twist_matrix(3)
    assert t3 == RingMatrix.diagonal([U**3, U_INV, U_INV, U_INV])
    t2 = twist_matrix(2)
    assert t2 == RingMatrix.diagonal([U**2, U_INV, U_INV])
    with pytest.raises(BendingError):
        twist_matrix(1)


def test_twist_is_special_and_compatible():
    for n in (2, 3, 4):
        t = twist_matrix(n)
        assert t.det() == ONE
        j = standard_form(n)
        assert t.transpose() * j * t.star() == j
        assert t.substitute_one() == RingMatrix.identity(n + 1)


def test_twist_numeric_is_boundary_elliptic():
    theta = 0.9
    t = twist_matrix(3).evaluate(theta / 3)
    form = HermitianForm(np.diag([1.0, 1.0, 1.0, -1.0]))
    cls = classify_isometry(form, t)
    assert cls.tag == "elliptic-boundary"


def test_verify_centralizes():
    pres = Presentation(("d", "b"), ())
    rep = Representation(pres, (BLOCK, BOOST), "exact")
    t = twist_matrix(3)
    assert verify_centralizes(t, rep, (parse_word("d", pres.names),))
    assert verify_centralizes(t, rep, ())
    assert not verify_centralizes(t, rep, (parse_word("b", pres.names),))
    assert not verify_centralizes(t, rep, (parse_word("d b", pres.names),))
    # oracle: direct product comparison
    assert t * BLOCK == BLOCK * t
    assert t * BOOST != BOOST * t


def test_load_amalgam_datum(data_dir):
    datum, rep = load_datum(data_dir / "toy_amalgam.json")
    assert datum.kind == "amalgam"
    assert datum.presentation.names == ("a", "e", "d", "b")
    assert datum.sides == (1, 1, 2, 2)
    assert rep is not None
    assert all(rep.check_relations())
    assert BendingDatum.from_json(datum.to_json()).presentation == datum.presentation


def test_bend_amalgam_exact(data_dir):
    datum, rep = load_datum(data_dir / "toy_amalgam.json")
    bent = bend(datum, rep)
    assert all(bent.check_relations())
    names = datum.presentation.names
    t = twist_matrix(3)
    for name, side in zip(names, datum.sides):
        i = names.index(name)
        if side == 1:
            assert bent.images[i] == rep.images[i]
        else:
            assert bent.images[i] == t * rep.images[i] * t.inverse()
    # the conjugated boost genuinely moves: its corner entry picks up u^4
    b = names.index("b")
    assert bent.images[b][0, 3] == Laurent.monomial(4, Fraction(4, 3))
    # stabilizer images are block, hence untouched by the conjugation
    d = names.index("d")
    assert bent.images[d] == rep.images[d]


def test_bend_recovers_base_at_one(data_dir):
    for fname in ("toy_amalgam.json", "toy_hnn.json"):
        datum, rep = load_datum(data_dir / fname)
        bent = bend(datum, rep)
        back = tuple(img.substitute_one() for img in bent.images)
        assert back == rep.images


def test_bend_hnn_exact(data_dir):
    datum, rep = load_datum(data_dir / "toy_hnn.json")
    bent = bend(datum, rep)
    assert all(bent.check_relations())
    names = datum.presentation.names
    t_idx = names.index("t")
    c_idx = names.index("c")
    assert bent.images[t_idx] == twist_matrix(3) * rep.images[t_idx]
    assert bent.images[c_idx] == rep.images[c_idx]


def test_bend_preserves_form(data_dir):
    j = standard_form(3)
    for fname in ("toy_amalgam.json", "toy_hnn.json"):
        datum, rep = load_datum(data_dir / fname)
        bent = bend(datum, rep)
        for g in bent.images:
            assert g.transpose() * j * g.star() == j
            assert g.det() == ONE


def test_bend_centralizer_failure(data_dir):
    datum, rep = load_datum(data_dir / "toy_amalgam.json")
    bad = BendingDatum(
        datum.kind,
        datum.presentation,
        datum.sides,
        (parse_word("b", datum.presentation.names),),
        datum.crossings,
    )
    with pytest.raises(CentralizerError):
        bend(bad, rep)


def test_bend_relation_failure():
    pres = Presentation(("g", "h"), (parse_word("g h^-1", ("g", "h")),))
    rep = Representation(pres, (BOOST, BOOST), "exact")
    assert all(rep.check_relations())
    datum = BendingDatum("amalgam", pres, (1, 2), (), {})
    with pytest.raises(RelationError, match="g h\\^-1"):
        bend(datum, rep)


def test_bend_rejects_numeric_base(data_dir):
    datum, rep = load_datum(data_dir / "toy_amalgam.json")
    numeric = Representation(
        datum.presentation, tuple(img.evaluate(0.0) for img in rep.images), "numeric"
    )
    with pytest.raises(BendingError):
        bend(datum, numeric)


def test_datum_validation():
    pres = Presentation(("g",), ())
    with pytest.raises(DatumError):
        BendingDatum("amalgam", pres, (3,), (), {})
    with pytest.raises(DatumError):
        BendingDatum("hnn", pres, (1,), (), {})
    with pytest.raises(DatumError):
        BendingDatum("mystery", pres, (1,), (), {})
    with pytest.raises(DatumError):
        BendingDatum("amalgam", pres, (1, 2), (), {})
    with pytest.raises(DatumError):
        BendingDatum.from_json({"kind": "amalgam"})
    with pytest.raises(DatumError):
        BendingDatum.from_json(
            {
                "kind": "amalgam",
                "gens": [{"name": "g", "side": 1}],
                "relators": [],
                "delta": [],
                "crossings": {"g": [1, 0]},
            }
        )


def test_peripheral_rotation_predictions():
    w = Word.generator(0)
    balanced = peripheral_rotation(w, (1, -1))
    assert balanced["epsilon"] == 0
    assert balanced["predicted_class"] == "parabolic-unipotent"
    twisted = peripheral_rotation(w, (1, 1))
    assert twisted["epsilon"] == 2
    assert twisted["predicted_class"] == "ellipto-parabolic"
    assert twisted["rotation_twist_units"] == 2
    empty = peripheral_rotation(w, ())
    assert empty["epsilon"] == 0
    with pytest.raises(BendingError):
        peripheral_rotation(w, (1, 2))


def test_rotation_angle_of_twisted_parabolic():
    """A unipotent translation fixing a twist-fixed null point becomes
    ellipto-parabolic after one twist, with geometric rotation angle
    (n+1)/n times the twist angle (eigenvalue ratio u^(n+1))."""
    theta = 0.8
    n = 2
    root2 = math.sqrt(2.0)
    form = HermitianForm(np.diag([1.0, 1.0, -1.0]))
    # basis adapted to the null point (0, 1, 1)/sqrt(2)
    d = np.array(
        [
            [0.0, 1.0, 0.0],
            [1 / root2, 0.0, 1 / root2],
            [1 / root2, 0.0, -1 / root2],
        ]
    )
    siegel = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
    assert np.allclose(d.T @ form.matrix @ d, siegel)
    # vertical Heisenberg translation at that point, conjugated to our form
    u_s = np.array([[1.0, 0.0, 0.5j], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert np.allclose(u_s.T @ siegel @ np.conj(u_s), siegel)
    trans = d @ u_s @ np.linalg.inv(d)
    assert classify_isometry(form, trans).tag == "parabolic-unipotent"
    twist = twist_matrix(n).evaluate(theta / n)
    cls = classify_isometry(form, twist @ trans)
    assert cls.tag == "ellipto-parabolic"
    assert len(cls.rotation_angles) == 1
    assert abs(cls.rotation_angles[0] - (n + 1) / n * theta) < 1e-8
