from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from evonas.errors import EmptyHistory, InsufficientHistory, NonMonotoneEpoch
from evonas.ledger import (ORIGIN, INTERCEPT, History, Ledger, objective_vector, potential,
                           potential_with_intercept)

from oracles import intercept_slope_exact, potential_exact


def hist(E, F):
    h = History()
    for e, f in zip(E, F):
        h.append(e, f)
    return h


@st.composite
def histories(draw, min_size=1, max_size=50):
    epochs = sorted(draw(st.sets(st.integers(1, 500), min_size=min_size, max_size=max_size)))
    accs = draw(st.lists(st.floats(0, 1), min_size=len(epochs), max_size=len(epochs)))
    return epochs, accs


def test_record_sample_appends():
    led = Ledger()
    led.record_sample("a", 1, 0.5)
    assert led.history("a").epochs == [1]
    assert led.history("a").accuracies == [0.5]
    led.record_sample("a", 3, 0.6)
    assert led.history("a").epochs == [1, 3]


def test_record_sample_rejects_non_monotone_epoch():
    led = Ledger().record_sample("a", 5, 0.5)
    with pytest.raises(NonMonotoneEpoch):
        led.record_sample("a", 2, 0.4)
    with pytest.raises(NonMonotoneEpoch):
        led.record_sample("a", 5, 0.4)
    with pytest.raises(NonMonotoneEpoch):
        Ledger().record_sample("b", 0, 0.4)


def test_record_sample_rejects_bad_accuracy():
    with pytest.raises(ValueError):
        Ledger().record_sample("a", 1, 1.5)


def test_unknown_id_has_empty_history():
    assert len(Ledger().history("nope")) == 0


def test_potential_worked_examples():
    assert potential(hist([1, 2, 3], [0.1, 0.2, 0.3])) == 0.1
    assert potential(hist([1], [0.5])) == 0.5
    E, F = [10, 20, 30, 40], [0.5, 0.6, 0.55, 0.7]
    # decimal inputs taken exactly: 61.5 / 3000
    exact = potential_exact(E, [Fraction(str(f)) for f in F])
    assert exact == Fraction(615, 30000)
    assert potential(hist(E, F)) == float(exact) == 0.0205


def test_potential_empty_history():
    with pytest.raises(EmptyHistory):
        potential(History())


@given(histories())
@settings(max_examples=300)
def test_potential_matches_exact_rational(h):
    E, F = h
    # correctly rounded, so equal to the rounded exact rational
    assert potential(hist(E, F)) == float(potential_exact(E, F))


@given(histories(), st.floats(0, 1))
def test_potential_scale_equivariant(h, c):
    E, F = h
    scaled = [c * f for f in F]
    assert potential(hist(E, scaled)) == pytest.approx(c * potential(hist(E, F)), rel=1e-12, abs=1e-300)


@given(st.lists(st.integers(1, 500), min_size=1, max_size=30, unique=True).map(sorted),
       st.floats(0, 1 / 500))
def test_potential_exact_on_through_origin_line(E, s):
    F = [s * e for e in E]
    assert potential(hist(E, F)) == pytest.approx(s, rel=1e-14, abs=0)


@given(st.integers(1, 50), st.data())
def test_potential_positive_for_increasing_accuracy(m, data):
    F = sorted(data.draw(st.lists(st.floats(0, 1), min_size=m, max_size=m, unique=True)))
    assume(F[-1] > 0)
    assert potential(hist(list(range(1, m + 1)), F)) > 0


def test_intercept_worked_examples():
    assert potential_with_intercept(hist([1, 2, 3], [0.5, 0.6, 0.7])) == pytest.approx(0.1)
    assert potential_with_intercept(hist([1, 2], [0.4, 0.4])) == 0.0
    E, F = [1, 2, 3, 4], [0.2, 0.5, 0.4, 0.7]
    assert float(intercept_slope_exact(E, F)) == pytest.approx(0.14, rel=1e-15)
    assert potential_with_intercept(hist(E, F)) == pytest.approx(0.14, rel=1e-12)


def test_intercept_needs_two_samples():
    with pytest.raises(InsufficientHistory):
        potential_with_intercept(hist([1], [0.5]))


@given(histories(min_size=2), st.floats(-0.5, 0.5))
def test_intercept_translation_invariant(h, c):
    E, F = h
    shifted = History(list(E), [f + c for f in F])
    assert potential_with_intercept(shifted) == pytest.approx(
        potential_with_intercept(hist(E, F)), rel=1e-9, abs=1e-12)


@given(histories(min_size=2))
def test_intercept_matches_exact_rational(h):
    E, F = h
    assert potential_with_intercept(hist(E, F)) == pytest.approx(
        float(intercept_slope_exact(E, F)), rel=1e-9, abs=1e-13)


def test_ledger_isolation():
    led = Ledger()
    led.record_sample("a", 1, 0.2).record_sample("a", 2, 0.4)
    before = potential(led.history("a"))
    led.record_sample("b", 3, 0.9)
    assert potential(led.history("a")) == before


def test_history_copy_is_detached():
    led = Ledger().record_sample("a", 1, 0.2)
    h = led.history("a")
    h.append(2, 0.3)
    assert led.history("a").epochs == [1]


def test_objective_vector_examples():
    led = Ledger()
    for e, f in zip([1, 2, 3], [0.1, 0.2, 0.3]):
        led.record_sample("g", e, f)
    v = objective_vector("g", led, 4.0, ["accuracy", "potential", "size_mb"])
    assert v.values == pytest.approx((0.3, 0.1, 4.0))
    assert v.directions == ("max", "max", "min")
    assert v.names == ("accuracy", "potential", "size_mb")

    single = objective_vector("g", led, 4.0, ["accuracy"])
    assert single.values == (0.3,) and single.directions == ("max",)

    a_s = objective_vector("g", led, 4.0, ["accuracy", "size_mb"])
    assert a_s.names == ("accuracy", "size_mb")


def test_objective_vector_requires_history():
    with pytest.raises(EmptyHistory):
        objective_vector("g", Ledger(), 1.0, ["accuracy"])
    assert objective_vector("g", Ledger(), 1.0, ["size_mb"]).values == (1.0,)


def test_objective_vector_intercept_variant():
    led = Ledger().record_sample("g", 1, 0.5)
    assert objective_vector("g", led, 0, ["potential"], INTERCEPT).values == (0.0,)
    led.record_sample("g", 2, 0.7)
    assert objective_vector("g", led, 0, ["potential"], INTERCEPT).values[0] == pytest.approx(0.2)
    assert objective_vector("g", led, 0, ["potential"], ORIGIN).values[0] == pytest.approx(1.9 / 5)


def test_objective_vector_rejects_unknown_names():
    led = Ledger().record_sample("g", 1, 0.5)
    with pytest.raises(ValueError):
        objective_vector("g", led, 0, ["flops"])
    with pytest.raises(ValueError):
        objective_vector("g", led, 0, [])


def test_ledger_records_roundtrip():
    rng = np.random.default_rng(0)
    led = Ledger()
    for epoch in range(1, 30):
        for gid in rng.choice(["a", "b", "c", "d"], size=2, replace=False):
            led.record_sample(str(gid), epoch, float(rng.random()))
    again = Ledger.from_records(led.to_records())
    assert again == led
    assert again.to_records() == led.to_records()
