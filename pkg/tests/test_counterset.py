"""Ultimately-periodic counter sets and their certified computation.

The arithmetic oracle is pointwise: realize both operands as plain integer
sets on a long window and apply Python's set operators.
"""

from __future__ import annotations

import math
import random

import pytest

from ocrank.counterset import (
    CertificationError,
    UPSet,
    default_counter_cap,
    reach_sets,
    render_upset,
    select_period,
    up_intersect,
    up_membership,
    up_union,
    worked_close_image,
)
from ocrank.regular import compile_regex, membership, parse_regex, words_up_to
from ocrank.words import BINARY
from conftest import random_machine


# --- oracle helpers ------------------------------------------------------------


def realize(s: UPSet, bound: int) -> set[int]:
    """The set's members on [0, bound], straight from the definition."""
    out = set()
    for c in range(bound + 1):
        if c < s.threshold:
            if c in s.finite:
                out.add(c)
        elif c % s.period in s.residues:
            out.add(c)
    return out


def random_upset(rng: random.Random) -> UPSet:
    threshold = rng.randint(0, 12)
    finite = frozenset(
        c for c in range(threshold) if rng.random() < 0.4
    )
    period = rng.randint(1, 6)
    residues = frozenset(r for r in range(period) if rng.random() < 0.35)
    return UPSet.build(threshold, finite, period, residues)


# --- normalization ----------------------------------------------------------------


def test_build_preserves_membership():
    rng = random.Random(5)
    for _ in range(300):
        threshold = rng.randint(0, 12)
        finite = frozenset(c for c in range(threshold) if rng.random() < 0.4)
        period = rng.randint(1, 6)
        residues = frozenset(r for r in range(period) if rng.random() < 0.35)
        s = UPSet.build(threshold, finite, period, residues)
        for c in range(threshold + 4 * period + 4):
            reference = (c in finite) if c < threshold else (c % period in residues)
            assert up_membership(s, c) == reference, (s, c)


def test_build_is_idempotent_and_minimal():
    rng = random.Random(6)
    for _ in range(200):
        s = random_upset(rng)
        again = UPSet.build(s.threshold, s.finite, s.period, s.residues)
        assert again == s
        # no proper divisor of the period describes the same tail
        for d in range(1, s.period):
            if s.period % d:
                continue
            folded = frozenset(r % d for r in s.residues)
            t = UPSet(s.threshold, s.finite, d, folded)
            window = range(s.threshold, s.threshold + 3 * s.period * d + 1)
            if all(up_membership(t, c) == up_membership(s, c) for c in window):
                pytest.fail(f"period {s.period} not minimal: {d} works for {s}")


def test_factories():
    assert UPSet.empty().is_empty()
    assert realize(UPSet.naturals(), 9) == set(range(10))
    assert realize(UPSet.from_finite({1, 4}), 9) == {1, 4}
    assert realize(UPSet.progression(3, 2), 12) == {3, 5, 7, 9, 11}
    assert UPSet.from_finite(set()).is_empty()
    assert UPSet.progression(0, 1) == UPSet.naturals()


def test_first_tail_values_and_finiteness():
    s = UPSet.build(4, frozenset({1}), 3, frozenset({0, 2}))
    assert s.first_tail_values() == [5, 6]
    assert not s.is_finite()
    assert UPSet.from_finite({2, 9}).is_finite()


# --- arithmetic ----------------------------------------------------------------------


def test_up_arithmetic_against_pointwise_oracle():
    rng = random.Random(20250819)
    for _ in range(400):
        s1, s2 = random_upset(rng), random_upset(rng)
        bound = 10 * math.lcm(s1.period, s2.period) + max(s1.threshold, s2.threshold)
        r1, r2 = realize(s1, bound), realize(s2, bound)
        meet = up_intersect(s1, s2)
        join = up_union(s1, s2)
        assert realize(meet, bound) == (r1 & r2), (s1, s2)
        assert realize(join, bound) == (r1 | r2), (s1, s2)


def test_arithmetic_identities():
    rng = random.Random(8)
    for _ in range(80):
        s = random_upset(rng)
        assert up_intersect(s, UPSet.naturals()) == s
        assert up_union(s, UPSet.empty()) == s
        assert up_intersect(s, UPSet.empty()).is_empty()


# --- rendering -----------------------------------------------------------------------


@pytest.mark.parametrize(
    "s,text",
    [
        (UPSet.empty(), "∅"),
        (UPSet.naturals(), "{t}"),
        (UPSet.progression(1, 1), "{1+t}"),
        (UPSet.progression(0, 2), "{2t}"),
        (UPSet.progression(1, 2), "{1+2t}"),
        (UPSet.progression(5, 6), "{5+6t}"),
        (UPSet.progression(0, 3), "{3t}"),
        (UPSet.progression(1, 3), "{1+3t}"),
        (UPSet.progression(2, 3), "{2+3t}"),
        (UPSet.from_finite({0}), "{0}"),
        (UPSet.from_finite({1}), "{1}"),
        (UPSet.from_finite({2}), "{2}"),
        (UPSet.build(3, frozenset({1, 2}), 2, frozenset({1})), "{2} ∪ {1+2t}"),
        (UPSet.build(3, frozenset({2}), 2, frozenset({1})), "{2} ∪ {3+2t}"),
        (UPSet.build(3, frozenset({2}), 6, frozenset({5})), "{2} ∪ {5+6t}"),
        (UPSet.from_finite({1, 3}), "{1,3}"),
    ],
)
def test_render_canonical(s, text):
    assert render_upset(s) == text


def test_render_extends_tails_down_through_the_finite_part():
    # 5 and 7 belong to the {1+2t} class and must fold into it, leaving 2 out
    s = UPSet.build(9, frozenset({2, 5, 7}), 2, frozenset({1}))
    assert render_upset(s) == "{2} ∪ {5+2t}"


# --- close-image computation ------------------------------------------------------------


def oracle_close_image(regex_text: str, word_cap: int, value_cap: int) -> set[int]:
    """Values #1(w) − #0(w) over members whose every suffix closes ≥ 0."""
    a = compile_regex(parse_regex(regex_text, BINARY), BINARY)
    values = set()
    for w in words_up_to(a, word_cap):
        drop = 0
        ok = True
        for ch in reversed(w):
            drop += 1 if ch == "1" else -1
            if drop < 0:
                ok = False
                break
        if ok and 0 <= drop <= value_cap:
            values.add(drop)
    return values


@pytest.mark.parametrize(
    "regex_text,expected",
    [
        ("11", "{2}"),
        ("01", "{0}"),
        ("1", "{1}"),
        ("0", "∅"),
        ("(000+01)*0(1(11)*+11)", "{t}"),
    ],
)
def test_worked_close_image_examples(regex_text, expected):
    assert render_upset(worked_close_image(regex_text)) == expected


def test_worked_close_image_against_word_oracle():
    for regex_text in ("11", "01", "(01)*1", "0*1*", "(000+01)*0(1(11)*+11)"):
        s = worked_close_image(regex_text)
        brute = oracle_close_image(regex_text, word_cap=14, value_cap=6)
        for c in range(7):
            if c in brute:
                assert up_membership(s, c), (regex_text, c)
        # completeness of the brute side only holds for small values
        for c in range(4):
            assert up_membership(s, c) == (c in brute), (regex_text, c)


# --- certified reachability -----------------------------------------------------------


def test_default_counter_cap_formula():
    assert default_counter_cap(2) == 20
    assert default_counter_cap(9) == 202


def test_cap_floor_is_enforced():
    machine = random_machine(random.Random(0))
    with pytest.raises(CertificationError) as err:
        reach_sets(machine, counter_cap=3)
    assert "counter-cap" in str(err.value) or "counter cap" in str(err.value)


def test_select_period_examples():
    two = UPSet.progression(0, 2)
    three = UPSet.progression(1, 3)
    assert select_period([two, three]) == 6
    assert select_period([UPSet.from_finite({0})]) == 2
    # the period must clear every finite member and the first tail values
    assert select_period([UPSet.from_finite({5})]) == 6
    assert select_period([UPSet.naturals()]) == 2


def test_reach_sets_carries_certificates(fig2):
    report = reach_sets(fig2)
    assert report.period == 6
    assert set(report.certificates) == set(fig2.states)
    for q, sides in report.certificates.items():
        for side in ("minus", "plus"):
            cert = sides[side]
            assert cert.mode in ("empty", "finite", "lcm-window", "gcd-window")
            for residue, (member, weight) in cert.pump_witnesses.items():
                assert member % cert.period == residue
                assert weight > 0


def test_reach_sets_duck_types_counter_cap(fig1):
    report = reach_sets(fig1, counter_cap=40)
    assert report.counter_cap == 40
    default = reach_sets(fig1)
    assert default.counter_cap == default_counter_cap(2)
    for q in fig1.states:
        for c in range(20):
            assert up_membership(report.meet[q], c) == up_membership(
                default.meet[q], c
            )
