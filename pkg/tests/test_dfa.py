import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resetword import (
    AutomatonError,
    Dfa,
    ParseError,
    apply_letter,
    apply_letter_inverse,
    apply_word,
    cerny,
    format_dfa,
    is_synchronizing,
    parse_dfa,
    random_dfa,
    reduce_reachable,
    RngSpec,
)
from resetword.dfa import (
    PairAutomaton,
    closure,
    from_words,
    induced,
    make_set,
    parse_dfas,
    popcount,
    states_of,
    to_words,
)
from resetword.generators import constant_letter
from resetword.oracle import brute_force_shortest

from conftest import all_automata, automata

Q4 = 0b1111


def test_apply_letter_examples(c4):
    assert apply_letter(Dfa(1, 1, ((0,),)), 1, 0) == 1
    assert apply_letter(c4, Q4, 1) == Q4
    assert apply_letter(c4, Q4, 0) == make_set([1, 2, 3])


def test_apply_letter_rejects_bad_letter(c4):
    with pytest.raises(AutomatonError):
        apply_letter(c4, Q4, 2)
    with pytest.raises(AutomatonError):
        apply_letter_inverse(c4.inverse, Q4, -1)


def test_apply_word_examples(c4):
    assert apply_word(c4, 0b0110, []) == 0b0110
    length, word = brute_force_shortest(c4)
    assert length == 9
    assert popcount(apply_word(c4, Q4, word)) == 1
    for w in itertools.product(range(2), repeat=8):
        assert popcount(apply_word(c4, Q4, w)) >= 2


def test_inverse_examples(c4):
    inv = c4.inverse
    assert apply_letter_inverse(inv, 0b0010, 0) == 0b0011
    assert apply_letter_inverse(inv, Q4, 0) == Q4
    for s in range(1, 16):
        assert popcount(apply_letter_inverse(inv, s, 1)) == popcount(s)


@settings(max_examples=200)
@given(automata(), st.data())
def test_galois_connection(d, data):
    # Sa ⊆ T  iff  S ⊆ T a⁻¹
    s = data.draw(st.integers(1, (1 << d.n) - 1))
    t = data.draw(st.integers(0, (1 << d.n) - 1))
    a = data.draw(st.integers(0, d.k - 1))
    img = apply_letter(d, s, a)
    pre = apply_letter_inverse(d.inverse, t, a)
    assert (img & ~t == 0) == (s & ~pre == 0)
    assert popcount(img) <= popcount(s)


@given(automata())
def test_preimage_lists_partition_states(d):
    for lists in d.inverse.preimages:
        flat = sorted(q for lst in lists for q in lst)
        assert flat == list(range(d.n))
    assert d.inverse.preimages == type(d.inverse).from_dfa(d).preimages


@given(st.integers(1, 300), st.data())
def test_word_row_round_trip(n, data):
    s = data.draw(st.integers(0, (1 << n) - 1))
    assert from_words(to_words(s, (n + 63) // 64)) == s
    assert make_set(states_of(s)) == s


def test_is_synchronizing_examples():
    for n in range(1, 9):
        assert is_synchronizing(cerny(n))
    assert not is_synchronizing(Dfa(2, 2, ((0, 0), (1, 1))))
    assert is_synchronizing(Dfa.from_columns([[0] * 5]))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_is_synchronizing_exhaustive(n):
    for d in all_automata(n):
        assert is_synchronizing(d) == (brute_force_shortest(d) is not None)


@pytest.mark.parametrize("n", [4, 5])
def test_is_synchronizing_random(n):
    rng = RngSpec(1234 + n)
    for i in range(2000):
        d = random_dfa(n, 2, rng.offset(i))
        assert is_synchronizing(d) == (brute_force_shortest(d) is not None)


@settings(max_examples=100)
@given(automata(max_n=6))
def test_pair_merging_words(d):
    pairs = PairAutomaton(d)
    for p, q in itertools.combinations(range(d.n), 2):
        if pairs.dist[p][q] >= 0:
            w = pairs.merging_word(p, q)
            assert len(w) == pairs.dist[p][q]
            assert popcount(apply_word(d, (1 << p) | (1 << q), w)) == 1
    if pairs.all_pairs_mergeable():
        g = pairs.greedy_word(d.states)
        assert popcount(apply_word(d, d.states, g)) == 1


def test_reduce_strongly_connected_keeps_everything():
    d = cerny(7)
    red, mapping = reduce_reachable(d, 3)
    assert red.n == 7 and len(mapping) == 7


def test_reduce_drops_state_without_incoming():
    # state 0 has no incoming transition
    d = Dfa(3, 2, ((1, 2), (2, 1), (1, 1)))
    red, mapping = reduce_reachable(d, 1)
    assert 0 not in mapping and red.n == 2


def test_reduce_preserves_length():
    rng = RngSpec(99)
    for i in range(300):
        d = random_dfa(7, 2, rng.offset(i))
        if not is_synchronizing(d):
            continue
        red, _ = reduce_reachable(d, 2)
        # two forward steps were spent before the reduction
        assert brute_force_shortest(d)[0] <= brute_force_shortest(red)[0] + 2


def test_induced_requires_closed_set():
    d = cerny(4)
    with pytest.raises(AssertionError):
        induced(d, 0b0011)
    assert closure(d, 0b0001) == Q4


def test_dfa_validation():
    with pytest.raises(AutomatonError):
        Dfa(2, 1, ((0,), (2,)))
    with pytest.raises(AutomatonError):
        Dfa(0, 1, ())
    with pytest.raises(AutomatonError):
        Dfa(2, 2, ((0, 1),))


@given(automata(max_n=8, max_k=4))
def test_format_parse_round_trip(d):
    text = format_dfa(d)
    assert parse_dfa(text) == d
    assert format_dfa(parse_dfa(text)) == text


def test_parse_comments_and_records():
    text = "# C_2\n2 2\n1 1  # merge\n1 0\n\n1 1\n0\n"
    ds = parse_dfas(text)
    assert [d.n for d in ds] == [2, 1]
    assert ds[0] == cerny(2)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("", 1, None),
        ("2 2\n0 1\n", 3, None),
        ("2 2\n0 1\n1 q\n", 3, 3),
        ("2 2\n0 1\n1 5\n", 3, 3),
        ("2 2 2\n0 1\n1 1\n", 1, None),
        ("2 2\n0 1 1\n1 1\n", 2, None),
    ],
)
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_dfa(text)
    assert info.value.line == line
    if column is not None:
        assert info.value.column == column


def test_parse_error_position_in_second_record():
    with pytest.raises(ParseError) as info:
        parse_dfas("1 1\n0\n\n2 1\n0\nx\n")
    assert info.value.line == 6


def test_constant_letter_is_sync():
    d = constant_letter(6)
    assert apply_letter(d, d.states, 0) == 1
