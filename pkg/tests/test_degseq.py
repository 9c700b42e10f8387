import itertools

import pytest

from switchmix import DegreeSequence, DirectedDegreeSequence, classify, classify_directed, stats
from switchmix.degseq import load_degrees, parse_degrees, read_degree_file

from conftest import digraphical_by_search, graphical_by_search


def test_stats_examples():
    assert stats(DegreeSequence([3, 3, 3, 3])) == {
        "M": 12, "M2": 24, "a": 3, "d_min": 3, "d_max": 3,
    }
    assert stats(DegreeSequence([2, 2, 2]))["a"] == 0
    assert stats(DegreeSequence([0, 0])) == {"M": 0, "M2": 0, "a": 0, "d_min": 0, "d_max": 0}


def test_stats_odd_sum_a_undefined():
    assert stats(DegreeSequence([1, 1, 1]))["a"] is None


def test_degree_sequence_validation():
    with pytest.raises(ValueError):
        DegreeSequence([])
    with pytest.raises(ValueError):
        DegreeSequence([1, -1])


def test_classify_examples():
    assert not classify(DegreeSequence([3, 3, 1, 1]))["graphical"]
    assert classify(DegreeSequence([2, 2, 1, 1]))["graphical"]
    # 9 * 3^2 = 81 > 12
    assert not classify(DegreeSequence([3, 3, 3, 3]))["theorem1_applicable"]
    assert classify(DegreeSequence([3] * 28))["theorem1_applicable"]


def test_stable_flag():
    d = DegreeSequence([3, 3, 3, 3])
    # (3-3+1)^2 = 1 <= 4*3*(4-3+1) = 24
    assert classify(d)["stable"]
    assert not classify(DegreeSequence([5, 1, 1, 1, 1, 1]))["stable"]


def test_graphical_matches_search_up_to_n7():
    for n in range(1, 8):
        for combo in itertools.combinations_with_replacement(range(n), n):
            d = DegreeSequence(combo)
            assert d.is_graphical() == graphical_by_search(combo), combo


def test_graphical_matches_search_n8_sample(rng):
    combos = list(itertools.combinations_with_replacement(range(8), 8))
    rng.shuffle(combos)
    for combo in combos[:800]:
        assert DegreeSequence(combo).is_graphical() == graphical_by_search(combo), combo


def test_classify_directed_examples():
    dd = DirectedDegreeSequence([(1, 1), (1, 1), (1, 1)])
    flags = classify_directed(dd)
    assert flags["digraphical"] and not flags["theorem2_degree_ok"]

    dd2 = DirectedDegreeSequence([(2, 0), (0, 2), (1, 1)])
    assert dd2.sum_in == dd2.sum_out == 3
    assert classify_directed(dd2)["digraphical"]

    with pytest.raises(ValueError):
        classify_directed(DirectedDegreeSequence([(1, 0), (0, 0)]))


def test_digraphical_matches_search_n4():
    for n in range(1, 5):
        vals = list(itertools.product(range(n), range(n)))
        for combo in itertools.combinations_with_replacement(vals, n):
            dd = DirectedDegreeSequence(combo)
            assert dd.is_digraphical() == digraphical_by_search(combo), combo


def test_digraphical_matches_search_n5_sample(rng):
    vals = list(itertools.product(range(5), range(5)))
    combos = list(itertools.combinations_with_replacement(vals, 5))
    rng.shuffle(combos)
    checked = 0
    for combo in combos:
        dd = DirectedDegreeSequence(combo)
        if dd.sum_in != dd.sum_out:
            continue
        assert dd.is_digraphical() == digraphical_by_search(combo), combo
        checked += 1
        if checked >= 400:
            break
    assert checked == 400


def test_semi_degree_stats():
    dd = DirectedDegreeSequence([(2, 0), (0, 2), (1, 1)])
    assert dd.r_min == 0 and dd.r_max == 2
    assert dd.m == 3


def test_parsing(tmp_path):
    assert parse_degrees("1,2, 2,1").degrees == (1, 2, 2, 1)
    assert parse_degrees("1:1,2:0", directed=True).pairs == ((1, 1), (2, 0))

    f = tmp_path / "d.txt"
    f.write_text("3\n3\n3\n3\n")
    assert read_degree_file(f).degrees == (3, 3, 3, 3)

    fd = tmp_path / "dd.txt"
    fd.write_text("1 1\n1 1\n1 1\n")
    assert read_degree_file(fd, directed=True).pairs == ((1, 1), (1, 1), (1, 1))

    assert load_degrees(str(f)).degrees == (3, 3, 3, 3)
    assert load_degrees("2,2,2").degrees == (2, 2, 2)
