import math

import pytest

import geodesics as g

GOLDEN = (1 + math.sqrt(5)) / 2


def test_words():
    p = g.Presentation.surface(2)
    assert g.free_reduce("abBAc") == "c"
    assert g.dehn_reduce("abcdA", p) == "dcb"
    assert g.dehn_reduce_cyclic("abcdABCD", p) is None
    assert g.geodesic_reduce_cyclic("abcdbcdAb", p) != "abcdbcdAb"
    assert len(g.geodesic_reduce_cyclic("abcdbcdAb", p)) == 7
    assert g.canonical_form("dcb", p) == g.canonical_form("bcd", p)
    assert g.is_primitive("abab") == (False, "ab", 2)


def test_enumeration_counts():
    counts = {}
    for word, n, primitive, power in g.enumerate_classes(g.Presentation.surface(2), 3, workers=1):
        counts[n] = counts.get(n, 0) + 1
    assert counts == {1: 8, 2: 32, 3: 112}
    free = g.enumerate_classes(g.Presentation.free_group(2), 2)
    assert sum(1 for c in free if c[1] == 2) == 8


def test_octagon_lengths():
    rep = g.octagon_representation()
    assert rep.length("a") == pytest.approx(2 * math.acosh(1 + math.sqrt(2)), abs=1e-12)
    assert abs(abs(rep.trace("abcdABCD")) - 2) < 1e-9


def test_exact_constants():
    pe = g.PressureEvaluator.exact(g.MarkovChainSystem.full_shift([1.0, 2.0]))
    k = g.thermo_constants(pe)
    assert k["h"] == pytest.approx(math.log(GOLDEN), abs=1e-9)
    assert k["A"] == pytest.approx(0.7236067977, abs=1e-8)
    assert k["sigma2"] == pytest.approx(0.0894427191, abs=1e-7)


def test_census_round_trip(tmp_path):
    c = g.build_census(g.octagon_representation(), 3, workers=1)
    assert len(c) == 8 + 32 + 112
    assert c.T_cert == pytest.approx(4 * c.alpha_hat)
    path = str(tmp_path / "oct.csv")
    g.save_census(c, path)
    back = g.load_census(path)
    assert back == c
    assert back.checksum == c.checksum
    first = c.records()[0]
    assert first[1] in (1, 3)


def test_statistics_and_errors():
    sys = g.MarkovChainSystem.full_shift([1.0, 2.0])
    c = g.build_census_from_system(sys, 16, workers=1)
    k = g.thermo_constants(g.PressureEvaluator.exact(sys))
    r = g.average_word_length(c, c.T_cert, k)
    assert 0.8 < r["ratio"] < 1.2
    with pytest.raises(g.GeodesicsError) as err:
        g.count_pi(c, c.T_cert + 1)
    assert err.value.code == "cutoff_exceeded"
    assert err.value.kind == "statistical_precondition"
