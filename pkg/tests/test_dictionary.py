import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import boss_distance_oracle, intersection_oracle, loocv_oracle, pyramid_oracle
from tdeclf.dataset_io import Dataset
from tdeclf.dictionary import (
    BOSS_DISTANCE,
    HISTOGRAM_INTERSECTION,
    MemberParams,
    boss_distance,
    build_individual,
    histogram_intersection,
    loocv_accuracy,
    predict_1nn,
    pyramid_bags,
)
from tdeclf.exceptions import SeriesLengthMismatchError
from tdeclf.sfa import MCB, IGB, bigram_key, series_to_bag, unpack_key, window_words
from tdeclf.synthetic import shape_dataset

bags = st.dictionaries(st.sampled_from("abcdefg"), st.integers(1, 6), max_size=6)


def test_boss_distance_examples():
    assert boss_distance({"x": 2, "y": 1}, {"x": 2, "y": 1}) == 0
    assert boss_distance({"x": 2}, {"x": 2, "y": 7}) == 0
    assert boss_distance({"x": 1, "y": 1}, {"x": 3}) == 5
    assert boss_distance({"x": 3}, {"x": 1, "y": 1}) == 4


def test_histogram_intersection_examples():
    a = {"x": 3, "y": 1}
    assert histogram_intersection(a, a) == 4
    assert histogram_intersection({"x": 1}, {"y": 2}) == 0
    assert histogram_intersection(a, {"x": 1, "z": 5}) == 1


@given(bags, bags)
def test_distances_match_term_oracles(a, b):
    assert boss_distance(a, b) == boss_distance_oracle(a, b)
    assert histogram_intersection(a, b) == intersection_oracle(a, b)
    assert histogram_intersection(a, b) == histogram_intersection(b, a)
    assert boss_distance(a, a) == 0


def test_boss_distance_asymmetry_witnessed():
    rng = np.random.default_rng(7)
    for _ in range(100):
        a = {k: int(rng.integers(1, 4)) for k in "abcd" if rng.random() < 0.6}
        b = {k: int(rng.integers(1, 4)) for k in "abcd" if rng.random() < 0.6}
        if boss_distance(a, b) != boss_distance(b, a):
            return
    pytest.fail("no asymmetric pair among 100 random bags")


def test_pyramid_height_one_is_plain_bag():
    words = [3, 3, 5, 5, 5, 3, 7, 7]
    bag = pyramid_bags(words, 12, 1)
    assert bag == {3: 2, 5: 1, 7: 1}


def test_pyramid_region_assignment():
    # m = 12, window start 7 lies in the second half
    words = [1] * 7 + [2] + [1] * 3
    bag = pyramid_bags(words, 12, 2)
    decoded = {(unpack_key(k, 16).letters[-1], unpack_key(k, 16).region): v
               for k, v in bag.items()}
    assert decoded[(2, (1, 0))] == 1
    assert decoded[(2, (2, 1))] == 2
    assert (2, (2, 0)) not in decoded


def test_pyramid_word_only_in_first_half():
    words = [9, 9, 4, 4, 4, 4, 4, 4, 4, 4]
    bag = pyramid_bags(words, 13, 2)
    regions = {unpack_key(k, 16).region for k in bag if unpack_key(k, 16).letters[-1] == 1}
    assert (2, 0) in regions and (2, 1) not in regions


@given(st.lists(st.integers(0, 3), min_size=1, max_size=40), st.integers(0, 20),
       st.integers(1, 3))
@settings(max_examples=100, deadline=None)
def test_pyramid_matches_interval_oracle(words, extra, h):
    m = len(words) + extra
    bag = pyramid_bags(words, m, h)
    decoded = {}
    for key, v in bag.items():
        word = unpack_key(key, 16)
        level, r = word.region
        decoded[(int(word.letters[-1]) + 4 * int(word.letters[-2]), level, r)] = v
    assert decoded == pyramid_oracle(words, m, h)


def _member_bag_oracle(series, member):
    """Bag of one series from window words via the dict-based routines."""
    p = member.params
    words = window_words(series[None, :], p.sfa, member.breakpoints)[0]
    bag = pyramid_bags(words, len(series), p.levels)
    if member.use_bigrams:
        w = p.window_length
        for prev, cur in zip(words[:-w].tolist(), words[w:].tolist()):
            key = bigram_key(prev, cur)
            bag[key] = bag.get(key, 0) + 1
    return bag


member_settings = st.tuples(
    st.integers(0, 2**31),
    st.sampled_from([4, 6, 8]),
    st.booleans(),
    st.integers(1, 3),
    st.sampled_from([MCB, IGB]),
    st.booleans(),
    st.sampled_from([BOSS_DISTANCE, HISTOGRAM_INTERSECTION]),
)


@given(member_settings)
@settings(max_examples=40, deadline=None)
def test_matrix_route_matches_dict_route(setting):
    seed, l, p, h, b, bigrams, distance = setting
    rng = np.random.default_rng(seed)
    m = int(rng.integers(16, 40))
    w = int(rng.integers(max(l // 2 + p, 4), m // 2 + 1))
    train = shape_dataset(8, m, 2, noise=0.4, seed=seed)
    test = shape_dataset(5, m, 2, noise=0.4, seed=seed + 1)
    member = build_individual(train, MemberParams(l, 4, w, p, h, b), bigrams, distance)

    expected = [_member_bag_oracle(x, member) for x in train.X]
    assert member.train_bags == expected
    if h == 1 and not bigrams:
        assert expected == [series_to_bag(x, member.params.sfa, member.breakpoints)
                            for x in train.X]

    similarity = distance == HISTOGRAM_INTERSECTION
    assert member.train_accuracy == pytest.approx(
        loocv_oracle(expected, list(train.y), similarity), abs=0)

    counts, oov = member.transform(test.X)
    scores = member.scores(counts, oov)
    for i, x in enumerate(test.X):
        q = _member_bag_oracle(x, member)
        for j, t in enumerate(expected):
            want = -intersection_oracle(q, t) if similarity else boss_distance_oracle(q, t)
            assert scores[i, j] == want
        best = min(range(len(expected)), key=lambda j: (scores[i, j], j))
        assert predict_1nn(member, x) == train.y[best]


def test_query_equal_to_training_series():
    train = shape_dataset(10, 40, 2, seed=3)
    for distance in (BOSS_DISTANCE, HISTOGRAM_INTERSECTION):
        member = build_individual(train, MemberParams(8, 4, 12, True, 1, MCB), False, distance)
        scores = member.scores(*member.transform(train.X))
        # self is always among the closest
        np.testing.assert_array_equal(np.diag(scores), scores.min(axis=1))
        if distance == BOSS_DISTANCE:
            np.testing.assert_array_equal(np.diag(scores), 0)


def test_tie_goes_to_lowest_index():
    X = np.tile(np.sin(np.linspace(0, 6, 30)), (2, 1))
    train = Dataset(X, [1, 0], ("a", "b"))
    for distance in (BOSS_DISTANCE, HISTOGRAM_INTERSECTION):
        member = build_individual(train, MemberParams(4, 4, 8, True, 1, MCB), False, distance)
        assert predict_1nn(member, X[0]) == 1
        assert member.train_accuracy == 0.0


def test_four_case_exhaustive_table():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(4, 24)).cumsum(axis=1)
    train = Dataset(X, [0, 1, 0, 1], ("a", "b"))
    member = build_individual(train, MemberParams(4, 4, 6, False, 1, MCB), False, BOSS_DISTANCE)
    query = rng.normal(size=24).cumsum()
    qbag = _member_bag_oracle(query, member)
    table = [boss_distance_oracle(qbag, t) for t in member.train_bags]
    assert predict_1nn(member, query) == train.y[int(np.argmin(table))]


def test_loocv_single_class_and_single_case():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(5, 20))
    member = build_individual(Dataset(X, np.zeros(5, int), ("a",)),
                              MemberParams(4, 4, 8, True, 1, MCB))
    assert loocv_accuracy(member) == 1.0
    member = build_individual(Dataset(X[:1], [0], ("a",)), MemberParams(4, 4, 8, True, 1, MCB))
    assert member.train_accuracy == 0.0


def test_build_is_deterministic():
    train = shape_dataset(12, 30, 3, seed=4)
    params = MemberParams(6, 4, 10, True, 2, IGB)
    a = build_individual(train, params, True, HISTOGRAM_INTERSECTION)
    b = build_individual(train, params, True, HISTOGRAM_INTERSECTION)
    assert a.train_bags == b.train_bags and a.train_accuracy == b.train_accuracy


def test_length_mismatch():
    train = shape_dataset(6, 30, seed=0)
    member = build_individual(train, MemberParams(4, 4, 8, True, 1, MCB))
    with pytest.raises(SeriesLengthMismatchError):
        member.predict(np.zeros((1, 31)))


def test_large_intersection_blocks_agree():
    # enough cases to exercise the chunked path
    train = shape_dataset(150, 60, 3, noise=0.5, seed=9)
    member = build_individual(train, MemberParams(8, 4, 20, True, 3, MCB), True,
                              HISTOGRAM_INTERSECTION)
    bags_ = member.train_bags
    counts, oov = member.transform(train.X[:7])
    scores = member.scores(counts, oov)
    for i in range(7):
        for j in range(0, 150, 13):
            assert -scores[i, j] == intersection_oracle(bags_[i], bags_[j])
