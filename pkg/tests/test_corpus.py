import json
import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmh.corpus import (
    InstructionRecord,
    load_bundled_controlled,
    load_bundled_corpus,
    load_controlled,
    load_corpus,
    tokenize,
    vocabulary_size,
    word_count_stats,
)
from mmh.errors import SchemaError
from mmh.world import bundled_map_names

from conftest import bundled_corpus_rows, stats_oracle


def line(**kw):
    doc = {"id": "a", "route_id": "route_1", "study": "online", "iteration": 1, "text": "go left"}
    doc.update(kw)
    return json.dumps(doc)


def rec(text, **kw):
    base = dict(id=text, route_id="route_1", study="online", iteration=1)
    base.update(kw)
    return InstructionRecord(text=text, **base)


def test_load_two_lines():
    out = load_corpus(line() + "\n\n" + line(id="b") + "\n")
    assert [r.id for r in out] == ["a", "b"]


@pytest.mark.parametrize(
    "text, lineno",
    [
        (line() + "\n" + line(), 2),
        (line(iteration=3), 1),
        (line(iteration=True), 1),
        (line(study="lab"), 1),
        (line(text="   "), 1),
        (line(extra=1), 1),
        (line(failure_flag="yes"), 1),
        ("\n{bad", 2),
        ("[1, 2]", 1),
    ],
)
def test_schema_errors_carry_line(text, lineno):
    with pytest.raises(SchemaError) as exc:
        load_corpus(text)
    assert exc.value.line == lineno


def test_tokenize_rule():
    assert tokenize('Go (straight), then "LEFT"!') == ["go", "straight", "then", "left"]


def test_stats_two_and_three_words():
    (g,) = word_count_stats([rec("go left"), rec("go left now")])
    assert (g.n, g.mean, g.median, g.sd) == (2, 2.5, 2.0, 0.5)
    assert g.failure_rate is None


def test_stats_single_text():
    text = " ".join(["word"] * 47)
    (g,) = word_count_stats([rec(text)])
    assert (g.mean, g.median, g.sd) == (47, 47, 0)


def test_failure_rate_and_grouping():
    recs = [rec("a b", id="1", failure_flag=True), rec("a", id="2", failure_flag=False),
            rec("a", id="3", study="onsite")]
    stats = word_count_stats(recs)
    assert [s.key for s in stats] == [("online", "route_1", 1), ("onsite", "route_1", 1)]
    assert stats[0].failure_rate == 0.5
    assert stats[0].as_dict()["study"] == "online"


def test_vocabulary_examples():
    assert vocabulary_size(["go go left", "left right"]) == 3
    assert vocabulary_size([]) == 0
    assert vocabulary_size([rec("Go, go.")]) == 1


def test_bundled_corpus_matches_oracle():
    rows = bundled_corpus_rows()
    assert len(rows) == 40
    oracle = stats_oracle(rows)
    stats = word_count_stats(load_bundled_corpus())
    assert {s.key for s in stats} == set(oracle)
    for s in stats:
        n, mean, median, sd = oracle[s.key]
        assert s.n == n
        assert s.mean == pytest.approx(mean, abs=1e-12)
        assert s.median == median
        assert s.sd == pytest.approx(sd, abs=1e-12)
    vocab = set()
    for r in rows:
        vocab |= set(re.sub(r'[.,!?;:"()]', "", r["text"]).lower().split())
    assert vocabulary_size(load_bundled_corpus()) == len(vocab)


def test_onsite_longer_and_more_variable():
    stats = {s.key: s for s in word_count_stats(load_bundled_corpus())}
    for route in ("route_1", "route_2"):
        for it in (1, 2):
            on, off = stats[("onsite", route, it)], stats[("online", route, it)]
            assert on.mean > off.mean
            assert on.sd > off.sd


@settings(max_examples=60, deadline=None)
@given(st.lists(st.text(alphabet="ab c.,", min_size=1).filter(str.strip), min_size=1, max_size=8), st.integers(0, 99))
def test_stats_permutation_invariant(texts, seed):
    recs = [rec(t, id=str(i)) for i, t in enumerate(texts)]
    shuffled = recs[:]
    random.Random(seed).shuffle(shuffled)
    assert word_count_stats(recs) == word_count_stats(shuffled)
    (g,) = word_count_stats(recs)
    counts = [len(tokenize(t)) for t in texts]
    assert (g.sd == 0) == (len(set(counts)) == 1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.text(max_size=20), max_size=10), st.text(max_size=20))
def test_vocabulary_monotone(texts, extra):
    assert vocabulary_size(texts + [extra]) >= vocabulary_size(texts)


def test_controlled_corpus_shape():
    recs = load_bundled_controlled()
    assert len(recs) == 20
    assert len({r.id for r in recs}) == 20
    assert {r.map for r in recs} <= set(bundled_map_names())


def test_controlled_schema_errors():
    with pytest.raises(SchemaError):
        load_controlled('{"id": "x", "map": "l_turn"}')
    with pytest.raises(SchemaError):
        load_controlled('{"id": "x", "map": "l_turn", "text": "stop", "reference": [[0, 0]]}')
    with pytest.raises(SchemaError):
        load_controlled('{"id": "x", "map": "l_turn", "text": "stop", "goal": [1]}')
