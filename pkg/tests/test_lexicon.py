import logging

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lexitopic.errors import InputError, RecordError
from lexitopic.lexicon import (
    BilingualLexicon,
    Direction,
    TranslationPair,
    compose_lexicon,
    load_lexicon,
    normalize_token,
    read_pairs,
    save_lexicon,
    translate,
)

HAND_BUILT = """\
# ten hand-written pairs, two of them too long
plane\tFlugzeug
plane\tFläche
aircraft\tFlugzeug
new york city hall\tRathaus
city hall\tRathaus
town hall\tRathaus der Stadt Wien
pilot\tFlieger
pilot\tPilot
wing\tTragfläche
wing\tFlügel
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def survivors_by_script(text, max_terms):
    """Independent count: split records, measure word counts, dedupe."""
    kept = set()
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        a, b = line.split("\t")
        if len(a.split()) <= max_terms and len(b.split()) <= max_terms:
            kept.add((a.lower(), b.lower()))
    return kept


class TestCompose:
    def test_two_translations_of_one_word(self, tmp_path):
        src = write(tmp_path, "toy.tsv", "plane\tFlugzeug\nplane\tFläche\n")
        lex = compose_lexicon([src])
        assert translate(lex, "plane") == {"flugzeug", "fläche"}

    def test_empty_source_list(self):
        lex = compose_lexicon([])
        assert len(lex) == 0
        assert translate(lex, "plane") == frozenset()
        assert translate(lex, "flugzeug", Direction.B_TO_A) == frozenset()

    @pytest.mark.parametrize("max_terms", [1, 2, 3])
    def test_long_phrases_dropped(self, tmp_path, max_terms):
        src = write(tmp_path, "hand.tsv", HAND_BUILT)
        lex = compose_lexicon([src], max_terms=max_terms)
        assert set(lex.pairs()) == survivors_by_script(HAND_BUILT, max_terms)
        if max_terms == 2:
            assert len(lex) == 8
            assert "new york city hall" not in lex.forward

    def test_union_and_exclusion(self, tmp_path):
        a = write(tmp_path, "wiki.tsv", "plane\tFlugzeug\nradio\tFunk\n")
        b = write(tmp_path, "iate.tsv", "plane\tFlugzeug\nplane\tFlieger\n")
        full = compose_lexicon([a, b])
        assert len(full) == 3
        assert full.source_tags == {"wiki", "iate"}
        assert full.source_counts == {"wiki": 2, "iate": 2}
        part = compose_lexicon([a, b], excluded_tags={"iate"})
        assert set(part.pairs()) <= set(full.pairs())
        assert part.source_tags == {"wiki"}
        assert translate(part, "plane") == {"flugzeug"}

    def test_explicit_tags(self, tmp_path):
        a = write(tmp_path, "x.tsv", "a\tb\n")
        lex = compose_lexicon([("eurovoc", a)])
        assert lex.source_tags == {"eurovoc"}

    def test_unknown_excluded_tag_only_warns(self, tmp_path, caplog):
        a = write(tmp_path, "x.tsv", "a\tb\n")
        with caplog.at_level(logging.WARNING):
            lex = compose_lexicon([a], excluded_tags={"nothere"})
        assert len(lex) == 1
        assert "nothere" in caplog.text

    def test_idempotent(self, tmp_path):
        a = write(tmp_path, "hand.tsv", HAND_BUILT)
        assert compose_lexicon([a]) == compose_lexicon([a])

    def test_normalization(self, tmp_path):
        # decomposed umlaut, odd casing and doubled spaces
        a = write(tmp_path, "x.tsv", "City  Hall\tFla\u0308che\n")
        lex = compose_lexicon([a])
        assert list(lex.pairs()) == [("city hall", "fläche")]


class TestErrors:
    def test_missing_file_names_it(self, tmp_path):
        with pytest.raises(InputError, match="nope.tsv"):
            compose_lexicon([tmp_path / "nope.tsv"])

    def test_bad_record_has_line_number(self, tmp_path):
        a = write(tmp_path, "x.tsv", "a\tb\n# c\njust-one-column\n")
        with pytest.raises(RecordError, match=r"x\.tsv:3"):
            compose_lexicon([a])

    def test_skip_mode_warns(self, tmp_path, caplog):
        a = write(tmp_path, "x.tsv", "a\tb\nbroken\n \tb\n")
        with caplog.at_level(logging.WARNING):
            lex = compose_lexicon([a], skip_malformed=True)
        assert list(lex.pairs()) == [("a", "b")]
        assert caplog.text.count("skipping malformed") == 2

    def test_not_utf8(self, tmp_path):
        path = tmp_path / "latin.tsv"
        path.write_bytes("fl\xe4che\tarea\n".encode("latin-1"))
        with pytest.raises(InputError, match="UTF-8"):
            list(read_pairs(path))

    def test_empty_side_rejected(self):
        with pytest.raises(ValueError):
            TranslationPair(" ", "x")


class TestSymmetry:
    def test_hand_built_exhaustive(self, tmp_path):
        lex = compose_lexicon([write(tmp_path, "hand.tsv", HAND_BUILT)])
        for a in lex.forward:
            for b in translate(lex, a, Direction.A_TO_B):
                assert a in translate(lex, b, Direction.B_TO_A)
        for b in lex.backward:
            for a in translate(lex, b, Direction.B_TO_A):
                assert b in translate(lex, a, Direction.A_TO_B)

    @given(st.lists(st.tuples(st.sampled_from("abcdef"), st.sampled_from("uvwxyz")), max_size=30))
    def test_random_pairs(self, pairs):
        lex = BilingualLexicon.from_pairs(pairs)
        assert set(lex.pairs()) == set(pairs)
        assert sum(len(v) for v in lex.backward.values()) == len(lex)

    def test_unknown_word(self):
        lex = BilingualLexicon.from_pairs([("plane", "flugzeug")])
        assert translate(lex, "zzzunknown") == frozenset()


class TestPersistence:
    def test_round_trip_keeps_header(self, tmp_path):
        a = write(tmp_path, "wiki.tsv", "plane\tFlugzeug\nradio\tFunk\n")
        b = write(tmp_path, "dict.tsv", "plane\tFlieger\n")
        lex = compose_lexicon([a, b])
        out = tmp_path / "lex.tsv"
        save_lexicon(lex, out)
        assert out.read_text(encoding="utf-8").splitlines()[0] == "# sources: dict,wiki"
        again = load_lexicon(out)
        assert again == lex

    def test_identity(self):
        lex = BilingualLexicon.identity(["a", "b"])
        assert translate(lex, "a") == {"a"}
        assert translate(lex, "b", Direction.B_TO_A) == {"b"}


def test_normalize_token():
    assert normalize_token("  Flügel ") == "flügel"
