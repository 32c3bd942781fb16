"""Normalization and gating contracts."""

import hypothesis.strategies as st
from hypothesis import given, settings

from feedguard.textnorm import (CleanText, contraction_table, emoji_alias_table,
                                english_gate, length_gate, normalize,
                                stopword_set)


class TestNormalize:
    def test_entity_unescape_and_lowercase(self):
        clean = normalize("Tom &amp; Jerry")
        assert clean.text == "tom & jerry"
        assert clean.ws_token_count == 3

    def test_placeholders(self):
        clean = normalize("Check https://a.co @bob #Fake")
        assert clean.text == "check [URL] [USER] [HASHTAG]"
        assert clean.ws_token_count == 4

    def test_contraction_expansion(self):
        assert normalize("can't stop").text == "cannot stop"
        assert normalize("CAN'T STOP").text == "cannot stop"
        assert normalize("won't've happened").text == "will not have happened"

    def test_unknown_apostrophe_forms_pass_through(self):
        assert normalize("fo'c'sle deck").text == "fo'c'sle deck"

    def test_placeholders_stay_uppercase(self):
        assert normalize("see [URL] now").text == "see [URL] now"

    def test_emoji_aliases(self):
        assert normalize("good news 😂").text == "good news :joy:"
        # unmapped emoji codepoint falls back to the generic alias
        assert normalize("odd \U0001F9FF charm").text == "odd :emoji: charm"

    def test_emoji_modifiers_dropped(self):
        # thumbs up + skin tone modifier: one alias, no residue
        assert normalize("ok \U0001F44D\U0001F3FD done").text == "ok :thumbsup: done"

    def test_whitespace_collapse(self):
        assert normalize("  a \t b\n\nc  ").text == "a b c"

    def test_www_urls(self):
        assert normalize("go to www.example.com now").text == "go to [URL] now"

    def test_nfkc(self):
        assert normalize("ﬁle Ⅻ").text == "file xii"

    def test_double_encoded_entities(self):
        # &amp;amp; resolves all the way down; output is already fixed
        assert normalize("&amp;amp;").text == "&"
        assert normalize("＆amp;").text == "&"

    def test_empty(self):
        clean = normalize("")
        assert clean == CleanText(text="", ws_token_count=0)

    @given(st.text(max_size=300))
    @settings(max_examples=300, deadline=None)
    def test_idempotent(self, text):
        once = normalize(text)
        twice = normalize(once.text)
        assert twice == once

    @given(st.text(alphabet="abc .,!?#@:/&;'", max_size=120))
    @settings(max_examples=200, deadline=None)
    def test_token_count_matches_split(self, text):
        clean = normalize(text)
        assert clean.ws_token_count == len(clean.text.split())

    def test_punctuation_and_stopwords_kept(self):
        clean = normalize("the cat, the hat! stop words stay.")
        assert "the" in clean.text.split()
        assert "," in clean.text and "!" in clean.text


class TestBundledTables:
    def test_contraction_table_size(self):
        assert len(contraction_table()) >= 120

    def test_stopword_set_size(self):
        assert len(stopword_set()) >= 50

    def test_emoji_alias_values(self):
        table = emoji_alias_table()
        assert len(table) >= 100
        assert all(a.startswith(":") and a.endswith(":") for a in table.values())


class TestEnglishGate:
    def test_plain_english(self):
        assert english_gate(normalize("the cat sat on the mat today ok now"))

    def test_cyrillic_rejected(self):
        assert not english_gate(normalize("это полностью русский текст без латиницы"))

    def test_ascii_without_stopwords_rejected(self):
        assert not english_gate(normalize("zzz qqq xxx vvv"))

    def test_empty_rejected(self):
        assert not english_gate(normalize(""))

    def test_thresholds_configurable(self):
        mixed = normalize("the дом and дерево are здесь сегодня да нет хорошо")
        assert not english_gate(mixed)
        assert english_gate(mixed, ascii_threshold=0.1)

    def test_stopword_with_punctuation_counts(self):
        assert english_gate(normalize("wow, the! big. cat? runs"))


class TestLengthGate:
    def test_nine_tokens_discarded(self):
        text = normalize("one two three four five six seven eight nine")
        assert text.ws_token_count == 9
        assert not length_gate(text)

    def test_ten_tokens_kept(self):
        text = normalize("one two three four five six seven eight nine ten")
        assert text.ws_token_count == 10
        assert length_gate(text)

    def test_empty_discarded(self):
        assert not length_gate(normalize(""))

    def test_configurable_minimum(self):
        assert length_gate(normalize("a b c"), min_tokens=3)
        assert not length_gate(normalize("a b c"), min_tokens=4)


class TestGateIndependence:
    @given(st.text(max_size=120))
    @settings(max_examples=100, deadline=None)
    def test_gates_pure_and_order_independent(self, text):
        clean = normalize(text)
        e1, l1 = english_gate(clean), length_gate(clean)
        l2, e2 = length_gate(clean), english_gate(clean)
        assert (e1, l1) == (e2, l2)
