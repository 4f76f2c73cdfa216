import json

import pytest
from hypothesis import given, strategies as st

from zslreq.labelspace import (
    ConfigParseError,
    DuplicateClass,
    EmptyLabel,
    EmptyTermList,
    LabelConfig,
    MissingClass,
    UnknownConfig,
    builtin_config,
    builtin_config_ids,
    compose_terms,
    load_config,
    negate_label,
    save_config,
)


class TestBuiltinConfigs:
    def test_fr_a(self):
        config = builtin_config("FR_A")
        assert dict(config.labels) == {"FR": "functional", "NFR": "not about functional"}

    def test_sec_b(self):
        config = builtin_config("Sec_B")
        assert dict(config.labels) == {
            "SEC": "Security, authorization, or protection",
            "NONSEC": "not about security, authorization, or protection",
        }

    def test_unknown(self):
        with pytest.raises(UnknownConfig):
            builtin_config("XYZ_9")

    def test_ids_are_case_sensitive(self):
        with pytest.raises(UnknownConfig):
            builtin_config("fr_a")

    def test_fr_e(self):
        config = builtin_config("FR_E")
        assert config.labels["FR"] == "functional, system, behavior, shall, or must"
        assert config.labels["NFR"] == (
            "usability, security, availability, legal, look & feel, scalability, "
            "fault tolerance, performance, operational, maintainability, or portability"
        )

    def test_se_d_keeps_ampersand_quirks(self):
        config = builtin_config("SE_D")
        assert config.labels["OTHER"] == (
            "usability, performance, operational, look & feel, legal, "
            "fault & tolerance, maintainability, scalability, availability, "
            "or portability"
        )

    def test_us_d_other_has_no_ampersand(self):
        assert "look feel" in builtin_config("US_D").labels["OTHER"]
        assert "look &" not in builtin_config("US_D").labels["OTHER"]

    def test_verbatim_typos_preserved(self):
        assert "incresaed" in builtin_config("PE_E").labels["PE"]
        assert "avaliable" in builtin_config("A_B").labels["A"]
        assert "securing. protecting" in builtin_config("Sec_C").labels["SEC"]
        assert "securing, protecting" in builtin_config("SE_C").labels["SE"]

    def test_counts_per_family(self):
        by_task = {}
        for config_id in builtin_config_ids():
            config = builtin_config(config_id)
            by_task.setdefault(config.task, []).append(config_id)
        assert len(by_task["FR_NFR"]) == 6
        assert len(by_task["NFR_BINARY"]) == 50
        assert len(by_task["NFR_MULTI_TOP4"]) == 4
        assert len(by_task["NFR_MULTI_ALL"]) == 4
        assert len(by_task["SECURITY"]) == 4

    def test_multiclass_configs_cover_their_classes(self):
        assert builtin_config("MultiNFR_B").classes == ("US", "SE", "PE", "O")
        assert builtin_config("MultiNFRAll_D").classes == (
            "US", "SE", "PE", "O", "LF", "L", "FT", "MN", "SC", "A",
        )

    def test_original1_negation_invariant(self):
        """Every binary 'Original 1' config negates its positive label."""
        checked = 0
        for config_id in builtin_config_ids():
            config = builtin_config(config_id)
            if config.variant != "Original 1":
                continue
            assert len(config.classes) == 2
            positive, negative = config.classes
            assert config.labels[negative] == negate_label(config.labels[positive])
            checked += 1
        assert checked == 11  # FR plus the ten NFR classes


class TestComposeTerms:
    def test_three_terms(self):
        assert (
            compose_terms(["security", "authorization", "protection"])
            == "security, authorization, or protection"
        )

    def test_single_term(self):
        assert compose_terms(["usability"]) == "usability"

    def test_two_terms(self):
        assert compose_terms(["a", "b"]) == "a, or b"

    def test_empty_list(self):
        with pytest.raises(EmptyTermList):
            compose_terms([])

    def test_empty_member(self):
        with pytest.raises(EmptyTermList):
            compose_terms(["a", ""])

    @given(st.lists(st.text(alphabet="abcdefg", min_size=1, max_size=6), min_size=1, max_size=8))
    def test_each_term_present_in_order(self, terms):
        composed = compose_terms(terms)
        cursor = 0
        for term in terms:
            index = composed.index(term, cursor)
            cursor = index + len(term)


class TestNegateLabel:
    def test_functional(self):
        assert negate_label("functional") == "not about functional"

    def test_usability(self):
        assert negate_label("usability") == "not about usability"

    def test_empty(self):
        with pytest.raises(EmptyLabel):
            negate_label("")

    def test_not_idempotent(self):
        assert negate_label(negate_label("x")) == "not about not about x"


class TestLoadConfig:
    def write(self, tmp_path, payload):
        path = tmp_path / "config.json"
        path.write_text(payload, encoding="utf-8")
        return path

    def test_valid_two_class(self, tmp_path):
        path = self.write(
            tmp_path,
            json.dumps(
                {"id": "mine", "strategy": "expert",
                 "labels": {"FR": "functional stuff", "NFR": "quality stuff"}}
            ),
        )
        config = load_config(path)
        assert config.id == "mine"
        assert len(config.labels) == 2

    def test_missing_class(self, tmp_path):
        path = self.write(
            tmp_path,
            json.dumps({"id": "mine", "strategy": "expert", "labels": {"FR": "x"}}),
        )
        with pytest.raises(MissingClass):
            load_config(path, required_classes=("FR", "NFR"))

    def test_duplicate_class(self, tmp_path):
        payload = '{"id": "m", "strategy": "expert", "labels": {"US": "a", "US": "b"}}'
        with pytest.raises(DuplicateClass):
            load_config(self.write(tmp_path, payload))

    def test_empty_label_rejected(self, tmp_path):
        path = self.write(
            tmp_path,
            json.dumps({"id": "m", "strategy": "expert", "labels": {"US": ""}}),
        )
        with pytest.raises(ConfigParseError):
            load_config(path)

    def test_bad_strategy_rejected(self, tmp_path):
        path = self.write(
            tmp_path,
            json.dumps({"id": "m", "strategy": "vibes", "labels": {"US": "x"}}),
        )
        with pytest.raises(ConfigParseError):
            load_config(path)

    def test_roundtrip(self, tmp_path):
        original = builtin_config("MultiNFR_C")
        out = tmp_path / "saved.json"
        save_config(original, out)
        assert load_config(out) == original

    def test_roundtrip_all_builtins(self, tmp_path):
        for config_id in builtin_config_ids():
            original = builtin_config(config_id)
            out = tmp_path / "c.json"
            save_config(original, out)
            assert load_config(out) == original


class TestRestrictedTo:
    def test_filters_and_orders(self):
        config = builtin_config("MultiNFRAll_A")
        labels = config.restricted_to(("US", "SE", "O", "PE"))
        assert list(labels) == ["US", "SE", "PE", "O"]  # config order kept

    def test_missing_class_raises(self):
        config = builtin_config("FR_A")
        with pytest.raises(MissingClass):
            config.restricted_to(("FR", "NFR", "SEC"))
