from cskit.relations import (
    PHRASE_RELATIONS,
    RELATION_PHRASES,
    canonical_relation,
    name_of,
    phrase_of,
)


def test_there_are_exactly_31_relations():
    assert len(RELATION_PHRASES) == 31
    assert len(PHRASE_RELATIONS) == 31  # no two relations share a phrase


def test_phrases_are_bracketed():
    for phrase in RELATION_PHRASES.values():
        assert phrase.startswith("[") and phrase.endswith("]")
        assert "[" not in phrase[1:-1] and "]" not in phrase[1:-1]


def test_round_trip_both_directions():
    for name, phrase in RELATION_PHRASES.items():
        assert name_of(phrase_of(name)) == name
        assert phrase_of(name_of(phrase)) == phrase


def test_known_mappings():
    assert phrase_of("AtLocation") == "[typically located at]"
    assert phrase_of("CausesDesire") == "[makes someone want]"
    assert name_of("[derived from]") == "DerivedFrom"


def test_aliases_map_to_canonical_names():
    assert canonical_relation("Synonym") == "Synonyms"
    assert canonical_relation("Antonym") == "Antonyms"
    assert canonical_relation("RelatedTo") == "RelatedTo"
    assert canonical_relation("NotARelation") is None


def test_unknown_phrase_is_none():
    assert name_of("[not a relation]") is None
