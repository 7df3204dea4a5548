"""Canonical relation names and their bracketed natural-language phrases.

The 31 relations below are the only ones the toolkit serializes; rows with
any other relation are dropped at load time. The name<->phrase mapping is a
bijection, so chain text can always be decoded back to relation names.
"""

RELATION_PHRASES: dict[str, str] = {
    "RelatedTo": "[related to]",
    "FormOf": "[form of]",
    "IsA": "[is a]",
    "PartOf": "[part of]",
    "HasA": "[has a]",
    "UsedFor": "[used for]",
    "CapableOf": "[capable of]",
    "AtLocation": "[typically located at]",
    "Causes": "[causes]",
    "HasSubevent": "[has subevent of]",
    "HasFirstSubevent": "[begins with]",
    "HasLastSubevent": "[concludes with]",
    "HasPrerequisite": "[has prerequisite]",
    "HasProperty": "[has property]",
    "MotivatedByGoal": "[motivated by goal]",
    "ObstructedBy": "[obstructed by]",
    "Desires": "[desires]",
    "CreatedBy": "[created by]",
    "Synonyms": "[synonym]",
    "Antonyms": "[antonym]",
    "DistinctFrom": "[distinct from]",
    "DerivedFrom": "[derived from]",
    "SymbolOf": "[symbolically represents]",
    "DefinedAs": "[defined as]",
    "MannerOf": "[manner of]",
    "LocatedNear": "[located near]",
    "HasContext": "[used in context of]",
    "SimilarTo": "[similar to]",
    "CausesDesire": "[makes someone want]",
    "MadeOf": "[made of]",
    "ReceivesAction": "[receives the action of]",
}

PHRASE_RELATIONS: dict[str, str] = {v: k for k, v in RELATION_PHRASES.items()}

# ConceptNet 5 dumps spell a few relations differently from the canonical
# names above; accept them as input aliases.
RELATION_ALIASES: dict[str, str] = {
    "Synonym": "Synonyms",
    "Antonym": "Antonyms",
}


def canonical_relation(name: str) -> str | None:
    """Map a raw relation name (or known alias) to its canonical name."""
    if name in RELATION_PHRASES:
        return name
    return RELATION_ALIASES.get(name)


def phrase_of(name: str) -> str:
    """Bracketed phrase for a canonical relation name."""
    return RELATION_PHRASES[name]


def name_of(phrase: str) -> str | None:
    """Canonical relation name for a bracketed phrase, or None if unknown."""
    return PHRASE_RELATIONS.get(phrase)
