import math

import numpy as np
import pytest

from cskit.embeddings import EmbeddingStore
from cskit.graph import ConceptGraph, filter_graph


def unit(degrees: float) -> np.ndarray:
    rad = math.radians(degrees)
    return np.array([math.cos(rad), math.sin(rad)], dtype=np.float64)


def make_store(angles: dict[str, float]) -> EmbeddingStore:
    """2-d unit vectors on the circle; cosine(a, b) = cos(angle_a - angle_b)."""
    return EmbeddingStore({token: unit(deg) for token, deg in angles.items()}, dim=2)


def filtered_graph(rows, store, min_weight=1.0, min_sim=0.0) -> ConceptGraph:
    graph = ConceptGraph.from_assertions(rows)
    out, _ = filter_graph(graph, store, min_weight, min_sim)
    return out


@pytest.fixture
def table1_graph() -> ConceptGraph:
    return ConceptGraph.from_assertions(
        [
            ("loneliness", "CausesDesire", "socialize", 3.464),
            ("plate", "AtLocation", "restaurant", 2.0),
            ("program", "CreatedBy", "programmer", 6.633),
        ]
    )


# concept-set extraction fixture: angles chosen so that
#   cos(ocean, surf) = cos 60 = 0.5   >= 0.3 pair gate
#   cos(surfing, ocean) = cos 10      >  0.5 middle gate
#   cos(burger, eat) = cos 30         >= 0.3
#   cos(food, burger) = cos 15        >  0.5
#   cos(table, burger) = cos 60 = 0.5 >= 0.3 but the pair has no shared middle
COMMONGEN_ANGLES = {
    "ocean": 0.0,
    "surfing": 10.0,
    "surfer": 50.0,
    "surf": 60.0,
    "table": 90.0,
    "eat": 120.0,
    "food": 135.0,
    "burger": 150.0,
}

COMMONGEN_ROWS = [
    ("surfing", "HasPrerequisite", "ocean", 2.0),
    ("surfing", "RelatedTo", "surf", 1.5),
    ("surfer", "RelatedTo", "surf", 1.0),
    ("table", "RelatedTo", "eat", 1.0),
    ("burger", "IsA", "food", 2.0),
    ("food", "CausesDesire", "eat", 2.5),
]


@pytest.fixture
def commongen_store() -> EmbeddingStore:
    return make_store(COMMONGEN_ANGLES)


@pytest.fixture
def commongen_graph(commongen_store) -> ConceptGraph:
    return filtered_graph(COMMONGEN_ROWS, commongen_store)


# dialogue fixture: "lose weight" exists only as a two-word concept, and
#   cos(lose weight, eat) = cos 90 = 0 < 0.3 blocks the spurious two-hop
DIALOGUE_ANGLES = {
    "diet": 0.0,
    "food": 20.0,
    "healthy": 40.0,
    "eat": -20.0,
    "lose": 60.0,
    "weight": 80.0,
}

DIALOGUE_ROWS = [
    ("diet", "HasSubevent", "lose weight", 1.0),
    ("diet", "RelatedTo", "food", 1.0),
    ("food", "HasProperty", "healthy", 1.0),
    ("diet", "RelatedTo", "eat", 1.0),
]


@pytest.fixture
def dialogue_store() -> EmbeddingStore:
    return make_store(DIALOGUE_ANGLES)


@pytest.fixture
def dialogue_graph(dialogue_store) -> ConceptGraph:
    return filtered_graph(DIALOGUE_ROWS, dialogue_store)


WORDS = [
    "apple", "river", "dog", "music", "stone", "cloud", "light", "bread",
    "ocean", "friend", "garden", "paper", "train", "candle", "mirror",
]


def random_chain(rng, max_len=5):
    """Random chain over the 31 relations with bracket-free concepts."""
    from cskit.relations import RELATION_PHRASES
    from cskit.triplets import Triplet, TripletChain

    relations = sorted(RELATION_PHRASES)

    def concept():
        words = rng.sample(WORDS, rng.choice([1, 1, 1, 2]))
        return " ".join(words)

    triplets = []
    for _ in range(rng.randint(1, max_len)):
        head = concept()
        tail = concept()
        while tail == head:
            tail = concept()
        triplets.append(Triplet(head, rng.choice(relations), tail))
    return TripletChain(tuple(triplets))


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"\n[ACCEPTANCE] {name}: {status}")
