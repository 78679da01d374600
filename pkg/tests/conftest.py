import pytest

from delkit.core import TOP, Atom, Box, EventModel
from delkit.kripke import EpistemicModel, PointedModel


@pytest.fixture(scope="session")
def wellington():
    """Two-agent message-passing scenario: p true only at the actual world."""
    model = EpistemicModel(
        ["w", "u"],
        {"1": [("w", "w"), ("u", "u")], "2": [("w", "w"), ("w", "u")]},
        {"p": ["w"]},
    )
    return PointedModel(model, "w")


@pytest.fixture(scope="session")
def receive_message():
    """Agent 2 privately learns p; agent 1 thinks nothing happened."""
    return EventModel(
        "E1",
        ["w1", "u1"],
        {"1": [("w1", "u1"), ("u1", "u1")], "2": [("w1", "w1"), ("u1", "u1")]},
        {"w1": Atom("p"), "u1": TOP},
    )


@pytest.fixture(scope="session")
def reply_message():
    """Agent 1 privately learns that agent 2 believes p."""
    return EventModel(
        "E2",
        ["w2", "u2"],
        {"1": [("w2", "w2"), ("u2", "u2")], "2": [("w2", "u2"), ("u2", "u2")]},
        {"w2": Box("2", Atom("p")), "u2": TOP},
    )


@pytest.fixture(scope="session")
def message_env(receive_message, reply_message):
    return {"E1": receive_message, "E2": reply_message}
