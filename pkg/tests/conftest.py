import pytest

from droles.cli import corpus_text
from droles.concrete import parse_signature, parse_term
from droles.syntax import erase

CORPUS = ["prelude.dr", "phantom.dr", "discern_bad.dr", "discern_ok.dr", "duplicate.dr", "case.dr", "mixed.dr"]


def load(name: str):
    return parse_signature(corpus_text(name))


@pytest.fixture(scope="session")
def prelude():
    return load("prelude.dr")


@pytest.fixture(scope="session")
def mixed():
    return load("mixed.dr")


@pytest.fixture(scope="session")
def phantom():
    return load("phantom.dr")


@pytest.fixture(scope="session")
def case_sig():
    return load("case.dr")


@pytest.fixture
def term(prelude):
    """Parse and erase a term over the prelude."""
    return lambda text, sig=None: erase(parse_term(text, sig or prelude))
