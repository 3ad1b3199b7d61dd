import pytest

from mcprover.clausify import clausify, prepare_matrix
from mcprover.tptp import parse_problem


def matrix_of(text: str):
    """Parse, clausify and prepare a problem given as TPTP text."""
    return prepare_matrix(clausify(parse_problem(text)))


UNIT_PAIR = """
cnf(c1, axiom, p).
cnf(c2, axiom, ~p).
"""


@pytest.fixture
def unit_pair_matrix():
    return matrix_of(UNIT_PAIR)
