"""Run the usage examples embedded in docstrings."""

import doctest

import freemult.words


def test_words_doctests():
    result = doctest.testmod(freemult.words, verbose=False)
    assert result.attempted > 0
    assert result.failed == 0
