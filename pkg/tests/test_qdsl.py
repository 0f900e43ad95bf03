import pytest

from qtheta.fps import Series
from qtheta.qdsl import (DEFAULT_CACHE, Factor, LeafCache, QdslSyntaxError, Sum, Term, evaluate,
                         parse, to_text, tokenize)
from qtheta.seq import gf, SeqSpec


def test_parse_sum_of_two_terms():
    tree = parse("phi(q^6)*psi(q^4) + q*phi(q^2)*psi(q^12)")
    assert tree == Sum((Term(1, 0, (Factor("phi", 6), Factor("psi", 4))),
                        Term(1, 1, (Factor("phi", 2), Factor("psi", 12)))))


def test_parse_power_and_juxtaposed_coefficient():
    assert parse("psi(q)^2") == Sum((Term(1, 0, (Factor("psi", 1, 2),)),))
    assert parse("2q^4*psi(q^32)") == Sum((Term(2, 4, (Factor("psi", 32),)),))
    assert parse("2*q^4*psi(q^32)") == parse("2q^4*psi(q^32)")


def test_parse_signs_and_products_of_numbers():
    tree = parse("-3*2*q - q^2 + 4")
    assert [(t.coefficient, t.qexponent) for t in tree.terms] == [(-6, 1), (-1, 2), (4, 0)]


def test_comments_and_whitespace():
    assert parse("phi( q ^ 2 )  # trailing\n + 1") == parse("phi(q^2)+1")


@pytest.mark.parametrize("text,line,column", [
    ("phi(q", 1, 6),
    ("phi(x)", 1, 5),
    ("2 +", 1, 4),
    ("psi(q^0)", 1, 7),
    ("0*phi(q)", 1, 1),
    ("phi(q)\n  * $", 2, 5),
    ("phi(q) phi(q)", 1, 8),
    ("", 1, 1),
])
def test_syntax_errors_have_positions(text, line, column):
    with pytest.raises(QdslSyntaxError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_error_lists_expected_tokens():
    with pytest.raises(QdslSyntaxError) as info:
        parse("phi(q^2")
    assert info.value.expected == frozenset({")"})


def test_tokenize_positions():
    toks = list(tokenize("q^2\n+ 1"))
    assert [(t.kind, t.line, t.column) for t in toks] == [
        ("q", 1, 1), ("^", 1, 2), ("INT", 1, 3), ("+", 2, 1), ("INT", 2, 3), ("EOF", 2, 4)]


@pytest.mark.parametrize("text", ["1", "-q", "2q^4*psi(q^32)", "phi(q)^3 - 4q*psi(q^8)^2 + 7",
                                  "-phi(q^2)*psi(q^3)"])
def test_to_text_roundtrip(text):
    tree = parse(text)
    assert parse(to_text(tree)) == tree
    assert str(tree) == to_text(tree)


def test_evaluate_examples():
    assert evaluate(parse("psi(q)^2"), 7) == Series([1, 2, 1, 2, 2, 0, 3])
    assert evaluate(parse("1"), 4) == Series([1, 0, 0, 0])
    assert evaluate(parse("q^9"), 4) == Series([0, 0, 0, 0])
    assert evaluate(parse("psi(q)^2"), 4096) == evaluate(parse("phi(q)*psi(q^2)"), 4096)


def test_evaluate_matches_gf():
    assert evaluate(parse("8*psi(q^2)*psi(q^3)^2"), 300) == gf(SeqSpec("t", (2, 3, 3)), 300)


def test_evaluate_rejects_bad_order():
    with pytest.raises(ValueError):
        evaluate(parse("1"), 0)


def test_leaf_cache_reuses_entries():
    cache = LeafCache()
    a = evaluate(parse("phi(q^3)^2"), 50, cache)
    b = evaluate(parse("phi(q^3)^2"), 50, cache)
    assert a == b
    assert len(cache._data) == 1
    cache.clear()
    assert not cache._data
    assert DEFAULT_CACHE is not cache
