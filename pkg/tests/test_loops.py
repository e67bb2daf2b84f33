import time
from functools import lru_cache
from pathlib import Path
from unittest import mock

from django.test import SimpleTestCase

from loopfinder.filters import PosTermMap, delta_more_general, dna, is_dn
from loopfinder.loops import (
    LoopDictionary,
    LoopingCondition,
    check_looping_pair,
    conditions_from_dict,
    infer_loop_cond,
    infer_loop_dict,
    loops_from_dict,
    membership,
    unit_loop,
)
from loopfinder.loops import analyze as analyze_program
from loopfinder.parser import parse_program, parse_query
from loopfinder.terms import Clause, Predicate, canonical_form, is_more_general

FIXTURES = Path(__file__).parent / "fixtures"

APPEND = Predicate("append", 3)
APPEND3 = Predicate("append3", 4)

BC1 = "append([X|Xs], Ys, [X|Zs]) :- append(Xs, Ys, Zs)."
BC2 = "append3(X1, X2, X3, X4) :- append(X1, X2, X5)."
BC3 = "append3([], X1, X2, X3) :- append(X1, X2, X3)."

CHAIN = (
    "r(X1) :- q(X1,f(f(X1))).",
    "q(X1,f(X2)) :- p(f(X1),a).",
    "p(f(g(X1)),a) :- p(X1,a).",
)

# the p/1 clause sorts before the pair it extends
FEEDING = "p(X) :- q(X).\nq(X) :- q(X).\n"

# fixture, max
DICTIONARY_FIXTURES = (
    ("append.pl", 2),
    ("append3.pl", 2),
    ("permute.pl", 2),
    ("reverse.pl", 2),
    ("merge.pl", 2),
    ("chain.pl", 2),
    ("fold_open.pl", 2),
    ("left_recursive.pl", 5),
    ("finite_unfoldings.pl", 4),
    ("mult.pl", 4),
)


def load(name):
    return parse_program((FIXTURES / name).read_text())


@lru_cache(maxsize=None)
def analyze(name, max_iterations=2, passes=None):
    return analyze_program(load(name), max_iterations, passes=passes)


def binary(text):
    clause = parse_program(text).clauses[0]
    return clause if clause.body else Clause.binary(clause.head)


def keys(conditions):
    return {c.key for c in conditions}


def covering(conditions, query):
    return [c for c in conditions if query in c]


class UnitLoopTests(SimpleTestCase):
    """loopfinder.loops.unit_loop tests."""

    def test_append(self):
        dictionary = unit_loop(binary(BC1), LoopDictionary())
        self.assertEqual(len(dictionary), 1)
        pair = dictionary[0]
        self.assertEqual(pair.tau.domain(APPEND), {2})
        self.assertTrue(check_looping_pair(pair))

    def test_body_only_delta_more_general(self):
        clause = binary("rev([X|Xs], R0, R) :- rev(Xs, [X|R0], R).")
        self.assertFalse(is_more_general(clause.body[0], clause.head))
        dictionary = unit_loop(clause, LoopDictionary())
        self.assertEqual(len(dictionary), 1)
        self.assertEqual(dictionary[0].tau.domain(clause.head.predicate), {2, 3})

    def test_no_loop(self):
        dictionary = unit_loop(binary("p(a) :- p(f(a))."), LoopDictionary())
        self.assertEqual(len(dictionary), 0)

    def test_success_patterns_are_skipped(self):
        self.assertEqual(len(unit_loop(binary("p(X)."), LoopDictionary())), 0)

    def test_input_dictionary_is_unchanged(self):
        dictionary = LoopDictionary()
        unit_loop(binary(BC1), dictionary)
        self.assertEqual(len(dictionary), 0)

    def test_duplicates(self):
        dictionary = unit_loop(binary(BC1), LoopDictionary())
        dictionary = unit_loop(binary(BC1), dictionary)
        self.assertEqual(len(dictionary), 1)


class LoopsFromDictTests(SimpleTestCase):
    def setUp(self):
        signature = load("append3.pl").signature
        self.dictionary = unit_loop(binary(BC1), LoopDictionary(), signature)

    def test_extend_with_bc2(self):
        dictionary = loops_from_dict(binary(BC2), self.dictionary)
        self.assertEqual(len(dictionary), 2)
        pair = dictionary[1]
        self.assertEqual(len(pair), 2)
        self.assertEqual(pair.tau.domain(APPEND3), {2, 3, 4})
        self.assertIs(pair.tail, self.dictionary[0])
        self.assertTrue(check_looping_pair(pair))

    def test_extend_with_bc3(self):
        dictionary = loops_from_dict(binary(BC3), self.dictionary)
        self.assertEqual(dictionary[1].tau.domain(APPEND3), {3})
        self.assertTrue(check_looping_pair(dictionary[1]))

    def test_empty_dictionary(self):
        self.assertEqual(len(loops_from_dict(binary(BC2), LoopDictionary())), 0)

    def test_pair_cap(self):
        dictionary = loops_from_dict(binary(BC2), self.dictionary, pair_cap=1)
        self.assertEqual(len(dictionary), 1)

    def test_body_must_feed_the_head(self):
        clause = binary("append3(X1, X2, X3, X4) :- append(X1, [], [a]).")
        self.assertEqual(len(loops_from_dict(clause, self.dictionary)), 1)


class InferLoopDictTests(SimpleTestCase):
    def test_max_zero(self):
        for name in ("append.pl", "append3.pl", "permute.pl"):
            self.assertEqual(len(infer_loop_dict(load(name), 0)), 0)

    def test_permute(self):
        dictionary = infer_loop_dict(load("permute.pl"), 1)
        shapes = {(str(pair.head.predicate), len(pair)) for pair in dictionary}
        self.assertIn(("delete/3", 1), shapes)
        self.assertIn(("permute/2", 2), shapes)
        self.assertNotIn(("permute/2", 1), shapes)

    def test_append3(self):
        dictionary = infer_loop_dict(load("append3.pl"), 2)
        domains = {
            pair.tau.render_positions(pair.head.predicate) for pair in dictionary
        }
        self.assertIn("{2 -> _}", domains)
        self.assertIn("{2 -> _, 3 -> _, 4 -> _}", domains)
        self.assertIn("{3 -> _}", domains)

    def test_deterministic(self):
        program = load("permute.pl")
        first = [pair.key for pair in infer_loop_dict(program, 2)]
        second = [pair.key for pair in infer_loop_dict(program, 2)]
        self.assertEqual(first, second)

    def test_certificates(self):
        for name in ("append3.pl", "permute.pl", "reverse.pl", "merge.pl"):
            for pair in analyze(name).dictionary:
                self.assertTrue(check_looping_pair(pair), f"{name}: {pair}")

    def test_pairs_come_from_the_pool(self):
        for name in ("append3.pl", "permute.pl", "reverse.pl", "merge.pl"):
            analysis = analyze(name)
            for pair in analysis.dictionary:
                for clause in pair.bin_seq:
                    self.assertIn(clause, analysis.pool)
                    self.assertLessEqual(analysis.pool.stamp(clause), 2)

    def test_chained_pair(self):
        """The pair for r/1 is built from the p/2 pair in two steps."""
        dictionary = infer_loop_dict(load("chain.pl"), 1)
        pairs = [pair for pair in dictionary if pair.key[0] == CHAIN]
        self.assertTrue(pairs)
        pair = pairs[0]
        self.assertEqual(pair.tail.key[0], CHAIN[1:])
        self.assertEqual(pair.tail.tail.key[0], CHAIN[2:])
        self.assertTrue(check_looping_pair(pair))
        p, q, r = Predicate("p", 2), Predicate("q", 2), Predicate("r", 1)
        self.assertEqual(pair.tau.render_positions(q), "{2 -> f(X1)}")
        self.assertEqual(pair.tau.domain(p), frozenset())
        self.assertEqual(pair.tau.domain(r), frozenset())

    def test_chained_pair_with_ground_term(self):
        r_clause, q_clause, p_clause = (binary(text) for text in CHAIN)
        bin_seq = [r_clause, q_clause, p_clause]
        p, q = Predicate("p", 2), Predicate("q", 2)
        a, f_y = parse_query("t(a, f(Y))").args
        tau = PosTermMap({p: {2: a}, q: {2: f_y}})
        self.assertTrue(is_dn(bin_seq, tau))
        for clause, fed in ((p_clause, p_clause), (q_clause, p_clause)):
            self.assertIsNotNone(delta_more_general(clause.body[0], fed.head, tau))
        self.assertIsNotNone(delta_more_general(r_clause.body[0], q_clause.head, tau))
        # the ground term for p/2 is dropped
        self.assertEqual(dna(bin_seq, tau), PosTermMap({q: {2: f_y}}))


class BuildDictionaryTests(SimpleTestCase):
    def test_later_passes(self):
        program = parse_program(FEEDING)
        single = infer_loop_dict(program, 1, passes=1)
        self.assertNotIn("p/1", {str(pair.head.predicate) for pair in single})
        dictionary = infer_loop_dict(program, 1)
        shapes = [(str(pair.head.predicate), len(pair)) for pair in dictionary]
        # [p, q, q] repeats the clauses and map of [p, q]
        self.assertEqual(shapes, [("q/1", 1), ("q/1", 2), ("p/1", 2)])
        self.assertEqual(dictionary.rejected, [])

    @mock.patch("loopfinder.loops.check_looping_pair")
    def test_later_passes_are_recertified(self, mock_check):
        mock_check.return_value = False
        with self.assertLogs("loopfinder.loops", "WARNING"):
            dictionary = infer_loop_dict(parse_program(FEEDING), 1)
        self.assertEqual(len(dictionary), 2)
        self.assertEqual(len(dictionary.rejected), 2)
        self.assertTrue(mock_check.called)
        # the first pass is not re-checked
        single = infer_loop_dict(parse_program(FEEDING), 1, passes=1)
        self.assertEqual(len(single), 2)

    def test_no_pair_is_rejected(self):
        for name, max_iterations in DICTIONARY_FIXTURES:
            dictionary = analyze(name, max_iterations).dictionary
            self.assertEqual(len(dictionary.rejected), 0, name)
            for pair in dictionary:
                self.assertTrue(check_looping_pair(pair), f"{name}: {pair}")

    def test_later_passes_keep_conditions(self):
        for name, max_iterations in DICTIONARY_FIXTURES:
            single = keys(analyze(name, max_iterations, passes=1).conditions)
            self.assertTrue(single <= keys(analyze(name, max_iterations).conditions))


class LoopingConditionTests(SimpleTestCase):
    def test_append3(self):
        conditions = infer_loop_cond(load("append3.pl"), 2)
        self.assertTrue(
            {
                ("append([X1|X2],X3,[X1|X4])", "{2 -> _}"),
                ("append3(X1,X2,X3,X4)", "{2 -> _, 3 -> _, 4 -> _}"),
                ("append3([],X1,X2,X3)", "{3 -> _}"),
            }
            <= keys(conditions)
        )
        for condition in conditions:
            self.assertIs(condition.atom, condition.provenance.head)

    def test_permute(self):
        conditions = infer_loop_cond(load("permute.pl"), 1)
        self.assertEqual(
            keys(conditions),
            {
                ("delete(X1,[X2|X3],[X2|X4])", "{1 -> _}"),
                ("permute([X1|X2],[X3|X4])", "{2 -> [X1|X2]}"),
            },
        )
        self.assertTrue(covering(conditions, parse_query("permute(As, [a, b])")))
        self.assertFalse(covering(conditions, parse_query("permute([], Bs)")))

    def test_reverse(self):
        conditions = analyze("reverse.pl").conditions
        for query in ("reverse(As, [])", "reverse(X, [a|T])", "reverse(X, f(Y))"):
            self.assertTrue(covering(conditions, parse_query(query)), query)
        self.assertFalse(covering(conditions, parse_query("reverse([a], Bs)")))

    def test_merge(self):
        conditions = analyze("merge.pl").conditions
        for query in ("merge(As, [0], Bs)", "merge([0], As, Bs)"):
            self.assertTrue(covering(conditions, parse_query(query)), query)
        self.assertFalse(covering(conditions, parse_query("merge([], [], Bs)")))

    def test_mult(self):
        started = time.perf_counter()
        conditions = analyze_program(load("mult.pl"), 4).conditions
        self.assertLess(time.perf_counter() - started, 2.0)
        self.assertTrue(covering(conditions, parse_query("mult(s(s(0)), A, B)")))

    def test_no_loops(self):
        self.assertEqual(analyze("finite_unfoldings.pl", 4).conditions, [])
        fold = Predicate("fold", 3)
        self.assertEqual(analyze("fold_ground.pl").conditions_for(fold), [])

    def test_duplicates_keep_the_first_pair(self):
        dictionary = analyze("permute.pl", 1).dictionary
        conditions = conditions_from_dict(dictionary)
        self.assertLess(len(conditions), len(dictionary))
        first = {}
        for pair in dictionary:
            key = (
                canonical_form(pair.head),
                pair.tau.render_positions(pair.head.predicate),
            )
            first.setdefault(key, pair)
        for condition in conditions:
            self.assertIs(condition.provenance, first[condition.key])

    def test_str(self):
        condition = analyze("append.pl").conditions[0]
        self.assertIsInstance(condition, LoopingCondition)
        self.assertEqual(str(condition), "append([X1|X2],X3,[X1|X4]) {2 -> _}")


class MembershipTests(SimpleTestCase):
    def setUp(self):
        self.condition = analyze("append.pl").conditions[0]

    def test_condition_atom(self):
        self.assertTrue(membership(self.condition.atom, self.condition))

    def test_well_typed_query(self):
        self.assertTrue(membership(parse_query("append(As, [], Bs)"), self.condition))
        self.assertIn(parse_query("append(As, f(b), Bs)"), self.condition)

    def test_not_members(self):
        for query in ("append([], Ys, Zs)", "append(As, Bs, [])", "rev(As, Bs)"):
            self.assertFalse(membership(parse_query(query), self.condition), query)
        self.assertNotIn("append(As, [], Bs)", self.condition)


class MonotonicityTests(SimpleTestCase):
    def test_conditions_grow_with_max(self):
        for name in ("append3.pl", "permute.pl", "reverse.pl", "merge.pl"):
            smaller = keys(analyze(name, 1).conditions)
            larger = keys(analyze(name, 2).conditions)
            self.assertTrue(smaller <= larger, name)

    def test_canonical_atoms(self):
        for condition in analyze("merge.pl").conditions:
            self.assertEqual(condition.key[0], canonical_form(condition.atom))
