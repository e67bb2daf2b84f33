from django.test import SimpleTestCase
from hypothesis import given

from loopfinder.parser import parse_query
from loopfinder.terms import (
    NIL,
    TRUE,
    Atom,
    Clause,
    Predicate,
    Program,
    Struct,
    Substitution,
    apply,
    canonical_form,
    fresh_copy,
    fresh_var,
    is_ground,
    is_more_general,
    is_variant,
    less_general,
    make_list,
    match,
    mgu,
    mgu_tuple,
    rename_apart,
    render,
    unify,
    variables,
)

from .strategies import atoms, binary_clauses, terms


class TermTests(SimpleTestCase):
    """loopfinder.terms values."""

    def test_variables_compare_by_id(self):
        x = fresh_var("X")
        y = fresh_var("X")
        self.assertNotEqual(x, y)
        self.assertEqual(x, x)

    def test_predicate_parse(self):
        self.assertEqual(Predicate.parse("append/3"), Predicate("append", 3))
        self.assertEqual(str(Predicate("append3", 4)), "append3/4")
        for indicator in ("append", "append/", "/3", "append/x"):
            self.assertRaises(ValueError, Predicate.parse, indicator)

    def test_true_cannot_be_a_head(self):
        self.assertRaises(ValueError, Clause, TRUE, ())

    def test_binary_clause(self):
        head = parse_query("p(X)")
        clause = Clause.binary(head)
        self.assertTrue(clause.is_binary)
        self.assertTrue(clause.is_success_pattern)
        self.assertEqual(clause.goals, ())

    def test_program_rejects_mixed_arities(self):
        c1 = Clause(Atom("p", (NIL,)))
        c2 = Clause(Atom("p", (NIL, NIL)))
        self.assertRaises(ValueError, Program, (c1, c2))

    def test_signature(self):
        x = fresh_var("X")
        program = Program((Clause(Atom("p", (x,)), (Atom("q", (x, x)),)),))
        self.assertEqual(program.signature, {Predicate("p", 1), Predicate("q", 2)})

    def test_is_ground(self):
        self.assertTrue(is_ground(make_list([Struct("a"), Struct("b")])))
        self.assertFalse(is_ground(make_list([fresh_var()])))


class RenderTests(SimpleTestCase):
    def test_lists(self):
        x, xs = fresh_var("X"), fresh_var("Xs")
        self.assertEqual(render(make_list([x], xs), {x: "X", xs: "Xs"}), "[X|Xs]")
        self.assertEqual(render(make_list([Struct("1"), Struct("2")])), "[1,2]")
        self.assertEqual(render(NIL), "[]")

    def test_quoted_names(self):
        self.assertEqual(render(Struct("Hello world")), "'Hello world'")
        self.assertEqual(render(Struct("ok")), "ok")
        self.assertEqual(render(Struct("it's")), "'it''s'")

    def test_clause(self):
        self.assertEqual(
            canonical_form(Clause.binary(parse_query("p(A, B)"), parse_query("q(B)"))),
            "p(X1,X2) :- q(X2).",
        )
        fact = Clause.binary(parse_query("p(a)"))
        self.assertEqual(canonical_form(fact), "p(a) :- true.")

    def test_canonical_form_is_stable_under_renaming(self):
        atom = parse_query("append([X|Xs], Ys, [X|Zs])")
        self.assertEqual(canonical_form(atom), "append([X1|X2],X3,[X1|X4])")
        self.assertEqual(canonical_form(fresh_copy(atom)), canonical_form(atom))

    @given(binary_clauses())
    def test_canonical_form_identifies_variants(self, clause):
        renamed = rename_apart(clause)
        self.assertEqual(canonical_form(renamed), canonical_form(clause))
        self.assertTrue(is_variant(renamed, clause))
        self.assertFalse(set(variables(renamed)) & set(variables(clause)))


class SubstitutionTests(SimpleTestCase):
    def test_identity_bindings_are_dropped(self):
        x = fresh_var("X")
        self.assertEqual(len(Substitution({x: x})), 0)

    def test_compose(self):
        x, y = fresh_var("X"), fresh_var("Y")
        a = Struct("a")
        s = Substitution({x: Struct("f", (y,))})
        t = Substitution({y: a})
        composed = s.compose(t)
        self.assertEqual(apply(composed, x), Struct("f", (a,)))
        self.assertEqual(apply(composed, y), a)

    def test_is_renaming(self):
        x, y = fresh_var("X"), fresh_var("Y")
        self.assertTrue(Substitution({x: y, y: x}).is_renaming())
        z = fresh_var("Z")
        self.assertFalse(Substitution({x: z, y: z}).is_renaming())


class UnifyTests(SimpleTestCase):
    def test_mgu(self):
        a = parse_query("p(X, f(Y))")
        b = parse_query("p(g(Z), Z)")
        theta = mgu(a, b)
        self.assertIsNotNone(theta)
        self.assertEqual(apply(theta, a), apply(theta, b))

    def test_occur_check(self):
        x = fresh_var("X")
        self.assertIsNone(unify(x, Struct("f", (x,))))

    def test_clash(self):
        self.assertIsNone(mgu(parse_query("p(a)"), parse_query("p(b)")))
        self.assertIsNone(mgu(parse_query("p(a)"), parse_query("q(a)")))

    def test_mgu_tuple(self):
        theta = mgu_tuple(
            [parse_query("p(X)"), parse_query("q(Y)")],
            [parse_query("p(a)"), parse_query("q(b)")],
        )
        self.assertEqual(len(theta), 2)
        self.assertRaises(ValueError, mgu_tuple, [parse_query("p(X)")], [])

    @given(atoms(), atoms())
    def test_mgu_unifies(self, a, b):
        theta = mgu(a, b)
        if theta is not None:
            self.assertEqual(apply(theta, a), apply(theta, b))
            # idempotent
            self.assertEqual(apply(theta, apply(theta, a)), apply(theta, a))


class MatchTests(SimpleTestCase):
    def test_match(self):
        general = parse_query("p(X, Y)")
        specific = parse_query("p(a, f(Z))")
        eta = match(general, specific)
        self.assertEqual(apply(eta, general), specific)
        self.assertIsNone(match(specific, general))

    def test_repeated_variables(self):
        pab, paa = parse_query("p(a, b)"), parse_query("p(a, a)")
        self.assertFalse(is_more_general(parse_query("p(X, X)"), pab))
        self.assertTrue(is_more_general(parse_query("p(X, Y)"), paa))

    def test_shared_variables_are_rigid(self):
        x = fresh_var("X")
        self.assertTrue(is_more_general(Atom("p", (x,)), Atom("p", (x,))))
        self.assertFalse(is_more_general(Atom("p", (Struct("a"),)), Atom("p", (x,))))

    def test_less_general(self):
        x = fresh_var("X")
        a = Struct("a")
        fa = Struct("f", (a,))
        self.assertEqual(less_general(x, fa), fa)
        self.assertEqual(less_general(fa, x), fa)
        self.assertIsNone(less_general(a, Struct("b")))

    @given(terms(), terms())
    def test_more_general_is_instance(self, s, t):
        eta = match(s, t)
        if eta is not None:
            self.assertEqual(apply(eta, s), t)
