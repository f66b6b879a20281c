import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_smooth_expr
from obstruct import exprlang
from obstruct.exprlang import (BinOp, Call, Coord, ExprSyntaxError, Neg, Num,
                               UnknownIdentifier, differentiate, eval_jet,
                               eval_real, parse, pretty)
from obstruct.jets import JetDomainError

# trees as the parser itself could have produced them: literals are
# non-negative (a leading minus always parses into a Neg node)
_leaves = st.one_of(
    st.floats(min_value=0, max_value=1e6, allow_nan=False,
              allow_infinity=False).map(Num),
    st.sampled_from([Coord("x", 0), Coord("y", 1)]),
    st.just(exprlang.Param("c")),
)
_trees = st.recursive(
    _leaves,
    lambda sub: st.one_of(
        st.builds(Neg, sub),
        st.builds(Call, st.sampled_from(["exp", "log", "sin", "cos", "sqrt"]), sub),
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/", "^"]), sub, sub),
    ),
    max_leaves=12)


class TestParse:
    def test_simple_tree_evaluates(self):
        tree = parse("x^2 + sin(y)", ["x", "y"])
        assert eval_real(tree, [0.0, 0.0]) == 0.0

    def test_precedence(self):
        assert eval_real(parse("1 + 2*3", []), []) == 7.0

    def test_power_binds_tighter_than_unary_minus(self):
        assert eval_real(parse("-2^2", []), []) == -4.0

    def test_power_right_associative(self):
        assert eval_real(parse("2^3^2", []), []) == 512.0

    def test_left_associative_subtraction(self):
        assert eval_real(parse("10 - 4 - 3", []), []) == 3.0

    def test_unary_minus_in_exponent(self):
        assert eval_real(parse("2^-2", []), []) == 0.25

    def test_parens_and_calls(self):
        assert eval_real(parse("exp(log(2) + log(3))", []), []) == pytest.approx(6.0)

    def test_scientific_literals(self):
        assert eval_real(parse("1.5e2 + .5 + 2.", []), []) == 152.5

    def test_syntax_error_at_end(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("x +", ["x"])
        assert err.value.position == 3

    def test_syntax_error_position(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("1 + $", ["x"])
        assert err.value.position == 4

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifier) as err:
            parse("x + q", ["x"])
        assert err.value.name == "q"

    def test_implicit_multiplication_rejected(self):
        with pytest.raises(ExprSyntaxError):
            parse("2 x", ["x"])

    def test_empty_input(self):
        with pytest.raises(ExprSyntaxError):
            parse("   ", ["x"])

    def test_unknown_function(self):
        with pytest.raises(ExprSyntaxError):
            parse("tan(x)", ["x"])

    def test_params_resolve(self):
        tree = parse("c * x", ["x"], ["c"])
        assert eval_real(tree, [3.0], {"c": 2.0}) == 6.0


class TestPretty:
    CASES = [
        "x ^ 2 + sin(y)",
        "(x + y) * (x - y)",
        "x - (y - 1.0)",
        "x * (y * x)",
        "(x ^ y) ^ 2.0",
        "x ^ y ^ 2.0",
        "-(x + y)",
        "--x",
        "2.0 ^ -x",
        "1.0 / (x / y)",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_round_trip_is_fixed_point(self, text):
        tree = parse(text, ["x", "y"])
        printed = pretty(tree)
        assert parse(printed, ["x", "y"]) == tree
        assert pretty(parse(printed, ["x", "y"])) == printed

    def test_random_trees_round_trip(self):
        rng = np.random.default_rng(77)
        coords = ["x", "y"]
        for _ in range(100):
            tree = random_smooth_expr(rng, coords, depth=3)
            printed = pretty(tree)
            assert parse(printed, coords) == tree

    @given(_trees)
    @settings(max_examples=300)
    def test_printer_is_right_inverse_of_parser(self, tree):
        assert parse(pretty(tree), ["x", "y"], ["c"]) == tree


class TestEvalJet:
    def test_quadratic(self):
        tree = parse("c*(x*x + y*y + 1)", ["x", "y"], ["c"])
        jet = eval_jet(tree, [1.0, 1.0], {"c": 1.0})
        assert jet.value == 3.0
        assert jet.gradient.tolist() == [2.0, 2.0]
        assert np.diag(jet.hessian).tolist() == [2.0, 2.0]

    def test_conformal_factor_at_origin(self):
        # h = 2c / (x^2 + y^2 + 1) at the chart origin with c = 2
        tree = parse("2*c/(x*x + y*y + 1)", ["x", "y"], ["c"])
        jet = eval_jet(tree, [0.0, 0.0], {"c": 2.0})
        assert jet.value == 4.0

    def test_domain_error_propagates(self):
        with pytest.raises(JetDomainError):
            eval_jet(parse("1/x", ["x"]), [0.0])

    def test_value_channel_matches_plain_evaluation(self):
        rng = np.random.default_rng(13)
        coords = ["x", "y", "z"]
        for _ in range(100):
            tree = random_smooth_expr(rng, coords, depth=3)
            point = rng.uniform(-1, 1, 3)
            jet = eval_jet(tree, point)
            plain = eval_real(tree, point)
            assert abs(jet.value - plain) <= 1e-12 * max(1.0, abs(plain))


class TestDifferentiate:
    def test_polynomial(self):
        tree = parse("x^3 + x*y", ["x", "y"])
        dx = differentiate(tree, 0)
        assert eval_real(dx, [2.0, 5.0]) == 17.0  # 3x^2 + y

    def test_matches_jet_gradient(self):
        rng = np.random.default_rng(29)
        coords = ["x", "y"]
        for _ in range(50):
            tree = random_smooth_expr(rng, coords, depth=3)
            point = rng.uniform(-1, 1, 2)
            jet = eval_jet(tree, point)
            for k in range(2):
                val = eval_real(differentiate(tree, k), point)
                assert abs(val - jet.gradient[k]) <= 1e-10 * max(1.0, abs(val))

    def test_second_symbolic_derivative_matches_hessian(self):
        rng = np.random.default_rng(31)
        coords = ["x", "y"]
        for _ in range(25):
            tree = random_smooth_expr(rng, coords, depth=2)
            point = rng.uniform(-1, 1, 2)
            jet = eval_jet(tree, point)
            for i in range(2):
                for j in range(2):
                    val = eval_real(differentiate(differentiate(tree, i), j), point)
                    assert abs(val - jet.hessian[i, j]) <= 1e-9 * max(1.0, abs(val))

    def test_structural_nodes(self):
        x = Coord("x", 0)
        assert differentiate(Num(3.0), 0) == Num(0.0)
        assert differentiate(x, 0) == Num(1.0)
        assert differentiate(Neg(x), 0) == Neg(Num(1.0))
        assert differentiate(Call("exp", x), 0) == Call("exp", x)
        quot = BinOp("/", Num(1.0), x)
        assert eval_real(differentiate(quot, 0), [2.0]) == pytest.approx(-0.25)
