#include "consicore/solver.hpp"
#include "consicore/symbolic.hpp"

#include "../support/brute_solver.hpp"

#include <doctest.h>

using namespace consicore;
using namespace consicore::sym;
using ir::CmpOp;
using ir::CondKind;

namespace {

struct Vars {
    VarTable table;
    SymPtr str(const std::string &widget)
    {
        return var_expr(table.intern({OriginKind::SourceWidget, widget, Sort::Str, 0, 0}));
    }
    SymPtr num(const std::string &widget)
    {
        return var_expr(table.intern({OriginKind::SourceWidget, widget, Sort::Int, 0, 0}));
    }
};

Constraint cmp(CmpOp op, SymPtr a, SymPtr b) { return {CondKind::IntCmp, op, std::move(a), std::move(b), false}; }
Constraint eq(SymPtr a, SymPtr b, bool neg = false) { return {CondKind::StrEq, CmpOp::Eq, std::move(a), std::move(b), neg}; }
Constraint contains(SymPtr a, SymPtr b, bool neg = false)
{
    return {CondKind::StrContains, CmpOp::Eq, std::move(a), std::move(b), neg};
}

} // namespace

TEST_CASE("solve: y > 5 gives the minimal-magnitude witness 6")
{
    Vars v;
    auto y = v.num("ey");
    PathCondition pc{{1, ir::Side::Else, cmp(CmpOp::Le, y, int_const(5))}};
    auto cs = negate_last(pc, 0);
    REQUIRE(cs.size() == 1);
    CHECK(to_string(cs[0]) == "N0 > 5");
    auto r = solve(cs);
    REQUIRE(r.status == SolveStatus::Sat);
    CHECK(std::get<std::int64_t>(r.model.at(0)) == 6);
}

TEST_CASE("solve: contradictory string equalities are unsat")
{
    Vars v;
    auto s = v.str("e1");
    auto r = solve({eq(s, str_const("abc")), eq(s, str_const("abd"))});
    CHECK(r.status == SolveStatus::Unsat);
}

TEST_CASE("solve: cubic constraint is unknown when nonlinear arithmetic is rejected")
{
    Vars v;
    auto x = v.num("ex");
    auto c = cmp(CmpOp::Gt, int_mul(int_mul(x, x), x), int_const(10));
    auto r = solve({c});
    CHECK(r.status == SolveStatus::Unknown);
    CHECK(r.reason.find("nonlinear") != std::string::npos);
    SolverConfig en;
    en.nonlinear = Nonlinear::Enumerate;
    auto e = solve({c}, en);
    REQUIRE(e.status == SolveStatus::Sat);
    CHECK(std::get<std::int64_t>(e.model.at(0)) == 3);
}

TEST_CASE("solve: contains over a concatenation, checked against exhaustive search")
{
    Vars v;
    auto s = v.str("e1");
    auto c = contains(concat(str_const("SELECT '"), s), str_const("' or "));
    // The reference enumerator must find a witness of length <= 6 over the
    // characters that occur in the needle before the solver's answer counts.
    testing_support::BruteDomain dom{0, "' or", 6};
    auto brute = testing_support::brute_force({c}, {{0, Sort::Str}}, dom);
    REQUIRE(brute);
    auto r = solve({c});
    REQUIRE(r.status == SolveStatus::Sat);
    CHECK(eval_model(c, r.model));
    auto text = std::get<std::string>(eval_model(*c.lhs, r.model));
    CHECK(text.find("' or ") != std::string::npos);
}

TEST_CASE("negate_last")
{
    Vars v;
    auto y = v.num("ey");
    auto c1 = cmp(CmpOp::Lt, y, int_const(1));
    auto c2 = cmp(CmpOp::Ge, y, int_const(2));
    auto c3 = eq(v.str("e1"), str_const("k"));
    PathCondition pc{{1, ir::Side::Then, c1}, {2, ir::Side::Then, c2}, {3, ir::Side::Then, c3}};
    auto out = negate_last(pc, 1);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == c1);
    CHECK(out[1] == cmp(CmpOp::Lt, y, int_const(2)));
    auto last = negate_last(pc, 2);
    CHECK(last.back().negated);
    CHECK_THROWS_AS(negate_last({}, 0), std::out_of_range);
    CHECK_THROWS_AS(negate_last(pc, 3), std::out_of_range);
    CHECK(negate(negate(c3)) == c3);
}

TEST_CASE("eval_model")
{
    Vars v;
    auto s = v.str("e1");
    auto y = v.num("ey");
    Model m{{0, std::string("b")}, {1, std::int64_t{6}}};
    CHECK(std::get<std::string>(eval_model(*concat(str_const("a"), s), m)) == "ab");
    CHECK(eval_model(cmp(CmpOp::Gt, y, int_const(5)), m));
    CHECK_FALSE(eval_model(contains(str_const("xy"), str_const("z")), {}));
    CHECK_THROWS_AS(eval_model(*s, {}), EvalError);
    CHECK(std::get<std::int64_t>(eval_model(*coerce(str_const("12")), {})) == 12);
    CHECK(std::get<std::int64_t>(eval_model(*coerce(str_const("x")), {})) == 0);
}

TEST_CASE("solve: sort errors")
{
    Vars v;
    auto s = v.str("e1");
    CHECK_THROWS_AS(solve({cmp(CmpOp::Lt, s, int_const(1))}), SortError);
    CHECK_THROWS_AS(solve({eq(int_const(1), str_const("a"))}), SortError);
}

TEST_CASE("solve: symbolic coercion is unknown, ground constraints are decided")
{
    Vars v;
    auto s = v.str("e1");
    CHECK(solve({cmp(CmpOp::Gt, coerce(s), int_const(3))}).status == SolveStatus::Unknown);
    CHECK(solve({cmp(CmpOp::Gt, int_const(4), int_const(3))}).status == SolveStatus::Sat);
    CHECK(solve({cmp(CmpOp::Gt, int_const(2), int_const(3))}).status == SolveStatus::Unsat);
    CHECK(solve({}).status == SolveStatus::Sat);
}

TEST_CASE("solve: minimality tie-break prefers the lower variable first")
{
    Vars v;
    auto a = v.num("a");
    auto b = v.num("b");
    auto r = solve({cmp(CmpOp::Ge, int_add(a, b), int_const(3))});
    REQUIRE(r.status == SolveStatus::Sat);
    CHECK(std::get<std::int64_t>(r.model.at(0)) == 0);
    CHECK(std::get<std::int64_t>(r.model.at(1)) == 3);
    auto neg = solve({cmp(CmpOp::Le, int_add(a, b), int_const(-2)), cmp(CmpOp::Ne, a, int_const(0))});
    REQUIRE(neg.status == SolveStatus::Sat);
    CHECK(std::get<std::int64_t>(neg.model.at(0)) == -1);
    CHECK(std::get<std::int64_t>(neg.model.at(1)) == -1);
}

TEST_CASE("solve: bounded integer unsat")
{
    Vars v;
    auto a = v.num("a");
    SolverConfig cfg;
    cfg.int_bound = 20;
    auto r = solve({cmp(CmpOp::Gt, a, int_const(20))}, cfg);
    CHECK(r.status == SolveStatus::Unsat);
    CHECK(r.bounded);
}

TEST_CASE("solve: string equalities through concatenation")
{
    Vars v;
    auto s = v.str("e1");
    auto t = v.str("e2");
    auto r = solve({eq(concat(s, t), str_const("abc")), eq(s, str_const(""), true), eq(t, str_const(""), true)});
    REQUIRE(r.status == SolveStatus::Sat);
    CHECK(std::get<std::string>(r.model.at(0)) + std::get<std::string>(r.model.at(1)) == "abc");
    CHECK_FALSE(std::get<std::string>(r.model.at(0)).empty());
}

TEST_CASE("solve: determinism")
{
    Vars v;
    auto s = v.str("e1");
    auto y = v.num("ey");
    std::vector<Constraint> cs{contains(s, str_const("q")), eq(s, str_const("x"), true),
        cmp(CmpOp::Ne, int_add(y, int_const(2)), int_const(2))};
    auto a = solve(cs);
    auto b = solve(cs);
    REQUIRE(a.status == SolveStatus::Sat);
    CHECK(a.model == b.model);
    CHECK(std::get<std::string>(a.model.at(0)) == "q");
    CHECK(std::get<std::int64_t>(a.model.at(1)) == 1);
}

TEST_CASE("template rendering")
{
    Vars v;
    auto s = v.str("e1");
    auto q = concat(concat(str_const("SELECT * FROM student WHERE stdno='"), s), str_const("'"));
    CHECK(render_template(*q) == "SELECT * FROM student WHERE stdno='{S0}'");
}
