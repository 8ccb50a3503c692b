#include "consicore/concrete.hpp"
#include "consicore/ir.hpp"

#include "../support/corpus.hpp"

#include <doctest.h>

using namespace consicore;
using namespace consicore::ir;
using testing_support::load_corpus_app;

namespace {

Driver click_driver(const std::string &comp, const std::string &button)
{
    Driver d;
    d.actions.push_back(Action::construct(comp));
    for (auto slot : kLifecycleOrder)
        d.actions.push_back(Action::lifecycle(comp, slot));
    d.actions.push_back(Action::find_widget(button));
    d.actions.push_back(Action::trigger(button));
    return d;
}

std::string parse_error_of(const std::string &src)
{
    try {
        parse_app(src);
    } catch (const ParseError &e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("parse: student lookup app has one activity with three widgets and two handlers")
{
    auto app = load_corpus_app("listing3");
    REQUIRE(app.components.size() == 1);
    const auto &c = app.components[0];
    CHECK(c.kind == ComponentKind::Activity);
    CHECK(c.widgets.size() == 3);
    CHECK(c.functions.size() == 2);
    CHECK(c.widget("e1")->kind == WidgetKind::EditBox);
    CHECK(c.widget("b1")->kind == WidgetKind::Button);
    CHECK(c.widget("t1")->kind == WidgetKind::TextBox);
    REQUIRE(app.tables.size() == 1);
    CHECK(app.tables[0].columns == std::vector<std::string>{"stdno", "name"});
}

TEST_CASE("parse: empty app")
{
    auto app = parse_app("app \"x\" { }");
    CHECK(app.name == "x");
    CHECK(app.components.empty());
    CHECK(app.stmt_count == 0);
}

TEST_CASE("parse: duplicate widget id is named in the error")
{
    auto msg = parse_error_of(R"(app "d" { activity A { widget button b1 widget edit b1 } })");
    CHECK(msg.find("b1") != std::string::npos);
    CHECK(msg.find("duplicate") != std::string::npos);
    auto across = parse_error_of(
        R"(app "d" { activity A { widget button b1 } activity B { widget button b1 } })");
    CHECK(across.find("b1") != std::string::npos);
}

TEST_CASE("parse: errors carry line and column")
{
    auto msg = parse_error_of("app \"e\" {\n  activity A {\n    oncreate { x = }\n  }\n}");
    CHECK(msg.rfind("3:", 0) == 0);
}

TEST_CASE("parse: rejected programs")
{
    CHECK(parse_error_of(R"(app "e" { activity A { oncreate { r = frobnicate("x") } } })").find("unknown sink name") !=
          std::string::npos);
    CHECK(parse_error_of(R"(app "e" { activity A { oncreate { x = 1 + "a" } } })").find("type error") !=
          std::string::npos);
    CHECK(!parse_error_of(R"(app "e" { activity A { widget button b oncreate { x = input(b) } } })").empty());
    CHECK(!parse_error_of(R"(app "e" { activity A { widget edit e onclick(e) { } } })").empty());
    CHECK(!parse_error_of(R"(app "e" { activity A { oncreate { } oncreate { } } })").empty());
    CHECK(!parse_error_of(R"(app "e" { provider P { } })").empty());
    CHECK(!parse_error_of(R"(app "e" { provider P { widget edit e query(q) { } } })").empty());
    CHECK(!parse_error_of(R"(app "e" { activity A { oncreate { x = y } } })").empty());
    CHECK(!parse_error_of(R"(app "e" { activity A { oncreate { return "a" } } })").empty());
    CHECK(!parse_error_of(R"(app "e" { activity A { oncreate { call nope() } } })").empty());
    CHECK(!parse_error_of(R"(app "e" { activity A { oncreate { x = input(e9) } } })").empty());
    CHECK(!parse_error_of(R"(app "e" activity)").empty());
}

TEST_CASE("parse: branch sites and statement ids are unique and dense")
{
    auto app = load_corpus_app("fig5");
    CHECK(app.site_count == 3);
    std::vector<int> ids, sites;
    for (const auto &c : app.components)
        for (const auto &f : c.functions)
            for_each_stmt(f.body, [&](const Stmt &s) {
                ids.push_back(s.id);
                if (s.kind == StmtKind::If)
                    sites.push_back(s.site);
            });
    CHECK(static_cast<int>(ids.size()) == app.stmt_count);
    std::sort(ids.begin(), ids.end());
    for (int i = 0; i < static_cast<int>(ids.size()); ++i)
        CHECK(ids[i] == i + 1);
    CHECK(sites == std::vector<int>{1, 2, 3});
}

TEST_CASE("print/parse round trip over the corpus")
{
    for (const char *name : {"listing1", "listing3", "listing3_parametric", "listing3_noleak", "fig5", "provider",
             "unreachable", "multi_activity"}) {
        CAPTURE(name);
        auto app = load_corpus_app(name);
        auto printed = print_app(app);
        auto again = parse_app(printed);
        CHECK(again == app);
        CHECK(print_app(again) == printed);
    }
}

TEST_CASE("round trip keeps negative literals, nesting and precedence")
{
    auto src = R"(app "p" {
      activity A {
        widget edit e
        oncreate {
          n = int(input(e)) * (2 + -3)
          m = (n + 1) * n + -7
          s = "a" + ("b" + input(e))
          if (n >= -1) { t = "x" } else if (!contains(s, "q\"")) { t = "y" } else { t = s }
        }
      }
    })";
    auto app = parse_app(src);
    CHECK(parse_app(print_app(app)) == app);
}

TEST_CASE("eval_concrete: query text after substitution")
{
    auto app = load_corpus_app("listing3");
    auto trace = eval_concrete(app, click_driver("Main", "b1"), {{{"e1", "7"}}, {}});
    REQUIRE(trace.sinks.size() == 1);
    CHECK(trace.sinks[0].query == "SELECT * FROM student WHERE stdno='7'");
    CHECK(trace.sinks[0].sink == "rawQuery");
    CHECK(trace.sinks[0].stack == std::vector<std::string>{"Main$b1.onClick", "DriverMain.main"});
    REQUIRE(trace.leaks.size() == 1);
    CHECK(trace.leaks[0].target == "t1");
    CHECK(!trace.error);
}

TEST_CASE("eval_concrete: empty click handler runs lifecycle statements only")
{
    auto app = parse_app(R"(app "e" {
      activity Main {
        widget edit e1
        widget button b1
        oncreate { s = input(e1) }
        onstart { u = s + "!" }
        onclick(b1) { }
      }
    })");
    auto trace = eval_concrete(app, click_driver("Main", "b1"), {});
    CHECK(trace.stmts == std::vector<int>{1, 2});
    CHECK(trace.sinks.empty());
}

TEST_CASE("eval_concrete: y = 6 takes the then branch of y > 5")
{
    auto app = parse_app(R"(app "b" {
      activity Main {
        widget edit ey
        widget button b1
        widget text t1
        onclick(b1) {
          y = int(input(ey))
          if (y > 5) { setText(t1, "big") } else { setText(t1, "small") }
        }
      }
    })");
    // Hand simulation: stmt 1 assigns y = 6, stmt 2 tests 6 > 5, stmt 3 is the then body.
    auto trace = eval_concrete(app, click_driver("Main", "b1"), {{{"ey", "6"}}, {}});
    CHECK(trace.stmts == std::vector<int>{1, 2, 3});
    REQUIRE(trace.branches.size() == 1);
    CHECK(trace.branches[0].site == 1);
    CHECK(trace.branches[0].side == Side::Then);
    CHECK(trace.leaks.at(0).payload == "big");
    auto low = eval_concrete(app, click_driver("Main", "b1"), {{{"ey", "5"}}, {}});
    CHECK(low.stmts == std::vector<int>{1, 2, 4});
    auto junk = eval_concrete(app, click_driver("Main", "b1"), {{{"ey", "6x"}}, {}});
    CHECK(junk.leaks.at(0).payload == "small");
}

TEST_CASE("eval_concrete: determinism and trace well-formedness")
{
    auto app = load_corpus_app("fig5");
    ConcreteInputs in{{{"e1", "admin"}, {"e2", "aq"}}, {}};
    auto a = eval_concrete(app, click_driver("Main", "b1"), in);
    auto b = eval_concrete(app, click_driver("Main", "b1"), in);
    CHECK(a.stmts == b.stmts);
    CHECK(a.branches == b.branches);
    for (int id : a.stmts)
        CHECK((id >= 1 && id <= app.stmt_count));
    // each branch outcome refers to an If statement that was executed
    for (const auto &br : a.branches)
        CHECK(std::find(a.stmts.begin(), a.stmts.end(), br.stmt_id) != a.stmts.end());
    REQUIRE(a.sinks.size() == 1);
    CHECK(a.sinks[0].query == "SELECT * FROM student WHERE stdno='aq'");
}

TEST_CASE("eval_concrete: branch overrides force a side")
{
    auto app = load_corpus_app("fig5");
    ConcreteOptions opt;
    opt.branch_overrides = {{2, Side::Else}, {3, Side::Then}};
    auto t = eval_concrete(app, click_driver("Main", "b1"), {}, opt);
    CHECK(t.sinks.size() == 1);
}

TEST_CASE("eval_concrete: driver errors")
{
    auto app = load_corpus_app("listing3");
    CHECK_THROWS_AS(eval_concrete(app, click_driver("Nope", "b1"), {}), DriverError);
    CHECK_THROWS_AS(eval_concrete(app, click_driver("Main", "zz"), {}), DriverError);
    Driver no_construct;
    no_construct.actions.push_back(Action::lifecycle("Main", LifecycleSlot::OnCreate));
    CHECK_THROWS_AS(eval_concrete(app, no_construct, {}), DriverError);
    CHECK_THROWS_AS(eval_concrete(app, click_driver("Main", "t1"), {}), DriverError);
}

TEST_CASE("eval_concrete: helper recursion beyond depth 32 is a runtime error")
{
    auto app = parse_app(R"(app "r" {
      activity Main {
        oncreate { call f(0) }
        fn f(n: int) { call f(n + 1) }
      }
    })");
    Driver d;
    d.actions = {Action::construct("Main"), Action::lifecycle("Main", LifecycleSlot::OnCreate)};
    auto t = eval_concrete(app, d, {});
    REQUIRE(t.error);
    CHECK(t.error->find("32") != std::string::npos);
    // depth 32 exactly is allowed
    auto ok = parse_app(R"(app "r" {
      activity Main {
        oncreate { call f(1) }
        fn f(n: int) { if (n < 32) { call f(n + 1) } else { } }
      }
    })");
    CHECK(!eval_concrete(ok, d, {}).error);
}

TEST_CASE("eval_concrete: provider return leaks only when invoked over IPC")
{
    auto app = load_corpus_app("provider");
    Driver d;
    d.actions = {Action::construct("Students"), Action::provider_invoke("Students")};
    auto t = eval_concrete(app, d, {{}, {{"Students", "bob"}}});
    REQUIRE(t.sinks.size() == 1);
    CHECK(t.sinks[0].query == "SELECT * FROM student WHERE name='bob'");
    CHECK(t.sinks[0].stack == std::vector<std::string>{"Students.query", "DriverMain.main"});
    REQUIRE(t.leaks.size() == 1);
    CHECK(t.leaks[0].channel == LeakChannel::ProviderReturn);
}

TEST_CASE("coerce_int")
{
    CHECK(coerce_int("42") == 42);
    CHECK(coerce_int("-7") == -7);
    CHECK(coerce_int("+3") == 3);
    CHECK(coerce_int("") == 0);
    CHECK(coerce_int("4a") == 0);
    CHECK(coerce_int("99999999999999999999") == 0);
}
