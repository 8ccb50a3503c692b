// Acceptance suite: one PASS/FAIL line per criterion.

#include "consicore/engine.hpp"
#include "consicore/replay.hpp"
#include "consicore/solver.hpp"

#include "../support/app_gen.hpp"
#include "../support/brute_solver.hpp"
#include "../support/constraint_gen.hpp"
#include "../support/corpus.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

using namespace consicore;
using namespace testing_support;
using ir::Side;

namespace {

struct Check {
    std::ostringstream why;
    bool ok = true;

    void expect(bool cond, const std::string &what)
    {
        if (!cond) {
            ok = false;
            why << (why.tellp() > 0 ? "; " : "") << what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Loaded {
    ir::MiniApp app;
    analysis::StaticResult stat;
};

Loaded load(const std::string &name)
{
    auto app = load_corpus_app(name);
    auto stat = analysis::analyze_static(app);
    return {std::move(app), std::move(stat)};
}

engine::ExplorationResult run(const Loaded &l, engine::Strategy s, engine::SearchConfig cfg = {})
{
    cfg.strategy = s;
    if (s == engine::Strategy::Guided)
        cfg.stacks = l.stat.stacks;
    return engine::explore(l.app, l.stat.drivers.at(0), cfg);
}

sql::MiniDb students() { return sql::MiniDb::from_json(read_file(corpus_path("students.json"))); }

std::string c1(Check &c)
{
    auto t0 = Clock::now();
    auto l = load("listing1");
    engine::SearchConfig cfg;
    cfg.seed = 0;
    cfg.solver.nonlinear = sym::Nonlinear::Reject;
    auto r = run(l, engine::Strategy::Dfs, cfg);
    double ms = ms_since(t0);
    const auto *y = r.vars.find({sym::OriginKind::SourceWidget, "ey", Sort::Int, 0, 0});
    c.expect(y != nullptr, "no variable for ey");
    if (!y)
        return {};
    c.expect(r.runs.size() >= 3 && r.solves.size() >= 2, "fewer than 3 runs");
    if (!c.ok)
        return {};
    c.expect(r.runs[0].pc == std::vector<std::string>{y->name + " <= 5"}, "run 1 path condition is not Y<=5");
    c.expect(r.solves[0].status == sym::SolveStatus::Sat && r.solves[0].model.count(y->id) &&
                 r.solves[0].model.at(y->id) == Value{std::int64_t{6}},
        "run 2 model is not Y=6");
    c.expect(r.runs[1].inputs.env.widgets.count("ey") && r.runs[1].inputs.env.widgets.at("ey") == "6",
        "run 2 did not use Y=6");
    c.expect(r.solves[1].status == sym::SolveStatus::Unknown, "negated cube is not Unknown");
    c.expect(r.solves[1].fallback_succeeded && r.solves[1].fallback_tries <= 100, "fallback failed within 100 tries");
    bool flagged = r.runs.size() >= 3 && r.runs[2].origin == engine::RunOrigin::Fallback && !r.reports.empty();
    c.expect(flagged, "flagged statement not reached by the fallback run");
    c.expect(ms < 1000, "took " + std::to_string(ms) + " ms");
    return "Y=" + y->name + ", fallback tries " + std::to_string(r.solves[1].fallback_tries) + ", " +
           std::to_string(static_cast<int>(ms)) + " ms";
}

std::string c2(Check &c)
{
    auto l = load("listing3");
    c.expect(l.stat.drivers.size() == 1, std::to_string(l.stat.drivers.size()) + " drivers");
    if (l.stat.drivers.size() != 1)
        return {};
    const auto &a = l.stat.drivers[0].actions;
    std::vector<Action> want{Action::construct("Main"), Action::lifecycle("Main", ir::LifecycleSlot::OnCreate),
        Action::lifecycle("Main", ir::LifecycleSlot::OnStart), Action::lifecycle("Main", ir::LifecycleSlot::OnResume),
        Action::find_widget("b1"), Action::trigger("b1")};
    c.expect(a == want, "action sequence differs");
    std::string s;
    for (const auto &x : a)
        s += (s.empty() ? "" : ", ") + to_string(x);
    return s;
}

// Then-first rank of the first feasible path that leaks a sink result,
// found by running every input pair from a small domain concretely.
int fig5_dfs_oracle(const Loaded &l)
{
    const std::vector<std::string> dom{"", "a", "x", "q", "aq", "admin"};
    std::map<SidePath, bool> paths;
    ConcreteOptions opt;
    opt.sink_handler = [](const SinkInvocation &) { return std::string("ROWS"); };
    for (const auto &a : dom)
        for (const auto &b : dom) {
            auto t = eval_concrete(l.app, l.stat.drivers.at(0), {{{"e1", a}, {"e2", b}}, {}}, opt);
            SidePath p;
            for (const auto &br : t.branches)
                p.emplace_back(br.site, br.side);
            bool leak = false;
            for (const auto &e : t.leaks)
                leak |= e.payload.find("ROWS") != std::string::npos;
            paths[p] = paths[p] || leak;
        }
    int i = 0;
    for (const auto &[p, leak] : paths) {
        ++i;
        if (leak)
            return i;
    }
    return -1;
}

std::string c3(Check &c)
{
    auto l = load("fig5");
    std::vector<analysis::StackEntry> want{{2, Side::Else}, {3, Side::Then}};
    c.expect(l.stat.stacks.size() == 1 && l.stat.stacks[0].entries == want, "branch stack differs");
    const int pinned = 2;
    int oracle = fig5_dfs_oracle(l);
    c.expect(oracle == pinned, "oracle dfs value " + std::to_string(oracle));
    auto d = run(l, engine::Strategy::Dfs);
    auto g = run(l, engine::Strategy::Guided);
    int dv = d.paths_until_first_detection.value_or(-1);
    int gv = g.paths_until_first_detection.value_or(-1);
    c.expect(dv == pinned, "dfs gave " + std::to_string(dv));
    c.expect(gv == 1, "guided gave " + std::to_string(gv));
    c.expect(gv < dv, "guided not ahead of dfs");
    return "guided=" + std::to_string(gv) + ", dfs=" + std::to_string(dv) + " (oracle " + std::to_string(oracle) + ")";
}

std::string c4(Check &c)
{
    auto v = run(load("listing3"), engine::Strategy::Guided);
    auto p = run(load("listing3_parametric"), engine::Strategy::Guided);
    auto n = run(load("listing3_noleak"), engine::Strategy::Guided);
    c.expect(v.reports.size() == 1, "vulnerable app: " + std::to_string(v.reports.size()) + " reports");
    c.expect(p.reports.empty() && p.protected_sinks.size() == 1, "parametric twin: " +
                                                                     std::to_string(p.reports.size()) + " reports, " +
                                                                     std::to_string(p.protected_sinks.size()) +
                                                                     " protected");
    c.expect(n.reports.empty(), "no-leak twin: " + std::to_string(n.reports.size()) + " reports");
    return "{" + std::to_string(v.reports.size()) + ", " + std::to_string(p.reports.size()) + "+" +
           std::to_string(p.protected_sinks.size()) + " protected, " + std::to_string(n.reports.size()) + "}";
}

std::string c5(Check &c)
{
    auto r = run(load("listing3"), engine::Strategy::Guided);
    c.expect(r.reports.size() == 1, "no report");
    if (r.reports.empty())
        return {};
    auto text = taint::render_report_text(r.reports[0]);
    auto golden = read_file(std::string(CONSICORE_GOLDEN_DIR) + "/listing3_report.txt");
    for (const char *h : {"//STACK TRACE:", "//APP'S INPUTS THAT CAUSE INJECTION VULNERABILITY:",
             "//OBJECT THAT CAUSE LEAKAGE:", "//INPUTS OF VULNERABLE FUNCTION"})
        c.expect(text.find(h) != std::string::npos, std::string("missing heading ") + h);
    c.expect(text.find("R.id.e1//developer sanitizer for this input is OFF") != std::string::npos, "e1 OFF missing");
    c.expect(text.find("setText") != std::string::npos, "setText leak missing");
    const auto &tpl = r.reports[0].query_template;
    std::size_t holes = 0;
    for (auto p = tpl.find('{'); p != std::string::npos; p = tpl.find('{', p + 1))
        ++holes;
    c.expect(holes == 1, std::to_string(holes) + " symbolic holes");
    c.expect(text == golden, "text differs from golden file");
    return "golden match";
}

// Builds the report replay needs for a parametric sink, which the engine
// records as protected rather than reporting.
taint::VulnReport report_for_protected(const ir::MiniApp &app, const taint::ProtectedSink &ps)
{
    taint::VulnReport rep;
    rep.app = app.name;
    rep.sink = ps.sink;
    rep.sink_stmt = ps.sink_stmt;
    rep.stack = ps.stack;
    for (const auto &s : ps.sources)
        rep.inputs.push_back({s.name, s.kind, true});
    for (const auto &comp : app.components)
        for (const auto &f : comp.functions)
            ir::for_each_stmt(f.body, [&](const ir::Stmt &s) {
                if (s.kind == ir::StmtKind::LeakCall)
                    rep.leak = {s.id, LeakChannel::SetText, s.name};
            });
    return rep;
}

std::string c6(Check &c)
{
    auto db = students();
    const auto &all = db.tables.at("student").rows;
    c.expect(all.size() == 2, "fixture does not have 2 rows");
    auto l = load("listing3");
    auto r = run(l, engine::Strategy::Guided);
    c.expect(r.reports.size() == 1, "no report");
    if (r.reports.empty())
        return {};
    auto out = replay::replay(l.app, l.stat.drivers[0], r.reports[0], db);
    c.expect(out.payload == "a' or '1'='1", "payload differs");
    c.expect(out.exploited, "vulnerable app not exploited");
    c.expect(out.attack.rows == all, "injected result is not all rows");
    c.expect(out.honest.rows.empty(), "honest result not empty");

    auto pl = load("listing3_parametric");
    auto pr = run(pl, engine::Strategy::Guided);
    c.expect(pr.protected_sinks.size() == 1, "no protected sink on the twin");
    if (pr.protected_sinks.empty())
        return {};
    auto pout = replay::replay(pl.app, pl.stat.drivers[0], report_for_protected(pl.app, pr.protected_sinks[0]), db);
    c.expect(!pout.exploited && !pout.inconclusive, "parametric twin exploited or inconclusive");
    return "injected " + std::to_string(out.attack.rows.size()) + " rows, honest " +
           std::to_string(out.honest.rows.size()) + "; twin exploited=" + (pout.exploited ? "true" : "false");
}

std::string c7(Check &c)
{
    auto l = load("provider");
    auto r = run(l, engine::Strategy::Guided);
    c.expect(r.reports.size() == 1, std::to_string(r.reports.size()) + " reports");
    if (r.reports.size() != 1)
        return {};
    c.expect(r.reports[0].ipc, "report not IPC-mediated");
    auto out = replay::replay(l.app, l.stat.drivers[0], r.reports[0], students());
    c.expect(out.exploited, "replay did not confirm");
    return "1 IPC report, replay exploited=" + std::string(out.exploited ? "true" : "false");
}

std::string c8(Check &c)
{
    auto t0 = Clock::now();
    ConstraintGenerator gen(8);
    std::mt19937_64 rng(80);
    int sat = 0, unsat = 0, unknown = 0, violations = 0;
    for (int i = 0; i < 1000; ++i) {
        auto cs = gen.next();
        sym::SolverConfig cfg;
        BruteDomain dom;
        const std::int64_t bounds[] = {5, 10, 20};
        const char *alphabets[] = {"ab", "abc", "abcd"};
        dom.int_bound = cfg.int_bound = bounds[rng() % 3];
        dom.alphabet = cfg.alphabet = alphabets[rng() % 3];
        dom.str_maxlen = cfg.str_maxlen = static_cast<int>(rng() % 4) + 1;
        if (dom.alphabet.size() == 4 && dom.str_maxlen == 4)
            dom.str_maxlen = cfg.str_maxlen = 3; // keeps three-string sets enumerable
        auto res = sym::solve(cs.constraints, cfg);
        if (res.status == sym::SolveStatus::Sat) {
            ++sat;
            for (const auto &con : cs.constraints)
                if (!sym::eval_model(con, res.model))
                    ++violations;
        } else if (res.status == sym::SolveStatus::Unsat) {
            ++unsat;
            if (brute_force(cs.constraints, cs.var_sorts, dom))
                ++violations;
        } else {
            ++unknown;
        }
    }
    double ms = ms_since(t0);
    c.expect(violations == 0, std::to_string(violations) + " violations");
    c.expect(ms < 30000, "took " + std::to_string(ms) + " ms");
    return std::to_string(sat) + " sat, " + std::to_string(unsat) + " unsat, " + std::to_string(unknown) +
           " unknown, 0 violations in " + std::to_string(static_cast<int>(ms)) + " ms";
}

Driver click_driver(const std::string &comp, const std::string &button)
{
    return {{Action::construct(comp), Action::lifecycle(comp, ir::LifecycleSlot::OnCreate),
                Action::lifecycle(comp, ir::LifecycleSlot::OnStart),
                Action::lifecycle(comp, ir::LifecycleSlot::OnResume), Action::find_widget(button),
                Action::trigger(button)},
        {}};
}

std::string c9(Check &c)
{
    AppGenerator gen(9);
    int mismatches = 0, total_paths = 0, sites = 0;
    std::string first_bad;
    for (int i = 0; i < 50; ++i) {
        auto g = gen.next(6);
        auto app = ir::parse_app(g.source);
        sites += app.site_count;
        auto drv = click_driver("Main", "b");
        engine::SearchConfig cfg;
        cfg.max_paths = 4096;
        cfg.solver.int_bound = 8;
        cfg.solver.alphabet = "abz";
        cfg.solver.str_maxlen = 4;
        auto r = engine::explore(app, drv, cfg);
        std::set<SidePath> got;
        for (const auto &p : r.paths) {
            SidePath s;
            for (const auto &b : p.branches)
                s.emplace_back(b.site, b.side);
            got.insert(s);
        }
        auto want = brute_force_paths(app, drv, g, 8, "abz", 4);
        total_paths += static_cast<int>(want.size());
        if (got != want || got.size() != r.paths.size() || !r.tree_exhausted) {
            ++mismatches;
            if (first_bad.empty())
                first_bad = "app " + std::to_string(i) + ": engine " + std::to_string(got.size()) + " paths, oracle " +
                            std::to_string(want.size());
        }
    }
    c.expect(mismatches == 0, std::to_string(mismatches) + " mismatches (" + first_bad + ")");
    return "50 apps, " + std::to_string(sites) + " sites, " + std::to_string(total_paths) + " feasible paths";
}

std::string c10(Check &c)
{
    std::string out;
    int prev_dfs = 0;
    for (int n : {1, 2, 4, 8, 16, 32}) {
        auto app = ir::parse_app(else_chain_app(n));
        auto stat = analysis::analyze_static(app);
        Loaded l{app, stat};
        engine::SearchConfig cfg;
        cfg.max_paths = 1024;
        auto d = run(l, engine::Strategy::Dfs, cfg);
        auto g = run(l, engine::Strategy::Guided, cfg);
        int dv = d.paths_until_first_detection.value_or(-1);
        int gv = g.paths_until_first_detection.value_or(-1);
        c.expect(gv >= 1 && gv <= 2, "n=" + std::to_string(n) + ": guided " + std::to_string(gv));
        c.expect(dv > prev_dfs, "n=" + std::to_string(n) + ": dfs did not grow (" + std::to_string(dv) + ")");
        prev_dfs = dv;
        out += (out.empty() ? "" : " ") + std::to_string(n) + ":" + std::to_string(gv) + "/" + std::to_string(dv);
    }
    return "sites:guided/dfs " + out;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<std::string(Check &)>>> criteria{
        {"concolic worked example", c1}, {"driver synthesis", c2}, {"guided search", c3},
        {"detection policy", c4}, {"report format", c5}, {"exploit replay", c6}, {"IPC path", c7},
        {"solver soundness", c8}, {"tree equivalence", c9}, {"scaling sanity", c10}};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        std::string detail;
        try {
            detail = criteria[i].second(c);
        } catch (const std::exception &e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::cout << (c.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first;
        if (!c.ok)
            std::cout << ": " << c.why.str();
        else if (!detail.empty())
            std::cout << " (" << detail << ")";
        std::cout << "\n";
        failed += !c.ok;
    }
    return failed ? 1 : 0;
}
