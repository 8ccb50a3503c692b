#include "consicore/engine.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <random>
#include <tuple>

namespace consicore::engine {

std::string_view to_string(Strategy s) { return s == Strategy::Dfs ? "dfs" : "guided"; }

Strategy parse_strategy(std::string_view s)
{
    if (s == "dfs")
        return Strategy::Dfs;
    if (s == "guided")
        return Strategy::Guided;
    throw std::invalid_argument("unknown strategy '" + std::string(s) + "' (expected dfs or guided)");
}

std::string_view to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Superseded: return "superseded";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::Duplicate: return "duplicate";
    }
    return "?";
}

std::string_view to_string(RunOrigin o)
{
    switch (o) {
    case RunOrigin::Initial: return "initial";
    case RunOrigin::Solved: return "solved";
    case RunOrigin::Fallback: return "fallback";
    }
    return "?";
}

void validate(const SearchConfig &cfg)
{
    if (cfg.max_paths < 1)
        throw ConfigError("max_paths must be at least 1");
    if (cfg.max_fallback_tries < 0)
        throw ConfigError("max_fallback_tries must not be negative");
    if (cfg.max_runs < 0)
        throw ConfigError("max_runs must not be negative");
    if (cfg.coverage_target && (*cfg.coverage_target < 0.0 || *cfg.coverage_target > 1.0))
        throw ConfigError("coverage target must lie in [0, 1]");
    if (cfg.strategy == Strategy::Guided && cfg.stacks.empty())
        throw ConfigError("guided search needs at least one branch stack");
    try {
        sym::validate(cfg.solver);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
}

std::vector<ir::Side> preferred_sides(const std::vector<BranchEvent> &branches, const SearchConfig &cfg,
    std::vector<std::size_t> *matched)
{
    std::vector<ir::Side> out(branches.size(), ir::Side::Then);
    std::vector<std::size_t> pos(cfg.stacks.size(), 0);
    std::vector<bool> active(cfg.stacks.size(), true);
    if (cfg.strategy == Strategy::Guided) {
        for (std::size_t i = 0; i < branches.size(); ++i) {
            const auto &ev = branches[i];
            bool chosen = false;
            for (std::size_t j = 0; j < cfg.stacks.size(); ++j) {
                const auto &entries = cfg.stacks[j].entries;
                if (!active[j] || pos[j] >= entries.size() || entries[pos[j]].site != ev.site)
                    continue;
                if (!chosen) {
                    out[i] = entries[pos[j]].side;
                    chosen = true;
                }
                if (entries[pos[j]].side == ev.side)
                    ++pos[j];
                else
                    active[j] = false;
            }
        }
    }
    if (matched)
        *matched = pos;
    return out;
}

std::size_t pick_next_branch(const std::vector<FrontierEntry> &frontier)
{
    if (frontier.empty())
        throw std::invalid_argument("pick_next_branch: empty frontier");
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < frontier.size(); ++i)
        if (frontier[i].preferred && (!best || frontier[i].index < frontier[*best].index))
            best = i;
    return best.value_or(frontier.size() - 1);
}

namespace {

using Decisions = std::vector<std::pair<int, ir::Side>>;

Decisions decisions_of(const sym::PathCondition &pc)
{
    Decisions d;
    for (const auto &e : pc)
        d.emplace_back(e.site, e.side);
    return d;
}

Decisions child_of(const sym::PathCondition &pc, std::size_t k)
{
    Decisions d;
    for (std::size_t i = 0; i < k; ++i)
        d.emplace_back(pc[i].site, pc[i].side);
    d.emplace_back(pc[k].site, ir::opposite(pc[k].side));
    return d;
}

bool has_prefix(const Decisions &d, const Decisions &prefix)
{
    return d.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), d.begin());
}

std::string render(const Decisions &d)
{
    std::string out = "[";
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i)
            out += ", ";
        out += std::to_string(d[i].first) + ":" + std::string(ir::to_string(d[i].second));
    }
    return out + "]";
}

std::vector<std::string> render_pc(const sym::PathCondition &pc)
{
    std::vector<std::string> out;
    for (const auto &e : pc)
        out.push_back(sym::to_string(e.constraint));
    return out;
}

void apply_model(RunInputs &in, const sym::Model &model, const sym::VarTable &vars)
{
    std::set<std::string> str_widgets;
    for (const auto &[id, v] : model) {
        const auto &o = vars.at(id).origin;
        if (o.kind == sym::OriginKind::SourceWidget && o.sort == Sort::Str)
            str_widgets.insert(o.name);
    }
    for (const auto &[id, v] : model) {
        const auto &o = vars.at(id).origin;
        switch (o.kind) {
        case sym::OriginKind::SourceWidget:
            if (o.sort == Sort::Str)
                in.env.widgets[o.name] = std::get<std::string>(v);
            else if (!str_widgets.count(o.name))
                in.env.widgets[o.name] = std::to_string(std::get<std::int64_t>(v));
            break;
        case sym::OriginKind::ProviderArg: in.env.provider_args[o.name] = std::get<std::string>(v); break;
        case sym::OriginKind::SinkResult: in.sink_results[{o.stmt_id, o.occurrence}] = std::get<std::string>(v); break;
        }
    }
}

class Explorer {
public:
    Explorer(const ir::MiniApp &app, const Driver &driver, const SearchConfig &cfg)
        : app_(app), driver_(driver), cfg_(cfg), rng_(cfg.seed)
    {
        max_runs_ = cfg.max_runs > 0 ? cfg.max_runs : 16 * cfg.max_paths + 64;
        best_match_.assign(cfg.stacks.size(), 0);
    }

    ExplorationResult run()
    {
        auto t0 = std::chrono::steady_clock::now();
        RunInputs inputs = initial_inputs();
        RunOrigin origin = RunOrigin::Initial;
        int tries = 0;
        std::optional<Decisions> target;
        int target_depth = -1;

        while (true) {
            if (static_cast<int>(res_.runs.size()) >= max_runs_) {
                res_.diagnostics.push_back("run budget of " + std::to_string(max_runs_) + " exhausted");
                break;
            }
            auto run = std::make_shared<RunResult>(run_concolic(app_, driver_, inputs, res_.vars));
            const int run_no = static_cast<int>(res_.runs.size()) + 1;
            RunLogEntry log{run_no, run->inputs, render_pc(run->pc), RunStatus::Completed, origin, tries, target_depth};
            for (const auto &v : run->pairing_violations)
                res_.diagnostics.push_back("run " + std::to_string(run_no) + ": symbolic/concrete mismatch at " + v);

            const Decisions dec = decisions_of(run->pc);
            bool diverged = false;
            if (target && !has_prefix(dec, *target)) {
                diverged = true;
                closed_.insert(*target);
                res_.diagnostics.push_back("run " + std::to_string(run_no) + " diverged from target " + render(*target));
            }

            std::vector<std::size_t> matched;
            auto prefs = preferred_sides(run->branches, cfg_, &matched);
            for (std::size_t j = 0; j < matched.size(); ++j)
                best_match_[j] = std::max(best_match_[j], matched[j]);

            // Preferred entries: unexplored preferred sides below the target depth.
            const std::size_t start = target && !diverged ? target->size() : 0;
            std::vector<FrontierEntry> preferred;
            for (std::size_t i = 0; i < run->branches.size(); ++i) {
                const auto &ev = run->branches[i];
                if (!ev.symbolic || prefs[i] == ev.side)
                    continue;
                auto k = static_cast<std::size_t>(ev.pc_index);
                if (k >= start && open(child_of(run->pc, k)))
                    preferred.push_back({&run->pc, k, true});
            }
            std::optional<Next> next;
            while (!preferred.empty() && !next) {
                std::size_t p = pick_next_branch(preferred);
                next = realize(*run, run_no, preferred[p].index);
                if (!next) {
                    closed_.insert(child_of(run->pc, preferred[p].index));
                    preferred.erase(preferred.begin() + static_cast<std::ptrdiff_t>(p));
                }
            }
            if (next) {
                log.status = diverged ? RunStatus::Diverged : RunStatus::Superseded;
                res_.runs.push_back(std::move(log));
                std::tie(inputs, origin, tries, target, target_depth) = *next;
                continue;
            }

            if (completed_.count(dec)) {
                log.status = RunStatus::Duplicate;
                res_.runs.push_back(std::move(log));
            } else {
                log.status = diverged ? RunStatus::Diverged : RunStatus::Completed;
                res_.runs.push_back(std::move(log));
                record_path(run, run_no, dec);
                if (stop())
                    break;
            }

            next.reset();
            while (!next && !backtrack_.empty()) {
                std::vector<FrontierEntry> frontier;
                for (const auto &b : backtrack_)
                    frontier.push_back({&b.run->pc, b.index, false});
                std::size_t p = pick_next_branch(frontier);
                Pending b = backtrack_[p];
                backtrack_.erase(backtrack_.begin() + static_cast<std::ptrdiff_t>(p));
                Decisions child = child_of(b.run->pc, b.index);
                if (!open(child))
                    continue;
                next = realize(*b.run, b.run_no, b.index);
                if (!next)
                    closed_.insert(child);
            }
            if (!next) {
                res_.tree_exhausted = true;
                break;
            }
            std::tie(inputs, origin, tries, target, target_depth) = *next;
        }

        if (cfg_.strategy == Strategy::Guided)
            for (std::size_t j = 0; j < cfg_.stacks.size(); ++j) {
                const auto &st = cfg_.stacks[j];
                if (best_match_[j] < st.entries.size()) {
                    const auto &e = st.entries[best_match_[j]];
                    res_.diagnostics.push_back("branch stack " + std::to_string(j + 1) + " (sink statement " +
                                               std::to_string(st.sink_stmt) + "): entry " + std::to_string(e.site) +
                                               ":" + std::string(ir::to_string(e.side)) + " was never matched");
                }
            }
        res_.coverage = app_.stmt_count == 0 ? 1.0
                                             : static_cast<double>(res_.covered.size()) / app_.stmt_count;
        res_.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return std::move(res_);
    }

private:
    using Next = std::tuple<RunInputs, RunOrigin, int, std::optional<Decisions>, int>;

    struct Pending {
        std::shared_ptr<RunResult> run;
        int run_no = 0;
        std::size_t index = 0;
    };

    bool open(const Decisions &d) const { return !explored_.count(d) && !closed_.count(d); }

    RunInputs initial_inputs()
    {
        RunInputs in;
        if (!cfg_.random_init)
            return in;
        for (const auto &c : app_.components) {
            for (const auto &w : c.widgets)
                if (w.kind == ir::WidgetKind::EditBox)
                    in.env.widgets[w.id] = random_string();
            if (c.kind == ir::ComponentKind::Provider)
                in.env.provider_args[c.name] = random_string();
        }
        return in;
    }

    std::string random_string()
    {
        const auto &alpha = cfg_.solver.alphabet;
        std::uniform_int_distribution<int> len(0, cfg_.solver.str_maxlen);
        std::uniform_int_distribution<std::size_t> pick(0, alpha.size() - 1);
        std::string s(static_cast<std::size_t>(len(rng_)), ' ');
        for (auto &ch : s)
            ch = alpha[pick(rng_)];
        return s;
    }

    Value random_value(Sort sort)
    {
        if (sort == Sort::Str)
            return random_string();
        std::uniform_int_distribution<std::int64_t> d(-cfg_.solver.int_bound, cfg_.solver.int_bound);
        return d(rng_);
    }

    std::optional<Next> realize(const RunResult &run, int run_no, std::size_t k)
    {
        auto cs = sym::negate_last(run.pc, k);
        SolveLogEntry log;
        log.after_run = run_no;
        log.index = k;
        for (const auto &c : cs)
            log.constraints.push_back(sym::to_string(c));
        sym::SolveResult r;
        try {
            r = sym::solve(cs, cfg_.solver);
        } catch (const sym::SortError &e) {
            r.status = sym::SolveStatus::Unknown;
            r.reason = e.what();
        }
        log.status = r.status;
        log.reason = r.reason;
        log.model = r.model;
        const Decisions child = child_of(run.pc, k);

        std::optional<Next> out;
        if (r.status == sym::SolveStatus::Sat) {
            RunInputs in = run.inputs;
            apply_model(in, r.model, res_.vars);
            out = Next{std::move(in), RunOrigin::Solved, 0, child, static_cast<int>(k)};
        } else if (r.status == sym::SolveStatus::Unknown) {
            log.fallback = true;
            auto model = fallback(run, cs, log.fallback_tries);
            if (model) {
                log.fallback_succeeded = true;
                log.model = *model;
                RunInputs in = run.inputs;
                apply_model(in, *model, res_.vars);
                out = Next{std::move(in), RunOrigin::Fallback, log.fallback_tries, child, static_cast<int>(k)};
            }
        }
        res_.solves.push_back(std::move(log));
        return out;
    }

    // Randomizes the variables that only the negated constraint mentions,
    // keeping the run's concrete values elsewhere so the prefix stays true.
    std::optional<sym::Model> fallback(const RunResult &run, const std::vector<sym::Constraint> &cs, int &tries)
    {
        std::set<int> own = sym::vars_of(cs.back());
        std::set<int> prefix;
        for (std::size_t i = 0; i + 1 < cs.size(); ++i)
            sym::collect_vars(cs[i], prefix);
        std::vector<int> pick;
        for (int v : own)
            if (!prefix.count(v))
                pick.push_back(v);
        if (pick.empty())
            pick.assign(own.begin(), own.end());
        for (tries = 1; tries <= cfg_.max_fallback_tries; ++tries) {
            sym::Model m = run.concrete_model;
            for (int v : pick)
                m[v] = random_value(res_.vars.at(v).sort);
            bool ok = true;
            for (const auto &c : cs) {
                try {
                    if (!sym::eval_model(c, m)) {
                        ok = false;
                        break;
                    }
                } catch (const sym::EvalError &) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                sym::Model used;
                for (int v : pick)
                    used[v] = m[v];
                return used;
            }
        }
        tries = cfg_.max_fallback_tries;
        return std::nullopt;
    }

    void record_path(const std::shared_ptr<RunResult> &run, int run_no, const Decisions &dec)
    {
        completed_.insert(dec);
        for (std::size_t i = 1; i <= dec.size(); ++i)
            explored_.insert(Decisions(dec.begin(), dec.begin() + static_cast<std::ptrdiff_t>(i)));

        ExploredPath p;
        p.index = static_cast<int>(res_.paths.size()) + 1;
        p.run = run_no;
        p.branches = run->branches;
        p.pc = run->pc;
        p.model = run->concrete_model;
        p.inputs = run->inputs;
        p.trace = run->trace;
        p.reports = run->reports.size();
        p.error = run->error;
        if (run->error)
            res_.diagnostics.push_back("path " + std::to_string(p.index) + ": " + *run->error);
        res_.covered.insert(run->trace.begin(), run->trace.end());

        for (const auto &c : run->candidates)
            candidate_stmts_.insert(c.sink_stmt);
        res_.candidates = candidate_stmts_.size();
        for (const auto &ps : run->protected_sinks)
            if (std::none_of(res_.protected_sinks.begin(), res_.protected_sinks.end(),
                    [&](const taint::ProtectedSink &o) { return o.sink_stmt == ps.sink_stmt && o.stack == ps.stack; }))
                res_.protected_sinks.push_back(ps);
        for (const auto &r : run->reports) {
            if (std::any_of(res_.reports.begin(), res_.reports.end(),
                    [&](const taint::VulnReport &o) { return taint::same_chain(o, r); }))
                continue;
            auto copy = r;
            copy.witness = run->inputs.env;
            res_.reports.push_back(std::move(copy));
        }
        if (!run->reports.empty() && !res_.paths_until_first_detection)
            res_.paths_until_first_detection = p.index;
        res_.paths.push_back(std::move(p));

        for (std::size_t k = 0; k < run->pc.size(); ++k)
            if (open(child_of(run->pc, k)))
                backtrack_.push_back({run, run_no, k});
    }

    bool stop()
    {
        if (static_cast<int>(res_.paths.size()) >= cfg_.max_paths) {
            res_.diagnostics.push_back("path budget of " + std::to_string(cfg_.max_paths) + " reached");
            return true;
        }
        if (cfg_.first_hit && !res_.reports.empty())
            return true;
        if (cfg_.coverage_target && app_.stmt_count > 0 &&
            static_cast<double>(res_.covered.size()) / app_.stmt_count >= *cfg_.coverage_target)
            return true;
        return false;
    }

    const ir::MiniApp &app_;
    const Driver &driver_;
    const SearchConfig &cfg_;
    std::mt19937_64 rng_;
    int max_runs_ = 0;
    ExplorationResult res_;
    std::set<Decisions> explored_, closed_, completed_;
    std::vector<Pending> backtrack_;
    std::vector<std::size_t> best_match_;
    std::set<int> candidate_stmts_;
};

} // namespace

ExplorationResult explore(const ir::MiniApp &app, const Driver &driver, const SearchConfig &cfg)
{
    validate(cfg);
    validate_driver(app, driver);
    return Explorer(app, driver, cfg).run();
}

} // namespace consicore::engine
