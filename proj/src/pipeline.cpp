#include "consicore/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace consicore::pipeline {

namespace fs = std::filesystem;

std::optional<int> AppAnalysis::paths_until_first_detection() const
{
    int before = 0;
    for (const auto &r : runs) {
        if (r.exploration.paths_until_first_detection)
            return before + *r.exploration.paths_until_first_detection;
        before += static_cast<int>(r.exploration.paths.size());
    }
    return std::nullopt;
}

double AppAnalysis::coverage() const
{
    if (!parsed || parsed->stmt_count == 0)
        return runs.empty() ? 0.0 : 1.0;
    std::set<int> covered;
    for (const auto &r : runs)
        covered.insert(r.exploration.covered.begin(), r.exploration.covered.end());
    return static_cast<double>(covered.size()) / parsed->stmt_count;
}

double AppAnalysis::wall_ms() const
{
    double t = 0;
    for (const auto &r : runs)
        t += r.exploration.wall_ms;
    return t;
}

AppAnalysis analyze_app(const ir::MiniApp &app, const AnalyzeOptions &opt)
{
    AppAnalysis out;
    out.app = app.name;
    out.parsed = app;
    out.stat = analysis::analyze_static(app);
    out.notes = out.stat.notes;
    if (out.stat.drivers.empty()) {
        out.skipped = true;
        return out;
    }
    if (opt.static_only)
        return out;

    engine::SearchConfig cfg = opt.search;
    if (cfg.strategy == engine::Strategy::Guided) {
        cfg.stacks = out.stat.stacks;
        if (cfg.stacks.empty()) {
            cfg.strategy = engine::Strategy::Dfs;
            out.notes.push_back("no branch stacks were extracted; exploring with dfs");
        }
    }
    for (std::size_t i = 0; i < out.stat.drivers.size(); ++i) {
        DriverRun run{static_cast<int>(i), engine::explore(app, out.stat.drivers[i], cfg)};
        for (auto rep : run.exploration.reports) {
            rep.driver = run.driver;
            if (std::none_of(out.reports.begin(), out.reports.end(),
                    [&](const taint::VulnReport &o) { return taint::same_chain(o, rep); }))
                out.reports.push_back(std::move(rep));
        }
        out.runs.push_back(std::move(run));
        if (cfg.first_hit && !out.reports.empty())
            break;
    }
    if (opt.db) {
        for (auto &rep : out.reports) {
            auto outcome = replay::replay(app, out.stat.drivers.at(static_cast<std::size_t>(rep.driver)), rep, *opt.db,
                opt.replay);
            rep.confirmed = outcome.exploited;
            out.replays.push_back(std::move(outcome));
        }
    }
    return out;
}

std::string read_text(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

AppAnalysis analyze_file(const std::string &path, const AnalyzeOptions &opt)
{
    AppAnalysis out;
    try {
        out = analyze_app(ir::parse_app(read_text(path)), opt);
    } catch (const ir::ParseError &e) {
        out.error = path + ":" + std::to_string(e.pos().line) + ":" + std::to_string(e.pos().column) + ": " +
                    e.detail();
    } catch (const std::exception &e) {
        out.error = path + ": " + e.what();
    }
    out.source = path;
    if (out.app.empty())
        out.app = fs::path(path).stem().string();
    return out;
}

std::vector<std::string> corpus_files(const std::string &dir)
{
    std::vector<std::string> out;
    for (const auto &e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".mapp")
            out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace consicore::pipeline
