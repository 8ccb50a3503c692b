// consicore: analyze, replay and bench front end.

#include "consicore/pipeline.hpp"
#include "consicore/serialize.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace consicore;

namespace {

enum Exit { kClean = 0, kError = 1, kDetected = 2, kInconclusive = 3 };

struct SearchFlags {
    std::string strategy = "guided";
    int max_paths = 256;
    std::uint64_t seed = 0;
    bool first_hit = false;
    std::int64_t int_bound = 1000;
    int str_maxlen = 16;
    std::string nonlinear = "reject";
};

void add_search_flags(CLI::App &cmd, SearchFlags &f, bool with_strategy)
{
    if (with_strategy)
        cmd.add_option("--strategy", f.strategy, "dfs or guided")->check(CLI::IsMember({"dfs", "guided"}));
    cmd.add_option("--max-paths", f.max_paths, "path budget per driver")->check(CLI::PositiveNumber);
    cmd.add_option("--seed", f.seed, "RNG seed for random fallback (default $CONSICORE_SEED or 0)");
    cmd.add_flag("--first-hit", f.first_hit, "stop at the first detection");
    cmd.add_option("--int-bound", f.int_bound, "integer search bound B")->check(CLI::NonNegativeNumber);
    cmd.add_option("--str-maxlen", f.str_maxlen, "string length bound L")->check(CLI::NonNegativeNumber);
    cmd.add_option("--nonlinear", f.nonlinear, "reject or enumerate")->check(CLI::IsMember({"reject", "enumerate"}));
}

engine::SearchConfig search_config(const SearchFlags &f)
{
    engine::SearchConfig cfg;
    cfg.strategy = engine::parse_strategy(f.strategy);
    cfg.max_paths = f.max_paths;
    cfg.seed = f.seed;
    cfg.first_hit = f.first_hit;
    cfg.solver.int_bound = f.int_bound;
    cfg.solver.str_maxlen = f.str_maxlen;
    cfg.solver.nonlinear = f.nonlinear == "enumerate" ? sym::Nonlinear::Enumerate : sym::Nonlinear::Reject;
    return cfg;
}

void write_file(const fs::path &p, const std::string &text)
{
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + p.string());
    out << text;
}

void write_json(const fs::path &p, const io::Json &j) { write_file(p, j.dump(2) + "\n"); }

std::vector<std::string> gather(const std::vector<std::string> &apps, const std::string &corpus)
{
    std::vector<std::string> out = apps;
    if (!corpus.empty())
        for (auto &f : pipeline::corpus_files(corpus))
            out.push_back(std::move(f));
    return out;
}

// Subdirectory per app, unique even when two files share a stem.
std::vector<std::string> app_dirs(const std::vector<std::string> &files)
{
    std::vector<std::string> out;
    std::map<std::string, int> seen;
    for (const auto &f : files) {
        std::string stem = fs::path(f).stem().string();
        int n = seen[stem]++;
        out.push_back(n ? stem + "_" + std::to_string(n + 1) : stem);
    }
    return out;
}

io::Json summary_json(const pipeline::AppAnalysis &a)
{
    io::Json j{{"app", a.app}, {"source", a.source}};
    if (a.error) {
        j["status"] = "error";
        j["error"] = *a.error;
        return j;
    }
    j["status"] = a.skipped ? "skipped" : a.reports.empty() ? "clean" : "vulnerable";
    j["drivers"] = a.stat.drivers.size();
    j["stacks"] = a.stat.stacks.size();
    j["reports"] = a.reports.size();
    io::Json confirmed = io::Json::array();
    for (const auto &r : a.reports)
        confirmed.push_back(r.confirmed);
    j["confirmed"] = confirmed;
    int paths = 0;
    for (const auto &r : a.runs)
        paths += static_cast<int>(r.exploration.paths.size());
    j["paths_explored"] = paths;
    auto first = a.paths_until_first_detection();
    j["paths_until_first_detection"] = first ? io::Json(*first) : io::Json();
    j["coverage"] = a.coverage();
    j["notes"] = a.notes;
    j["wall_ms"] = a.wall_ms();
    return j;
}

int cmd_analyze(const std::vector<std::string> &files, const std::string &out_dir,
    const pipeline::AnalyzeOptions &opt)
{
    if (files.empty()) {
        std::cerr << "analyze: no apps given\n";
        return kError;
    }
    bool error = false, detected = false;
    auto dirs = app_dirs(files);
    io::Json index = io::Json::array();
    for (std::size_t i = 0; i < files.size(); ++i) {
        auto a = pipeline::analyze_file(files[i], opt);
        const fs::path dir = fs::path(out_dir) / dirs[i];
        if (a.error) {
            error = true;
            std::cout << a.app << ": error: " << *a.error << "\n";
        } else {
            write_json(dir / "static" / "callgraph.json", io::to_json(a.stat.cg));
            write_json(dir / "static" / "icfg.json", io::to_json(a.stat.icfg));
            write_json(dir / "static" / "drivers.json", io::drivers_json(a.stat.drivers));
            write_json(dir / "static" / "stacks.json", io::stacks_json(a.stat.stacks));
            for (const auto &r : a.runs)
                write_json(dir / ("exploration_" + std::to_string(r.driver) + ".json"), io::to_json(r.exploration));
            for (std::size_t k = 0; k < a.reports.size(); ++k) {
                auto rendered = io::render_report(a.reports[k]);
                write_file(dir / ("report_" + std::to_string(k + 1) + ".txt"), rendered.text);
                write_file(dir / ("report_" + std::to_string(k + 1) + ".json"), rendered.json);
                if (k < a.replays.size())
                    write_json(dir / ("replay_" + std::to_string(k + 1) + ".json"), io::to_json(a.replays[k]));
            }
            if (a.skipped)
                std::cout << a.app << ": skipped: no vulnerable functions reachable from an entry point\n";
            else if (opt.static_only)
                std::cout << a.app << ": " << a.stat.drivers.size() << " driver(s), " << a.stat.stacks.size()
                          << " branch stack(s)\n";
            else
                std::cout << a.app << ": " << a.reports.size() << " report(s)\n";
            detected |= !a.reports.empty();
        }
        auto s = summary_json(a);
        write_json(dir / "summary.json", s);
        s["dir"] = dirs[i];
        index.push_back(std::move(s));
    }
    write_json(fs::path(out_dir) / "summary.json", index);
    return error ? kError : detected ? kDetected : kClean;
}

int cmd_replay(const std::string &app_path, const std::string &report_path, const std::string &db_path,
    const replay::ReplayOptions &opt, const std::string &out)
{
    auto app = ir::parse_app(pipeline::read_text(app_path));
    auto report = io::report_from_json(io::Json::parse(pipeline::read_text(report_path)));
    if (report.app != app.name)
        throw std::runtime_error("report belongs to app '" + report.app + "', not '" + app.name + "'");
    auto stat = analysis::analyze_static(app);
    if (report.driver < 0 || static_cast<std::size_t>(report.driver) >= stat.drivers.size())
        throw std::runtime_error("report names driver " + std::to_string(report.driver) + " but the app has " +
                                 std::to_string(stat.drivers.size()));
    auto db = sql::MiniDb::from_json(pipeline::read_text(db_path));
    auto outcome = replay::replay(app, stat.drivers[static_cast<std::size_t>(report.driver)], report, db, opt);
    auto j = io::to_json(outcome);
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json(fs::path(out) / "replay.json", j);
    std::cerr << (outcome.inconclusive ? "inconclusive" : outcome.exploited ? "exploited" : "not exploited") << ": "
              << outcome.note << "\n";
    return outcome.inconclusive ? kInconclusive : outcome.exploited ? kDetected : kClean;
}

std::string fmt(double v, int prec)
{
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(prec) << v;
    return ss.str();
}

int cmd_bench(const std::vector<std::string> &files, const std::string &out_dir, const pipeline::AnalyzeOptions &base)
{
    if (files.empty()) {
        std::cerr << "bench: no apps given\n";
        return kError;
    }
    std::vector<std::vector<std::string>> rows;
    bool error = false;
    for (const auto &f : files) {
        for (auto strategy : {engine::Strategy::Dfs, engine::Strategy::Guided}) {
            auto opt = base;
            opt.search.strategy = strategy;
            auto a = pipeline::analyze_file(f, opt);
            if (a.error) {
                error = true;
                std::cerr << a.app << ": error: " << *a.error << "\n";
                break;
            }
            int paths = 0;
            for (const auto &r : a.runs)
                paths += static_cast<int>(r.exploration.paths.size());
            auto first = a.paths_until_first_detection();
            rows.push_back({a.app, std::string(engine::to_string(strategy)), std::to_string(a.stat.drivers.size()),
                std::to_string(paths), first ? std::to_string(*first) : "-", fmt(a.coverage(), 3),
                fmt(a.wall_ms(), 2), std::to_string(a.reports.size())});
        }
    }
    const std::vector<std::string> head{"app", "strategy", "drivers", "paths", "first_detection", "coverage",
        "time_ms", "reports"};
    std::vector<std::size_t> width(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        width[c] = head[c].size();
        for (const auto &r : rows)
            width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string> &r) {
        std::string s;
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c)
                s += "  ";
            s += c < 2 ? r[c] + std::string(width[c] - r[c].size(), ' ') : std::string(width[c] - r[c].size(), ' ') + r[c];
        }
        while (!s.empty() && s.back() == ' ')
            s.pop_back();
        return s + "\n";
    };
    std::string table = line(head);
    for (const auto &r : rows)
        table += line(r);
    std::cout << table;
    if (!out_dir.empty()) {
        std::string csv;
        auto csv_line = [](const std::vector<std::string> &r) {
            std::string s;
            for (std::size_t c = 0; c < r.size(); ++c)
                s += (c ? "," : "") + r[c];
            return s + "\n";
        };
        csv += csv_line(head);
        for (const auto &r : rows)
            csv += csv_line(r);
        write_file(fs::path(out_dir) / "bench.csv", csv);
        write_file(fs::path(out_dir) / "bench.txt", table);
    }
    return error ? kError : kClean;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App cli{"Concolic SQL-injection detection for mini-apps"};
    cli.require_subcommand(1);

    std::uint64_t env_seed = 0;
    if (const char *s = std::getenv("CONSICORE_SEED")) {
        try {
            env_seed = std::stoull(s);
        } catch (const std::exception &) {
            std::cerr << "CONSICORE_SEED must be a non-negative integer\n";
            return kError;
        }
    }

    SearchFlags analyze_flags, bench_flags;
    analyze_flags.seed = bench_flags.seed = env_seed;
    std::vector<std::string> apps, bench_apps;
    std::string out_dir = "consicore-out", corpus, db_path, bench_corpus, bench_out;
    std::string payload = replay::kDefaultPayload;
    bool payload_all = false, emit_static = false;

    auto *analyze = cli.add_subcommand("analyze", "detect injection vulnerabilities");
    analyze->add_option("apps", apps, "app files (.mapp)");
    analyze->add_option("--corpus", corpus, "directory of .mapp files")->check(CLI::ExistingDirectory);
    analyze->add_option("--out", out_dir, "output directory");
    add_search_flags(*analyze, analyze_flags, true);
    analyze->add_option("--db", db_path, "database fixture; replays every report")->check(CLI::ExistingFile);
    analyze->add_option("--payload", payload, "attack payload for replay");
    analyze->add_flag("--payload-all", payload_all, "inject the payload into every reported input");
    analyze->add_flag("--emit-static", emit_static, "stop after static analysis");

    std::string replay_app, report_path, replay_db, replay_out;
    std::string replay_payload = replay::kDefaultPayload;
    bool replay_all = false;
    auto *rep = cli.add_subcommand("replay", "confirm a report with an attack payload");
    rep->add_option("app", replay_app, "app file (.mapp)")->required()->check(CLI::ExistingFile);
    rep->add_option("--report", report_path, "report JSON written by analyze")->required()->check(CLI::ExistingFile);
    rep->add_option("--db", replay_db, "database fixture")->required()->check(CLI::ExistingFile);
    rep->add_option("--payload", replay_payload, "attack payload");
    rep->add_flag("--payload-all", replay_all, "inject the payload into every reported input");
    rep->add_option("--out", replay_out, "write replay.json here instead of stdout");

    auto *bench = cli.add_subcommand("bench", "compare dfs and guided search");
    bench->add_option("apps", bench_apps, "app files (.mapp)");
    bench->add_option("--corpus", bench_corpus, "directory of .mapp files")->check(CLI::ExistingDirectory);
    bench->add_option("--out", bench_out, "write bench.csv and bench.txt here");
    add_search_flags(*bench, bench_flags, false);

    CLI11_PARSE(cli, argc, argv);

    try {
        if (*analyze) {
            pipeline::AnalyzeOptions opt;
            opt.search = search_config(analyze_flags);
            // stacks come from each app, so check the budgets only
            auto budgets = opt.search;
            budgets.strategy = engine::Strategy::Dfs;
            engine::validate(budgets);
            opt.static_only = emit_static;
            opt.replay.payload = payload;
            opt.replay.payload_all = payload_all;
            if (!db_path.empty())
                opt.db = sql::MiniDb::from_json(pipeline::read_text(db_path));
            return cmd_analyze(gather(apps, corpus), out_dir, opt);
        }
        if (*rep)
            return cmd_replay(replay_app, report_path, replay_db, {replay_payload, replay_all}, replay_out);
        if (*bench) {
            pipeline::AnalyzeOptions opt;
            opt.search = search_config(bench_flags);
            return cmd_bench(gather(bench_apps, bench_corpus), bench_out, opt);
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
