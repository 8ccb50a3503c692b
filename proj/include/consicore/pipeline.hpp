#pragma once

// Per-app pipeline: parse, static analysis, concolic exploration of every
// driver, detection and optional replay.

#include "consicore/engine.hpp"
#include "consicore/replay.hpp"
#include "consicore/static_analysis.hpp"

#include <optional>
#include <string>
#include <vector>

namespace consicore::pipeline {

struct AnalyzeOptions {
    engine::SearchConfig search; // stacks are filled in per app
    bool static_only = false;
    std::optional<sql::MiniDb> db; // replay every report when set
    replay::ReplayOptions replay;
};

struct DriverRun {
    int driver = 0;
    engine::ExplorationResult exploration;
};

struct AppAnalysis {
    std::string source; // file path, or "" for in-memory apps
    std::string app;
    std::optional<std::string> error;
    std::optional<ir::MiniApp> parsed;
    analysis::StaticResult stat;
    std::vector<DriverRun> runs;
    std::vector<taint::VulnReport> reports; // deduplicated across drivers
    std::vector<replay::ReplayOutcome> replays; // parallel to reports when a db is set
    std::vector<std::string> notes;
    bool skipped = false; // no drivers

    /// Paths completed before the first report, counting drivers in order.
    std::optional<int> paths_until_first_detection() const;
    double coverage() const;
    double wall_ms() const;
};

AppAnalysis analyze_app(const ir::MiniApp &app, const AnalyzeOptions &opt);

/// Reads and parses the file; parse and I/O failures land in `error`.
AppAnalysis analyze_file(const std::string &path, const AnalyzeOptions &opt);

/// `*.mapp` files of a directory, sorted by name.
std::vector<std::string> corpus_files(const std::string &dir);

std::string read_text(const std::string &path); // throws std::runtime_error

} // namespace consicore::pipeline
