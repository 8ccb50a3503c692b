#pragma once

// Concolic exploration of one (app, driver) pair: depth-first over the
// execution tree, optionally steered by static branch stacks, with random
// fallback when the solver gives up.

#include "consicore/exec_state.hpp"
#include "consicore/solver.hpp"
#include "consicore/static_analysis.hpp"
#include "consicore/taint.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace consicore::engine {

enum class Strategy { Dfs, Guided };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s); // throws std::invalid_argument

struct SearchConfig {
    Strategy strategy = Strategy::Dfs;
    std::vector<analysis::BranchStack> stacks;
    int max_paths = 256;
    int max_fallback_tries = 100;
    std::uint64_t seed = 0;
    bool first_hit = false;
    bool random_init = false;
    std::optional<double> coverage_target;
    sym::SolverConfig solver;
    /// Cap on concrete runs, 0 for 16 * max_paths + 64.
    int max_runs = 0;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

void validate(const SearchConfig &cfg);

/// Outcome of a single concolic run.
struct RunResult {
    RunInputs inputs;
    sym::PathCondition pc;
    std::vector<BranchEvent> branches; // symbolic and concrete-only
    std::vector<int> trace;
    std::vector<taint::VulnCandidate> candidates;
    std::vector<taint::ProtectedSink> protected_sinks;
    std::vector<taint::VulnReport> reports;
    sym::Model concrete_model;
    std::optional<std::string> error;
    /// Branch points where the symbolic shadow disagreed with the concrete value.
    std::vector<std::string> pairing_violations;
};

/// Executes the driver once with concrete inputs, shadowing every value
/// symbolically. Variables are interned into `vars`.
RunResult run_concolic(const ir::MiniApp &app, const Driver &driver, const RunInputs &inputs, sym::VarTable &vars,
    int max_call_depth = 32);

/// Frontier entry: negate decision `index` of `pc`, keeping 0..index-1.
/// `preferred` marks a decision whose untaken side is the one the search
/// prefers; other entries are backtracking points, pushed in DFS order.
struct FrontierEntry {
    const sym::PathCondition *pc = nullptr;
    std::size_t index = 0;
    bool preferred = false;
};

/// Preferred side for each branch event of a run (parallel to `branches`).
/// Guided mode follows the first active stack whose top is the event's site,
/// popping matching stacks and dropping mismatching ones; everything else is
/// then-before-else. `matched` receives, per stack, how many entries were popped.
std::vector<ir::Side> preferred_sides(const std::vector<BranchEvent> &branches, const SearchConfig &cfg,
    std::vector<std::size_t> *matched = nullptr);

/// The shallowest preferred entry if there is one, otherwise the most
/// recently pushed backtracking entry. Returns its position in `frontier`.
/// Throws std::invalid_argument on an empty frontier.
std::size_t pick_next_branch(const std::vector<FrontierEntry> &frontier);

enum class RunStatus { Completed, Superseded, Diverged, Duplicate };
enum class RunOrigin { Initial, Solved, Fallback };

std::string_view to_string(RunStatus s);
std::string_view to_string(RunOrigin o);

struct RunLogEntry {
    int run = 0;
    RunInputs inputs;
    std::vector<std::string> pc;
    RunStatus status = RunStatus::Completed;
    RunOrigin origin = RunOrigin::Initial;
    int fallback_tries = 0;
    int target_depth = -1; // index of the negated decision, -1 for the first run
};

struct SolveLogEntry {
    int after_run = 0; // run whose path condition was negated
    std::size_t index = 0;
    std::vector<std::string> constraints;
    sym::SolveStatus status = sym::SolveStatus::Unknown;
    std::string reason;
    sym::Model model;
    bool fallback = false;
    int fallback_tries = 0;
    bool fallback_succeeded = false;
};

struct ExploredPath {
    int index = 0; // 1-based, order of completion
    int run = 0;
    std::vector<BranchEvent> branches;
    sym::PathCondition pc;
    sym::Model model;
    RunInputs inputs;
    std::vector<int> trace;
    std::size_t reports = 0; // reports found on this path
    std::optional<std::string> error;
};

struct ExplorationResult {
    std::vector<ExploredPath> paths;
    std::vector<taint::VulnReport> reports;
    std::vector<taint::ProtectedSink> protected_sinks;
    std::size_t candidates = 0;
    std::set<int> covered;
    double coverage = 0.0;
    double wall_ms = 0.0;
    std::optional<int> paths_until_first_detection;
    std::vector<RunLogEntry> runs;
    std::vector<SolveLogEntry> solves;
    std::vector<std::string> diagnostics;
    sym::VarTable vars;
    bool tree_exhausted = false;
};

/// Throws DriverError for drivers that do not fit the app and ConfigError for
/// bad budgets or a guided search without stacks.
ExplorationResult explore(const ir::MiniApp &app, const Driver &driver, const SearchConfig &cfg);

} // namespace consicore::engine
