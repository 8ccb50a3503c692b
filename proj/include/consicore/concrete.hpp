#pragma once

// Concrete operational semantics of mini-apps. This interpreter knows nothing
// about symbolic values; it is the reference the engine is checked against and
// the executor behind exploit replay.

#include "consicore/driver.hpp"
#include "consicore/ir.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace consicore {

struct ConcreteInputs {
    std::map<std::string, std::string> widgets;        // EditBox id -> text
    std::map<std::string, std::string> provider_args;  // provider name -> IPC argument
};

struct SinkInvocation {
    int stmt_id = 0;
    std::string sink;
    std::string query;
    std::vector<std::string> params;
    /// Enclosing frames, innermost first, ending with DriverMain.main.
    std::vector<std::string> stack;

    bool parametric() const { return !params.empty(); }
};

/// Produces the result text of a sink call (a database in replay, "" by default).
using SinkHandler = std::function<std::string(const SinkInvocation &)>;

enum class LeakChannel { SetText, ProviderReturn };

struct LeakEvent {
    int stmt_id = 0;
    LeakChannel channel = LeakChannel::SetText;
    std::string target; // TextBox id or provider name
    std::string payload;
};

struct BranchOutcome {
    int site = 0;
    int stmt_id = 0;
    ir::Side side = ir::Side::Then;

    bool operator==(const BranchOutcome &o) const = default;
};

struct ExecTrace {
    std::vector<int> stmts;
    std::vector<BranchOutcome> branches;
    std::vector<SinkInvocation> sinks;
    std::vector<LeakEvent> leaks;
    /// Runtime error (call depth exceeded); execution stopped at that point.
    std::optional<std::string> error;
};

struct ConcreteOptions {
    /// Forces the side taken at a branch site regardless of its condition.
    std::map<int, ir::Side> branch_overrides;
    SinkHandler sink_handler;
    int max_call_depth = 32;
};

/// Runs the driver. Missing EditBox inputs read as "". Throws DriverError for
/// drivers that do not fit the app.
ExecTrace eval_concrete(const ir::MiniApp &app, const Driver &driver, const ConcreteInputs &inputs,
    const ConcreteOptions &options = {});

} // namespace consicore
