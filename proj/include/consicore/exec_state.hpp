#pragma once

// State of one concolic run: paired concrete/symbolic stores, the path
// condition collected so far and the executed statements.

#include "consicore/concrete.hpp"
#include "consicore/driver.hpp"
#include "consicore/ir.hpp"
#include "consicore/symbolic.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace consicore::engine {

/// A concrete value with its symbolic shadow; `symbolic` is null for values
/// that do not depend on any symbolic variable.
struct SymValue {
    Value concrete;
    sym::SymPtr symbolic;

    bool is_symbolic() const { return symbolic != nullptr; }
};

/// Concrete inputs of one run: environment sources plus the values returned
/// by sink calls, keyed by (statement id, occurrence on the path).
struct RunInputs {
    ConcreteInputs env;
    std::map<std::pair<int, int>, std::string> sink_results;

    bool operator==(const RunInputs &o) const
    {
        return env.widgets == o.env.widgets && env.provider_args == o.env.provider_args &&
               sink_results == o.sink_results;
    }
};

struct BranchEvent {
    int site = 0;
    int stmt_id = 0;
    ir::Side side = ir::Side::Then;
    bool symbolic = false;
    int pc_index = -1; // index into the path condition when symbolic

    bool operator==(const BranchEvent &o) const { return site == o.site && side == o.side; }
};

struct ExecState {
    const ir::MiniApp *app = nullptr;
    sym::VarTable *vars = nullptr;
    std::map<std::string, std::map<std::string, SymValue>> stores; // component -> variable
    sym::PathCondition pc;
    std::vector<BranchEvent> branches;
    std::vector<int> trace;
    std::vector<std::string> stack; // outermost first, starting at DriverMain.main
    std::vector<Action> pending;    // driver actions not yet performed
    sym::Model concrete_model;      // concrete value of every symbolic variable met
    std::map<int, int> sink_occurrences;
};

} // namespace consicore::engine
