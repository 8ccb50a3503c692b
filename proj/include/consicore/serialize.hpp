#pragma once

// JSON artifacts. Key order is fixed so equal inputs give byte-equal files.

#include "consicore/engine.hpp"
#include "consicore/replay.hpp"
#include "consicore/static_analysis.hpp"
#include "consicore/taint.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace consicore::io {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Json to_json(const analysis::CallGraph &cg);
Json to_json(const analysis::Icfg &icfg);
Json to_json(const Driver &d);
Json drivers_json(const std::vector<Driver> &drivers);
Json stacks_json(const std::vector<analysis::BranchStack> &stacks);

Json to_json(const ConcreteInputs &in);
Json to_json(const engine::RunInputs &in);
Json to_json(const sym::Model &m, const sym::VarTable &vars);

/// `wall_ms` is the only timing field; pass false to leave it out.
Json to_json(const engine::ExplorationResult &r, bool with_timing = true);

/// Stable keys: stack, inputs[{widget, parametric}], leak, query_template,
/// confirmed; followed by the fields replay needs.
Json to_json(const taint::VulnReport &r);
taint::VulnReport report_from_json(const Json &j); // throws FormatError

Json to_json(const replay::ReplayOutcome &o);

struct RenderedReport {
    std::string text;
    std::string json;
};

RenderedReport render_report(const taint::VulnReport &r);

} // namespace consicore::io
