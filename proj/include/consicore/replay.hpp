#pragma once

// Concrete exploit replay: run the driver once with a harmless sentinel and
// once with an attack payload, then compare which rows reach the leak.

#include "consicore/concrete.hpp"
#include "consicore/minisql.hpp"
#include "consicore/taint.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace consicore::replay {

inline constexpr const char *kDefaultPayload = "a' or '1'='1";
inline constexpr const char *kHonestSentinel = "zzz-no-match";

class ReplayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ReplayOptions {
    std::string payload = kDefaultPayload;
    bool payload_all = false; // inject into every reported input, not just the first
};

struct SinkObservation {
    bool reached = false;
    std::string query;
    std::vector<std::string> params;
    std::optional<sql::QueryAst> ast;
    std::vector<sql::Row> rows;
    std::vector<sql::Row> leaked_rows;
    std::vector<std::string> leak_output;
};

struct ReplayOutcome {
    std::string payload;
    std::vector<std::string> injected_inputs; // widget ids / provider names that got the payload
    SinkObservation honest;
    SinkObservation attack;
    bool exploited = false;
    bool inconclusive = false;
    bool ast_changed = false;
    std::string note;
};

/// Throws ReplayError when a reported input is not part of the app or the
/// query names a missing table. Malformed queries and unreached sinks give
/// an inconclusive outcome instead.
ReplayOutcome replay(const ir::MiniApp &app, const Driver &driver, const taint::VulnReport &report,
    const sql::MiniDb &db, const ReplayOptions &options = {});

} // namespace consicore::replay
