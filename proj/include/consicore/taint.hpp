#pragma once

// Detection policy: a report needs a source-tainted value reaching a
// non-parametric sink whose result then reaches a leak.

#include "consicore/concrete.hpp"
#include "consicore/exec_state.hpp"
#include "consicore/symbolic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace consicore::taint {

struct TaintPolicy {
    std::vector<std::string> sources{"EditBox.input", "ContentProvider.query argument"};
    std::vector<std::string> sinks;
    std::vector<std::string> leaks{"TextView.setText", "ContentProvider.query return"};

    static TaintPolicy standard();
};

struct SourceRef {
    sym::OriginKind kind = sym::OriginKind::SourceWidget;
    std::string name; // widget id or provider name
    int var = -1;
    std::string var_name;

    bool operator==(const SourceRef &o) const { return kind == o.kind && name == o.name; }
};

struct VulnCandidate {
    int sink_stmt = 0;
    std::string sink;
    std::vector<std::string> stack; // innermost first, sink frame included
    std::string query_template;
    std::vector<SourceRef> sources; // declaration order
    bool parametric = false;
    int result_var = -1;
    std::string result_name;
};

/// A tainted value reached a parametric sink: recorded, never reported.
struct ProtectedSink {
    int sink_stmt = 0;
    std::string sink;
    std::vector<std::string> stack;
    std::string query_template;
    std::vector<SourceRef> sources;
};

struct SinkVerdict {
    std::optional<VulnCandidate> candidate;
    std::optional<ProtectedSink> protected_sink;
};

/// `result_var` is the fresh SinkResult variable the engine binds to the
/// call's result.
SinkVerdict on_sink_call(const engine::ExecState &state, const ir::Stmt &call, const engine::SymValue &query,
    const std::vector<engine::SymValue> &params, const sym::SymVar &result_var);

struct LeakSite {
    int stmt_id = 0;
    LeakChannel channel = LeakChannel::SetText;
    std::string target; // TextBox id or provider name

    bool operator==(const LeakSite &) const = default;
};

struct ReportInput {
    std::string widget; // widget id, or provider name for IPC arguments
    sym::OriginKind kind = sym::OriginKind::SourceWidget;
    bool parametric = false;
};

struct VulnReport {
    std::string app;
    int driver = 0;
    std::vector<std::string> stack; // innermost first
    std::vector<ReportInput> inputs;
    LeakSite leak;
    std::string query_template;
    std::string sink;
    int sink_stmt = 0;
    bool ipc = false;
    bool confirmed = false;
    ConcreteInputs witness;
};

/// Reports for every candidate of this path whose result variable occurs in
/// the leaked value.
std::vector<VulnReport> on_leak_call(const engine::ExecState &state, const LeakSite &leak,
    const engine::SymValue &payload, const std::vector<VulnCandidate> &candidates);

/// True when two reports describe the same chain (sink, stack, leak).
bool same_chain(const VulnReport &a, const VulnReport &b);

/// Listing-style text with the four sections.
std::string render_report_text(const VulnReport &r);

/// Frame name used for the sink in stack traces.
std::string sink_frame(const std::string &sink);

} // namespace consicore::taint
