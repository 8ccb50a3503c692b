#include "consicore/taint.hpp"

#include "consicore/sinks.hpp"

#include <algorithm>
#include <set>

namespace consicore::taint {

TaintPolicy TaintPolicy::standard()
{
    TaintPolicy p;
    for (auto s : kVulnerableFunctions)
        p.sinks.emplace_back(s);
    return p;
}

std::string sink_frame(const std::string &sink) { return "SQLiteDatabase." + sink; }

namespace {

std::vector<SourceRef> sources_of(const engine::ExecState &st, const std::vector<const engine::SymValue *> &values)
{
    std::set<int> ids;
    for (const auto *v : values)
        if (v->symbolic)
            sym::collect_vars(*v->symbolic, ids);
    std::vector<SourceRef> out;
    for (int id : ids) {
        const auto &var = st.vars->at(id);
        if (!var.origin.is_source())
            continue;
        SourceRef ref{var.origin.kind, var.origin.name, var.id, var.name};
        if (std::find(out.begin(), out.end(), ref) == out.end())
            out.push_back(ref);
    }
    const auto &app = *st.app;
    std::stable_sort(out.begin(), out.end(), [&](const SourceRef &a, const SourceRef &b) {
        auto key = [&](const SourceRef &r) {
            int widget = r.kind == sym::OriginKind::SourceWidget ? app.widget_index(r.name) : 1 << 30;
            return std::pair{widget, r.name};
        };
        return key(a) < key(b);
    });
    return out;
}

std::string template_of(const engine::SymValue &v)
{
    if (v.symbolic)
        return sym::render_template(*v.symbolic);
    return std::get<std::string>(v.concrete);
}

std::vector<std::string> stack_with_sink(const engine::ExecState &st, const std::string &sink)
{
    std::vector<std::string> out{sink_frame(sink)};
    out.insert(out.end(), st.stack.rbegin(), st.stack.rend());
    return out;
}

} // namespace

SinkVerdict on_sink_call(const engine::ExecState &state, const ir::Stmt &call, const engine::SymValue &query,
    const std::vector<engine::SymValue> &params, const sym::SymVar &result_var)
{
    SinkVerdict v;
    auto query_sources = sources_of(state, {&query});
    std::vector<const engine::SymValue *> all{&query};
    for (const auto &p : params)
        all.push_back(&p);
    auto all_sources = sources_of(state, all);
    const bool parametric = !params.empty();
    if (parametric) {
        if (!all_sources.empty())
            v.protected_sink = ProtectedSink{call.id, call.name, stack_with_sink(state, call.name), template_of(query),
                all_sources};
        return v;
    }
    if (query_sources.empty())
        return v;
    VulnCandidate c;
    c.sink_stmt = call.id;
    c.sink = call.name;
    c.stack = stack_with_sink(state, call.name);
    c.query_template = template_of(query);
    c.sources = std::move(query_sources);
    c.parametric = false;
    c.result_var = result_var.id;
    c.result_name = result_var.name;
    v.candidate = std::move(c);
    return v;
}

std::vector<VulnReport> on_leak_call(const engine::ExecState &state, const LeakSite &leak,
    const engine::SymValue &payload, const std::vector<VulnCandidate> &candidates)
{
    std::vector<VulnReport> out;
    if (!payload.symbolic)
        return out;
    std::set<int> vars;
    sym::collect_vars(*payload.symbolic, vars);
    for (const auto &c : candidates) {
        if (!vars.count(c.result_var))
            continue;
        VulnReport r;
        r.app = state.app->name;
        r.stack = c.stack;
        for (const auto &s : c.sources)
            r.inputs.push_back({s.name, s.kind, c.parametric});
        r.leak = leak;
        r.query_template = c.query_template;
        r.sink = c.sink;
        r.sink_stmt = c.sink_stmt;
        for (const auto &comp : state.app->components)
            if (comp.kind == ir::ComponentKind::Provider &&
                std::find(r.stack.begin(), r.stack.end(), comp.name + ".query") != r.stack.end())
                r.ipc = true;
        out.push_back(std::move(r));
    }
    return out;
}

bool same_chain(const VulnReport &a, const VulnReport &b)
{
    return a.sink_stmt == b.sink_stmt && a.stack == b.stack && a.leak == b.leak;
}

namespace {

std::string leak_line(const LeakSite &l)
{
    if (l.channel == LeakChannel::SetText)
        return "android.widget.TextView.setText()//R.id." + l.target;
    return "android.content.ContentProvider.query()//result returned to the IPC caller of " + l.target;
}

std::string input_line(const ReportInput &in)
{
    std::string who = in.kind == sym::OriginKind::ProviderArg ? "content://" + in.widget + "/query" : "R.id." + in.widget;
    return who + "//developer sanitizer for this input is " + (in.parametric ? "ON" : "OFF");
}

} // namespace

std::string render_report_text(const VulnReport &r)
{
    std::string out = "//STACK TRACE:\n";
    for (std::size_t i = 0; i < r.stack.size(); ++i)
        out += std::to_string(i + 1) + ")" + r.stack[i] + "\n";
    out += "//APP'S INPUTS THAT CAUSE INJECTION VULNERABILITY:\n";
    for (std::size_t i = 0; i < r.inputs.size(); ++i)
        out += std::to_string(i + 1) + ")" + input_line(r.inputs[i]) + "\n";
    out += "//OBJECT THAT CAUSE LEAKAGE:\n";
    out += "1)" + leak_line(r.leak) + "\n";
    out += "//INPUTS OF VULNERABLE FUNCTION\n";
    out += "1)" + r.query_template + "\n";
    return out;
}

} // namespace consicore::taint
