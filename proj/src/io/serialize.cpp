#include "consicore/serialize.hpp"

namespace consicore::io {

namespace {

std::string_view role_name(analysis::FnRole r)
{
    switch (r) {
    case analysis::FnRole::Root: return "root";
    case analysis::FnRole::Lifecycle: return "lifecycle";
    case analysis::FnRole::Listener: return "listener";
    case analysis::FnRole::ProviderQuery: return "provider_query";
    case analysis::FnRole::Helper: return "helper";
    case analysis::FnRole::Sink: return "sink";
    }
    return "?";
}

std::string_view channel_name(LeakChannel c) { return c == LeakChannel::SetText ? "setText" : "providerReturn"; }

LeakChannel parse_channel(const std::string &s)
{
    if (s == "setText")
        return LeakChannel::SetText;
    if (s == "providerReturn")
        return LeakChannel::ProviderReturn;
    throw FormatError("unknown leak kind '" + s + "'");
}

Json value_json(const Value &v)
{
    if (auto *i = std::get_if<std::int64_t>(&v))
        return *i;
    return std::get<std::string>(v);
}

Json branches_json(const std::vector<engine::BranchEvent> &bs)
{
    Json out = Json::array();
    for (const auto &b : bs)
        out.push_back({{"site", b.site}, {"side", ir::to_string(b.side)}, {"symbolic", b.symbolic}});
    return out;
}

} // namespace

Json to_json(const analysis::CallGraph &cg)
{
    Json nodes = Json::array();
    for (const auto &n : cg.nodes) {
        Json j{{"id", n.id}, {"name", n.name}, {"kind", analysis::to_string(n.kind)}, {"role", role_name(n.role)}};
        if (!n.component.empty())
            j["component"] = n.component;
        if (!n.parent_component.empty())
            j["parent_component"] = n.parent_component;
        nodes.push_back(std::move(j));
    }
    Json edges = Json::array();
    for (const auto &[a, b] : cg.edges)
        edges.push_back({a, b});
    return {{"nodes", nodes}, {"edges", edges}};
}

Json to_json(const analysis::Icfg &icfg)
{
    Json nodes = Json::array();
    for (const auto &n : icfg.nodes) {
        Json j{{"id", n.id}, {"kind", analysis::to_string(n.kind)}};
        if (!n.function.empty())
            j["function"] = n.function;
        if (n.kind == analysis::IcfgNodeKind::Stmt) {
            j["stmt"] = n.stmt_id;
            if (n.site)
                j["site"] = n.site;
            if (!n.sink.empty())
                j["sink"] = n.sink;
        }
        nodes.push_back(std::move(j));
    }
    Json edges = Json::array();
    for (const auto &e : icfg.edges)
        edges.push_back({{"from", e.from}, {"to", e.to}, {"kind", analysis::to_string(e.kind)}});
    return {{"nodes", nodes}, {"edges", edges}};
}

Json to_json(const Driver &d)
{
    Json actions = Json::array();
    for (const auto &a : d.actions) {
        Json j{{"kind", to_string(a.kind)}};
        switch (a.kind) {
        case ActionKind::Construct:
        case ActionKind::ProviderInvoke: j["component"] = a.component; break;
        case ActionKind::LifecycleCall:
            j["component"] = a.component;
            j["slot"] = ir::to_string(a.slot);
            break;
        case ActionKind::FindWidget:
        case ActionKind::TriggerEvent: j["widget"] = a.widget; break;
        }
        j["text"] = to_string(a);
        actions.push_back(std::move(j));
    }
    return {{"actions", actions}, {"cg_path", d.cg_path}};
}

Json drivers_json(const std::vector<Driver> &drivers)
{
    Json out = Json::array();
    for (std::size_t i = 0; i < drivers.size(); ++i) {
        Json j{{"index", i}};
        j.update(to_json(drivers[i]));
        out.push_back(std::move(j));
    }
    return out;
}

Json stacks_json(const std::vector<analysis::BranchStack> &stacks)
{
    Json out = Json::array();
    for (const auto &s : stacks) {
        Json entries = Json::array();
        for (const auto &e : s.entries)
            entries.push_back({{"site", e.site}, {"side", ir::to_string(e.side)}});
        out.push_back({{"sink_stmt", s.sink_stmt}, {"sink", s.sink}, {"entries", entries}, {"path", s.path}});
    }
    return out;
}

Json to_json(const ConcreteInputs &in) { return {{"widgets", in.widgets}, {"provider_args", in.provider_args}}; }

Json to_json(const engine::RunInputs &in)
{
    Json j = to_json(in.env);
    Json results = Json::array();
    for (const auto &[key, v] : in.sink_results)
        results.push_back({{"stmt", key.first}, {"occurrence", key.second}, {"value", v}});
    j["sink_results"] = results;
    return j;
}

Json to_json(const sym::Model &m, const sym::VarTable &vars)
{
    Json j = Json::object();
    for (const auto &[id, v] : m)
        j[vars.at(id).name] = value_json(v);
    return j;
}

Json to_json(const taint::VulnReport &r)
{
    Json inputs = Json::array();
    for (const auto &in : r.inputs)
        inputs.push_back({{"widget", in.widget}, {"parametric", in.parametric},
            {"kind", in.kind == sym::OriginKind::ProviderArg ? "provider" : "widget"}});
    return {{"stack", r.stack}, {"inputs", inputs},
        {"leak", {{"kind", channel_name(r.leak.channel)}, {"target", r.leak.target}, {"stmt", r.leak.stmt_id}}},
        {"query_template", r.query_template}, {"confirmed", r.confirmed}, {"app", r.app}, {"driver", r.driver},
        {"sink", r.sink}, {"sink_stmt", r.sink_stmt}, {"ipc", r.ipc}, {"witness", to_json(r.witness)}};
}

taint::VulnReport report_from_json(const Json &j)
{
    taint::VulnReport r;
    try {
        r.stack = j.at("stack").get<std::vector<std::string>>();
        for (const auto &in : j.at("inputs")) {
            taint::ReportInput ri;
            ri.widget = in.at("widget").get<std::string>();
            ri.parametric = in.at("parametric").get<bool>();
            ri.kind = in.value("kind", "widget") == "provider" ? sym::OriginKind::ProviderArg
                                                               : sym::OriginKind::SourceWidget;
            r.inputs.push_back(std::move(ri));
        }
        const auto &leak = j.at("leak");
        r.leak = {leak.at("stmt").get<int>(), parse_channel(leak.at("kind").get<std::string>()),
            leak.at("target").get<std::string>()};
        r.query_template = j.at("query_template").get<std::string>();
        r.confirmed = j.at("confirmed").get<bool>();
        r.app = j.at("app").get<std::string>();
        r.driver = j.at("driver").get<int>();
        r.sink = j.at("sink").get<std::string>();
        r.sink_stmt = j.at("sink_stmt").get<int>();
        r.ipc = j.value("ipc", false);
        if (j.contains("witness")) {
            const auto &w = j.at("witness");
            r.witness.widgets = w.value("widgets", std::map<std::string, std::string>{});
            r.witness.provider_args = w.value("provider_args", std::map<std::string, std::string>{});
        }
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("malformed report: ") + e.what());
    }
    return r;
}

Json to_json(const engine::ExplorationResult &r, bool with_timing)
{
    Json paths = Json::array();
    for (const auto &p : r.paths) {
        Json pc = Json::array();
        for (const auto &e : p.pc)
            pc.push_back(sym::to_string(e.constraint));
        Json j{{"index", p.index}, {"run", p.run}, {"branches", branches_json(p.branches)}, {"pc", pc},
            {"inputs", to_json(p.inputs)}, {"model", to_json(p.model, r.vars)}, {"trace", p.trace},
            {"reports", p.reports}};
        if (p.error)
            j["error"] = *p.error;
        paths.push_back(std::move(j));
    }
    Json runs = Json::array();
    for (const auto &l : r.runs)
        runs.push_back({{"run", l.run}, {"status", engine::to_string(l.status)}, {"origin", engine::to_string(l.origin)},
            {"target_depth", l.target_depth}, {"fallback_tries", l.fallback_tries}, {"inputs", to_json(l.inputs)},
            {"pc", l.pc}});
    Json solves = Json::array();
    for (const auto &s : r.solves) {
        Json j{{"after_run", s.after_run}, {"index", s.index}, {"constraints", s.constraints},
            {"status", sym::to_string(s.status)}};
        if (!s.reason.empty())
            j["reason"] = s.reason;
        j["model"] = to_json(s.model, r.vars);
        if (s.fallback)
            j["fallback"] = {{"tries", s.fallback_tries}, {"succeeded", s.fallback_succeeded}};
        solves.push_back(std::move(j));
    }
    Json vars = Json::array();
    for (const auto &v : r.vars.vars())
        vars.push_back({{"name", v.name}, {"sort", to_string(v.sort)}, {"origin", sym::to_string(v.origin.kind)},
            {"source", v.origin.name}});
    Json reports = Json::array();
    for (const auto &rep : r.reports)
        reports.push_back(to_json(rep));
    Json protected_sinks = Json::array();
    for (const auto &p : r.protected_sinks)
        protected_sinks.push_back({{"sink_stmt", p.sink_stmt}, {"sink", p.sink}, {"stack", p.stack},
            {"query_template", p.query_template}});

    Json j{{"paths_explored", r.paths.size()}, {"runs_executed", r.runs.size()},
        {"paths_until_first_detection", r.paths_until_first_detection ? Json(*r.paths_until_first_detection) : Json()},
        {"coverage", r.coverage}, {"covered_statements", r.covered}, {"tree_exhausted", r.tree_exhausted},
        {"candidates", r.candidates}, {"reports", reports}, {"protected_sinks", protected_sinks},
        {"diagnostics", r.diagnostics}, {"variables", vars}, {"paths", paths}, {"runs", runs}, {"solves", solves}};
    if (with_timing)
        j["wall_ms"] = r.wall_ms;
    return j;
}

Json to_json(const replay::ReplayOutcome &o)
{
    auto obs = [](const replay::SinkObservation &s) {
        Json j{{"reached", s.reached}, {"query", s.query}, {"params", s.params}};
        j["ast"] = s.ast ? Json(sql::to_string(*s.ast)) : Json();
        j["rows"] = s.rows;
        j["leaked_rows"] = s.leaked_rows;
        j["leak_output"] = s.leak_output;
        return j;
    };
    return {{"payload", o.payload}, {"injected_inputs", o.injected_inputs}, {"exploited", o.exploited},
        {"inconclusive", o.inconclusive}, {"ast_changed", o.ast_changed}, {"note", o.note},
        {"honest", obs(o.honest)}, {"attack", obs(o.attack)}};
}

RenderedReport render_report(const taint::VulnReport &r)
{
    return {taint::render_report_text(r), to_json(r).dump(2) + "\n"};
}

} // namespace consicore::io
