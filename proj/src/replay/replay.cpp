#include "consicore/replay.hpp"

#include <algorithm>
#include <sstream>

namespace consicore::replay {

namespace {

std::vector<std::string> lines_of(const std::string &text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

bool contains_row(const std::vector<sql::Row> &rows, const sql::Row &r)
{
    return std::find(rows.begin(), rows.end(), r) != rows.end();
}

SinkObservation observe(const ir::MiniApp &app, const Driver &driver, const taint::VulnReport &report,
    const sql::MiniDb &db, const ConcreteInputs &inputs, std::string &failure)
{
    SinkObservation obs;
    std::vector<sql::Row> returned;
    ConcreteOptions opt;
    opt.sink_handler = [&](const SinkInvocation &inv) -> std::string {
        const bool reported = inv.stmt_id == report.sink_stmt;
        if (reported && !obs.reached) {
            obs.reached = true;
            obs.query = inv.query;
            obs.params = inv.params;
        }
        sql::QueryAst ast;
        try {
            ast = sql::parse_query(inv.query);
        } catch (const sql::SqlError &e) {
            if (reported && failure.empty())
                failure = "query does not parse: " + std::string(e.what());
            return {};
        }
        if (!db.tables.count(ast.table))
            throw ReplayError("no such table: " + ast.table);
        std::vector<sql::Row> rows;
        try {
            rows = sql::execute(db, ast, inv.params);
        } catch (const sql::SqlError &e) {
            if (reported && failure.empty())
                failure = e.what();
            return {};
        }
        if (reported) {
            if (!obs.ast)
                obs.ast = ast;
            for (const auto &r : rows) {
                if (!contains_row(obs.rows, r))
                    obs.rows.push_back(r);
                returned.push_back(r);
            }
        }
        return sql::render_rows(rows);
    };
    auto trace = eval_concrete(app, driver, inputs, opt);
    if (trace.error && failure.empty())
        failure = *trace.error;

    for (const auto &leak : trace.leaks) {
        if (leak.stmt_id != report.leak.stmt_id || leak.channel != report.leak.channel ||
            leak.target != report.leak.target)
            continue;
        obs.leak_output.push_back(leak.payload);
        for (const auto &line : lines_of(leak.payload))
            for (const auto &r : returned)
                if (sql::render_rows({r}) == line && !contains_row(obs.leaked_rows, r))
                    obs.leaked_rows.push_back(r);
    }
    return obs;
}

} // namespace

ReplayOutcome replay(const ir::MiniApp &app, const Driver &driver, const taint::VulnReport &report,
    const sql::MiniDb &db, const ReplayOptions &options)
{
    if (report.inputs.empty())
        throw ReplayError("report lists no inputs");
    for (const auto &in : report.inputs) {
        if (in.kind == sym::OriginKind::ProviderArg) {
            const auto *c = app.component(in.widget);
            if (!c || c->kind != ir::ComponentKind::Provider)
                throw ReplayError("no provider named " + in.widget + " in app " + app.name);
        } else {
            const auto *w = app.find_widget(in.widget);
            if (!w || w->kind != ir::WidgetKind::EditBox)
                throw ReplayError("no input widget " + in.widget + " in app " + app.name);
        }
    }

    ReplayOutcome out;
    out.payload = options.payload;
    ConcreteInputs honest = report.witness;
    ConcreteInputs attack = report.witness;
    const std::size_t n = options.payload_all ? report.inputs.size() : 1;
    for (std::size_t i = 0; i < n; ++i) {
        const auto &in = report.inputs[i];
        auto &h = in.kind == sym::OriginKind::ProviderArg ? honest.provider_args : honest.widgets;
        auto &a = in.kind == sym::OriginKind::ProviderArg ? attack.provider_args : attack.widgets;
        h[in.widget] = kHonestSentinel;
        a[in.widget] = options.payload;
        out.injected_inputs.push_back(in.widget);
    }

    std::string honest_failure, attack_failure;
    out.honest = observe(app, driver, report, db, honest, honest_failure);
    out.attack = observe(app, driver, report, db, attack, attack_failure);

    if (!attack_failure.empty() || !honest_failure.empty()) {
        out.inconclusive = true;
        out.note = !attack_failure.empty() ? "attack run: " + attack_failure : "honest run: " + honest_failure;
        return out;
    }
    if (!out.attack.reached || !out.honest.reached) {
        out.inconclusive = true;
        out.note = std::string(out.attack.reached ? "honest" : "attack") + " run did not reach the sink";
        return out;
    }
    out.ast_changed = out.honest.ast && out.attack.ast && !sql::same_shape(*out.honest.ast, *out.attack.ast);
    for (const auto &r : out.attack.leaked_rows)
        if (!contains_row(out.honest.leaked_rows, r))
            out.exploited = true;
    if (out.exploited)
        out.note = std::to_string(out.attack.leaked_rows.size()) + " row(s) leaked with the payload, " +
                   std::to_string(out.honest.leaked_rows.size()) + " without";
    else if (out.attack.leak_output.empty())
        out.note = "no leak observed";
    else
        out.note = "payload did not change the leaked rows";
    return out;
}

} // namespace consicore::replay
