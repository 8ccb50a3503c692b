#include "consicore/static_analysis.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace consicore::analysis {

using namespace ir;

std::string_view to_string(FnKind k)
{
    switch (k) {
    case FnKind::Normal: return "Normal";
    case FnKind::Listener: return "Listener";
    case FnKind::Framework: return "Framework";
    }
    return "?";
}

std::string_view to_string(IcfgNodeKind k)
{
    switch (k) {
    case IcfgNodeKind::Root: return "root";
    case IcfgNodeKind::Entry: return "entry";
    case IcfgNodeKind::Exit: return "exit";
    case IcfgNodeKind::Stmt: return "stmt";
    }
    return "?";
}

std::string_view to_string(EdgeKind k)
{
    switch (k) {
    case EdgeKind::Flow: return "flow";
    case EdgeKind::Then: return "then";
    case EdgeKind::Else: return "else";
    case EdgeKind::Call: return "call";
    case EdgeKind::Return: return "return";
    case EdgeKind::CallToReturn: return "call_to_return";
    }
    return "?";
}

std::vector<int> CallGraph::callers(int id) const
{
    std::vector<int> out;
    for (const auto &[a, b] : edges)
        if (b == id)
            out.push_back(a);
    return out;
}

std::vector<int> CallGraph::callees(int id) const
{
    std::vector<int> out;
    for (const auto &[a, b] : edges)
        if (a == id)
            out.push_back(b);
    return out;
}

int CallGraph::find(std::string_view name) const
{
    for (const auto &n : nodes)
        if (n.name == name)
            return n.id;
    return -1;
}

namespace {

std::string sink_node_name(const std::string &sink) { return "SQLiteDatabase." + sink; }

} // namespace

CallGraph build_call_graph(const MiniApp &app)
{
    CallGraph cg;
    cg.nodes.push_back({0, std::string(kDriverMain), FnKind::Framework, FnRole::Root, {}, {}, nullptr});
    std::map<std::pair<std::string, std::string>, int> fn_ids; // (component, qualified name)
    for (const auto &c : app.components) {
        for (const auto &f : c.functions) {
            FnNode n;
            n.id = static_cast<int>(cg.nodes.size());
            n.name = qualified_name(c, f);
            n.component = c.name;
            n.fn = &f;
            switch (f.kind) {
            case FunctionKind::Lifecycle: n.kind = FnKind::Framework; n.role = FnRole::Lifecycle; break;
            case FunctionKind::ProviderQuery: n.kind = FnKind::Framework; n.role = FnRole::ProviderQuery; break;
            case FunctionKind::Listener:
                n.kind = FnKind::Listener;
                n.role = FnRole::Listener;
                n.parent_component = c.name;
                break;
            case FunctionKind::Helper: n.kind = FnKind::Normal; n.role = FnRole::Helper; break;
            }
            fn_ids[{c.name, n.name}] = n.id;
            cg.nodes.push_back(n);
        }
    }
    std::set<std::pair<int, int>> edges;
    std::map<std::string, int> sink_ids;
    auto sink_node = [&](const std::string &sink) {
        auto it = sink_ids.find(sink);
        if (it != sink_ids.end())
            return it->second;
        FnNode n;
        n.id = static_cast<int>(cg.nodes.size());
        n.name = sink_node_name(sink);
        n.kind = FnKind::Framework;
        n.role = FnRole::Sink;
        cg.nodes.push_back(n);
        sink_ids[sink] = n.id;
        return n.id;
    };
    for (const auto &c : app.components) {
        for (const auto &f : c.functions) {
            int self = fn_ids.at({c.name, qualified_name(c, f)});
            if (f.is_entry())
                edges.insert({CallGraph::kRoot, self});
            for_each_stmt(f.body, [&](const Stmt &s) {
                switch (s.kind) {
                case StmtKind::CallFn:
                    edges.insert({self, fn_ids.at({c.name, qualified_name(c, *c.helper(s.name))})});
                    break;
                case StmtKind::ProviderQuery: {
                    const auto *p = app.component(s.name);
                    edges.insert({self, fn_ids.at({p->name, qualified_name(*p, *p->query_handler())})});
                    break;
                }
                case StmtKind::SinkCall: edges.insert({self, sink_node(s.name)}); break;
                default: break;
                }
            });
        }
    }
    cg.edges.assign(edges.begin(), edges.end());
    return cg;
}

int Icfg::stmt_node(int stmt_id) const
{
    for (const auto &n : nodes)
        if (n.kind == IcfgNodeKind::Stmt && n.stmt_id == stmt_id)
            return n.id;
    return -1;
}

namespace {

class IcfgBuilder {
public:
    explicit IcfgBuilder(const MiniApp &app) : app_(app) {}

    Icfg run()
    {
        add({0, IcfgNodeKind::Root, {}, 0, 0, {}, nullptr});
        // Entry/exit nodes first so call edges can target any function.
        for (const auto &c : app_.components)
            for (const auto &f : c.functions) {
                auto q = qualified_name(c, f);
                entry_[q] = add({0, IcfgNodeKind::Entry, q, 0, 0, {}, nullptr});
                exit_[q] = add({0, IcfgNodeKind::Exit, q, 0, 0, {}, nullptr});
            }
        for (const auto &c : app_.components)
            for (const auto &f : c.functions) {
                auto q = qualified_name(c, f);
                if (f.is_entry())
                    edge(0, entry_[q], EdgeKind::Call);
                comp_ = &c;
                fn_ = q;
                int first = body(f.body, exit_[q]);
                edge(entry_[q], first, EdgeKind::Flow);
            }
        std::stable_sort(g_.edges.begin(), g_.edges.end(), [](const IcfgEdge &a, const IcfgEdge &b) {
            return std::tie(a.from, a.to, a.kind) < std::tie(b.from, b.to, b.kind);
        });
        return std::move(g_);
    }

private:
    int add(IcfgNode n)
    {
        n.id = static_cast<int>(g_.nodes.size());
        g_.nodes.push_back(std::move(n));
        return g_.nodes.back().id;
    }

    void edge(int from, int to, EdgeKind k) { g_.edges.push_back({from, to, k}); }

    // Builds the nodes of a body whose control continues to `follow`;
    // returns the node control enters first.
    int body(const std::vector<Stmt> &stmts, int follow)
    {
        std::vector<int> ids;
        for (const auto &s : stmts) {
            IcfgNode n{0, IcfgNodeKind::Stmt, fn_, s.id, 0, {}, &s};
            if (s.kind == StmtKind::If)
                n.site = s.site;
            if (s.kind == StmtKind::SinkCall)
                n.sink = s.name;
            ids.push_back(add(n));
        }
        for (std::size_t i = stmts.size(); i-- > 0;) {
            const Stmt &s = stmts[i];
            int self = ids[i];
            int next = i + 1 < stmts.size() ? ids[i + 1] : follow;
            switch (s.kind) {
            case StmtKind::If: {
                int t = body(s.then_body, next);
                int e = body(s.else_body, next);
                edge(self, t, EdgeKind::Then);
                edge(self, e, EdgeKind::Else);
                break;
            }
            case StmtKind::CallFn: {
                auto q = qualified_name(*comp_, *comp_->helper(s.name));
                call(self, q, next);
                break;
            }
            case StmtKind::ProviderQuery: {
                const auto *p = app_.component(s.name);
                call(self, qualified_name(*p, *p->query_handler()), next);
                break;
            }
            case StmtKind::Return: edge(self, exit_[fn_], EdgeKind::Flow); break;
            default: edge(self, next, EdgeKind::Flow); break;
            }
        }
        return ids.empty() ? follow : ids.front();
    }

    void call(int site, const std::string &callee, int next)
    {
        edge(site, entry_[callee], EdgeKind::Call);
        edge(exit_[callee], next, EdgeKind::Return);
        edge(site, next, EdgeKind::CallToReturn);
    }

    const MiniApp &app_;
    Icfg g_;
    std::map<std::string, int> entry_, exit_;
    const Component *comp_ = nullptr;
    std::string fn_;
};

std::vector<Action> actions_for_entry(const MiniApp &app, const FnNode &entry)
{
    std::vector<Action> acts;
    switch (entry.role) {
    case FnRole::Lifecycle:
    case FnRole::Listener: {
        const std::string &comp = entry.role == FnRole::Listener ? entry.parent_component : entry.component;
        acts.push_back(Action::construct(comp));
        for (auto slot : kLifecycleOrder)
            acts.push_back(Action::lifecycle(comp, slot));
        if (entry.role == FnRole::Listener) {
            acts.push_back(Action::find_widget(entry.fn->widget));
            acts.push_back(Action::trigger(entry.fn->widget));
        }
        break;
    }
    case FnRole::ProviderQuery:
        acts.push_back(Action::construct(entry.component));
        acts.push_back(Action::provider_invoke(entry.component));
        break;
    default: break;
    }
    (void)app;
    return acts;
}

} // namespace

Icfg build_icfg(const MiniApp &app) { return IcfgBuilder(app).run(); }

std::vector<Driver> synthesize_drivers(const MiniApp &app, const CallGraph &cg, std::vector<std::string> *notes)
{
    std::vector<std::vector<int>> paths; // root first
    for (const auto &sink : cg.nodes) {
        if (sink.role != FnRole::Sink)
            continue;
        std::size_t found = 0;
        bool capped = false;
        std::vector<int> path{sink.id};
        std::vector<bool> on_path(cg.nodes.size(), false);
        on_path[static_cast<std::size_t>(sink.id)] = true;
        std::function<void(int)> back = [&](int node) {
            if (capped)
                return;
            if (node == CallGraph::kRoot) {
                if (found == kMaxCgPathsPerSink) {
                    capped = true;
                    return;
                }
                ++found;
                paths.emplace_back(path.rbegin(), path.rend());
                return;
            }
            for (int caller : cg.callers(node)) {
                if (on_path[static_cast<std::size_t>(caller)])
                    continue;
                on_path[static_cast<std::size_t>(caller)] = true;
                path.push_back(caller);
                back(caller);
                path.pop_back();
                on_path[static_cast<std::size_t>(caller)] = false;
            }
        };
        back(sink.id);
        if (capped && notes)
            notes->push_back("call-graph paths to " + sink.name + " capped at " + std::to_string(kMaxCgPathsPerSink));
    }
    std::sort(paths.begin(), paths.end());
    std::vector<Driver> drivers;
    for (const auto &p : paths) {
        Driver d;
        d.actions = actions_for_entry(app, cg.nodes[static_cast<std::size_t>(p.at(1))]);
        for (int id : p)
            d.cg_path.push_back(cg.nodes[static_cast<std::size_t>(id)].name);
        if (std::find(drivers.begin(), drivers.end(), d) == drivers.end())
            drivers.push_back(std::move(d));
    }
    return drivers;
}

std::vector<BranchStack> extract_vulnerable_paths(const MiniApp &app, const Icfg &icfg,
    std::vector<std::string> *notes)
{
    (void)app;
    std::vector<std::vector<const IcfgEdge *>> preds(icfg.nodes.size());
    for (const auto &e : icfg.edges)
        if (e.kind != EdgeKind::Return)
            preds[static_cast<std::size_t>(e.to)].push_back(&e);

    std::vector<BranchStack> out;
    for (const auto &sink : icfg.nodes) {
        if (sink.sink.empty())
            continue;
        std::vector<BranchStack> mine;
        bool capped = false;
        std::vector<int> path{sink.id};
        std::vector<StackEntry> sides; // collected sink-first
        std::vector<bool> on_path(icfg.nodes.size(), false);
        on_path[static_cast<std::size_t>(sink.id)] = true;
        std::function<void(int)> back = [&](int node) {
            if (capped)
                return;
            if (node == 0) {
                BranchStack st;
                st.sink_stmt = sink.stmt_id;
                st.sink = sink.sink;
                st.entries.assign(sides.rbegin(), sides.rend());
                st.path.assign(path.rbegin(), path.rend());
                if (std::find(mine.begin(), mine.end(), st) != mine.end())
                    return;
                if (mine.size() == kMaxStacksPerSink) {
                    capped = true;
                    return;
                }
                mine.push_back(std::move(st));
                return;
            }
            for (const auto *e : preds[static_cast<std::size_t>(node)]) {
                if (on_path[static_cast<std::size_t>(e->from)])
                    continue;
                bool branch = e->kind == EdgeKind::Then || e->kind == EdgeKind::Else;
                if (branch)
                    sides.push_back({icfg.nodes[static_cast<std::size_t>(e->from)].site,
                        e->kind == EdgeKind::Then ? Side::Then : Side::Else});
                on_path[static_cast<std::size_t>(e->from)] = true;
                path.push_back(e->from);
                back(e->from);
                path.pop_back();
                on_path[static_cast<std::size_t>(e->from)] = false;
                if (branch)
                    sides.pop_back();
            }
        };
        back(sink.id);
        if (capped && notes)
            notes->push_back("branch stacks for sink statement " + std::to_string(sink.stmt_id) + " capped at " +
                             std::to_string(kMaxStacksPerSink));
        std::sort(mine.begin(), mine.end(), [](const BranchStack &a, const BranchStack &b) { return a.path < b.path; });
        out.insert(out.end(), mine.begin(), mine.end());
    }
    return out;
}

StaticResult analyze_static(const MiniApp &app)
{
    StaticResult r;
    r.cg = build_call_graph(app);
    r.icfg = build_icfg(app);
    r.drivers = synthesize_drivers(app, r.cg, &r.notes);
    r.stacks = extract_vulnerable_paths(app, r.icfg, &r.notes);
    if (r.drivers.empty())
        r.notes.push_back("no vulnerable functions reachable from an entry point");
    return r;
}

} // namespace consicore::analysis
