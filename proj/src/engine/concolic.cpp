#include "consicore/engine.hpp"

namespace consicore::engine {

namespace {

using namespace ir;

struct Frame {
    const Component *comp = nullptr;
    std::map<std::string, SymValue> locals;
};

class ConcolicRun {
public:
    ConcolicRun(const MiniApp &app, const RunInputs &inputs, sym::VarTable &vars, int max_depth)
        : inputs_(inputs), max_depth_(max_depth)
    {
        st_.app = &app;
        st_.vars = &vars;
        st_.stack.emplace_back(kDriverMain);
    }

    RunResult run(const Driver &driver)
    {
        st_.pending = driver.actions;
        while (!st_.pending.empty() && !res_.error) {
            Action a = st_.pending.front();
            st_.pending.erase(st_.pending.begin());
            perform(a);
        }
        res_.inputs = inputs_;
        res_.pc = std::move(st_.pc);
        res_.branches = std::move(st_.branches);
        res_.trace = std::move(st_.trace);
        res_.concrete_model = std::move(st_.concrete_model);
        return std::move(res_);
    }

private:
    const MiniApp &app() const { return *st_.app; }

    void perform(const Action &a)
    {
        switch (a.kind) {
        case ActionKind::Construct: st_.stores[a.component].clear(); break;
        case ActionKind::LifecycleCall: {
            const auto *c = app().component(a.component);
            if (const auto *f = c->lifecycle(a.slot))
                call_entry(*c, *f);
            break;
        }
        case ActionKind::FindWidget: break;
        case ActionKind::TriggerEvent: {
            const Component *owner = nullptr;
            app().find_widget(a.widget, &owner);
            if (const auto *f = owner->listener(a.widget))
                call_entry(*owner, *f);
            break;
        }
        case ActionKind::ProviderInvoke: {
            const auto *c = app().component(a.component);
            const auto *f = c->query_handler();
            auto it = inputs_.env.provider_args.find(a.component);
            std::string text = it == inputs_.env.provider_args.end() ? std::string{} : it->second;
            const auto &v = st_.vars->intern({sym::OriginKind::ProviderArg, c->name, Sort::Str, 0, 0});
            st_.concrete_model.emplace(v.id, text);
            Frame fr{c, {}};
            fr.locals[f->params[0].name] = SymValue{text, sym::var_expr(v)};
            st_.stack.push_back(qualified_name(*c, *f));
            std::optional<SymValue> ret;
            exec_body(fr, f->body, ret);
            st_.stack.pop_back();
            if (ret && !res_.error)
                leak({return_stmt_, LeakChannel::ProviderReturn, c->name}, *ret);
            break;
        }
        }
    }

    void call_entry(const Component &c, const Function &f)
    {
        Frame fr{&c, {}};
        st_.stack.push_back(qualified_name(c, f));
        std::optional<SymValue> ret;
        exec_body(fr, f.body, ret);
        st_.stack.pop_back();
    }

    SymValue lookup(const Frame &fr, const std::string &name) const
    {
        if (auto it = fr.locals.find(name); it != fr.locals.end())
            return it->second;
        if (auto s = st_.stores.find(fr.comp->name); s != st_.stores.end())
            if (auto it = s->second.find(name); it != s->second.end())
                return it->second;
        auto vs = fr.comp->var_sorts.find(name);
        return {default_value(vs == fr.comp->var_sorts.end() ? Sort::Str : vs->second), nullptr};
    }

    void store(Frame &fr, const std::string &name, SymValue v)
    {
        if (auto it = fr.locals.find(name); it != fr.locals.end())
            it->second = std::move(v);
        else
            st_.stores[fr.comp->name][name] = std::move(v);
    }

    static sym::SymPtr shadow(const SymValue &v) { return v.symbolic ? v.symbolic : sym::lift(v.concrete); }

    SymValue eval(const Frame &fr, const Expr &e)
    {
        switch (e.kind) {
        case ExprKind::IntConst: return {e.int_value, nullptr};
        case ExprKind::StrConst: return {e.text, nullptr};
        case ExprKind::Var: return lookup(fr, e.text);
        case ExprKind::ReadInput: {
            auto it = inputs_.env.widgets.find(e.text);
            std::string text = it == inputs_.env.widgets.end() ? std::string{} : it->second;
            const auto &v = st_.vars->intern({sym::OriginKind::SourceWidget, e.text, Sort::Str, 0, 0});
            st_.concrete_model.emplace(v.id, text);
            return {text, sym::var_expr(v)};
        }
        case ExprKind::CoerceInt: {
            SymValue inner = eval(fr, *e.lhs);
            std::int64_t n = coerce_int(std::get<std::string>(inner.concrete));
            if (!inner.symbolic)
                return {n, nullptr};
            if (inner.symbolic->kind == sym::SymKind::Var) {
                const auto &origin = st_.vars->at(inner.symbolic->var).origin;
                if (origin.kind == sym::OriginKind::SourceWidget) {
                    const auto &v = st_.vars->intern({sym::OriginKind::SourceWidget, origin.name, Sort::Int, 0, 0});
                    st_.concrete_model.emplace(v.id, n);
                    return {n, sym::var_expr(v)};
                }
            }
            return {n, sym::coerce(inner.symbolic)};
        }
        case ExprKind::Concat:
        case ExprKind::IntAdd:
        case ExprKind::IntMul: {
            SymValue l = eval(fr, *e.lhs);
            SymValue r = eval(fr, *e.rhs);
            SymValue out;
            if (e.kind == ExprKind::Concat)
                out.concrete = std::get<std::string>(l.concrete) + std::get<std::string>(r.concrete);
            else if (e.kind == ExprKind::IntAdd)
                out.concrete = wrap_add(std::get<std::int64_t>(l.concrete), std::get<std::int64_t>(r.concrete));
            else
                out.concrete = wrap_mul(std::get<std::int64_t>(l.concrete), std::get<std::int64_t>(r.concrete));
            if (l.symbolic || r.symbolic) {
                auto a = shadow(l), b = shadow(r);
                out.symbolic = e.kind == ExprKind::Concat  ? sym::concat(a, b)
                               : e.kind == ExprKind::IntAdd ? sym::int_add(a, b)
                                                            : sym::int_mul(a, b);
            }
            return out;
        }
        }
        return {std::int64_t{0}, nullptr};
    }

    static bool test(const Cond &c, const Value &l, const Value &r)
    {
        switch (c.kind) {
        case CondKind::IntCmp: return compare(c.op, std::get<std::int64_t>(l), std::get<std::int64_t>(r));
        case CondKind::StrEq: return (std::get<std::string>(l) == std::get<std::string>(r)) != c.negated;
        case CondKind::StrContains:
            return (std::get<std::string>(l).find(std::get<std::string>(r)) != std::string::npos) != c.negated;
        }
        return false;
    }

    void check_pairing(const SymValue &v, int site)
    {
        if (!v.symbolic)
            return;
        try {
            if (sym::eval_model(*v.symbolic, st_.concrete_model) != v.concrete)
                res_.pairing_violations.push_back("site " + std::to_string(site) + ": " + sym::to_string(*v.symbolic));
        } catch (const sym::EvalError &e) {
            res_.pairing_violations.push_back("site " + std::to_string(site) + ": " + e.what());
        }
    }

    void leak(const taint::LeakSite &site, const SymValue &payload)
    {
        auto reports = taint::on_leak_call(st_, site, payload, res_.candidates);
        for (auto &r : reports)
            res_.reports.push_back(std::move(r));
    }

    bool enter()
    {
        if (depth_ + 1 > max_depth_) {
            res_.error = "call depth limit " + std::to_string(max_depth_) + " exceeded";
            return false;
        }
        ++depth_;
        return true;
    }

    bool exec_body(Frame &fr, const std::vector<Stmt> &body, std::optional<SymValue> &ret)
    {
        for (const auto &s : body) {
            if (res_.error || ret)
                return false;
            st_.trace.push_back(s.id);
            switch (s.kind) {
            case StmtKind::Assign: store(fr, s.var, eval(fr, *s.expr)); break;
            case StmtKind::If: {
                SymValue l = eval(fr, *s.cond.lhs);
                SymValue r = eval(fr, *s.cond.rhs);
                bool taken = test(s.cond, l.concrete, r.concrete);
                BranchEvent ev{s.site, s.id, taken ? Side::Then : Side::Else, false, -1};
                if (l.symbolic || r.symbolic) {
                    check_pairing(l, s.site);
                    check_pairing(r, s.site);
                    sym::Constraint c{s.cond.kind, s.cond.op, shadow(l), shadow(r), s.cond.negated};
                    if (!taken)
                        c = sym::negate(c);
                    ev.symbolic = true;
                    ev.pc_index = static_cast<int>(st_.pc.size());
                    st_.pc.push_back({s.site, ev.side, c});
                }
                st_.branches.push_back(ev);
                if (!exec_body(fr, taken ? s.then_body : s.else_body, ret))
                    return false;
                break;
            }
            case StmtKind::SinkCall: {
                SymValue q = eval(fr, *s.expr);
                std::vector<SymValue> params;
                for (const auto &a : s.args)
                    params.push_back(eval(fr, *a));
                int occ = st_.sink_occurrences[s.id]++;
                const auto &rv = st_.vars->intern({sym::OriginKind::SinkResult, s.name, Sort::Str, s.id, occ});
                auto it = inputs_.sink_results.find({s.id, occ});
                std::string result = it == inputs_.sink_results.end() ? std::string{} : it->second;
                st_.concrete_model.emplace(rv.id, result);
                auto verdict = taint::on_sink_call(st_, s, q, params, rv);
                if (verdict.candidate)
                    res_.candidates.push_back(std::move(*verdict.candidate));
                if (verdict.protected_sink)
                    res_.protected_sinks.push_back(std::move(*verdict.protected_sink));
                if (!s.var.empty())
                    store(fr, s.var, SymValue{result, sym::var_expr(rv)});
                break;
            }
            case StmtKind::LeakCall: leak({s.id, LeakChannel::SetText, s.name}, eval(fr, *s.expr)); break;
            case StmtKind::ProviderQuery: {
                const auto *p = app().component(s.name);
                const auto *f = p->query_handler();
                Frame pf{p, {}};
                pf.locals[f->params[0].name] = eval(fr, *s.expr);
                if (!enter())
                    return false;
                st_.stack.push_back(qualified_name(*p, *f));
                std::optional<SymValue> pret;
                exec_body(pf, f->body, pret);
                st_.stack.pop_back();
                --depth_;
                if (res_.error)
                    return false;
                store(fr, s.var, pret.value_or(SymValue{std::string{}, nullptr}));
                break;
            }
            case StmtKind::CallFn: {
                const auto *f = fr.comp->helper(s.name);
                Frame callee{fr.comp, {}};
                for (std::size_t i = 0; i < f->params.size(); ++i)
                    callee.locals[f->params[i].name] = eval(fr, *s.args[i]);
                if (!enter())
                    return false;
                st_.stack.push_back(qualified_name(*fr.comp, *f));
                std::optional<SymValue> ignored;
                exec_body(callee, f->body, ignored);
                st_.stack.pop_back();
                --depth_;
                if (res_.error)
                    return false;
                break;
            }
            case StmtKind::Return:
                ret = eval(fr, *s.expr);
                return_stmt_ = s.id;
                return false;
            }
        }
        return !res_.error && !ret;
    }

    const RunInputs &inputs_;
    int max_depth_;
    ExecState st_;
    RunResult res_;
    int depth_ = 0;
    int return_stmt_ = 0;
};

} // namespace

RunResult run_concolic(const ir::MiniApp &app, const Driver &driver, const RunInputs &inputs, sym::VarTable &vars,
    int max_call_depth)
{
    validate_driver(app, driver);
    return ConcolicRun(app, inputs, vars, max_call_depth).run(driver);
}

} // namespace consicore::engine
