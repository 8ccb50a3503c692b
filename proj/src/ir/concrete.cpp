#include "consicore/concrete.hpp"

namespace consicore {

namespace {

using namespace ir;

struct Frame {
    const Component *comp = nullptr;
    std::map<std::string, Value> locals;
};

class Interp {
public:
    Interp(const MiniApp &app, const ConcreteInputs &inputs, const ConcreteOptions &opt)
        : app_(app), inputs_(inputs), opt_(opt)
    {}

    ExecTrace run(const Driver &driver)
    {
        for (const auto &a : driver.actions) {
            if (trace_.error)
                break;
            switch (a.kind) {
            case ActionKind::Construct: stores_[a.component].clear(); break;
            case ActionKind::LifecycleCall: {
                const auto *c = app_.component(a.component);
                if (const auto *f = c->lifecycle(a.slot))
                    call_entry(*c, *f, {});
                break;
            }
            case ActionKind::FindWidget: break;
            case ActionKind::TriggerEvent: {
                const Component *owner = nullptr;
                app_.find_widget(a.widget, &owner);
                if (const auto *f = owner->listener(a.widget))
                    call_entry(*owner, *f, {});
                break;
            }
            case ActionKind::ProviderInvoke: {
                const auto *c = app_.component(a.component);
                const auto *f = c->query_handler();
                auto it = inputs_.provider_args.find(a.component);
                std::string arg = it == inputs_.provider_args.end() ? std::string{} : it->second;
                Frame fr{c, {}};
                fr.locals[f->params[0].name] = arg;
                stack_.push_back(qualified_name(*c, *f));
                std::optional<std::string> ret;
                exec_body(fr, f->body, ret);
                stack_.pop_back();
                if (ret && !trace_.error)
                    trace_.leaks.push_back({return_stmt_, LeakChannel::ProviderReturn, c->name, *ret});
                break;
            }
            }
        }
        return std::move(trace_);
    }

private:
    void call_entry(const Component &c, const Function &f, std::map<std::string, Value> locals)
    {
        Frame fr{&c, std::move(locals)};
        stack_.push_back(qualified_name(c, f));
        std::optional<std::string> ret;
        exec_body(fr, f.body, ret);
        stack_.pop_back();
    }

    Value lookup(const Frame &fr, const std::string &name) const
    {
        if (auto it = fr.locals.find(name); it != fr.locals.end())
            return it->second;
        if (auto s = stores_.find(fr.comp->name); s != stores_.end())
            if (auto it = s->second.find(name); it != s->second.end())
                return it->second;
        auto vs = fr.comp->var_sorts.find(name);
        return default_value(vs == fr.comp->var_sorts.end() ? Sort::Str : vs->second);
    }

    void store(Frame &fr, const std::string &name, Value v)
    {
        if (auto it = fr.locals.find(name); it != fr.locals.end())
            it->second = std::move(v);
        else
            stores_[fr.comp->name][name] = std::move(v);
    }

    Value eval(const Frame &fr, const Expr &e) const
    {
        switch (e.kind) {
        case ExprKind::IntConst: return e.int_value;
        case ExprKind::StrConst: return e.text;
        case ExprKind::Var: return lookup(fr, e.text);
        case ExprKind::ReadInput: {
            auto it = inputs_.widgets.find(e.text);
            return it == inputs_.widgets.end() ? std::string{} : it->second;
        }
        case ExprKind::CoerceInt: return coerce_int(std::get<std::string>(eval(fr, *e.lhs)));
        case ExprKind::Concat:
            return std::get<std::string>(eval(fr, *e.lhs)) + std::get<std::string>(eval(fr, *e.rhs));
        case ExprKind::IntAdd:
            return wrap_add(std::get<std::int64_t>(eval(fr, *e.lhs)), std::get<std::int64_t>(eval(fr, *e.rhs)));
        case ExprKind::IntMul:
            return wrap_mul(std::get<std::int64_t>(eval(fr, *e.lhs)), std::get<std::int64_t>(eval(fr, *e.rhs)));
        }
        return std::int64_t{0};
    }

    std::string eval_str(const Frame &fr, const Expr &e) const { return std::get<std::string>(eval(fr, e)); }

    bool test(const Frame &fr, const Cond &c) const
    {
        Value l = eval(fr, *c.lhs);
        Value r = eval(fr, *c.rhs);
        switch (c.kind) {
        case CondKind::IntCmp: return compare(c.op, std::get<std::int64_t>(l), std::get<std::int64_t>(r));
        case CondKind::StrEq: return (std::get<std::string>(l) == std::get<std::string>(r)) != c.negated;
        case CondKind::StrContains:
            return (std::get<std::string>(l).find(std::get<std::string>(r)) != std::string::npos) != c.negated;
        }
        return false;
    }

    std::vector<std::string> frames() const { return {stack_.rbegin(), stack_.rend()}; }

    /// Returns false once the body must stop (return or runtime error).
    bool exec_body(Frame &fr, const std::vector<Stmt> &body, std::optional<std::string> &ret)
    {
        for (const auto &s : body) {
            if (trace_.error || ret)
                return false;
            trace_.stmts.push_back(s.id);
            switch (s.kind) {
            case StmtKind::Assign: store(fr, s.var, eval(fr, *s.expr)); break;
            case StmtKind::If: {
                Side side = test(fr, s.cond) ? Side::Then : Side::Else;
                if (auto it = opt_.branch_overrides.find(s.site); it != opt_.branch_overrides.end())
                    side = it->second;
                trace_.branches.push_back({s.site, s.id, side});
                if (!exec_body(fr, side == Side::Then ? s.then_body : s.else_body, ret))
                    return false;
                break;
            }
            case StmtKind::SinkCall: {
                SinkInvocation inv;
                inv.stmt_id = s.id;
                inv.sink = s.name;
                inv.query = eval_str(fr, *s.expr);
                for (const auto &a : s.args)
                    inv.params.push_back(eval_str(fr, *a));
                inv.stack = frames();
                std::string result = opt_.sink_handler ? opt_.sink_handler(inv) : std::string{};
                trace_.sinks.push_back(std::move(inv));
                if (!s.var.empty())
                    store(fr, s.var, result);
                break;
            }
            case StmtKind::LeakCall:
                trace_.leaks.push_back({s.id, LeakChannel::SetText, s.name, eval_str(fr, *s.expr)});
                break;
            case StmtKind::ProviderQuery: {
                const auto *p = app_.component(s.name);
                const auto *f = p->query_handler();
                Frame pf{p, {}};
                pf.locals[f->params[0].name] = eval_str(fr, *s.expr);
                if (!enter())
                    return false;
                stack_.push_back(qualified_name(*p, *f));
                std::optional<std::string> pret;
                exec_body(pf, f->body, pret);
                stack_.pop_back();
                --depth_;
                if (trace_.error)
                    return false;
                store(fr, s.var, pret.value_or(std::string{}));
                break;
            }
            case StmtKind::CallFn: {
                const auto *f = fr.comp->helper(s.name);
                Frame callee{fr.comp, {}};
                for (std::size_t i = 0; i < f->params.size(); ++i)
                    callee.locals[f->params[i].name] = eval(fr, *s.args[i]);
                if (!enter())
                    return false;
                stack_.push_back(qualified_name(*fr.comp, *f));
                std::optional<std::string> ignored;
                exec_body(callee, f->body, ignored);
                stack_.pop_back();
                --depth_;
                if (trace_.error)
                    return false;
                break;
            }
            case StmtKind::Return:
                ret = eval_str(fr, *s.expr);
                return_stmt_ = s.id;
                return false;
            }
        }
        return !trace_.error && !ret;
    }

    bool enter()
    {
        if (depth_ + 1 > opt_.max_call_depth) {
            trace_.error = "call depth limit " + std::to_string(opt_.max_call_depth) + " exceeded";
            return false;
        }
        ++depth_;
        return true;
    }

    const MiniApp &app_;
    const ConcreteInputs &inputs_;
    const ConcreteOptions &opt_;
    std::map<std::string, std::map<std::string, Value>> stores_;
    std::vector<std::string> stack_{std::string(kDriverMain)};
    int depth_ = 0;
    int return_stmt_ = 0;
    ExecTrace trace_;
};

} // namespace

ExecTrace eval_concrete(const ir::MiniApp &app, const Driver &driver, const ConcreteInputs &inputs,
    const ConcreteOptions &options)
{
    validate_driver(app, driver);
    return Interp(app, inputs, options).run(driver);
}

} // namespace consicore
