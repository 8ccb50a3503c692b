#include "consicore/ir.hpp"

#include <sstream>

namespace consicore::ir {

namespace {

int precedence(const Expr &e)
{
    switch (e.kind) {
    case ExprKind::Concat:
    case ExprKind::IntAdd: return 1;
    case ExprKind::IntMul: return 2;
    default: return 3;
    }
}

void print(std::ostream &os, const Expr &e)
{
    switch (e.kind) {
    case ExprKind::IntConst: os << e.int_value; return;
    case ExprKind::StrConst: os << quote(e.text); return;
    case ExprKind::Var: os << e.text; return;
    case ExprKind::ReadInput: os << "input(" << e.text << ")"; return;
    case ExprKind::CoerceInt:
        os << "int(";
        print(os, *e.lhs);
        os << ")";
        return;
    case ExprKind::Concat:
    case ExprKind::IntAdd:
    case ExprKind::IntMul: {
        int p = precedence(e);
        bool lp = precedence(*e.lhs) < p;
        bool rp = precedence(*e.rhs) <= p;
        if (lp)
            os << "(";
        print(os, *e.lhs);
        if (lp)
            os << ")";
        os << (e.kind == ExprKind::IntMul ? " * " : " + ");
        if (rp)
            os << "(";
        print(os, *e.rhs);
        if (rp)
            os << ")";
        return;
    }
    }
}

class Printer {
public:
    std::string run(const MiniApp &app)
    {
        os_ << "app " << quote(app.name) << " {\n";
        for (const auto &t : app.tables) {
            os_ << "  table " << t.name << "(";
            for (std::size_t i = 0; i < t.columns.size(); ++i)
                os_ << (i ? ", " : "") << t.columns[i];
            os_ << ")\n";
        }
        for (const auto &c : app.components) {
            os_ << "  " << (c.kind == ComponentKind::Activity ? "activity " : "provider ") << c.name << " {\n";
            for (const auto &w : c.widgets)
                os_ << "    widget " << to_string(w.kind) << " " << w.id << "\n";
            for (const auto &f : c.functions)
                function(f);
            os_ << "  }\n";
        }
        os_ << "}\n";
        return os_.str();
    }

private:
    void indent(int depth)
    {
        for (int i = 0; i < depth; ++i)
            os_ << "  ";
    }

    void function(const Function &f)
    {
        os_ << "    ";
        switch (f.kind) {
        case FunctionKind::Lifecycle:
            os_ << (f.slot == LifecycleSlot::OnCreate  ? "oncreate"
                    : f.slot == LifecycleSlot::OnStart ? "onstart"
                                                       : "onresume");
            break;
        case FunctionKind::Listener: os_ << "onclick(" << f.widget << ")"; break;
        case FunctionKind::ProviderQuery: os_ << "query(" << f.params.at(0).name << ")"; break;
        case FunctionKind::Helper:
            os_ << "fn " << f.name << "(";
            for (std::size_t i = 0; i < f.params.size(); ++i)
                os_ << (i ? ", " : "") << f.params[i].name << ": " << to_string(f.params[i].sort);
            os_ << ")";
            break;
        }
        os_ << " {\n";
        body(f.body, 3);
        os_ << "    }\n";
    }

    void body(const std::vector<Stmt> &stmts, int depth)
    {
        for (const auto &s : stmts)
            stmt(s, depth);
    }

    void args(const std::vector<ExprPtr> &as)
    {
        for (std::size_t i = 0; i < as.size(); ++i) {
            os_ << (i ? ", " : "");
            print(os_, *as[i]);
        }
    }

    void stmt(const Stmt &s, int depth)
    {
        indent(depth);
        switch (s.kind) {
        case StmtKind::Assign:
            os_ << s.var << " = ";
            print(os_, *s.expr);
            break;
        case StmtKind::If:
            os_ << "if (" << print_cond(s.cond) << ") {\n";
            body(s.then_body, depth + 1);
            indent(depth);
            os_ << "} else {\n";
            body(s.else_body, depth + 1);
            indent(depth);
            os_ << "}";
            break;
        case StmtKind::SinkCall:
            if (!s.var.empty())
                os_ << s.var << " = ";
            os_ << s.name << "(";
            print(os_, *s.expr);
            if (!s.args.empty()) {
                os_ << ", [";
                args(s.args);
                os_ << "]";
            }
            os_ << ")";
            break;
        case StmtKind::LeakCall:
            os_ << "setText(" << s.name << ", ";
            print(os_, *s.expr);
            os_ << ")";
            break;
        case StmtKind::ProviderQuery:
            os_ << s.var << " = providerQuery(" << s.name << ", ";
            print(os_, *s.expr);
            os_ << ")";
            break;
        case StmtKind::CallFn:
            os_ << "call " << s.name << "(";
            args(s.args);
            os_ << ")";
            break;
        case StmtKind::Return:
            os_ << "return ";
            print(os_, *s.expr);
            break;
        }
        os_ << "\n";
    }

    std::ostringstream os_;
};

} // namespace

std::string print_expr(const Expr &e)
{
    std::ostringstream os;
    print(os, e);
    return os.str();
}

std::string print_cond(const Cond &c)
{
    switch (c.kind) {
    case CondKind::IntCmp: return print_expr(*c.lhs) + " " + std::string(to_string(c.op)) + " " + print_expr(*c.rhs);
    case CondKind::StrEq:
        return print_expr(*c.lhs) + (c.negated ? " != " : " == ") + print_expr(*c.rhs);
    case CondKind::StrContains:
        return std::string(c.negated ? "!" : "") + "contains(" + print_expr(*c.lhs) + ", " + print_expr(*c.rhs) + ")";
    }
    return {};
}

std::string print_app(const MiniApp &app) { return Printer().run(app); }

} // namespace consicore::ir
