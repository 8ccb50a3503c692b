#include "consicore/ir.hpp"

namespace consicore::ir {

ParseError::ParseError(SourcePos pos, const std::string &detail)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + detail), pos_(pos),
      detail_(detail)
{}

ExprPtr make_int(std::int64_t v)
{
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::IntConst;
    e->sort = Sort::Int;
    e->int_value = v;
    return e;
}

ExprPtr make_str(std::string v)
{
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::StrConst;
    e->sort = Sort::Str;
    e->text = std::move(v);
    return e;
}

ExprPtr make_var(std::string name, Sort sort)
{
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Var;
    e->sort = sort;
    e->text = std::move(name);
    return e;
}

ExprPtr make_input(std::string widget)
{
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::ReadInput;
    e->sort = Sort::Str;
    e->text = std::move(widget);
    return e;
}

ExprPtr make_coerce(ExprPtr operand)
{
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::CoerceInt;
    e->sort = Sort::Int;
    e->lhs = std::move(operand);
    return e;
}

ExprPtr make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs)
{
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->sort = kind == ExprKind::Concat ? Sort::Str : Sort::Int;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
}

namespace {

bool same_ptr(const ExprPtr &a, const ExprPtr &b)
{
    if (!a || !b)
        return !a && !b;
    return *a == *b;
}

template <typename T>
bool same_ptrs(const std::vector<T> &a, const std::vector<T> &b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!same_ptr(a[i], b[i]))
            return false;
    return true;
}

} // namespace

bool operator==(const Expr &a, const Expr &b)
{
    return a.kind == b.kind && a.sort == b.sort && a.int_value == b.int_value && a.text == b.text &&
           same_ptr(a.lhs, b.lhs) && same_ptr(a.rhs, b.rhs);
}

bool operator==(const Cond &a, const Cond &b)
{
    return a.kind == b.kind && (a.kind != CondKind::IntCmp || a.op == b.op) && a.negated == b.negated &&
           same_ptr(a.lhs, b.lhs) && same_ptr(a.rhs, b.rhs);
}

bool operator==(const Stmt &a, const Stmt &b)
{
    if (a.id != b.id || a.kind != b.kind || a.var != b.var || a.name != b.name || !same_ptr(a.expr, b.expr) ||
        !same_ptrs(a.args, b.args))
        return false;
    if (a.kind == StmtKind::If)
        return a.site == b.site && a.cond == b.cond && a.then_body == b.then_body && a.else_body == b.else_body;
    return true;
}

bool operator==(const Function &a, const Function &b)
{
    return a.kind == b.kind && a.slot == b.slot && a.widget == b.widget && a.name == b.name && a.params == b.params &&
           a.body == b.body;
}

bool operator==(const Component &a, const Component &b)
{
    return a.name == b.name && a.kind == b.kind && a.widgets == b.widgets && a.functions == b.functions &&
           a.var_sorts == b.var_sorts;
}

bool operator==(const MiniApp &a, const MiniApp &b)
{
    return a.name == b.name && a.components == b.components && a.tables == b.tables &&
           a.stmt_count == b.stmt_count && a.site_count == b.site_count;
}

std::string_view to_string(Side s) { return s == Side::Then ? "then" : "else"; }

std::string_view to_string(CmpOp op)
{
    switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    }
    return "?";
}

CmpOp negate(CmpOp op)
{
    switch (op) {
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    }
    return op;
}

bool compare(CmpOp op, std::int64_t a, std::int64_t b)
{
    switch (op) {
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    }
    return false;
}

std::string_view to_string(WidgetKind k)
{
    switch (k) {
    case WidgetKind::EditBox: return "edit";
    case WidgetKind::Button: return "button";
    case WidgetKind::TextBox: return "text";
    }
    return "?";
}

std::string_view to_string(LifecycleSlot s)
{
    switch (s) {
    case LifecycleSlot::OnCreate: return "onCreate";
    case LifecycleSlot::OnStart: return "onStart";
    case LifecycleSlot::OnResume: return "onResume";
    }
    return "?";
}

const Widget *Component::widget(std::string_view id) const
{
    for (const auto &w : widgets)
        if (w.id == id)
            return &w;
    return nullptr;
}

const Function *Component::lifecycle(LifecycleSlot slot) const
{
    for (const auto &f : functions)
        if (f.kind == FunctionKind::Lifecycle && f.slot == slot)
            return &f;
    return nullptr;
}

const Function *Component::listener(std::string_view widget_id) const
{
    for (const auto &f : functions)
        if (f.kind == FunctionKind::Listener && f.widget == widget_id)
            return &f;
    return nullptr;
}

const Function *Component::query_handler() const
{
    for (const auto &f : functions)
        if (f.kind == FunctionKind::ProviderQuery)
            return &f;
    return nullptr;
}

const Function *Component::helper(std::string_view fn) const
{
    for (const auto &f : functions)
        if (f.kind == FunctionKind::Helper && f.name == fn)
            return &f;
    return nullptr;
}

const Component *MiniApp::component(std::string_view n) const
{
    for (const auto &c : components)
        if (c.name == n)
            return &c;
    return nullptr;
}

const Widget *MiniApp::find_widget(std::string_view id, const Component **owner) const
{
    for (const auto &c : components)
        if (const auto *w = c.widget(id)) {
            if (owner)
                *owner = &c;
            return w;
        }
    return nullptr;
}

int MiniApp::widget_index(std::string_view id) const
{
    int i = 0;
    for (const auto &c : components)
        for (const auto &w : c.widgets) {
            if (w.id == id)
                return i;
            ++i;
        }
    return -1;
}

std::string qualified_name(const Component &c, const Function &f)
{
    switch (f.kind) {
    case FunctionKind::Lifecycle: return c.name + "." + std::string(to_string(f.slot));
    case FunctionKind::Listener: return c.name + "$" + f.widget + ".onClick";
    case FunctionKind::ProviderQuery: return c.name + ".query";
    case FunctionKind::Helper: return c.name + "." + f.name;
    }
    return c.name;
}

} // namespace consicore::ir
