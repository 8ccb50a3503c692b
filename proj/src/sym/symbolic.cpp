#include "consicore/symbolic.hpp"

namespace consicore::sym {

std::string_view to_string(OriginKind k)
{
    switch (k) {
    case OriginKind::SourceWidget: return "source";
    case OriginKind::SinkResult: return "sink_result";
    case OriginKind::ProviderArg: return "provider_arg";
    }
    return "?";
}

namespace {

std::shared_ptr<SymExpr> node(SymKind k, Sort s)
{
    auto e = std::make_shared<SymExpr>();
    e->kind = k;
    e->sort = s;
    return e;
}

SymPtr binary(SymKind k, Sort s, SymPtr a, SymPtr b)
{
    auto e = node(k, s);
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

bool same(const SymPtr &a, const SymPtr &b)
{
    if (!a || !b)
        return !a && !b;
    return *a == *b;
}

} // namespace

SymPtr var_expr(const SymVar &v)
{
    auto e = node(SymKind::Var, v.sort);
    e->var = v.id;
    e->text = v.name;
    return e;
}

SymPtr int_const(std::int64_t v)
{
    auto e = node(SymKind::IntConst, Sort::Int);
    e->int_value = v;
    return e;
}

SymPtr str_const(std::string s)
{
    auto e = node(SymKind::StrConst, Sort::Str);
    e->text = std::move(s);
    return e;
}

SymPtr concat(SymPtr a, SymPtr b) { return binary(SymKind::Concat, Sort::Str, std::move(a), std::move(b)); }
SymPtr int_add(SymPtr a, SymPtr b) { return binary(SymKind::IntAdd, Sort::Int, std::move(a), std::move(b)); }
SymPtr int_mul(SymPtr a, SymPtr b) { return binary(SymKind::IntMul, Sort::Int, std::move(a), std::move(b)); }

SymPtr coerce(SymPtr a)
{
    auto e = node(SymKind::CoerceInt, Sort::Int);
    e->lhs = std::move(a);
    return e;
}

SymPtr lift(const Value &v)
{
    if (auto *i = std::get_if<std::int64_t>(&v))
        return int_const(*i);
    return str_const(std::get<std::string>(v));
}

bool operator==(const SymExpr &a, const SymExpr &b)
{
    return a.kind == b.kind && a.sort == b.sort && a.var == b.var && a.int_value == b.int_value &&
           a.text == b.text && same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
}

bool operator==(const Constraint &a, const Constraint &b)
{
    return a.kind == b.kind && (a.kind != ir::CondKind::IntCmp || a.op == b.op) && a.negated == b.negated &&
           same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
}

Constraint negate(const Constraint &c)
{
    Constraint n = c;
    if (c.kind == ir::CondKind::IntCmp)
        n.op = ir::negate(c.op);
    else
        n.negated = !c.negated;
    return n;
}

std::vector<Constraint> negate_last(const PathCondition &pc, std::size_t k)
{
    if (k >= pc.size())
        throw std::out_of_range("negate_last: index " + std::to_string(k) + " out of range for path condition of length " +
                                std::to_string(pc.size()));
    std::vector<Constraint> out;
    out.reserve(k + 1);
    for (std::size_t i = 0; i < k; ++i)
        out.push_back(pc[i].constraint);
    out.push_back(negate(pc[k].constraint));
    return out;
}

Value eval_model(const SymExpr &e, const Model &m)
{
    switch (e.kind) {
    case SymKind::Var: {
        auto it = m.find(e.var);
        if (it == m.end())
            throw EvalError("model does not cover variable " + e.text);
        return it->second;
    }
    case SymKind::IntConst: return e.int_value;
    case SymKind::StrConst: return e.text;
    case SymKind::Concat:
        return std::get<std::string>(eval_model(*e.lhs, m)) + std::get<std::string>(eval_model(*e.rhs, m));
    case SymKind::IntAdd:
        return wrap_add(std::get<std::int64_t>(eval_model(*e.lhs, m)), std::get<std::int64_t>(eval_model(*e.rhs, m)));
    case SymKind::IntMul:
        return wrap_mul(std::get<std::int64_t>(eval_model(*e.lhs, m)), std::get<std::int64_t>(eval_model(*e.rhs, m)));
    case SymKind::CoerceInt: return coerce_int(std::get<std::string>(eval_model(*e.lhs, m)));
    }
    return std::int64_t{0};
}

bool eval_model(const Constraint &c, const Model &m)
{
    Value l = eval_model(*c.lhs, m);
    Value r = eval_model(*c.rhs, m);
    switch (c.kind) {
    case ir::CondKind::IntCmp: return ir::compare(c.op, std::get<std::int64_t>(l), std::get<std::int64_t>(r));
    case ir::CondKind::StrEq: return (std::get<std::string>(l) == std::get<std::string>(r)) != c.negated;
    case ir::CondKind::StrContains:
        return (std::get<std::string>(l).find(std::get<std::string>(r)) != std::string::npos) != c.negated;
    }
    return false;
}

void collect_vars(const SymExpr &e, std::set<int> &out)
{
    if (e.kind == SymKind::Var)
        out.insert(e.var);
    if (e.lhs)
        collect_vars(*e.lhs, out);
    if (e.rhs)
        collect_vars(*e.rhs, out);
}

void collect_vars(const Constraint &c, std::set<int> &out)
{
    collect_vars(*c.lhs, out);
    collect_vars(*c.rhs, out);
}

std::set<int> vars_of(const Constraint &c)
{
    std::set<int> s;
    collect_vars(c, s);
    return s;
}

bool has_vars(const SymExpr &e)
{
    if (e.kind == SymKind::Var)
        return true;
    return (e.lhs && has_vars(*e.lhs)) || (e.rhs && has_vars(*e.rhs));
}

namespace {

int precedence(const SymExpr &e)
{
    switch (e.kind) {
    case SymKind::Concat:
    case SymKind::IntAdd: return 1;
    case SymKind::IntMul: return 2;
    default: return 3;
    }
}

std::string operand(const SymExpr &e, int parent, bool right)
{
    int p = precedence(e);
    bool wrap = p < parent || (right && p == parent);
    return wrap ? "(" + to_string(e) + ")" : to_string(e);
}

} // namespace

std::string to_string(const SymExpr &e)
{
    switch (e.kind) {
    case SymKind::Var: return e.text;
    case SymKind::IntConst: return std::to_string(e.int_value);
    case SymKind::StrConst: return quote(e.text);
    case SymKind::CoerceInt: return "int(" + to_string(*e.lhs) + ")";
    case SymKind::Concat:
    case SymKind::IntAdd:
        return operand(*e.lhs, 1, false) + " + " + operand(*e.rhs, 1, true);
    case SymKind::IntMul: return operand(*e.lhs, 2, false) + " * " + operand(*e.rhs, 2, true);
    }
    return "?";
}

std::string to_string(const Constraint &c)
{
    switch (c.kind) {
    case ir::CondKind::IntCmp:
        return to_string(*c.lhs) + " " + std::string(ir::to_string(c.op)) + " " + to_string(*c.rhs);
    case ir::CondKind::StrEq: return to_string(*c.lhs) + (c.negated ? " != " : " == ") + to_string(*c.rhs);
    case ir::CondKind::StrContains:
        return std::string(c.negated ? "!" : "") + "contains(" + to_string(*c.lhs) + ", " + to_string(*c.rhs) + ")";
    }
    return "?";
}

std::string render_template(const SymExpr &e)
{
    switch (e.kind) {
    case SymKind::StrConst: return e.text;
    case SymKind::Concat: return render_template(*e.lhs) + render_template(*e.rhs);
    case SymKind::IntConst: return std::to_string(e.int_value);
    default: return "{" + to_string(e) + "}";
    }
}

const SymVar &VarTable::intern(const Origin &o)
{
    if (auto it = index_.find(o); it != index_.end())
        return vars_[static_cast<std::size_t>(it->second)];
    SymVar v;
    v.id = static_cast<int>(vars_.size());
    v.sort = o.sort;
    v.origin = o;
    char prefix = 'S';
    switch (o.kind) {
    case OriginKind::SourceWidget: prefix = o.sort == Sort::Int ? 'N' : 'S'; break;
    case OriginKind::SinkResult: prefix = 'R'; break;
    case OriginKind::ProviderArg: prefix = 'Q'; break;
    }
    v.name = prefix + std::to_string(v.id);
    index_.emplace(o, v.id);
    vars_.push_back(v);
    return vars_.back();
}

const SymVar *VarTable::find(const Origin &o) const
{
    auto it = index_.find(o);
    return it == index_.end() ? nullptr : &vars_[static_cast<std::size_t>(it->second)];
}

} // namespace consicore::sym
