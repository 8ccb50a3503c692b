#pragma once

// Mini-app intermediate representation: an event-driven app made of
// activities (widgets, lifecycle handlers, click listeners, helper functions)
// and content providers (a single `query` handler reachable over IPC).

#include "consicore/value.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace consicore::ir {

struct SourcePos {
    int line = 0;
    int column = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(SourcePos pos, const std::string &detail);

    SourcePos pos() const { return pos_; }
    const std::string &detail() const { return detail_; }

private:
    SourcePos pos_;
    std::string detail_;
};

enum class ExprKind { IntConst, StrConst, Var, ReadInput, Concat, IntAdd, IntMul, CoerceInt };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind = ExprKind::IntConst;
    Sort sort = Sort::Int;
    std::int64_t int_value = 0;
    std::string text; // string literal, variable name or widget id
    ExprPtr lhs;
    ExprPtr rhs;
    SourcePos pos;
};

ExprPtr make_int(std::int64_t v);
ExprPtr make_str(std::string v);
ExprPtr make_var(std::string name, Sort sort);
ExprPtr make_input(std::string widget);
ExprPtr make_coerce(ExprPtr operand);
/// Concat, IntAdd or IntMul; the sort follows from the kind.
ExprPtr make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs);

bool operator==(const Expr &a, const Expr &b);

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

enum class Side { Then, Else };

inline Side opposite(Side s) { return s == Side::Then ? Side::Else : Side::Then; }
std::string_view to_string(Side s);

std::string_view to_string(CmpOp op);
CmpOp negate(CmpOp op);
bool compare(CmpOp op, std::int64_t a, std::int64_t b);

enum class CondKind { IntCmp, StrEq, StrContains };

struct Cond {
    CondKind kind = CondKind::IntCmp;
    CmpOp op = CmpOp::Eq; // IntCmp only
    ExprPtr lhs;
    ExprPtr rhs;
    bool negated = false; // StrEq / StrContains only (`!=`, `!contains`)
};

bool operator==(const Cond &a, const Cond &b);

enum class StmtKind {
    Assign,        // var = expr
    If,            // if (cond) { then_body } else { else_body }
    SinkCall,      // [var =] name(expr [, [args...]])
    LeakCall,      // setText(name, expr)
    ProviderQuery, // var = providerQuery(name, expr)
    CallFn,        // call name(args...)
    Return,        // return expr   (provider query handler only; leaks to the IPC caller)
};

struct Stmt {
    int id = 0;
    StmtKind kind = StmtKind::Assign;
    std::string var;
    ExprPtr expr;
    Cond cond;
    int site = 0;
    std::vector<Stmt> then_body;
    std::vector<Stmt> else_body;
    std::string name;
    std::vector<ExprPtr> args;
    SourcePos pos;

    bool parametric() const { return kind == StmtKind::SinkCall && !args.empty(); }
};

bool operator==(const Stmt &a, const Stmt &b);

enum class WidgetKind { EditBox, Button, TextBox };

std::string_view to_string(WidgetKind k);

struct Widget {
    std::string id;
    WidgetKind kind = WidgetKind::EditBox;
    SourcePos pos;

    bool operator==(const Widget &o) const { return id == o.id && kind == o.kind; }
};

enum class LifecycleSlot { OnCreate, OnStart, OnResume };

inline constexpr LifecycleSlot kLifecycleOrder[] = {LifecycleSlot::OnCreate, LifecycleSlot::OnStart,
    LifecycleSlot::OnResume};

std::string_view to_string(LifecycleSlot s);

enum class FunctionKind { Lifecycle, Listener, ProviderQuery, Helper };

struct Param {
    std::string name;
    Sort sort = Sort::Str;

    bool operator==(const Param &o) const = default;
};

struct Function {
    FunctionKind kind = FunctionKind::Helper;
    LifecycleSlot slot = LifecycleSlot::OnCreate; // Lifecycle
    std::string widget;                           // Listener: the clicked button
    std::string name;                             // Helper
    std::vector<Param> params;                    // Helper, ProviderQuery (one str param)
    std::vector<Stmt> body;
    SourcePos pos;

    bool is_entry() const { return kind != FunctionKind::Helper; }
};

bool operator==(const Function &a, const Function &b);

enum class ComponentKind { Activity, Provider };

struct Component {
    std::string name;
    ComponentKind kind = ComponentKind::Activity;
    std::vector<Widget> widgets;
    std::vector<Function> functions; // declaration order
    std::map<std::string, Sort> var_sorts;
    SourcePos pos;

    const Widget *widget(std::string_view id) const;
    const Function *lifecycle(LifecycleSlot slot) const;
    const Function *listener(std::string_view widget_id) const;
    const Function *query_handler() const;
    const Function *helper(std::string_view fn) const;
};

bool operator==(const Component &a, const Component &b);

struct TableSchema {
    std::string name;
    std::vector<std::string> columns;

    bool operator==(const TableSchema &o) const = default;
};

struct MiniApp {
    std::string name;
    std::vector<Component> components;
    std::vector<TableSchema> tables;
    int stmt_count = 0;
    int site_count = 0;

    const Component *component(std::string_view name) const;
    /// Finds a widget by its app-wide unique id.
    const Widget *find_widget(std::string_view id, const Component **owner = nullptr) const;
    /// Declaration index of a widget across the app, or -1.
    int widget_index(std::string_view id) const;
};

bool operator==(const MiniApp &a, const MiniApp &b);

/// Qualified function name as it appears in call graphs and stack traces:
/// `Main.onCreate`, `Main$b1.onClick`, `Provider.query`, `Main.helper`.
std::string qualified_name(const Component &c, const Function &f);

/// Parses and validates IR source text. Throws ParseError with line/column.
MiniApp parse_app(std::string_view source);

/// Canonical source rendering; parse_app(print_app(a)) == a.
std::string print_app(const MiniApp &app);

std::string print_expr(const Expr &e);
std::string print_cond(const Cond &c);

/// Visits every statement (pre-order) of a body.
template <typename F>
void for_each_stmt(const std::vector<Stmt> &body, F &&f)
{
    for (const auto &s : body) {
        f(s);
        if (s.kind == StmtKind::If) {
            for_each_stmt(s.then_body, f);
            for_each_stmt(s.else_body, f);
        }
    }
}

} // namespace consicore::ir
