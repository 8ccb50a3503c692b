#pragma once

// Symbolic expressions, constraints and path conditions. Symbolic variables
// double as taint marks: every variable records where its value came from.

#include "consicore/ir.hpp"
#include "consicore/value.hpp"

#include <compare>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace consicore::sym {

enum class OriginKind { SourceWidget, SinkResult, ProviderArg };

std::string_view to_string(OriginKind k);

struct Origin {
    OriginKind kind = OriginKind::SourceWidget;
    std::string name;   // widget id, sink name or provider name
    Sort sort = Sort::Str;
    int stmt_id = 0;    // SinkResult: the sink call statement
    int occurrence = 0; // SinkResult: how many times that statement ran before on this path

    auto operator<=>(const Origin &) const = default;
    bool operator==(const Origin &) const = default;

    bool is_source() const { return kind != OriginKind::SinkResult; }
};

struct SymVar {
    int id = 0;
    Sort sort = Sort::Str;
    Origin origin;
    std::string name; // S0, N1, R2, Q3
};

enum class SymKind { Var, IntConst, StrConst, Concat, IntAdd, IntMul, CoerceInt };

struct SymExpr;
using SymPtr = std::shared_ptr<const SymExpr>;

struct SymExpr {
    SymKind kind = SymKind::IntConst;
    Sort sort = Sort::Int;
    int var = -1;        // Var
    std::int64_t int_value = 0;
    std::string text;    // StrConst value, or the variable's display name
    SymPtr lhs;
    SymPtr rhs;
};

SymPtr var_expr(const SymVar &v);
SymPtr int_const(std::int64_t v);
SymPtr str_const(std::string s);
SymPtr concat(SymPtr a, SymPtr b);
SymPtr int_add(SymPtr a, SymPtr b);
SymPtr int_mul(SymPtr a, SymPtr b);
SymPtr coerce(SymPtr a);
/// Constant expression holding a concrete value.
SymPtr lift(const Value &v);

bool operator==(const SymExpr &a, const SymExpr &b);

/// Branch predicate with polarity. Negating an IntCmp flips its operator;
/// StrEq and StrContains toggle `negated`.
struct Constraint {
    ir::CondKind kind = ir::CondKind::IntCmp;
    ir::CmpOp op = ir::CmpOp::Eq;
    SymPtr lhs;
    SymPtr rhs;
    bool negated = false;
};

bool operator==(const Constraint &a, const Constraint &b);

Constraint negate(const Constraint &c);

struct PathEntry {
    int site = 0;
    ir::Side side = ir::Side::Then;
    Constraint constraint; // the predicate that held on this path
};

using PathCondition = std::vector<PathEntry>;

/// Constraints 0..k-1 as taken plus constraint k negated. Throws
/// std::out_of_range unless 0 <= k < pc.size().
std::vector<Constraint> negate_last(const PathCondition &pc, std::size_t k);

using Model = std::map<int, Value>;

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws EvalError for a variable the model does not cover.
Value eval_model(const SymExpr &e, const Model &m);
bool eval_model(const Constraint &c, const Model &m);

void collect_vars(const SymExpr &e, std::set<int> &out);
void collect_vars(const Constraint &c, std::set<int> &out);
std::set<int> vars_of(const Constraint &c);
bool has_vars(const SymExpr &e);

std::string to_string(const SymExpr &e);
/// `N1 <= 5`, `S0 == "abc"`, `!contains(S0, "q")`.
std::string to_string(const Constraint &c);

/// Template text of a string expression: constants spliced verbatim,
/// symbolic parts as `{S0}` holes.
std::string render_template(const SymExpr &e);

/// Per-exploration registry of symbolic variables, keyed by origin.
class VarTable {
public:
    const SymVar &intern(const Origin &o);
    const SymVar *find(const Origin &o) const;
    const SymVar &at(int id) const { return vars_.at(static_cast<std::size_t>(id)); }
    const std::vector<SymVar> &vars() const { return vars_; }

private:
    std::vector<SymVar> vars_;
    std::map<Origin, int> index_;
};

} // namespace consicore::sym
