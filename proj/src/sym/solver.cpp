#include "consicore/solver.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>

namespace consicore::sym {

void validate(const SolverConfig &cfg)
{
    if (cfg.int_bound < 0)
        throw std::invalid_argument("int bound must be non-negative");
    if (cfg.str_maxlen < 0)
        throw std::invalid_argument("string max length must be non-negative");
    if (cfg.alphabet.empty())
        throw std::invalid_argument("alphabet must not be empty");
    if (cfg.max_effort == 0)
        throw std::invalid_argument("solver effort must be positive");
}

std::string_view to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Sat: return "sat";
    case SolveStatus::Unsat: return "unsat";
    case SolveStatus::Unknown: return "unknown";
    }
    return "?";
}

namespace {

Sort check_expr(const SymExpr &e, std::map<int, Sort> &var_sorts)
{
    auto want = [&](const SymPtr &p, Sort s, const char *what) {
        if (!p)
            throw SortError(std::string("missing operand of ") + what);
        if (check_expr(*p, var_sorts) != s)
            throw SortError(std::string("sort mismatch: ") + what + " expects " + std::string(to_string(s)));
    };
    switch (e.kind) {
    case SymKind::Var: {
        auto [it, inserted] = var_sorts.emplace(e.var, e.sort);
        if (!inserted && it->second != e.sort)
            throw SortError("variable " + e.text + " used with two sorts");
        return e.sort;
    }
    case SymKind::IntConst: return Sort::Int;
    case SymKind::StrConst: return Sort::Str;
    case SymKind::Concat:
        want(e.lhs, Sort::Str, "concatenation");
        want(e.rhs, Sort::Str, "concatenation");
        return Sort::Str;
    case SymKind::IntAdd:
    case SymKind::IntMul:
        want(e.lhs, Sort::Int, "arithmetic");
        want(e.rhs, Sort::Int, "arithmetic");
        return Sort::Int;
    case SymKind::CoerceInt: want(e.lhs, Sort::Str, "int coercion"); return Sort::Int;
    }
    return Sort::Int;
}

void check_constraint(const Constraint &c, std::map<int, Sort> &var_sorts)
{
    if (!c.lhs || !c.rhs)
        throw SortError("constraint with a missing operand");
    Sort l = check_expr(*c.lhs, var_sorts);
    Sort r = check_expr(*c.rhs, var_sorts);
    Sort want = c.kind == ir::CondKind::IntCmp ? Sort::Int : Sort::Str;
    if (l != want || r != want)
        throw SortError("sort mismatch in constraint " + to_string(c));
}

bool symbolic_coercion(const SymExpr &e)
{
    if (e.kind == SymKind::CoerceInt && has_vars(*e.lhs))
        return true;
    return (e.lhs && symbolic_coercion(*e.lhs)) || (e.rhs && symbolic_coercion(*e.rhs));
}

bool nonlinear(const SymExpr &e)
{
    if (e.kind == SymKind::IntMul && has_vars(*e.lhs) && has_vars(*e.rhs))
        return true;
    return (e.lhs && nonlinear(*e.lhs)) || (e.rhs && nonlinear(*e.rhs));
}

struct EffortExceeded {};

class Budget {
public:
    explicit Budget(std::uint64_t limit) : left_(limit) {}
    void spend()
    {
        if (left_ == 0)
            throw EffortExceeded{};
        --left_;
    }

private:
    std::uint64_t left_;
};

struct GroupResult {
    SolveStatus status = SolveStatus::Unknown;
    bool bounded = false;
    std::string reason;
};

// Constraints indexed by the position of their last variable in `vars`.
std::vector<std::vector<const Constraint *>> by_last_var(const std::vector<int> &vars,
    const std::vector<const Constraint *> &cons, std::vector<std::vector<const Constraint *>> &unary)
{
    std::vector<std::vector<const Constraint *>> out(vars.size());
    unary.assign(vars.size(), {});
    for (const auto *c : cons) {
        auto vs = vars_of(*c);
        std::size_t last = 0;
        for (int v : vs)
            last = std::max(last, static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin()));
        if (vs.size() == 1)
            unary[last].push_back(c);
        else
            out[last].push_back(c);
    }
    return out;
}

bool holds(const std::vector<const Constraint *> &cs, const Model &m, Budget &budget)
{
    for (const auto *c : cs) {
        budget.spend();
        if (!eval_model(*c, m))
            return false;
    }
    return true;
}

class IntGroup {
public:
    IntGroup(std::vector<int> vars, const std::vector<const Constraint *> &cons, std::int64_t bound, Budget &budget,
        Model &model)
        : vars_(std::move(vars)), bound_(bound), budget_(budget), model_(model)
    {
        checks_ = by_last_var(vars_, cons, unary_);
    }

    GroupResult run()
    {
        const std::size_t k = vars_.size();
        domain_.resize(k);
        member_.assign(k, std::vector<bool>(static_cast<std::size_t>(2 * bound_ + 1), false));
        for (std::size_t i = 0; i < k; ++i) {
            for (std::int64_t mag = 0; mag <= bound_; ++mag) {
                for (std::int64_t v : {mag, -mag}) {
                    if (mag == 0 && v != 0)
                        continue;
                    model_[vars_[i]] = v;
                    if (holds(unary_[i], model_, budget_)) {
                        domain_[i].push_back(v);
                        member_[i][static_cast<std::size_t>(v + bound_)] = true;
                    }
                }
            }
            if (domain_[i].empty())
                return {SolveStatus::Unsat, true, "no integer in [-B, B] satisfies the constraints on one variable"};
        }
        std::int64_t max_total = 0;
        for (const auto &d : domain_) {
            std::int64_t m = 0;
            for (auto v : d)
                m = std::max(m, v < 0 ? -v : v);
            max_total += m;
        }
        for (std::int64_t t = 0; t <= max_total; ++t)
            if (dfs(0, t))
                return {SolveStatus::Sat, false, {}};
        return {SolveStatus::Unsat, true, "integer search space exhausted"};
    }

private:
    bool dfs(std::size_t i, std::int64_t remaining)
    {
        budget_.spend();
        const std::size_t k = vars_.size();
        if (i + 1 == k) {
            for (std::int64_t v : {remaining, -remaining}) {
                if (remaining == 0 && v != 0)
                    continue;
                if (v < -bound_ || v > bound_ || !member_[i][static_cast<std::size_t>(v + bound_)])
                    continue;
                model_[vars_[i]] = v;
                if (holds(checks_[i], model_, budget_))
                    return true;
            }
            return false;
        }
        for (std::int64_t v : domain_[i]) {
            std::int64_t mag = v < 0 ? -v : v;
            if (mag > remaining)
                break;
            model_[vars_[i]] = v;
            if (!holds(checks_[i], model_, budget_))
                continue;
            if (dfs(i + 1, remaining - mag))
                return true;
        }
        return false;
    }

    std::vector<int> vars_;
    std::int64_t bound_;
    Budget &budget_;
    Model &model_;
    std::vector<std::vector<const Constraint *>> checks_;
    std::vector<std::vector<const Constraint *>> unary_;
    std::vector<std::vector<std::int64_t>> domain_;
    std::vector<std::vector<bool>> member_;
};

void collect_consts(const SymExpr &e, std::set<std::string> &out)
{
    if (e.kind == SymKind::StrConst)
        out.insert(e.text);
    if (e.lhs)
        collect_consts(*e.lhs, out);
    if (e.rhs)
        collect_consts(*e.rhs, out);
}

bool by_length_then_text(const std::string &a, const std::string &b)
{
    return a.size() != b.size() ? a.size() < b.size() : a < b;
}

class StrGroup {
public:
    StrGroup(std::vector<int> vars, const std::vector<const Constraint *> &cons, const SolverConfig &cfg,
        Budget &budget, Model &model)
        : vars_(std::move(vars)), cons_(cons), cfg_(cfg), budget_(budget), model_(model)
    {
        checks_ = by_last_var(vars_, cons_, unary_);
    }

    GroupResult run()
    {
        std::map<int, std::string> forced;
        for (const auto *c : cons_) {
            if (c->kind != ir::CondKind::StrEq || c->negated)
                continue;
            for (auto [var_side, other] : {std::pair{c->lhs, c->rhs}, std::pair{c->rhs, c->lhs}}) {
                if (var_side->kind != SymKind::Var || has_vars(*other))
                    continue;
                std::string v = std::get<std::string>(eval_model(*other, {}));
                auto [it, inserted] = forced.emplace(var_side->var, v);
                if (!inserted && it->second != v)
                    return {SolveStatus::Unsat, false, "variable " + var_side->text + " equated to two constants"};
                break;
            }
        }

        std::vector<std::string> generic;
        bool generic_complete = build_candidates(generic);
        std::vector<std::vector<std::string>> cands(vars_.size());
        bool complete = true;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            auto f = forced.find(vars_[i]);
            const std::vector<std::string> base = f != forced.end() ? std::vector<std::string>{f->second} : generic;
            if (f == forced.end() && !generic_complete)
                complete = false;
            for (const auto &s : base) {
                model_[vars_[i]] = s;
                if (holds(unary_[i], model_, budget_))
                    cands[i].push_back(s);
            }
            if (cands[i].empty())
                return unsat_or_unknown(complete && (f != forced.end() || generic_complete));
        }
        cands_ = std::move(cands);
        if (dfs(0))
            return {SolveStatus::Sat, false, {}};
        return unsat_or_unknown(complete);
    }

private:
    static GroupResult unsat_or_unknown(bool complete)
    {
        if (complete)
            return {SolveStatus::Unsat, true, "string search space exhausted"};
        return {SolveStatus::Unknown, false, "no string witness among the bounded candidates"};
    }

    bool build_candidates(std::vector<std::string> &out) const
    {
        std::string alpha = cfg_.alphabet;
        std::sort(alpha.begin(), alpha.end());
        alpha.erase(std::unique(alpha.begin(), alpha.end()), alpha.end());
        const std::size_t maxlen = static_cast<std::size_t>(cfg_.str_maxlen);

        // Exhaustive prefix of the space, as long as it stays small.
        constexpr std::size_t kExhaustiveLimit = 4096;
        std::size_t total = 1, layer = 1, m = 0;
        while (m < maxlen) {
            std::size_t next = layer * alpha.size();
            if (total + next > kExhaustiveLimit)
                break;
            layer = next;
            total += next;
            ++m;
        }
        std::set<std::string> pool;
        std::vector<std::string> level{""};
        pool.insert("");
        for (std::size_t len = 1; len <= m; ++len) {
            std::vector<std::string> nxt;
            for (const auto &s : level)
                for (char ch : alpha)
                    nxt.push_back(s + ch);
            pool.insert(nxt.begin(), nxt.end());
            level = std::move(nxt);
        }

        std::set<std::string> consts;
        for (const auto *c : cons_) {
            collect_consts(*c->lhs, consts);
            collect_consts(*c->rhs, consts);
        }
        auto add = [&](const std::string &s) {
            if (s.size() <= maxlen)
                pool.insert(s);
        };
        for (const auto &c : consts) {
            for (std::size_t i = 0; i < c.size(); ++i)
                for (std::size_t j = i + 1; j <= c.size(); ++j)
                    add(c.substr(i, j - i));
            for (char ch : alpha) {
                add(ch + c);
                add(c + ch);
            }
            for (const auto &d : consts)
                add(c + d);
        }
        out.assign(pool.begin(), pool.end());
        std::sort(out.begin(), out.end(), by_length_then_text);
        return m == maxlen;
    }

    bool dfs(std::size_t i)
    {
        if (i == vars_.size())
            return true;
        for (const auto &s : cands_[i]) {
            budget_.spend();
            model_[vars_[i]] = s;
            if (holds(checks_[i], model_, budget_) && dfs(i + 1))
                return true;
        }
        return false;
    }

    std::vector<int> vars_;
    std::vector<const Constraint *> cons_;
    const SolverConfig &cfg_;
    Budget &budget_;
    Model &model_;
    std::vector<std::vector<const Constraint *>> checks_;
    std::vector<std::vector<const Constraint *>> unary_;
    std::vector<std::vector<std::string>> cands_;
};

struct UnionFind {
    std::map<int, int> parent;
    int find(int x)
    {
        auto [it, inserted] = parent.emplace(x, x);
        if (it->second == x)
            return x;
        return it->second = find(it->second);
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

std::string unsupported_reason(const Constraint &c, const SolverConfig &cfg)
{
    if (symbolic_coercion(*c.lhs) || symbolic_coercion(*c.rhs))
        return "string-to-int coercion of a symbolic value";
    if (cfg.nonlinear == Nonlinear::Reject && (nonlinear(*c.lhs) || nonlinear(*c.rhs)))
        return "nonlinear integer arithmetic";
    return {};
}

SolveResult solve(const std::vector<Constraint> &constraints, const SolverConfig &cfg)
{
    validate(cfg);
    std::map<int, Sort> var_sorts;
    for (const auto &c : constraints)
        check_constraint(c, var_sorts);

    for (const auto &c : constraints)
        if (!has_vars(*c.lhs) && !has_vars(*c.rhs) && !eval_model(c, {}))
            return {SolveStatus::Unsat, {}, false, "ground constraint " + to_string(c) + " is false"};

    UnionFind uf;
    for (const auto &[v, s] : var_sorts)
        uf.find(v);
    for (const auto &c : constraints) {
        auto vs = vars_of(c);
        for (int v : vs)
            uf.unite(v, *vs.begin());
    }
    std::map<int, std::vector<int>> group_vars;
    for (const auto &[v, s] : var_sorts)
        group_vars[uf.find(v)].push_back(v);
    std::map<int, std::vector<const Constraint *>> group_cons;
    for (const auto &c : constraints) {
        auto vs = vars_of(c);
        if (!vs.empty())
            group_cons[uf.find(*vs.begin())].push_back(&c);
    }

    Budget budget(cfg.max_effort);
    Model model;
    std::optional<std::string> unknown;
    bool bounded_unsat = false;
    std::string unsat_reason;
    bool unsat = false;
    for (auto &[root, vars] : group_vars) {
        const auto &cons = group_cons[root];
        std::string why;
        for (const auto *c : cons)
            if (why.empty())
                why = unsupported_reason(*c, cfg);
        if (!why.empty()) {
            if (!unknown)
                unknown = why;
            continue;
        }
        GroupResult r;
        try {
            if (var_sorts[vars.front()] == Sort::Int)
                r = IntGroup(vars, cons, cfg.int_bound, budget, model).run();
            else
                r = StrGroup(vars, cons, cfg, budget, model).run();
        } catch (const EffortExceeded &) {
            r = {SolveStatus::Unknown, false, "search effort limit reached"};
        }
        if (r.status == SolveStatus::Unsat) {
            unsat = true;
            bounded_unsat = r.bounded;
            unsat_reason = r.reason;
            break;
        }
        if (r.status == SolveStatus::Unknown && !unknown)
            unknown = r.reason;
    }
    if (unsat)
        return {SolveStatus::Unsat, {}, bounded_unsat, unsat_reason};
    if (unknown)
        return {SolveStatus::Unknown, {}, false, *unknown};

    for (const auto &c : constraints)
        if (!eval_model(c, model))
            return {SolveStatus::Unknown, {}, false, "model failed verification"};
    return {SolveStatus::Sat, std::move(model), false, {}};
}

} // namespace consicore::sym
