#pragma once

// Generated apps for property tests: random branchy listeners, a brute-force
// path enumerator over a small input domain, and a scalable else-chain family.

#include "consicore/concrete.hpp"
#include "consicore/ir.hpp"

#include "brute_solver.hpp"

#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace testing_support {

using SidePath = std::vector<std::pair<int, consicore::ir::Side>>;

struct GeneratedApp {
    std::string source;
    std::vector<std::string> int_widgets;
    std::vector<std::string> str_widgets;
};

class AppGenerator {
public:
    explicit AppGenerator(std::uint64_t seed) : rng_(seed) {}

    GeneratedApp next(int max_sites = 6)
    {
        GeneratedApp g;
        ints_.clear();
        strs_.clear();
        std::string prologue;
        for (const char *w : {"e1", "e2"}) {
            if (coin()) {
                std::string v = std::string("n") + w;
                g.int_widgets.push_back(w);
                ints_.push_back(v);
                prologue += "      " + v + " = int(input(" + w + "))\n";
            } else {
                std::string v = std::string("s") + w;
                g.str_widgets.push_back(w);
                strs_.push_back(v);
                prologue += "      " + v + " = input(" + w + ")\n";
            }
        }
        budget_ = 1 + pick(0, max_sites - 1);
        leaf_ = 0;
        std::string body = block(3);
        g.source = "app \"gen\" {\n  activity Main {\n    widget edit e1\n    widget edit e2\n"
                   "    widget button b\n    widget text t\n    onclick(b) {\n" +
                   prologue + body + "    }\n  }\n}\n";
        return g;
    }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return pick(0, 1) == 1; }

    template <typename T>
    const T &any(const std::vector<T> &v)
    {
        return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))];
    }

    std::string lit() { return "\"" + any(std::vector<std::string>{"a", "b", "ab", "ba"}) + "\""; }
    std::string num() { return std::to_string(pick(-3, 3)); }
    std::string op() { return any(std::vector<std::string>{"<", "<=", ">", ">=", "==", "!="}); }

    std::string int_cond()
    {
        const auto &x = any(ints_);
        switch (pick(0, 3)) {
        case 0: return x + " " + op() + " " + num();
        case 1: return x + " + " + num() + " " + op() + " " + num();
        case 2: return x + " + " + any(ints_) + " " + op() + " " + num();
        default: return x + " " + op() + " " + any(ints_) + " + " + num();
        }
    }

    std::string str_cond()
    {
        const auto &s = any(strs_);
        switch (pick(0, 5)) {
        case 0: return s + " == " + lit();
        case 1: return s + " != " + lit();
        case 2: return "contains(" + s + ", " + lit() + ")";
        case 3: return "!contains(" + s + ", " + lit() + ")";
        case 4: return s + " + " + lit() + " == " + lit();
        default: return s + " == " + any(strs_);
        }
    }

    std::string cond()
    {
        if (strs_.empty() || (!ints_.empty() && coin()))
            return int_cond();
        return str_cond();
    }

    std::string block(int depth)
    {
        std::string pad(static_cast<std::size_t>(6 + 2 * (3 - depth)), ' ');
        std::string out;
        int n = pick(1, 2);
        for (int i = 0; i < n; ++i) {
            if (budget_ > 0 && depth > 0 && pick(0, 3) != 0) {
                --budget_;
                out += pad + "if (" + cond() + ") {\n" + block(depth - 1) + pad + "}";
                if (coin())
                    out += " else {\n" + block(depth - 1) + pad + "}";
                out += "\n";
            } else {
                out += pad + "setText(t, \"L" + std::to_string(++leaf_) + "\")\n";
            }
        }
        return out;
    }

    std::mt19937_64 rng_;
    std::vector<std::string> ints_, strs_;
    int budget_ = 0;
    int leaf_ = 0;
};

/// Every branch-side sequence reachable with int widgets in [-B, B] and str
/// widgets over `alphabet` up to `maxlen`.
inline std::set<SidePath> brute_force_paths(const consicore::ir::MiniApp &app, const consicore::Driver &driver,
    const GeneratedApp &g, std::int64_t bound, const std::string &alphabet, int maxlen)
{
    using namespace consicore;
    std::vector<std::pair<std::string, std::vector<std::string>>> domains;
    for (const auto &w : g.int_widgets) {
        std::vector<std::string> vals;
        for (std::int64_t v = -bound; v <= bound; ++v)
            vals.push_back(std::to_string(v));
        domains.emplace_back(w, vals);
    }
    for (const auto &w : g.str_widgets)
        domains.emplace_back(w, all_strings(alphabet, maxlen));

    std::set<SidePath> out;
    ConcreteInputs in;
    auto rec = [&](auto &self, std::size_t i) -> void {
        if (i == domains.size()) {
            SidePath p;
            for (const auto &b : eval_concrete(app, driver, in).branches)
                p.emplace_back(b.site, b.side);
            out.insert(std::move(p));
            return;
        }
        for (const auto &v : domains[i].second) {
            in.widgets[domains[i].first] = v;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

/// `n` nested equality checks on e1; only the all-else path reaches the query.
inline std::string else_chain_app(int n)
{
    std::string body, close;
    for (int i = 1; i <= n; ++i) {
        std::string pad(static_cast<std::size_t>(4 + 2 * i), ' ');
        body += pad + "if (input(e1) == \"k" + std::to_string(i) + "\") {\n" + pad + "  setText(t, \"hit" +
                std::to_string(i) + "\")\n" + pad + "} else {\n";
        close = pad + "}\n" + close;
    }
    std::string pad(static_cast<std::size_t>(6 + 2 * n), ' ');
    body += pad + "r = rawQuery(\"SELECT * FROM student WHERE name='\" + input(e2) + \"'\")\n" + pad +
            "setText(t, r)\n";
    return "app \"chain" + std::to_string(n) +
           "\" {\n  table student(stdno, name)\n  activity Main {\n    widget edit e1\n    widget edit e2\n"
           "    widget button b\n    widget text t\n    onclick(b) {\n" +
           body + close + "    }\n  }\n}\n";
}

} // namespace testing_support
