#include "consicore/minisql.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>

namespace consicore::sql {

MiniDb MiniDb::from_json(std::string_view text)
{
    MiniDb db;
    try {
        auto j = nlohmann::json::parse(text);
        for (const auto &t : j.at("tables")) {
            Table tab;
            tab.columns = t.at("columns").get<std::vector<std::string>>();
            for (const auto &r : t.at("rows")) {
                Row row;
                for (const auto &cell : r)
                    row.push_back(cell.is_string() ? cell.get<std::string>() : cell.dump());
                tab.rows.push_back(std::move(row));
            }
            db.add_table(t.at("name").get<std::string>(), std::move(tab));
        }
    } catch (const nlohmann::json::exception &e) {
        throw SqlError(std::string("bad database fixture: ") + e.what());
    }
    return db;
}

void MiniDb::add_table(std::string name, Table t)
{
    for (const auto &r : t.rows)
        if (r.size() != t.columns.size())
            throw SqlError("table " + name + ": row has " + std::to_string(r.size()) + " values for " +
                           std::to_string(t.columns.size()) + " columns");
    if (!tables.emplace(name, std::move(t)).second)
        throw SqlError("duplicate table " + name);
}

namespace {

enum class Tok { Ident, Str, Eq, Comma, Star, Hole, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

std::vector<Token> lex(std::string_view q)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < q.size()) {
        char c = q[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '\'') {
            auto end = q.find('\'', i + 1);
            if (end == std::string_view::npos)
                throw SqlError("unterminated literal at offset " + std::to_string(i));
            out.push_back({Tok::Str, std::string(q.substr(i + 1, end - i - 1)), i});
            i = end + 1;
        } else if (c == '=') {
            out.push_back({Tok::Eq, "=", i++});
        } else if (c == ',') {
            out.push_back({Tok::Comma, ",", i++});
        } else if (c == '*') {
            out.push_back({Tok::Star, "*", i++});
        } else if (c == '?') {
            out.push_back({Tok::Hole, "?", i++});
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t s = i;
            while (i < q.size() && (std::isalnum(static_cast<unsigned char>(q[i])) || q[i] == '_'))
                ++i;
            out.push_back({Tok::Ident, std::string(q.substr(s, i - s)), s});
        } else {
            throw SqlError(std::string("unexpected character '") + c + "' at offset " + std::to_string(i));
        }
    }
    out.push_back({Tok::End, "", q.size()});
    return out;
}

std::string upper(std::string s)
{
    for (auto &c : s)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

class Parser {
public:
    explicit Parser(std::string_view q) : toks_(lex(q)) {}

    QueryAst parse()
    {
        QueryAst ast;
        if (keyword("SELECT")) {
            ast.kind = QueryKind::Select;
            expect(Tok::Star, "*");
            need_keyword("FROM");
            ast.table = ident("table name");
        } else if (keyword("DELETE")) {
            ast.kind = QueryKind::Delete;
            need_keyword("FROM");
            ast.table = ident("table name");
        } else if (keyword("UPDATE")) {
            ast.kind = QueryKind::Update;
            ast.table = ident("table name");
            need_keyword("SET");
            do {
                std::string col = ident("column");
                expect(Tok::Eq, "=");
                ast.assignments.emplace_back(col, operand());
            } while (accept(Tok::Comma));
        } else {
            fail("SELECT, DELETE or UPDATE");
        }
        need_keyword("WHERE");
        ast.where = disjunction();
        if (peek().kind != Tok::End)
            fail("end of query");
        ast.placeholders = holes_;
        return ast;
    }

private:
    const Token &peek() const { return toks_[i_]; }

    [[noreturn]] void fail(const std::string &what) const
    {
        const auto &t = peek();
        throw SqlError("expected " + what + " at offset " + std::to_string(t.pos) +
                       (t.kind == Tok::End ? " (end of query)" : " near '" + t.text + "'"));
    }

    bool accept(Tok k)
    {
        if (peek().kind != k)
            return false;
        ++i_;
        return true;
    }

    void expect(Tok k, const std::string &what)
    {
        if (!accept(k))
            fail("'" + what + "'");
    }

    bool keyword(const std::string &kw)
    {
        if (peek().kind == Tok::Ident && upper(peek().text) == kw) {
            ++i_;
            return true;
        }
        return false;
    }

    void need_keyword(const std::string &kw)
    {
        if (!keyword(kw))
            fail(kw);
    }

    std::string ident(const std::string &what)
    {
        if (peek().kind != Tok::Ident)
            fail(what);
        return toks_[i_++].text;
    }

    Operand operand()
    {
        const auto &t = peek();
        if (t.kind == Tok::Str) {
            ++i_;
            return {OperandKind::Literal, t.text, -1};
        }
        if (t.kind == Tok::Hole) {
            ++i_;
            return {OperandKind::Placeholder, "?", holes_++};
        }
        if (t.kind == Tok::Ident) {
            auto u = upper(t.text);
            if (u != "AND" && u != "OR") {
                ++i_;
                return {OperandKind::Column, t.text, -1};
            }
        }
        fail("column, literal or ?");
    }

    PredPtr atom()
    {
        auto p = std::make_shared<Pred>();
        p->kind = PredKind::Eq;
        p->lhs = operand();
        expect(Tok::Eq, "=");
        p->rhs = operand();
        return p;
    }

    PredPtr conjunction()
    {
        PredPtr left = atom();
        while (keyword("AND")) {
            auto p = std::make_shared<Pred>();
            p->kind = PredKind::And;
            p->left = left;
            p->right = atom();
            left = p;
        }
        return left;
    }

    PredPtr disjunction()
    {
        PredPtr left = conjunction();
        while (keyword("OR")) {
            auto p = std::make_shared<Pred>();
            p->kind = PredKind::Or;
            p->left = left;
            p->right = conjunction();
            left = p;
        }
        return left;
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    int holes_ = 0;
};

bool same_operand_shape(const Operand &a, const Operand &b)
{
    if (a.kind != b.kind)
        return false;
    return a.kind != OperandKind::Column || a.text == b.text;
}

bool same_pred_shape(const Pred &a, const Pred &b)
{
    if (a.kind != b.kind)
        return false;
    if (a.kind == PredKind::Eq)
        return same_operand_shape(a.lhs, b.lhs) && same_operand_shape(a.rhs, b.rhs);
    return same_pred_shape(*a.left, *b.left) && same_pred_shape(*a.right, *b.right);
}

std::string operand_text(const Operand &o)
{
    switch (o.kind) {
    case OperandKind::Column: return o.text;
    case OperandKind::Literal: return "'" + o.text + "'";
    case OperandKind::Placeholder: return "?";
    }
    return "";
}

} // namespace

QueryAst parse_query(std::string_view q) { return Parser(q).parse(); }

bool same_shape(const QueryAst &a, const QueryAst &b)
{
    if (a.kind != b.kind || a.table != b.table || a.assignments.size() != b.assignments.size())
        return false;
    for (std::size_t i = 0; i < a.assignments.size(); ++i)
        if (a.assignments[i].first != b.assignments[i].first ||
            !same_operand_shape(a.assignments[i].second, b.assignments[i].second))
            return false;
    return same_pred_shape(*a.where, *b.where);
}

std::vector<Row> execute(const MiniDb &db, const QueryAst &q, const std::vector<std::string> &params)
{
    auto it = db.tables.find(q.table);
    if (it == db.tables.end())
        throw SqlError("no such table: " + q.table);
    const Table &t = it->second;
    if (static_cast<int>(params.size()) != q.placeholders)
        throw SqlError("query has " + std::to_string(q.placeholders) + " placeholders but " +
                       std::to_string(params.size()) + " parameters were bound");

    auto value = [&](const Operand &o, const Row &row) -> std::string {
        switch (o.kind) {
        case OperandKind::Literal: return o.text;
        case OperandKind::Placeholder: return params[static_cast<std::size_t>(o.placeholder)];
        case OperandKind::Column: {
            auto c = std::find(t.columns.begin(), t.columns.end(), o.text);
            if (c == t.columns.end())
                throw SqlError("no such column: " + o.text);
            return row[static_cast<std::size_t>(c - t.columns.begin())];
        }
        }
        return {};
    };
    auto holds = [&](auto &self, const Pred &p, const Row &row) -> bool {
        switch (p.kind) {
        case PredKind::Eq: return value(p.lhs, row) == value(p.rhs, row);
        case PredKind::And: return self(self, *p.left, row) && self(self, *p.right, row);
        case PredKind::Or: return self(self, *p.left, row) || self(self, *p.right, row);
        }
        return false;
    };

    std::vector<Row> out;
    for (const auto &row : t.rows)
        if (holds(holds, *q.where, row))
            out.push_back(row);
    return out;
}

std::string to_string(const Pred &p)
{
    switch (p.kind) {
    case PredKind::Eq: return "Eq(" + operand_text(p.lhs) + ", " + operand_text(p.rhs) + ")";
    case PredKind::And: return "And(" + to_string(*p.left) + ", " + to_string(*p.right) + ")";
    case PredKind::Or: return "Or(" + to_string(*p.left) + ", " + to_string(*p.right) + ")";
    }
    return "";
}

std::string to_string(const QueryAst &q)
{
    std::string head;
    switch (q.kind) {
    case QueryKind::Select: head = "Select(" + q.table; break;
    case QueryKind::Delete: head = "Delete(" + q.table; break;
    case QueryKind::Update:
        head = "Update(" + q.table;
        for (const auto &[c, v] : q.assignments)
            head += ", " + c + "=" + operand_text(v);
        break;
    }
    return head + ", " + to_string(*q.where) + ")";
}

std::string render_rows(const std::vector<Row> &rows)
{
    std::string out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i)
            out += "\n";
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            if (j)
                out += "|";
            out += rows[i][j];
        }
    }
    return out;
}

} // namespace consicore::sql
