#pragma once

// In-memory tables and a tiny SQL fragment: enough to watch a tautology
// change which rows a query returns.

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace consicore::sql {

class SqlError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Row = std::vector<std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<Row> rows;
};

struct MiniDb {
    std::map<std::string, Table> tables;

    /// `{"tables": [{"name", "columns", "rows"}]}`. Throws SqlError on bad
    /// shape or rows whose arity differs from the columns.
    static MiniDb from_json(std::string_view text);
    void add_table(std::string name, Table t);
};

enum class QueryKind { Select, Delete, Update };

enum class OperandKind { Column, Literal, Placeholder };

struct Operand {
    OperandKind kind = OperandKind::Literal;
    std::string text;
    int placeholder = -1; // position among the query's `?` holes

    bool operator==(const Operand &) const = default;
};

enum class PredKind { Eq, And, Or };

struct Pred;
using PredPtr = std::shared_ptr<const Pred>;

struct Pred {
    PredKind kind = PredKind::Eq;
    Operand lhs, rhs; // Eq
    PredPtr left, right;
};

struct QueryAst {
    QueryKind kind = QueryKind::Select;
    std::string table;
    std::vector<std::pair<std::string, Operand>> assignments; // Update
    PredPtr where;
    int placeholders = 0;
};

/// `SELECT * FROM t WHERE ...`, `DELETE FROM t WHERE ...` or
/// `UPDATE t SET c='v'[, ...] WHERE ...`; atoms are `x=y` over columns,
/// quoted literals and `?`. OR binds looser than AND. Keywords are
/// case-insensitive. A quote always ends a literal.
QueryAst parse_query(std::string_view q);

/// Same statement shape: kinds, tables, columns and tree structure agree;
/// literal values may differ.
bool same_shape(const QueryAst &a, const QueryAst &b);

/// Rows selected by the where-clause, in table order. `params` bind the `?`
/// holes as literal data. Update and Delete leave the database untouched and
/// return the matched rows.
std::vector<Row> execute(const MiniDb &db, const QueryAst &q, const std::vector<std::string> &params = {});

std::string to_string(const QueryAst &q);
std::string to_string(const Pred &p);

/// Rows as `v1|v2` lines joined by newlines.
std::string render_rows(const std::vector<Row> &rows);

} // namespace consicore::sql
