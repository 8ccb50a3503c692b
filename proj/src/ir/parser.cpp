#include "consicore/ir.hpp"
#include "consicore/sinks.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace consicore::ir {

namespace {

enum class Tok { Ident, Int, String, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t value = 0;
    SourcePos pos;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.pos = {line_, col_};
            if (i_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[i_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (i_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
                    t.text.push_back(advance());
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                t.kind = Tok::Int;
                while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_])))
                    t.text.push_back(advance());
                auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
                if (ec != std::errc{})
                    throw ParseError(t.pos, "integer literal out of range");
            } else if (c == '"') {
                t.kind = Tok::String;
                advance();
                for (;;) {
                    if (i_ >= src_.size() || src_[i_] == '\n')
                        throw ParseError(t.pos, "unterminated string literal");
                    char d = advance();
                    if (d == '"')
                        break;
                    if (d == '\\') {
                        if (i_ >= src_.size())
                            throw ParseError(t.pos, "unterminated string literal");
                        char e = advance();
                        switch (e) {
                        case 'n': t.text.push_back('\n'); break;
                        case 't': t.text.push_back('\t'); break;
                        case '"': t.text.push_back('"'); break;
                        case '\\': t.text.push_back('\\'); break;
                        default: throw ParseError({line_, col_ - 1}, std::string("unknown escape \\") + e);
                        }
                    } else {
                        t.text.push_back(d);
                    }
                }
            } else {
                t.kind = Tok::Punct;
                static constexpr std::string_view two[] = {"==", "!=", "<=", ">="};
                bool matched = false;
                for (auto op : two)
                    if (src_.substr(i_, 2) == op) {
                        t.text = std::string(op);
                        advance();
                        advance();
                        matched = true;
                        break;
                    }
                if (!matched) {
                    static constexpr std::string_view one = "{}()[],;=<>+*!:-";
                    if (one.find(c) == std::string_view::npos)
                        throw ParseError(t.pos, std::string("unexpected character '") + c + "'");
                    t.text = std::string(1, advance());
                }
            }
            out.push_back(std::move(t));
        }
    }

private:
    char advance()
    {
        char c = src_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space()
    {
        while (i_ < src_.size()) {
            char c = src_[i_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '#' || (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/')) {
                while (i_ < src_.size() && src_[i_] != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// Untyped expression node produced by the parser; `+` is resolved to Concat
// or IntAdd by the type pass.
enum class RawKind { Int, Str, Name, Input, Coerce, Plus, Mul };

struct RawExpr {
    RawKind kind;
    std::int64_t value = 0;
    std::string text;
    std::shared_ptr<RawExpr> lhs, rhs;
    SourcePos pos;
};
using RawPtr = std::shared_ptr<RawExpr>;

struct RawCond {
    std::string op; // "<", "==", ..., "contains"
    bool negated = false;
    RawPtr lhs, rhs;
    SourcePos pos;
};

struct RawStmt {
    Stmt stmt; // everything except expressions
    RawPtr expr;
    RawCond cond;
    std::vector<RawPtr> args;
    std::vector<RawStmt> then_body, else_body;
};

struct RawFunction {
    Function fn; // body left empty
    std::vector<RawStmt> body;
};

struct RawComponent {
    Component comp; // functions left empty
    std::vector<RawFunction> functions;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    std::string app_name;
    std::vector<TableSchema> tables;
    std::vector<RawComponent> components;
    int next_stmt = 1;
    int next_site = 1;

    void parse_app()
    {
        expect_ident("app");
        app_name = expect(Tok::String, "app name string").text;
        expect_punct("{");
        while (!is_punct("}")) {
            const Token &t = peek();
            if (is_ident("table")) {
                next();
                parse_table();
            } else if (is_ident("activity") || is_ident("provider")) {
                bool provider = is_ident("provider");
                next();
                parse_component(provider);
            } else {
                fail(t, "expected 'table', 'activity' or 'provider'");
            }
        }
        expect_punct("}");
        if (peek().kind != Tok::End)
            fail(peek(), "unexpected input after app body");
    }

private:
    const Token &peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token &next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    bool is_punct(std::string_view p, std::size_t k = 0) const
    {
        return peek(k).kind == Tok::Punct && peek(k).text == p;
    }
    bool is_ident(std::string_view p, std::size_t k = 0) const
    {
        return peek(k).kind == Tok::Ident && peek(k).text == p;
    }

    [[noreturn]] void fail(const Token &t, const std::string &msg) const
    {
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.pos, msg + ", got " + got);
    }

    const Token &expect(Tok kind, const char *what)
    {
        if (peek().kind != kind)
            fail(peek(), std::string("expected ") + what);
        return next();
    }
    void expect_punct(std::string_view p)
    {
        if (!is_punct(p))
            fail(peek(), "expected '" + std::string(p) + "'");
        next();
    }
    void expect_ident(std::string_view p)
    {
        if (!is_ident(p))
            fail(peek(), "expected '" + std::string(p) + "'");
        next();
    }
    void skip_semis()
    {
        while (is_punct(";"))
            next();
    }

    void parse_table()
    {
        TableSchema t;
        t.name = expect(Tok::Ident, "table name").text;
        expect_punct("(");
        if (!is_punct(")")) {
            for (;;) {
                t.columns.push_back(expect(Tok::Ident, "column name").text);
                if (!is_punct(","))
                    break;
                next();
            }
        }
        expect_punct(")");
        skip_semis();
        tables.push_back(std::move(t));
    }

    void parse_component(bool provider)
    {
        RawComponent rc;
        rc.comp.pos = peek().pos;
        rc.comp.kind = provider ? ComponentKind::Provider : ComponentKind::Activity;
        rc.comp.name = expect(Tok::Ident, "component name").text;
        expect_punct("{");
        while (!is_punct("}")) {
            const Token &t = peek();
            if (t.kind != Tok::Ident)
                fail(t, "expected component member");
            RawFunction rf;
            rf.fn.pos = t.pos;
            if (t.text == "widget") {
                next();
                Widget w;
                const Token &k = expect(Tok::Ident, "widget kind");
                if (k.text == "edit")
                    w.kind = WidgetKind::EditBox;
                else if (k.text == "button")
                    w.kind = WidgetKind::Button;
                else if (k.text == "text")
                    w.kind = WidgetKind::TextBox;
                else
                    fail(k, "expected widget kind edit, button or text");
                w.pos = peek().pos;
                w.id = expect(Tok::Ident, "widget id").text;
                skip_semis();
                rc.comp.widgets.push_back(std::move(w));
                continue;
            }
            if (t.text == "oncreate" || t.text == "onstart" || t.text == "onresume") {
                next();
                rf.fn.kind = FunctionKind::Lifecycle;
                rf.fn.slot = t.text == "oncreate"  ? LifecycleSlot::OnCreate
                             : t.text == "onstart" ? LifecycleSlot::OnStart
                                                   : LifecycleSlot::OnResume;
            } else if (t.text == "onclick") {
                next();
                rf.fn.kind = FunctionKind::Listener;
                expect_punct("(");
                rf.fn.widget = expect(Tok::Ident, "button id").text;
                expect_punct(")");
            } else if (t.text == "query") {
                next();
                rf.fn.kind = FunctionKind::ProviderQuery;
                expect_punct("(");
                rf.fn.params.push_back({expect(Tok::Ident, "parameter name").text, Sort::Str});
                expect_punct(")");
            } else if (t.text == "fn") {
                next();
                rf.fn.kind = FunctionKind::Helper;
                rf.fn.name = expect(Tok::Ident, "function name").text;
                expect_punct("(");
                if (!is_punct(")")) {
                    for (;;) {
                        Param p;
                        p.name = expect(Tok::Ident, "parameter name").text;
                        if (is_punct(":")) {
                            next();
                            const Token &s = expect(Tok::Ident, "parameter sort");
                            if (s.text == "int")
                                p.sort = Sort::Int;
                            else if (s.text == "str")
                                p.sort = Sort::Str;
                            else
                                fail(s, "expected sort int or str");
                        }
                        rf.fn.params.push_back(std::move(p));
                        if (!is_punct(","))
                            break;
                        next();
                    }
                }
                expect_punct(")");
            } else {
                fail(t, "expected widget, handler or fn");
            }
            rf.body = parse_block();
            rc.functions.push_back(std::move(rf));
        }
        expect_punct("}");
        skip_semis();
        components.push_back(std::move(rc));
    }

    std::vector<RawStmt> parse_block()
    {
        expect_punct("{");
        std::vector<RawStmt> body;
        skip_semis();
        while (!is_punct("}")) {
            body.push_back(parse_stmt());
            skip_semis();
        }
        expect_punct("}");
        return body;
    }

    RawStmt parse_stmt()
    {
        RawStmt rs;
        const Token &t = peek();
        rs.stmt.pos = t.pos;
        if (t.kind != Tok::Ident)
            fail(t, "expected statement");
        rs.stmt.id = next_stmt++;
        if (t.text == "if" && is_punct("(", 1)) {
            next();
            rs.stmt.kind = StmtKind::If;
            rs.stmt.site = next_site++;
            expect_punct("(");
            rs.cond = parse_cond();
            expect_punct(")");
            rs.then_body = parse_block();
            if (is_ident("else")) {
                next();
                if (is_ident("if"))
                    rs.else_body.push_back(parse_stmt());
                else
                    rs.else_body = parse_block();
            }
            return rs;
        }
        if (t.text == "call" && peek(1).kind == Tok::Ident) {
            next();
            rs.stmt.kind = StmtKind::CallFn;
            rs.stmt.name = next().text;
            expect_punct("(");
            rs.args = parse_args(")");
            return rs;
        }
        if (t.text == "return" && !is_punct("=", 1)) {
            next();
            rs.stmt.kind = StmtKind::Return;
            rs.expr = parse_expr();
            return rs;
        }
        if (t.text == "setText" && is_punct("(", 1)) {
            next();
            next();
            rs.stmt.kind = StmtKind::LeakCall;
            rs.stmt.name = expect(Tok::Ident, "text widget id").text;
            expect_punct(",");
            rs.expr = parse_expr();
            expect_punct(")");
            return rs;
        }
        if (is_punct("(", 1)) {
            // result-less sink call, e.g. execSQL(...)
            const Token &callee = next();
            parse_sink(rs, callee);
            return rs;
        }
        rs.stmt.var = next().text;
        expect_punct("=");
        if (peek().kind == Tok::Ident && is_punct("(", 1)) {
            const Token &callee = peek();
            if (callee.text == "providerQuery") {
                next();
                next();
                rs.stmt.kind = StmtKind::ProviderQuery;
                rs.stmt.name = expect(Tok::Ident, "provider name").text;
                expect_punct(",");
                rs.expr = parse_expr();
                expect_punct(")");
                return rs;
            }
            if (callee.text != "input" && callee.text != "int") {
                next();
                parse_sink(rs, callee);
                return rs;
            }
        }
        rs.stmt.kind = StmtKind::Assign;
        rs.expr = parse_expr();
        return rs;
    }

    void parse_sink(RawStmt &rs, const Token &callee)
    {
        if (!is_vulnerable_function(callee.text))
            throw ParseError(callee.pos, "unknown sink name '" + callee.text + "'");
        rs.stmt.kind = StmtKind::SinkCall;
        rs.stmt.name = callee.text;
        expect_punct("(");
        rs.expr = parse_expr();
        if (is_punct(",")) {
            next();
            expect_punct("[");
            rs.args = parse_args("]");
        }
        expect_punct(")");
    }

    std::vector<RawPtr> parse_args(std::string_view close)
    {
        std::vector<RawPtr> args;
        if (!is_punct(close)) {
            for (;;) {
                args.push_back(parse_expr());
                if (!is_punct(","))
                    break;
                next();
            }
        }
        expect_punct(close);
        return args;
    }

    RawCond parse_cond()
    {
        RawCond c;
        c.pos = peek().pos;
        if (is_punct("!") && is_ident("contains", 1)) {
            next();
            c.negated = true;
        }
        if (is_ident("contains") && is_punct("(", 1)) {
            next();
            next();
            c.op = "contains";
            c.lhs = parse_expr();
            expect_punct(",");
            c.rhs = parse_expr();
            expect_punct(")");
            return c;
        }
        if (c.negated)
            fail(peek(), "expected contains after '!'");
        c.lhs = parse_expr();
        const Token &op = peek();
        static const std::set<std::string> ops = {"<", "<=", ">", ">=", "==", "!="};
        if (op.kind != Tok::Punct || !ops.count(op.text))
            fail(op, "expected comparison operator");
        c.op = next().text;
        c.rhs = parse_expr();
        return c;
    }

    RawPtr parse_expr()
    {
        RawPtr lhs = parse_term();
        while (is_punct("+")) {
            auto e = std::make_shared<RawExpr>();
            e->pos = next().pos;
            e->kind = RawKind::Plus;
            e->lhs = lhs;
            e->rhs = parse_term();
            lhs = e;
        }
        return lhs;
    }

    RawPtr parse_term()
    {
        RawPtr lhs = parse_primary();
        while (is_punct("*")) {
            auto e = std::make_shared<RawExpr>();
            e->pos = next().pos;
            e->kind = RawKind::Mul;
            e->lhs = lhs;
            e->rhs = parse_primary();
            lhs = e;
        }
        return lhs;
    }

    RawPtr parse_primary()
    {
        const Token &t = peek();
        auto e = std::make_shared<RawExpr>();
        e->pos = t.pos;
        if (t.kind == Tok::Int) {
            e->kind = RawKind::Int;
            e->value = next().value;
        } else if (is_punct("-") && peek(1).kind == Tok::Int) {
            next();
            e->kind = RawKind::Int;
            e->value = -next().value;
        } else if (t.kind == Tok::String) {
            e->kind = RawKind::Str;
            e->text = next().text;
        } else if (is_punct("(")) {
            next();
            e = parse_expr();
            expect_punct(")");
        } else if (t.kind == Tok::Ident && is_punct("(", 1)) {
            if (t.text == "input") {
                next();
                next();
                e->kind = RawKind::Input;
                e->text = expect(Tok::Ident, "widget id").text;
                expect_punct(")");
            } else if (t.text == "int") {
                next();
                next();
                e->kind = RawKind::Coerce;
                e->lhs = parse_expr();
                expect_punct(")");
            } else {
                fail(t, "calls are not expressions");
            }
        } else if (t.kind == Tok::Ident) {
            e->kind = RawKind::Name;
            e->text = next().text;
        } else {
            fail(t, "expected expression");
        }
        return e;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Validation and typing.

struct Scope {
    const Component *comp;
    std::map<std::string, Sort> *comp_vars;
    std::map<std::string, Sort> locals;
    const Function *fn;
};

class Typer {
public:
    Typer(const Parser &p, MiniApp &app) : parser_(p), app_(app) {}

    void run()
    {
        check_declarations();
        // Infer component variable sorts to a fixpoint, then type every body.
        for (std::size_t ci = 0; ci < parser_.components.size(); ++ci) {
            auto &comp = app_.components[ci];
            const auto &rc = parser_.components[ci];
            bool changed = true;
            while (changed) {
                changed = false;
                for (const auto &rf : rc.functions) {
                    Scope sc = scope_for(comp, rf.fn);
                    infer_body(sc, rf.body, changed);
                }
            }
            for (std::size_t fi = 0; fi < rc.functions.size(); ++fi) {
                Function fn = rc.functions[fi].fn;
                Scope sc = scope_for(comp, fn);
                fn.body = type_body(sc, rc.functions[fi].body);
                comp.functions.push_back(std::move(fn));
            }
        }
    }

private:
    Scope scope_for(Component &comp, const Function &fn)
    {
        Scope sc{&comp, &comp.var_sorts, {}, &fn};
        for (const auto &p : fn.params)
            sc.locals[p.name] = p.sort;
        return sc;
    }

    void check_declarations()
    {
        std::set<std::string> comp_names, widget_ids, table_names;
        for (const auto &t : parser_.tables) {
            if (!table_names.insert(t.name).second)
                throw ParseError({}, "duplicate table '" + t.name + "'");
        }
        for (const auto &rc : parser_.components) {
            const auto &c = rc.comp;
            if (!comp_names.insert(c.name).second)
                throw ParseError(c.pos, "duplicate component name '" + c.name + "'");
            for (const auto &w : c.widgets)
                if (!widget_ids.insert(w.id).second)
                    throw ParseError(w.pos, "duplicate widget id '" + w.id + "'");
            if (c.kind == ComponentKind::Provider && !c.widgets.empty())
                throw ParseError(c.widgets.front().pos, "provider '" + c.name + "' cannot declare widgets");
            std::set<int> slots;
            std::set<std::string> listeners, helpers;
            int queries = 0;
            for (const auto &rf : rc.functions) {
                const auto &f = rf.fn;
                switch (f.kind) {
                case FunctionKind::Lifecycle:
                    if (c.kind == ComponentKind::Provider)
                        throw ParseError(f.pos, "lifecycle handler in provider '" + c.name + "'");
                    if (!slots.insert(static_cast<int>(f.slot)).second)
                        throw ParseError(f.pos, "duplicate " + std::string(to_string(f.slot)) + " handler in '" +
                                                    c.name + "'");
                    break;
                case FunctionKind::Listener: {
                    if (c.kind == ComponentKind::Provider)
                        throw ParseError(f.pos, "listener in provider '" + c.name + "'");
                    const Widget *w = c.widget(f.widget);
                    if (!w)
                        throw ParseError(f.pos, "onclick references undeclared widget '" + f.widget + "'");
                    if (w->kind != WidgetKind::Button)
                        throw ParseError(f.pos, "onclick target '" + f.widget + "' is not a button");
                    if (!listeners.insert(f.widget).second)
                        throw ParseError(f.pos, "duplicate onclick handler for '" + f.widget + "'");
                    break;
                }
                case FunctionKind::ProviderQuery:
                    if (c.kind != ComponentKind::Provider)
                        throw ParseError(f.pos, "query handler outside a provider");
                    ++queries;
                    break;
                case FunctionKind::Helper: {
                    if (!helpers.insert(f.name).second)
                        throw ParseError(f.pos, "duplicate function '" + f.name + "'");
                    std::set<std::string> pnames;
                    for (const auto &p : f.params)
                        if (!pnames.insert(p.name).second)
                            throw ParseError(f.pos, "duplicate parameter '" + p.name + "'");
                    break;
                }
                }
            }
            if (c.kind == ComponentKind::Provider && queries != 1)
                throw ParseError(c.pos, "provider '" + c.name + "' must declare exactly one query handler");
        }
    }

    std::optional<Sort> var_sort(const Scope &sc, const std::string &name) const
    {
        if (auto it = sc.locals.find(name); it != sc.locals.end())
            return it->second;
        if (auto it = sc.comp_vars->find(name); it != sc.comp_vars->end())
            return it->second;
        return std::nullopt;
    }

    // Sort of a raw expression, or nullopt if it depends on a not-yet-inferred variable.
    std::optional<Sort> try_sort(const Scope &sc, const RawExpr &e) const
    {
        switch (e.kind) {
        case RawKind::Int: return Sort::Int;
        case RawKind::Str: return Sort::Str;
        case RawKind::Input: return Sort::Str;
        case RawKind::Coerce: return Sort::Int;
        case RawKind::Mul: return Sort::Int;
        case RawKind::Name: return var_sort(sc, e.text);
        case RawKind::Plus: {
            auto l = try_sort(sc, *e.lhs);
            if (l)
                return l;
            return try_sort(sc, *e.rhs);
        }
        }
        return std::nullopt;
    }

    void assign_sort(Scope &sc, const std::string &var, Sort s, SourcePos pos, bool &changed)
    {
        if (auto it = sc.locals.find(var); it != sc.locals.end()) {
            if (it->second != s)
                throw ParseError(pos, "type error: parameter '" + var + "' is " + std::string(to_string(it->second)) +
                                          ", assigned " + std::string(to_string(s)));
            return;
        }
        auto [it, inserted] = sc.comp_vars->emplace(var, s);
        if (inserted) {
            changed = true;
        } else if (it->second != s) {
            throw ParseError(pos, "type error: variable '" + var + "' is " + std::string(to_string(it->second)) +
                                      ", assigned " + std::string(to_string(s)));
        }
    }

    void infer_body(Scope &sc, const std::vector<RawStmt> &body, bool &changed)
    {
        for (const auto &rs : body) {
            switch (rs.stmt.kind) {
            case StmtKind::Assign:
                if (auto s = try_sort(sc, *rs.expr))
                    assign_sort(sc, rs.stmt.var, *s, rs.stmt.pos, changed);
                break;
            case StmtKind::SinkCall:
            case StmtKind::ProviderQuery:
                if (!rs.stmt.var.empty())
                    assign_sort(sc, rs.stmt.var, Sort::Str, rs.stmt.pos, changed);
                break;
            case StmtKind::If:
                infer_body(sc, rs.then_body, changed);
                infer_body(sc, rs.else_body, changed);
                break;
            default: break;
            }
        }
    }

    ExprPtr type_expr(const Scope &sc, const RawExpr &e) const
    {
        ExprPtr out;
        switch (e.kind) {
        case RawKind::Int: out = make_int(e.value); break;
        case RawKind::Str: out = make_str(e.text); break;
        case RawKind::Name: {
            auto s = var_sort(sc, e.text);
            if (!s)
                throw ParseError(e.pos, "undefined variable '" + e.text + "'");
            out = make_var(e.text, *s);
            break;
        }
        case RawKind::Input: {
            const Widget *w = sc.comp->widget(e.text);
            if (!w)
                throw ParseError(e.pos, "input() references widget '" + e.text + "' not declared in '" +
                                            sc.comp->name + "'");
            if (w->kind != WidgetKind::EditBox)
                throw ParseError(e.pos, "input() target '" + e.text + "' is not an edit box");
            out = make_input(e.text);
            break;
        }
        case RawKind::Coerce: {
            auto inner = type_expr(sc, *e.lhs);
            if (inner->sort != Sort::Str)
                throw ParseError(e.pos, "type error: int() expects str");
            out = make_coerce(inner);
            break;
        }
        case RawKind::Plus:
        case RawKind::Mul: {
            auto l = type_expr(sc, *e.lhs);
            auto r = type_expr(sc, *e.rhs);
            if (l->sort != r->sort)
                throw ParseError(e.pos, "type error: operands of '" + std::string(e.kind == RawKind::Plus ? "+" : "*") +
                                            "' have sorts " + std::string(to_string(l->sort)) + " and " +
                                            std::string(to_string(r->sort)));
            if (e.kind == RawKind::Mul && l->sort != Sort::Int)
                throw ParseError(e.pos, "type error: '*' expects int operands");
            ExprKind k = e.kind == RawKind::Mul ? ExprKind::IntMul
                         : l->sort == Sort::Str ? ExprKind::Concat
                                                : ExprKind::IntAdd;
            out = make_binary(k, l, r);
            break;
        }
        }
        auto copy = std::make_shared<Expr>(*out);
        copy->pos = e.pos;
        return copy;
    }

    ExprPtr typed(const Scope &sc, const RawPtr &e, Sort want, const char *what) const
    {
        auto t = type_expr(sc, *e);
        if (t->sort != want)
            throw ParseError(e->pos, std::string("type error: ") + what + " must be " + std::string(to_string(want)));
        return t;
    }

    Cond type_cond(const Scope &sc, const RawCond &rc) const
    {
        Cond c;
        c.negated = rc.negated;
        c.lhs = type_expr(sc, *rc.lhs);
        c.rhs = type_expr(sc, *rc.rhs);
        if (rc.op == "contains") {
            if (c.lhs->sort != Sort::Str || c.rhs->sort != Sort::Str)
                throw ParseError(rc.pos, "type error: contains() expects str operands");
            c.kind = CondKind::StrContains;
            return c;
        }
        if (c.lhs->sort != c.rhs->sort)
            throw ParseError(rc.pos, "type error: comparison of " + std::string(to_string(c.lhs->sort)) + " with " +
                                         std::string(to_string(c.rhs->sort)));
        if (c.lhs->sort == Sort::Str) {
            if (rc.op != "==" && rc.op != "!=")
                throw ParseError(rc.pos, "type error: ordering comparison on str");
            c.kind = CondKind::StrEq;
            c.negated = rc.op == "!=";
            return c;
        }
        c.kind = CondKind::IntCmp;
        c.op = rc.op == "<"    ? CmpOp::Lt
               : rc.op == "<=" ? CmpOp::Le
               : rc.op == ">"  ? CmpOp::Gt
               : rc.op == ">=" ? CmpOp::Ge
               : rc.op == "==" ? CmpOp::Eq
                               : CmpOp::Ne;
        return c;
    }

    std::vector<Stmt> type_body(const Scope &sc, const std::vector<RawStmt> &body) const
    {
        std::vector<Stmt> out;
        for (const auto &rs : body) {
            Stmt s = rs.stmt;
            switch (s.kind) {
            case StmtKind::Assign: {
                auto e = type_expr(sc, *rs.expr);
                auto vs = var_sort(sc, s.var);
                if (vs && *vs != e->sort)
                    throw ParseError(s.pos, "type error: variable '" + s.var + "' is " + std::string(to_string(*vs)));
                s.expr = e;
                break;
            }
            case StmtKind::If:
                s.cond = type_cond(sc, rs.cond);
                s.then_body = type_body(sc, rs.then_body);
                s.else_body = type_body(sc, rs.else_body);
                break;
            case StmtKind::SinkCall:
                s.expr = typed(sc, rs.expr, Sort::Str, "query argument");
                for (const auto &a : rs.args)
                    s.args.push_back(typed(sc, a, Sort::Str, "query parameter"));
                break;
            case StmtKind::LeakCall: {
                const Widget *w = sc.comp->widget(s.name);
                if (!w)
                    throw ParseError(s.pos, "setText references widget '" + s.name + "' not declared in '" +
                                                sc.comp->name + "'");
                if (w->kind != WidgetKind::TextBox)
                    throw ParseError(s.pos, "setText target '" + s.name + "' is not a text box");
                s.expr = typed(sc, rs.expr, Sort::Str, "setText payload");
                break;
            }
            case StmtKind::ProviderQuery: {
                const Component *p = app_.component(s.name);
                if (!p || p->kind != ComponentKind::Provider)
                    throw ParseError(s.pos, "providerQuery references unknown provider '" + s.name + "'");
                s.expr = typed(sc, rs.expr, Sort::Str, "provider argument");
                break;
            }
            case StmtKind::CallFn: {
                const RawFunction *callee = nullptr;
                for (const auto &rc : parser_.components)
                    if (rc.comp.name == sc.comp->name)
                        for (const auto &rf : rc.functions)
                            if (rf.fn.kind == FunctionKind::Helper && rf.fn.name == s.name)
                                callee = &rf;
                if (!callee)
                    throw ParseError(s.pos, "call to unknown function '" + s.name + "' in '" + sc.comp->name + "'");
                if (callee->fn.params.size() != rs.args.size())
                    throw ParseError(s.pos, "call to '" + s.name + "' expects " +
                                                std::to_string(callee->fn.params.size()) + " arguments");
                for (std::size_t i = 0; i < rs.args.size(); ++i)
                    s.args.push_back(typed(sc, rs.args[i], callee->fn.params[i].sort, "call argument"));
                break;
            }
            case StmtKind::Return:
                if (sc.fn->kind != FunctionKind::ProviderQuery)
                    throw ParseError(s.pos, "return outside a provider query handler");
                s.expr = typed(sc, rs.expr, Sort::Str, "returned value");
                break;
            }
            out.push_back(std::move(s));
        }
        return out;
    }

    const Parser &parser_;
    MiniApp &app_;
};

} // namespace

MiniApp parse_app(std::string_view source)
{
    Parser p(Lexer(source).run());
    p.parse_app();
    MiniApp app;
    app.name = p.app_name;
    app.tables = p.tables;
    for (const auto &rc : p.components)
        app.components.push_back(rc.comp);
    app.stmt_count = p.next_stmt - 1;
    app.site_count = p.next_site - 1;
    Typer(p, app).run();
    return app;
}

} // namespace consicore::ir
