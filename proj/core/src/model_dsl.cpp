#include "hazsynth/model_dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace hazsynth {

const Efa* ModelSet::find_efa(std::string_view efa_name) const {
    auto it = std::find_if(efas.begin(), efas.end(), [&](const Efa& e) { return e.name == efa_name; });
    return it == efas.end() ? nullptr : &*it;
}

const EventDecl* ModelSet::find_event(std::string_view event_name) const {
    auto it = std::find_if(events.begin(), events.end(),
                           [&](const EventDecl& e) { return e.name == event_name; });
    return it == events.end() ? nullptr : &*it;
}

namespace {

void derive_interfaces(const std::vector<EventDecl>& events, const std::vector<VarDecl>& variables,
                       Efa& efa) {
    std::set<std::string, std::less<>> used_events;
    std::set<std::string, std::less<>> used_vars;
    for (const auto& t : efa.transitions) {
        used_events.insert(t.event);
        std::vector<std::string> names;
        t.guard.collect_vars(names);
        for (const auto& a : t.action) names.push_back(a.var);
        used_vars.insert(names.begin(), names.end());
    }
    efa.alphabet.clear();
    for (const auto& e : events)
        if (used_events.count(e.name)) efa.alphabet.push_back(e);
    efa.variables.clear();
    for (const auto& v : variables)
        if (used_vars.count(v.name)) efa.variables.push_back(v);
}

}  // namespace

std::vector<Diagnostic> validate_model_set(const ModelSet& model) {
    std::vector<Diagnostic> diags;
    std::set<std::string, std::less<>> names;
    for (const auto& e : model.events)
        if (!names.insert(e.name).second) diags.push_back({"event '" + e.name + "' declared twice"});
    names.clear();
    for (const auto& v : model.variables) {
        if (!names.insert(v.name).second) diags.push_back({"variable '" + v.name + "' declared twice"});
        if (v.lo > v.hi)
            diags.push_back({"variable '" + v.name + "' has empty domain"});
        else if (!v.contains(v.initial))
            diags.push_back({"variable '" + v.name + "' initial value " + std::to_string(v.initial) +
                             " outside domain " + std::to_string(v.lo) + ".." + std::to_string(v.hi)});
    }
    for (const auto& efa : model.efas) {
        for (const auto& t : efa.transitions) {
            if (!model.find_event(t.event))
                diags.push_back({"efa '" + efa.name + "': event '" + t.event + "' is not declared"});
            std::vector<std::string> used;
            t.guard.collect_vars(used);
            for (const auto& a : t.action) used.push_back(a.var);
            for (const auto& name : used)
                if (std::none_of(model.variables.begin(), model.variables.end(),
                                 [&](const VarDecl& v) { return v.name == name; }))
                    diags.push_back({"efa '" + efa.name + "': variable '" + name + "' is not declared"});
        }
    }
    auto efa_diags = validate_model(model.efas);
    diags.insert(diags.end(), efa_diags.begin(), efa_diags.end());
    return diags;
}

ModelSet make_model_set(std::string name, std::string description, std::vector<EventDecl> events,
                        std::vector<VarDecl> variables, std::vector<Efa> efas) {
    ModelSet m{std::move(name), std::move(description), std::move(events), std::move(variables),
               std::move(efas)};
    for (auto& efa : m.efas) derive_interfaces(m.events, m.variables, efa);
    auto diags = validate_model_set(m);
    if (!diags.empty()) throw ValidationError(std::move(diags));
    return m;
}

PlantSpecSplit split_plant_spec(const ModelSet& model) {
    PlantSpecSplit out;
    bool any_role = std::any_of(model.efas.begin(), model.efas.end(),
                                [](const Efa& e) { return e.is_spec; });
    for (const auto& efa : model.efas) {
        bool spec = any_role ? efa.is_spec : !efa.marked_locations.empty();
        (spec ? out.spec : out.plant).push_back(efa);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
    End,
    Ident,
    Int,
    String,
    Semi,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Colon,
    DotDot,
    Arrow,
    Assign,  // :=
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Bang,
    AndAnd,
    OrOr,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int value = 0;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    advance();
                t.kind = Tok::Ident;
                t.text = std::string(src_.substr(start, pos_ - start));
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '-' && pos_ + 1 < src_.size() &&
                        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                std::size_t start = pos_;
                advance();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    advance();
                t.kind = Tok::Int;
                t.text = std::string(src_.substr(start, pos_ - start));
                auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
                if (ec != std::errc{})
                    throw ParseError(ErrorCategory::Lexical, "integer literal out of range: " + t.text,
                                     t.line, t.column);
            } else if (c == '"') {
                advance();
                std::string s;
                for (;;) {
                    if (pos_ >= src_.size() || src_[pos_] == '\n')
                        throw ParseError(ErrorCategory::Lexical, "unterminated string literal", t.line,
                                         t.column);
                    char d = src_[pos_];
                    advance();
                    if (d == '"') break;
                    if (d == '\\') {
                        if (pos_ >= src_.size())
                            throw ParseError(ErrorCategory::Lexical, "unterminated string literal",
                                             t.line, t.column);
                        char e = src_[pos_];
                        advance();
                        if (e == 'n')
                            s += '\n';
                        else if (e == '"' || e == '\\')
                            s += e;
                        else
                            throw ParseError(ErrorCategory::Lexical,
                                             std::string("unknown escape '\\") + e + "'", line_, col_ - 2);
                    } else {
                        s += d;
                    }
                }
                t.kind = Tok::String;
                t.text = std::move(s);
            } else {
                t.kind = punct(t);
            }
            out.push_back(std::move(t));
        }
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else if (src_[pos_] != '\r') {
            ++col_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else {
                break;
            }
        }
    }

    bool match(std::string_view s) {
        if (src_.substr(pos_, s.size()) != s) return false;
        for (std::size_t i = 0; i < s.size(); ++i) advance();
        return true;
    }

    Tok punct(const Token& t) {
        if (match("..")) return Tok::DotDot;
        if (match("->")) return Tok::Arrow;
        if (match(":=")) return Tok::Assign;
        if (match("==")) return Tok::EqEq;
        if (match("!=")) return Tok::NotEq;
        if (match("<=")) return Tok::Le;
        if (match(">=")) return Tok::Ge;
        if (match("&&")) return Tok::AndAnd;
        if (match("||")) return Tok::OrOr;
        char c = src_[pos_];
        Tok k;
        switch (c) {
            case ';': k = Tok::Semi; break;
            case '{': k = Tok::LBrace; break;
            case '}': k = Tok::RBrace; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case ',': k = Tok::Comma; break;
            case ':': k = Tok::Colon; break;
            case '<': k = Tok::Lt; break;
            case '>': k = Tok::Gt; break;
            case '!': k = Tok::Bang; break;
            default: {
                std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                        ? "byte 0x" + to_hex(static_cast<unsigned char>(c))
                                        : std::string("'") + c + "'";
                throw ParseError(ErrorCategory::Lexical, "unexpected character " + shown, t.line, t.column);
            }
        }
        advance();
        return k;
    }

    static std::string to_hex(unsigned char c) {
        const char* digits = "0123456789abcdef";
        return {digits[c >> 4], digits[c & 0xf]};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

const char* describe(Tok k) {
    switch (k) {
        case Tok::End: return "end of input";
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer";
        case Tok::String: return "string";
        case Tok::Semi: return "';'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::Colon: return "':'";
        case Tok::DotDot: return "'..'";
        case Tok::Arrow: return "'->'";
        case Tok::Assign: return "':='";
        case Tok::EqEq: return "'=='";
        case Tok::NotEq: return "'!='";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::Bang: return "'!'";
        case Tok::AndAnd: return "'&&'";
        case Tok::OrOr: return "'||'";
    }
    return "token";
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ModelSet run() {
        if (!is_keyword("model")) fail("expected model header");
        next();
        std::string name = expect_ident("model name");
        std::string description;
        if (peek().kind == Tok::String) description = next().text;
        expect(Tok::Semi);

        std::vector<EventDecl> events;
        std::vector<VarDecl> variables;
        std::vector<Efa> efas;
        std::vector<int> efa_lines;
        while (peek().kind != Tok::End) {
            if (is_keyword("event")) {
                parse_event(events);
            } else if (is_keyword("var")) {
                variables.push_back(parse_var());
                labels_[variables.back().name] = variables.back();
            } else if (is_keyword("efa")) {
                efa_lines.push_back(peek().line);
                efas.push_back(parse_efa());
            } else {
                fail("expected 'event', 'var' or 'efa'");
            }
        }

        ModelSet m{std::move(name), std::move(description), std::move(events),
                   std::move(variables), std::move(efas)};
        std::vector<Diagnostic> diags = undeclared_;
        for (auto& efa : m.efas) derive_interfaces(m.events, m.variables, efa);
        auto rest = validate_model_set(m);
        for (auto& d : rest) {
            // Attach the efa's source line when the diagnostic names one.
            for (std::size_t i = 0; i < m.efas.size() && d.line == 0; ++i)
                if (d.message.rfind("efa '" + m.efas[i].name + "'", 0) == 0) d.line = efa_lines[i];
            if (std::find(diags.begin(), diags.end(), d) == diags.end()) diags.push_back(d);
        }
        if (!diags.empty()) throw ValidationError(std::move(diags));
        return m;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(ErrorCategory::Syntax, msg, peek().line, peek().column);
    }

    bool is_keyword(std::string_view kw) const {
        return peek().kind == Tok::Ident && peek().text == kw;
    }

    void expect(Tok k) {
        if (peek().kind != k)
            fail(std::string("expected ") + describe(k) + ", found " + describe(peek().kind) +
                 (peek().kind == Tok::Ident ? " '" + peek().text + "'" : ""));
        next();
    }

    std::string expect_ident(const char* what) {
        if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
        return next().text;
    }

    int expect_int(const char* what) {
        if (peek().kind != Tok::Int) fail(std::string("expected ") + what);
        return next().value;
    }

    void parse_event(std::vector<EventDecl>& events) {
        next();
        EventDecl e;
        e.name = expect_ident("event name");
        while (peek().kind == Tok::Ident) {
            const std::string& flag = peek().text;
            if (flag == "uncontrollable")
                e.controllable = false;
            else if (flag == "controllable")
                e.controllable = true;
            else if (flag == "proactive")
                e.proactive = true;
            else if (flag == "reactive")
                e.proactive = false;
            else
                fail("unknown event flag '" + flag + "'");
            next();
        }
        expect(Tok::Semi);
        events.push_back(std::move(e));
    }

    VarDecl parse_var() {
        next();
        VarDecl v;
        v.name = expect_ident("variable name");
        expect(Tok::Colon);
        if (peek().kind == Tok::LBrace) {
            next();
            v.labels.push_back(expect_ident("value label"));
            while (peek().kind == Tok::Comma) {
                next();
                v.labels.push_back(expect_ident("value label"));
            }
            expect(Tok::RBrace);
            v.lo = 0;
            v.hi = static_cast<int>(v.labels.size()) - 1;
        } else {
            v.lo = expect_int("domain lower bound");
            expect(Tok::DotDot);
            v.hi = expect_int("domain upper bound");
        }
        if (!is_keyword("init")) fail("expected 'init'");
        next();
        v.initial = parse_value(v.name, v.labels);
        expect(Tok::Semi);
        return v;
    }

    int parse_value(const std::string& var, const std::vector<std::string>& labels) {
        if (peek().kind == Tok::Int) return next().value;
        if (peek().kind == Tok::Ident) {
            auto it = std::find(labels.begin(), labels.end(), peek().text);
            if (it == labels.end()) fail("'" + peek().text + "' is not a value label of '" + var + "'");
            next();
            return static_cast<int>(it - labels.begin());
        }
        fail("expected value");
    }

    int parse_value_for(const std::string& var) {
        auto it = labels_.find(var);
        static const std::vector<std::string> none;
        if (it == labels_.end()) {
            if (peek().kind == Tok::Ident) {
                undeclared_.push_back({"variable '" + var + "' is not declared", peek().line});
                next();
                return 0;
            }
            return parse_value(var, none);
        }
        return it->second.lo + parse_value(var, it->second.labels);
    }

    Efa parse_efa() {
        next();
        Efa efa;
        efa.name = expect_ident("efa name");
        if (is_keyword("spec")) {
            efa.is_spec = true;
            next();
        } else if (is_keyword("plant")) {
            next();
        }
        expect(Tok::LBrace);
        while (peek().kind != Tok::RBrace) {
            if (peek().kind == Tok::End) fail("unterminated efa block");
            if (is_keyword("location")) {
                next();
                std::string id = expect_ident("location id");
                efa.locations.push_back(id);
                while (peek().kind == Tok::Ident) {
                    if (peek().text == "initial")
                        efa.initial_locations.push_back(id);
                    else if (peek().text == "marked")
                        efa.marked_locations.push_back(id);
                    else
                        fail("unknown location flag '" + peek().text + "'");
                    next();
                }
                expect(Tok::Semi);
            } else if (is_keyword("trans")) {
                parse_trans(efa);
            } else {
                fail("expected 'location' or 'trans'");
            }
        }
        expect(Tok::RBrace);
        return efa;
    }

    void parse_trans(Efa& efa) {
        next();
        std::string src = expect_ident("source location");
        expect(Tok::Arrow);
        std::string tgt = expect_ident("target location");
        if (!is_keyword("on")) fail("expected 'on'");
        next();
        std::vector<std::string> evs{expect_ident("event name")};
        while (peek().kind == Tok::Comma) {
            next();
            evs.push_back(expect_ident("event name"));
        }
        Guard guard;
        ActionSet action;
        if (is_keyword("when")) {
            next();
            guard = parse_or();
        }
        if (is_keyword("do")) {
            next();
            action.push_back(parse_assignment());
            while (peek().kind == Tok::Comma) {
                next();
                action.push_back(parse_assignment());
            }
        }
        expect(Tok::Semi);
        for (auto& e : evs) efa.transitions.push_back({src, std::move(e), guard, action, tgt});
    }

    Assignment parse_assignment() {
        Assignment a;
        a.var = expect_ident("variable name");
        expect(Tok::Assign);
        a.value = parse_value_for(a.var);
        return a;
    }

    Guard parse_or() {
        std::vector<Guard> parts{parse_and()};
        while (peek().kind == Tok::OrOr) {
            next();
            parts.push_back(parse_and());
        }
        return parts.size() == 1 ? std::move(parts.front()) : Guard::disj(std::move(parts));
    }

    Guard parse_and() {
        std::vector<Guard> parts{parse_unary()};
        while (peek().kind == Tok::AndAnd) {
            next();
            parts.push_back(parse_unary());
        }
        if (parts.size() == 1) return std::move(parts.front());
        Guard g;
        g.kind = Guard::Kind::And;
        g.args = std::move(parts);
        return g;
    }

    Guard parse_unary() {
        if (peek().kind == Tok::Bang) {
            next();
            return Guard::negate(parse_unary());
        }
        if (peek().kind == Tok::LParen) {
            next();
            Guard g = parse_or();
            expect(Tok::RParen);
            return g;
        }
        if (is_keyword("true")) {
            next();
            return Guard::always();
        }
        if (is_keyword("false")) {
            next();
            return Guard::never();
        }
        std::string var = expect_ident("guard");
        CmpOp op;
        switch (peek().kind) {
            case Tok::EqEq: op = CmpOp::Eq; break;
            case Tok::NotEq: op = CmpOp::Ne; break;
            case Tok::Lt: op = CmpOp::Lt; break;
            case Tok::Le: op = CmpOp::Le; break;
            case Tok::Gt: op = CmpOp::Gt; break;
            case Tok::Ge: op = CmpOp::Ge; break;
            default: fail("expected comparison operator after '" + var + "'");
        }
        next();
        return Guard::compare(var, op, parse_value_for(var));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::unordered_map<std::string, VarDecl> labels_;
    std::vector<Diagnostic> undeclared_;
};

// ---------------------------------------------------------------------------
// Serializer
// ---------------------------------------------------------------------------

void write_guard(std::ostream& os, const Guard& g, bool nested) {
    switch (g.kind) {
        case Guard::Kind::True: os << "true"; return;
        case Guard::Kind::False: os << "false"; return;
        case Guard::Kind::Compare: os << g.var << ' ' << to_string(g.op) << ' ' << g.value; return;
        case Guard::Kind::Not: {
            const Guard& inner = g.args.at(0);
            bool paren = inner.kind == Guard::Kind::And || inner.kind == Guard::Kind::Or;
            os << '!';
            if (paren) os << '(';
            write_guard(os, inner, false);
            if (paren) os << ')';
            return;
        }
        case Guard::Kind::And:
        case Guard::Kind::Or: {
            if (nested) os << '(';
            const char* sep = g.kind == Guard::Kind::And ? " && " : " || ";
            for (std::size_t i = 0; i < g.args.size(); ++i) {
                if (i) os << sep;
                write_guard(os, g.args[i], true);
            }
            if (nested) os << ')';
            return;
        }
    }
}

void write_string(std::ostream& os, const std::string& s) {
    os << '"';
    for (char c : s) {
        if (c == '"' || c == '\\')
            os << '\\' << c;
        else if (c == '\n')
            os << "\\n";
        else
            os << c;
    }
    os << '"';
}

}  // namespace

ModelSet parse_model(std::string_view text) {
    return Parser(Lexer(text).run()).run();
}

std::string serialize_model(const ModelSet& model) {
    std::ostringstream os;
    os << "model " << model.name;
    if (!model.description.empty()) {
        os << ' ';
        write_string(os, model.description);
    }
    os << ";\n";
    if (!model.events.empty()) os << '\n';
    for (const auto& e : model.events) {
        os << "event " << e.name;
        if (!e.controllable) os << " uncontrollable";
        if (e.proactive) os << " proactive";
        os << ";\n";
    }
    if (!model.variables.empty()) os << '\n';
    for (const auto& v : model.variables) {
        os << "var " << v.name << " : ";
        if (!v.labels.empty()) {
            os << '{';
            for (std::size_t i = 0; i < v.labels.size(); ++i) os << (i ? ", " : "") << v.labels[i];
            os << "} init " << v.labels.at(static_cast<std::size_t>(v.initial - v.lo));
        } else {
            os << v.lo << ".." << v.hi << " init " << v.initial;
        }
        os << ";\n";
    }
    for (const auto& efa : model.efas) {
        os << "\nefa " << efa.name << (efa.is_spec ? " spec" : "") << " {\n";
        for (const auto& l : efa.locations) {
            os << "    location " << l;
            if (std::count(efa.initial_locations.begin(), efa.initial_locations.end(), l)) os << " initial";
            if (std::count(efa.marked_locations.begin(), efa.marked_locations.end(), l)) os << " marked";
            os << ";\n";
        }
        for (const auto& t : efa.transitions) {
            os << "    trans " << t.source << " -> " << t.target << " on " << t.event;
            if (!t.guard.is_true()) {
                os << " when ";
                write_guard(os, t.guard, false);
            }
            if (!t.action.empty()) {
                os << " do ";
                for (std::size_t i = 0; i < t.action.size(); ++i)
                    os << (i ? ", " : "") << t.action[i].var << " := " << t.action[i].value;
            }
            os << ";\n";
        }
        os << "}\n";
    }
    return os.str();
}

ModelSet load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

}  // namespace hazsynth
