/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <tcep/veql.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace tcep {

namespace {

constexpr std::array<std::pair<OperatorKind, std::string_view>, 6> kOperatorNames{{
    {OperatorKind::TrafficCongestion, "Traffic_Congestion"},
    {OperatorKind::VehicleCount, "Vehicle_Count"},
    {OperatorKind::FlowRate, "Flow_Rate"},
    {OperatorKind::MeanSpeed, "Mean_Speed"},
    {OperatorKind::Density, "Density"},
    {OperatorKind::LevelOfService, "Level_Of_Service"},
}};

bool iequals(std::string_view a, std::string_view b) noexcept {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

}// namespace

std::string_view to_string(OperatorKind op) noexcept {
    for (const auto& [kind, name] : kOperatorNames) {
        if (kind == op) {
            return name;
        }
    }
    return "unknown";
}

std::optional<OperatorKind> operator_from_name(std::string_view name) noexcept {
    for (const auto& [kind, spelled] : kOperatorNames) {
        if (iequals(name, spelled)) {
            return kind;
        }
    }
    return std::nullopt;
}

bool needs_segments(OperatorKind op) noexcept {
    return op == OperatorKind::TrafficCongestion || op == OperatorKind::Density || op == OperatorKind::LevelOfService;
}

std::set<VehicleClass> QueryAst::object_classes() const { return {predicates.begin(), predicates.end()}; }

double QueryAst::confidence_min() const noexcept {
    return confidence_percent ? *confidence_percent / 100.0 : kDefaultConfidenceMin;
}

VeqlError::VeqlError(Stage stage, std::size_t position, const std::string& message)
    : Error(ErrorKind::Query, std::string(to_string(stage)) + " error at " + std::to_string(position) + ": " + message),
      stage_(stage), position_(position) {}

std::string_view to_string(VeqlError::Stage stage) noexcept {
    switch (stage) {
        case VeqlError::Stage::Lexical: return "lexical";
        case VeqlError::Stage::Syntax: return "syntax";
        case VeqlError::Stage::Semantic: return "semantic";
    }
    return "unknown";
}

namespace {

enum class Tok { Ident, Number, Word, String, LParen, RParen, Equals, Greater, Percent, End };

struct Token {
    Tok kind;
    std::string_view text;// string literals: the content between the quotes
    std::size_t begin;
    std::size_t end;
};

// Typographic quotes as UTF-8: U+2018/U+2019 and U+201C/U+201D.
constexpr std::string_view kLeftSingle = "\xE2\x80\x98";
constexpr std::string_view kRightSingle = "\xE2\x80\x99";
constexpr std::string_view kLeftDouble = "\xE2\x80\x9C";
constexpr std::string_view kRightDouble = "\xE2\x80\x9D";

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            if (pos_ >= src_.size()) {
                out.push_back(Token{Tok::End, {}, pos_, pos_});
                return out;
            }
            out.push_back(next());
        }
    }

  private:
    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }

    [[nodiscard]] bool at(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    /// Length of the opening quote at the cursor, with its matching closer.
    [[nodiscard]] std::pair<std::size_t, std::vector<std::string_view>> quote_here() const {
        if (src_[pos_] == '\'') {
            return {1, {"'", kRightSingle}};
        }
        if (src_[pos_] == '"') {
            return {1, {"\"", kRightDouble}};
        }
        if (at(kLeftSingle) || at(kRightSingle)) {
            return {3, {"'", kRightSingle}};
        }
        if (at(kLeftDouble) || at(kRightDouble)) {
            return {3, {"\"", kRightDouble}};
        }
        return {0, {}};
    }

    Token next() {
        const std::size_t begin = pos_;
        const char c = src_[pos_];
        const auto single = [&](Tok kind) {
            ++pos_;
            return Token{kind, src_.substr(begin, 1), begin, pos_};
        };
        switch (c) {
            case '(': return single(Tok::LParen);
            case ')': return single(Tok::RParen);
            case '=': return single(Tok::Equals);
            case '>': return single(Tok::Greater);
            case '%': return single(Tok::Percent);
            default: break;
        }
        if (const auto [open, closers] = quote_here(); open > 0) {
            pos_ += open;
            const std::size_t content = pos_;
            while (pos_ < src_.size()) {
                for (auto closer : closers) {
                    if (at(closer)) {
                        const std::size_t stop = pos_;
                        pos_ += closer.size();
                        return Token{Tok::String, src_.substr(content, stop - content), begin, pos_};
                    }
                }
                if (src_[pos_] == '\n') {
                    break;
                }
                ++pos_;
            }
            throw VeqlError(VeqlError::Stage::Lexical, begin, "unterminated string literal");
        }
        if (static_cast<unsigned char>(c) < 0x20 || c == 0x7F) {
            throw VeqlError(VeqlError::Stage::Lexical, begin, "unexpected control character");
        }
        while (pos_ < src_.size()) {
            const auto u = static_cast<unsigned char>(src_[pos_]);
            if (std::isspace(u) || u < 0x20 || u == 0x7F || std::string_view("()=>%'\"").find(src_[pos_]) != std::string_view::npos
                || quote_here().first > 0) {
                break;
            }
            ++pos_;
        }
        const auto text = src_.substr(begin, pos_ - begin);
        return Token{classify(text), text, begin, pos_};
    }

    static Tok classify(std::string_view w) {
        const auto is_digit = [](char ch) { return ch >= '0' && ch <= '9'; };
        const auto dot = w.find('.');
        const auto int_part = w.substr(0, dot);
        const bool int_ok = !int_part.empty() && std::all_of(int_part.begin(), int_part.end(), is_digit);
        if (int_ok) {
            if (dot == std::string_view::npos) {
                return Tok::Number;
            }
            const auto frac = w.substr(dot + 1);
            if (!frac.empty() && std::all_of(frac.begin(), frac.end(), is_digit)) {
                return Tok::Number;
            }
        }
        const auto ident_char = [](char ch) {
            return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_';
        };
        if (!w.empty() && !is_digit(w.front()) && std::all_of(w.begin(), w.end(), ident_char)) {
            return Tok::Ident;
        }
        return Tok::Word;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
  public:
    Parser(std::string_view src, std::vector<Token> tokens) : src_(src), toks_(std::move(tokens)) {}

    QueryAst run() {
        QueryAst ast;
        keyword("Select");
        const Token& op = expect(Tok::Ident, "operator name");
        const auto kind = operator_from_name(op.text);
        if (!kind) {
            throw VeqlError(VeqlError::Stage::Semantic, op.begin, "unknown operator \"" + std::string(op.text) + "\"");
        }
        ast.op = *kind;
        expect(Tok::LParen, "'('");
        keyword("Object");
        expect(Tok::RParen, "')'");
        keyword("from");
        ast.road_name = road_name();
        where(ast);
        within(ast);
        if (is_keyword(peek(), "WITH")) {
            confidence(ast);
        }
        if (peek().kind != Tok::End) {
            syntax(peek(), "end of query");
        }
        return ast;
    }

  private:
    [[nodiscard]] const Token& peek() const { return toks_[i_]; }

    const Token& advance() {
        const Token& t = toks_[i_];
        if (t.kind != Tok::End) {
            ++i_;
        }
        return t;
    }

    [[noreturn]] static void syntax(const Token& got, std::string_view expected) {
        std::string found = got.kind == Tok::End ? "end of query" : "\"" + std::string(got.text) + "\"";
        throw VeqlError(VeqlError::Stage::Syntax, got.begin, "expected " + std::string(expected) + ", found " + found);
    }

    static bool is_keyword(const Token& t, std::string_view kw) { return t.kind == Tok::Ident && iequals(t.text, kw); }

    void keyword(std::string_view kw) {
        if (!is_keyword(peek(), kw)) {
            syntax(peek(), "\"" + std::string(kw) + "\"");
        }
        advance();
    }

    const Token& expect(Tok kind, std::string_view what) {
        if (peek().kind != kind) {
            syntax(peek(), what);
        }
        return advance();
    }

    std::string road_name() {
        const Token& first = peek();
        std::size_t end = first.begin;
        while (peek().kind == Tok::Ident || peek().kind == Tok::Number || peek().kind == Tok::Word) {
            if (is_keyword(peek(), "WHERE")) {
                break;
            }
            end = advance().end;
        }
        if (end == first.begin) {
            syntax(peek(), "road name");
        }
        std::string out;
        bool gap = false;
        for (char c : src_.substr(first.begin, end - first.begin)) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                gap = true;
                continue;
            }
            if (gap) {
                out.push_back(' ');
                gap = false;
            }
            out.push_back(c);
        }
        return out;
    }

    VehicleClass predicate() {
        keyword("Object");
        expect(Tok::Equals, "'='");
        const Token& lit = expect(Tok::String, "quoted class name");
        const auto cls = vehicle_class_from_name(lowercase(lit.text));
        if (!cls) {
            throw VeqlError(VeqlError::Stage::Semantic, lit.begin,
                            "unknown object class \"" + std::string(lit.text) + "\"");
        }
        return *cls;
    }

    void where(QueryAst& ast) {
        keyword("WHERE");
        ast.predicates.push_back(predicate());
        std::optional<Combinator> comb;
        while (is_keyword(peek(), "OR") || is_keyword(peek(), "AND")) {
            const Token& t = advance();
            const Combinator here = iequals(t.text, "OR") ? Combinator::Or : Combinator::And;
            if (comb && *comb != here) {
                throw VeqlError(VeqlError::Stage::Semantic, t.begin, "OR and AND cannot be mixed in one WHERE clause");
            }
            comb = here;
            ast.predicates.push_back(predicate());
        }
        ast.combinator = comb.value_or(Combinator::Or);
        if (ast.combinator == Combinator::And && ast.object_classes().size() > 1) {
            throw VeqlError(VeqlError::Stage::Semantic, toks_[i_ > 0 ? i_ - 1 : 0].begin,
                            "AND of different object classes can never match");
        }
    }

    double number(const Token& t) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || ptr != t.text.data() + t.text.size() || !std::isfinite(v)) {
            throw VeqlError(VeqlError::Stage::Semantic, t.begin, "number out of range");
        }
        return v;
    }

    void within(QueryAst& ast) {
        keyword("WITHIN");
        keyword("Time_Window");
        expect(Tok::Equals, "'='");
        const Token& num = expect(Tok::Number, "window length");
        double value = number(num);
        const Token& unit = peek();
        if (is_keyword(unit, "sec")) {
            advance();
        } else if (is_keyword(unit, "min")) {
            advance();
            value *= 60.0;
        } else {
            syntax(unit, "\"sec\" or \"min\"");
        }
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw VeqlError(VeqlError::Stage::Semantic, num.begin, "window length must be positive");
        }
        ast.window_seconds = value;
    }

    void confidence(QueryAst& ast) {
        keyword("WITH");
        keyword("CONFIDENCE");
        expect(Tok::Greater, "'>'");
        const Token& num = expect(Tok::Number, "confidence percentage");
        expect(Tok::Percent, "'%'");
        const double pct = number(num);
        if (!(pct > 0.0 && pct < 100.0)) {
            throw VeqlError(VeqlError::Stage::Semantic, num.begin, "confidence must lie strictly between 0 and 100");
        }
        ast.confidence_percent = pct;
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

std::string format_number(double v) {
    char buf[512];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    if (ec != std::errc()) {
        return std::to_string(v);
    }
    return std::string(buf, ptr);
}

}// namespace

QueryAst parse_query(std::string_view text) {
    Lexer lexer(text);
    Parser parser(text, lexer.run());
    return parser.run();
}

std::string to_veql(const QueryAst& ast) {
    std::string out = "Select ";
    out += to_string(ast.op);
    out += "(Object) from ";
    out += ast.road_name;
    out += " WHERE ";
    for (std::size_t i = 0; i < ast.predicates.size(); ++i) {
        if (i > 0) {
            out += ast.combinator == Combinator::Or ? " OR " : " AND ";
        }
        out += "Object = '";
        out += to_string(ast.predicates[i]);
        out += "'";
    }
    out += " WITHIN Time_Window = " + format_number(ast.window_seconds) + " sec";
    if (ast.confidence_percent) {
        out += " WITH CONFIDENCE > " + format_number(*ast.confidence_percent) + "%";
    }
    return out;
}

ValidatedQuery validate_against(const QueryAst& ast, const std::vector<CameraMeta>& registry, const RoadGraph& graph) {
    ValidatedQuery out{ast, resolve_road_route(graph, registry, ast.road_name), {}};
    out.cameras = find_cameras(graph, registry, ast.road_name, out.route);
    const std::size_t needed = needs_segments(ast.op) ? 2 : 1;
    if (out.cameras.size() < needed) {
        throw Error(ErrorKind::InsufficientCameras, std::string(to_string(ast.op)) + " on \"" + ast.road_name
                                                        + "\" needs " + std::to_string(needed) + " camera(s), found "
                                                        + std::to_string(out.cameras.size()));
    }
    return out;
}

}// namespace tcep
