#include "lexer.hpp"

#include <cctype>
#include <optional>

namespace cwc::detail {

std::string_view token_name(Tok t)
{
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Real: return "number";
    case Tok::Var: return "variable";
    case Tok::Empty: return "'\\e'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Pipe: return "'|'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Star: return "'*'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Underscore: return "'_'";
    case Tok::End: return "end of input";
    }
    return "?";
}

namespace {

bool is_ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

bool is_ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_digit(char c)
{
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

class Lexer {
public:
    Lexer(std::string_view text, std::vector<Diagnostic>& diags) : text_(text), diags_(diags) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;) {
            skip_blank();
            const SourcePos start{line_, col_};
            if (at_end()) {
                out.push_back({Tok::End, "", start});
                return out;
            }
            const char c = peek();
            if (is_ident_start(c)) {
                out.push_back({Tok::Ident, take_while(is_ident_char), start});
            } else if (is_digit(c)) {
                out.push_back(number(start));
            } else if (c == '$') {
                advance();
                if (at_end() || !is_ident_start(peek())) {
                    error(start, "variable name must start with a letter after '$'");
                    continue;
                }
                out.push_back({Tok::Var, take_while(is_ident_char), start});
            } else if (c == '\\') {
                advance();
                if (!at_end() && peek() == 'e' && (pos_ + 1 >= text_.size() || !is_ident_char(text_[pos_ + 1]))) {
                    advance();
                    out.push_back({Tok::Empty, "\\e", start});
                } else {
                    error(start, "unknown escape; only '\\e' is allowed");
                }
            } else if (auto k = punct(c)) {
                advance();
                out.push_back({*k, std::string(1, c), start});
            } else {
                advance();
                error(start, std::string("unexpected character '") + c + "'");
            }
        }
    }

private:
    static std::optional<Tok> punct(char c)
    {
        switch (c) {
        case '{': return Tok::LBrace;
        case '}': return Tok::RBrace;
        case '(': return Tok::LParen;
        case ')': return Tok::RParen;
        case '[': return Tok::LBracket;
        case ']': return Tok::RBracket;
        case '<': return Tok::Lt;
        case '>': return Tok::Gt;
        case '|': return Tok::Pipe;
        case ';': return Tok::Semi;
        case ',': return Tok::Comma;
        case '*': return Tok::Star;
        case '+': return Tok::Plus;
        case '-': return Tok::Minus;
        case '_': return Tok::Underscore;
        default: return std::nullopt;
        }
    }

    Token number(SourcePos start)
    {
        std::string s = take_while(is_digit);
        bool real = false;
        if (!at_end() && peek() == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1])) {
            real = true;
            advance();
            s += '.';
            s += take_while(is_digit);
        }
        if (!at_end() && (peek() == 'e' || peek() == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && is_digit(text_[look])) {
                real = true;
                while (pos_ < look) s += advance();
                s += take_while(is_digit);
            }
        }
        return {real ? Tok::Real : Tok::Int, s, start};
    }

    void skip_blank()
    {
        while (!at_end()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    template <class Pred>
    std::string take_while(Pred pred)
    {
        std::string s;
        while (!at_end() && pred(peek())) s += advance();
        return s;
    }

    [[nodiscard]] bool at_end() const { return pos_ >= text_.size(); }
    [[nodiscard]] char peek() const { return text_[pos_]; }

    char advance()
    {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void error(SourcePos at, std::string msg)
    {
        diags_.push_back({Diagnostic::Severity::Error, at, std::move(msg)});
    }

    std::string_view text_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

} // namespace

std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diags)
{
    return Lexer(text, diags).run();
}

} // namespace cwc::detail
