#include <cctype>
#include <string>
#include <unordered_set>

#include "assembler.hpp"
#include "lockbench/netcore/io.hpp"

namespace lockbench::netcore {
namespace {

struct Token {
    enum class Kind { Ident, Number, Punct, End } kind = Kind::End;
    std::string text;
    detail::SourcePos pos;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space_and_comments();
        Token t;
        t.pos = {line_, col_};
        if (i_ >= src_.size()) return t;
        const char c = src_[i_];
        if (c == '\\') {
            advance();
            const std::size_t start = i_;
            while (i_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[i_]))) advance();
            t.kind = Token::Kind::Ident;
            t.text = std::string(src_.substr(start, i_ - start));
            if (t.text.empty()) fail(t.pos, "empty escaped identifier");
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = i_;
            while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                        src_[i_] == '_' || src_[i_] == '$'))
                advance();
            t.kind = Token::Kind::Ident;
            t.text = std::string(src_.substr(start, i_ - start));
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
            const std::size_t start = i_;
            while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                        src_[i_] == '\'' || src_[i_] == '_'))
                advance();
            t.kind = Token::Kind::Number;
            t.text = std::string(src_.substr(start, i_ - start));
            return t;
        }
        advance();
        t.kind = Token::Kind::Punct;
        t.text = std::string(1, c);
        return t;
    }

    [[noreturn]] static void fail(detail::SourcePos p, const std::string& msg) {
        throw ParseError(ParseError::Kind::Syntax, p.line, p.column, msg);
    }

private:
    void advance() {
        if (src_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    void skip_space_and_comments() {
        for (;;) {
            while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) advance();
            if (i_ + 1 < src_.size() && src_[i_] == '/' && src_[i_ + 1] == '/') {
                while (i_ < src_.size() && src_[i_] != '\n') advance();
                continue;
            }
            if (i_ + 1 < src_.size() && src_[i_] == '/' && src_[i_ + 1] == '*') {
                const detail::SourcePos p{line_, col_};
                advance();
                advance();
                while (i_ + 1 < src_.size() && !(src_[i_] == '*' && src_[i_ + 1] == '/')) advance();
                if (i_ + 1 >= src_.size()) fail(p, "unterminated block comment");
                advance();
                advance();
                continue;
            }
            return;
        }
    }

    std::string_view src_;
    std::size_t i_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class VerilogParser {
public:
    explicit VerilogParser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

    Netlist parse() {
        expect_ident("module");
        asm_.set_module_name(ident());
        if (accept("(")) {
            if (!accept(")")) {
                do {
                    (void)ident();
                } while (accept(","));
                expect(")");
            }
        }
        expect(";");
        while (!is_ident("endmodule")) {
            if (tok_.kind == Token::Kind::End) Lexer::fail(tok_.pos, "missing endmodule");
            item();
        }
        advance();
        if (tok_.kind != Token::Kind::End) {
            throw ParseError(ParseError::Kind::Unsupported, tok_.pos.line, tok_.pos.column,
                             "only a single module is supported");
        }
        return asm_.build();
    }

private:
    void item() {
        const Token head = tok_;
        if (head.kind != Token::Kind::Ident) Lexer::fail(head.pos, "unexpected '" + head.text + "'");
        if (head.text == "input" || head.text == "output" || head.text == "wire") {
            advance();
            if (is_punct("[")) unsupported(tok_, "vector declarations");
            do {
                const detail::SourcePos p = tok_.pos;
                std::string name = ident();
                if (head.text == "input") {
                    asm_.declare_input(name, p);
                } else if (head.text == "output") {
                    asm_.declare_output(name, p);
                }
            } while (accept(","));
            expect(";");
            return;
        }
        if (head.text == "assign") {
            advance();
            assign_statement();
            return;
        }
        static const std::unordered_set<std::string> kUnsupported = {
            "always", "initial", "reg", "integer", "function", "task", "generate",
            "inout", "parameter", "localparam", "specify", "dff", "DFF"};
        if (kUnsupported.count(head.text) != 0) unsupported(head, "'" + head.text + "'");

        auto type = gate_type_from_keyword(head.text);
        if (!type || is_constant(*type)) {
            unsupported(head, "module or cell instance '" + head.text + "'");
        }
        advance();
        if (tok_.kind == Token::Kind::Ident) advance();  // instance name
        expect("(");
        if (is_punct(".")) unsupported(tok_, "named port connections");
        const detail::SourcePos out_pos = tok_.pos;
        std::string out = ident();
        std::vector<std::string> ins;
        std::vector<detail::SourcePos> in_pos;
        while (accept(",")) {
            in_pos.push_back(tok_.pos);
            ins.push_back(ident());
        }
        expect(")");
        expect(";");
        asm_.define_gate(out, *type, std::move(ins), out_pos, std::move(in_pos));
    }

    void assign_statement() {
        const detail::SourcePos lhs_pos = tok_.pos;
        std::string lhs = ident();
        expect("=");
        if (tok_.kind == Token::Kind::Number) {
            const Token num = tok_;
            advance();
            GateType t;
            if (num.text == "1'b0" || num.text == "1'B0" || num.text == "0") {
                t = GateType::Const0;
            } else if (num.text == "1'b1" || num.text == "1'B1" || num.text == "1") {
                t = GateType::Const1;
            } else {
                unsupported(num, "constant '" + num.text + "'");
            }
            expect(";");
            asm_.define_gate(lhs, t, {}, lhs_pos);
            return;
        }
        GateType t = GateType::Buf;
        if (accept("~")) t = GateType::Not;
        const detail::SourcePos rhs_pos = tok_.pos;
        std::string rhs = ident();
        if (!is_punct(";")) unsupported(tok_, "expressions in assign statements");
        expect(";");
        asm_.define_gate(lhs, t, {rhs}, lhs_pos, {rhs_pos});
    }

    [[noreturn]] static void unsupported(const Token& t, const std::string& what) {
        throw ParseError(ParseError::Kind::Unsupported, t.pos.line, t.pos.column,
                         "unsupported construct: " + what);
    }

    void advance() { tok_ = lex_.next(); }
    bool is_ident(std::string_view s) const {
        return tok_.kind == Token::Kind::Ident && tok_.text == s;
    }
    bool is_punct(std::string_view s) const {
        return tok_.kind == Token::Kind::Punct && tok_.text == s;
    }
    bool accept(std::string_view p) {
        if (!is_punct(p)) return false;
        advance();
        return true;
    }
    void expect(std::string_view p) {
        if (!accept(p)) {
            Lexer::fail(tok_.pos, "expected '" + std::string(p) + "' but found '" + tok_.text + "'");
        }
    }
    void expect_ident(std::string_view s) {
        if (!is_ident(s)) Lexer::fail(tok_.pos, "expected '" + std::string(s) + "'");
        advance();
    }
    std::string ident() {
        if (tok_.kind != Token::Kind::Ident) {
            Lexer::fail(tok_.pos, "expected an identifier but found '" + tok_.text + "'");
        }
        std::string s = std::move(tok_.text);
        advance();
        return s;
    }

    Lexer lex_;
    Token tok_;
    detail::NetlistAssembler asm_;
};

}  // namespace

Netlist parse_structural_verilog(std::string_view text) { return VerilogParser(text).parse(); }

}  // namespace lockbench::netcore
