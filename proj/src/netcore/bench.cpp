#include <cctype>
#include <string>

#include "assembler.hpp"
#include "lockbench/netcore/io.hpp"

namespace lockbench::netcore {
namespace {

bool is_name_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != ',' &&
           c != '=' && c != '#';
}

class LineCursor {
public:
    LineCursor(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    void skip_ws() {
        while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= line_.size();
    }
    detail::SourcePos here() {
        skip_ws();
        return {line_no_, pos_ + 1};
    }

    std::string name() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < line_.size() && is_name_char(line_[pos_])) ++pos_;
        if (start == pos_) fail("expected a signal name");
        return std::string(line_.substr(start, pos_ - start));
    }

    bool try_consume(char c) {
        skip_ws();
        if (pos_ < line_.size() && line_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!try_consume(c)) fail(std::string("expected '") + c + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(ParseError::Kind::Syntax, line_no_, pos_ + 1, msg);
    }

private:
    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::toupper(static_cast<unsigned char>(a[i])) !=
            std::toupper(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

}  // namespace

Netlist parse_bench(std::string_view text) {
    detail::NetlistAssembler asm_;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        LineCursor cur(line, line_no);
        if (cur.at_end()) continue;
        const detail::SourcePos start = cur.here();
        std::string head = cur.name();
        if (iequals(head, "INPUT") || iequals(head, "OUTPUT")) {
            cur.expect('(');
            const detail::SourcePos at = cur.here();
            std::string signal = cur.name();
            cur.expect(')');
            if (!cur.at_end()) cur.fail("trailing characters");
            if (iequals(head, "INPUT")) {
                asm_.declare_input(signal, at);
            } else {
                asm_.declare_output(signal, at);
            }
            continue;
        }

        cur.expect('=');
        const detail::SourcePos kw_pos = cur.here();
        std::string keyword = cur.name();
        auto type = gate_type_from_keyword(keyword);
        if (!type) {
            if (iequals(keyword, "DFF") || iequals(keyword, "LATCH")) {
                throw ParseError(ParseError::Kind::Unsupported, kw_pos.line, kw_pos.column,
                                 "sequential element '" + keyword + "' is not supported");
            }
            throw ParseError(ParseError::Kind::Syntax, kw_pos.line, kw_pos.column,
                             "unknown gate type '" + keyword + "'");
        }
        std::vector<std::string> fanins;
        std::vector<detail::SourcePos> fanin_pos;
        cur.expect('(');
        if (!cur.try_consume(')')) {
            do {
                fanin_pos.push_back(cur.here());
                fanins.push_back(cur.name());
            } while (cur.try_consume(','));
            cur.expect(')');
        }
        if (!cur.at_end()) cur.fail("trailing characters");
        asm_.define_gate(head, *type, std::move(fanins), start, std::move(fanin_pos));
    }
    return asm_.build();
}

}  // namespace lockbench::netcore
