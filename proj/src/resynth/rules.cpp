#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "lockbench/resynth/resynth.hpp"

namespace lockbench::resynth {

namespace {

constexpr std::uint64_t kVarMask[6] = {
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL,
};

class ExprEval {
public:
    ExprEval(std::string_view text, std::string_view vars) : s_(text), vars_(vars) {}

    std::uint64_t run() {
        const std::uint64_t v = expr();
        skip();
        if (pos_ != s_.size()) fail("trailing characters");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("template '" + std::string(s_) + "': " + what);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::uint64_t expr() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string_view word = s_.substr(start, pos_ - start);
        if (word.empty()) fail("expected a term");
        if (word.size() == 1 && std::islower(static_cast<unsigned char>(word[0]))) {
            const auto i = vars_.find(word[0]);
            if (i == std::string_view::npos) fail("unknown variable");
            return kVarMask[i];
        }
        const auto type = netcore::gate_type_from_keyword(word);
        if (!type || !netcore::is_logic(*type)) fail("unknown gate '" + std::string(word) + "'");
        std::vector<std::uint64_t> args;
        if (!eat('(')) {
            if (!netcore::is_constant(*type)) fail("expected '('");
            return *type == GateType::Const1 ? ~std::uint64_t{0} : 0;
        }
        if (!eat(')')) {
            do {
                args.push_back(expr());
            } while (eat(','));
            if (!eat(')')) fail("expected ')'");
        }
        const auto ar = netcore::arity(*type);
        if (args.size() < ar.min || args.size() > ar.max) fail("wrong arity");
        std::uint64_t v = 0;
        switch (*type) {
            case GateType::Const0: return 0;
            case GateType::Const1: return ~std::uint64_t{0};
            case GateType::Buf: return args[0];
            case GateType::Not: return ~args[0];
            case GateType::And:
            case GateType::Nand:
                v = ~std::uint64_t{0};
                for (auto a : args) v &= a;
                return *type == GateType::Nand ? ~v : v;
            case GateType::Or:
            case GateType::Nor:
                for (auto a : args) v |= a;
                return *type == GateType::Nor ? ~v : v;
            case GateType::Xor:
            case GateType::Xnor:
                for (auto a : args) v ^= a;
                return *type == GateType::Xnor ? ~v : v;
            default: fail("unsupported gate");
        }
    }

    std::string_view s_;
    std::string_view vars_;
    std::size_t pos_ = 0;
};

std::string variables_of(std::string_view a, std::string_view b) {
    std::string vars;
    for (std::string_view s : {a, b}) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            const bool lone = std::islower(static_cast<unsigned char>(s[i])) &&
                              (i == 0 || !std::isalnum(static_cast<unsigned char>(s[i - 1]))) &&
                              (i + 1 == s.size() || !std::isalnum(static_cast<unsigned char>(s[i + 1])));
            if (lone && vars.find(s[i]) == std::string::npos) vars.push_back(s[i]);
        }
    }
    std::sort(vars.begin(), vars.end());
    return vars;
}

}  // namespace

std::uint64_t template_truth_table(std::string_view expr, std::string_view variables) {
    if (variables.size() > 6) throw std::invalid_argument("templates take at most 6 variables");
    const std::uint64_t v = ExprEval(expr, variables).run();
    const std::size_t rows = std::size_t{1} << variables.size();
    return rows == 64 ? v : v & ((std::uint64_t{1} << rows) - 1);
}

void RuleRegistry::add(RewriteRule rule) {
    for (const auto& r : rules_) {
        if (r.name == rule.name) throw std::invalid_argument("rule '" + rule.name + "' exists");
    }
    const std::string vars = variables_of(rule.pattern, rule.replacement);
    if (template_truth_table(rule.pattern, vars) != template_truth_table(rule.replacement, vars)) {
        throw std::invalid_argument("rule '" + rule.name + "' is not an equivalence");
    }
    rules_.push_back(std::move(rule));
}

bool RuleRegistry::has_family(std::string_view family) const {
    return std::any_of(rules_.begin(), rules_.end(),
                       [&](const RewriteRule& r) { return r.family == family; });
}

const RuleRegistry& RuleRegistry::builtin() {
    static const RuleRegistry reg = [] {
        RuleRegistry r;
        const auto S = Direction::Simplify;
        const auto P = Direction::Perturb;
        auto add = [&](const char* name, const char* family, const char* from, const char* to,
                       Direction d) { r.add({name, family, from, to, d}); };
        add("buf", "buf_elimination", "BUF(a)", "a", S);
        add("not_not", "double_inverter", "NOT(NOT(a))", "a", S);
        add("and0", "constant_propagation", "AND(a, CONST0)", "CONST0", S);
        add("and1", "constant_propagation", "AND(a, b, CONST1)", "AND(a, b)", S);
        add("nand0", "constant_propagation", "NAND(a, CONST0)", "CONST1", S);
        add("nand1", "constant_propagation", "NAND(a, CONST1)", "NOT(a)", S);
        add("or1", "constant_propagation", "OR(a, CONST1)", "CONST1", S);
        add("or0", "constant_propagation", "OR(a, CONST0)", "a", S);
        add("nor1", "constant_propagation", "NOR(a, CONST1)", "CONST0", S);
        add("nor0", "constant_propagation", "NOR(a, CONST0)", "NOT(a)", S);
        add("xor1", "constant_propagation", "XOR(a, CONST1)", "NOT(a)", S);
        add("xor0", "constant_propagation", "XOR(a, b, CONST0)", "XOR(a, b)", S);
        add("xnor1", "constant_propagation", "XNOR(a, CONST1)", "a", S);
        add("xnor0", "constant_propagation", "XNOR(a, CONST0)", "NOT(a)", S);
        add("not0", "constant_propagation", "NOT(CONST0)", "CONST1", S);
        add("merge", "duplicate_merge", "AND(AND(a, b), AND(b, a))", "AND(a, b)", S);
        add("xor_out", "xnor_inverter", "NOT(XOR(a, b))", "XNOR(a, b)", S);
        add("xnor_out", "xnor_inverter", "NOT(XNOR(a, b))", "XOR(a, b)", S);
        add("xor_in", "xnor_inverter", "XOR(NOT(a), b)", "XNOR(a, b)", S);
        add("xnor_in", "xnor_inverter", "XNOR(NOT(a), b)", "XOR(a, b)", S);
        add("xor_push_out", "xnor_inverter", "XOR(a, b)", "NOT(XNOR(a, b))", P);
        add("xor_push_in", "xnor_inverter", "XOR(a, b)", "XNOR(NOT(a), b)", P);
        add("xnor_push_out", "xnor_inverter", "XNOR(a, b)", "NOT(XOR(a, b))", P);
        add("xnor_push_in", "xnor_inverter", "XNOR(a, b)", "XOR(NOT(a), b)", P);
        add("and_of_nots", "de_morgan", "AND(NOT(a), NOT(b))", "NOR(a, b)", S);
        add("or_of_nots", "de_morgan", "OR(NOT(a), NOT(b))", "NAND(a, b)", S);
        add("nand_of_nots", "de_morgan", "NAND(NOT(a), NOT(b))", "OR(a, b)", S);
        add("nor_of_nots", "de_morgan", "NOR(NOT(a), NOT(b))", "AND(a, b)", S);
        add("nand_split", "de_morgan", "NAND(a, b)", "OR(NOT(a), NOT(b))", P);
        add("nor_split", "de_morgan", "NOR(a, b)", "AND(NOT(a), NOT(b))", P);
        add("and_regroup", "associativity", "AND(AND(a, b), c)", "AND(a, AND(b, c))", P);
        add("or_regroup", "associativity", "OR(OR(a, b), c)", "OR(a, OR(b, c))", P);
        return r;
    }();
    return reg;
}

}  // namespace lockbench::resynth
