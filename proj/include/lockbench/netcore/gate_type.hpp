#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace lockbench::netcore {

enum class GateType : std::uint8_t {
    Input,
    Output,
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    Const0,
    Const1,
};

inline constexpr std::size_t kGateTypeCount = 12;

inline constexpr std::array<GateType, kGateTypeCount> kAllGateTypes = {
    GateType::Input, GateType::Output, GateType::And,  GateType::Nand,
    GateType::Or,    GateType::Nor,    GateType::Xor,  GateType::Xnor,
    GateType::Not,   GateType::Buf,    GateType::Const0, GateType::Const1,
};

constexpr std::size_t index_of(GateType t) noexcept { return static_cast<std::size_t>(t); }

std::string_view to_string(GateType t) noexcept;

/// Case-insensitive BENCH/Verilog keyword lookup (AND, nand, BUFF, ...).
std::optional<GateType> gate_type_from_keyword(std::string_view keyword);

/// True for everything except the INPUT/OUTPUT port markers.
constexpr bool is_logic(GateType t) noexcept {
    return t != GateType::Input && t != GateType::Output;
}

constexpr bool is_constant(GateType t) noexcept {
    return t == GateType::Const0 || t == GateType::Const1;
}

/// Gates whose output is the complement of another type over the same fan-ins.
constexpr std::optional<GateType> complement(GateType t) noexcept {
    switch (t) {
        case GateType::And: return GateType::Nand;
        case GateType::Nand: return GateType::And;
        case GateType::Or: return GateType::Nor;
        case GateType::Nor: return GateType::Or;
        case GateType::Xor: return GateType::Xnor;
        case GateType::Xnor: return GateType::Xor;
        case GateType::Not: return GateType::Buf;
        case GateType::Buf: return GateType::Not;
        case GateType::Const0: return GateType::Const1;
        case GateType::Const1: return GateType::Const0;
        default: return std::nullopt;
    }
}

struct Arity {
    std::size_t min;
    std::size_t max;
};

constexpr Arity arity(GateType t) noexcept {
    switch (t) {
        case GateType::Input:
        case GateType::Const0:
        case GateType::Const1: return {0, 0};
        case GateType::Output:
        case GateType::Not:
        case GateType::Buf: return {1, 1};
        default: return {2, static_cast<std::size_t>(-1)};
    }
}

/// Evaluates one gate over 64 patterns at a time.
template <typename Fanins>
std::uint64_t eval_word(GateType t, const Fanins& in) noexcept {
    std::uint64_t v = 0;
    switch (t) {
        case GateType::Const0: return 0;
        case GateType::Const1: return ~std::uint64_t{0};
        case GateType::Input: return 0;
        case GateType::Output:
        case GateType::Buf: return in[0];
        case GateType::Not: return ~in[0];
        case GateType::And:
        case GateType::Nand:
            v = ~std::uint64_t{0};
            for (std::uint64_t x : in) v &= x;
            return t == GateType::And ? v : ~v;
        case GateType::Or:
        case GateType::Nor:
            for (std::uint64_t x : in) v |= x;
            return t == GateType::Or ? v : ~v;
        case GateType::Xor:
        case GateType::Xnor:
            for (std::uint64_t x : in) v ^= x;
            return t == GateType::Xor ? v : ~v;
    }
    return 0;
}

}  // namespace lockbench::netcore
