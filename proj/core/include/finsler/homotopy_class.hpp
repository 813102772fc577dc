#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

namespace finsler {

/// Label of a path-connected component Omega^h of the endpoint-fixed path
/// space, read off as the deck transformation relating the lifted path to
/// the canonical reference chord. The models have abelian fundamental
/// groups (Z^2 or Z), so classes compose additively.
class HomotopyClass {
public:
    HomotopyClass() = default;
    explicit HomotopyClass(std::int64_t m) : rank_(1), v_{m, 0} {}
    HomotopyClass(std::int64_t a, std::int64_t b) : rank_(2), v_{a, b} {}

    static HomotopyClass neutral(int rank);

    int rank() const { return rank_; }
    std::int64_t operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }

    /// Image under the fixed projection onto <h>, h the first generator.
    std::int64_t pairing() const { return v_[0]; }

    bool is_neutral() const { return v_[0] == 0 && v_[1] == 0; }

    HomotopyClass operator+(const HomotopyClass& o) const;
    HomotopyClass operator-(const HomotopyClass& o) const;
    HomotopyClass operator-() const;
    /// h^m
    HomotopyClass power(std::int64_t m) const;

    friend bool operator==(const HomotopyClass&, const HomotopyClass&) = default;
    friend auto operator<=>(const HomotopyClass&, const HomotopyClass&) = default;

    /// "m" for rank one, "a,b" for rank two.
    std::string str() const;
    static HomotopyClass parse(const std::string& text);

private:
    int rank_ = 1;
    std::array<std::int64_t, 2> v_{0, 0};
};

} // namespace finsler
