#pragma once

#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace spintomo {

// Half-integer quantum number stored as twice its value, so j = 3/2 is
// HalfInteger::from_twice(3). Keeps parity checks exact and avoids float
// comparison on quantum numbers.
class HalfInteger {
public:
    constexpr HalfInteger() = default;

    static constexpr HalfInteger from_twice(int twice) { return HalfInteger(twice); }
    static constexpr HalfInteger from_int(int value) { return HalfInteger(2 * value); }

    constexpr int twice() const { return twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }
    constexpr double value() const { return 0.5 * static_cast<double>(twice_); }

    // true when this - other is an integer (same parity of twice-values)
    constexpr bool same_parity(HalfInteger other) const {
        return ((twice_ - other.twice_) % 2) == 0;
    }

    constexpr HalfInteger operator-() const { return HalfInteger(-twice_); }
    constexpr HalfInteger operator+(HalfInteger o) const { return HalfInteger(twice_ + o.twice_); }
    constexpr HalfInteger operator-(HalfInteger o) const { return HalfInteger(twice_ - o.twice_); }
    constexpr auto operator<=>(const HalfInteger&) const = default;

    std::string str() const {
        if (is_integer()) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

private:
    constexpr explicit HalfInteger(int twice) : twice_(twice) {}
    int twice_ = 0;
};

// Dimension of the spin-j representation, 2j+1.
inline int dimension(HalfInteger j) {
    if (j.twice() < 0) throw std::domain_error("representation label j must be >= 0");
    return j.twice() + 1;
}

// Checks that mu is a valid projection for representation j: |mu| <= j and
// j - mu integer. Throws std::domain_error otherwise.
inline void require_projection(HalfInteger j, HalfInteger mu, const char* what = "mu") {
    if (j.twice() < 0) throw std::domain_error("representation label j must be >= 0");
    if (!j.same_parity(mu))
        throw std::domain_error(std::string(what) + "=" + mu.str() + " has wrong parity for j=" + j.str());
    if (std::abs(mu.twice()) > j.twice())
        throw std::domain_error(std::string(what) + "=" + mu.str() + " out of range for j=" + j.str());
}

// Row/column index of projection mu in the basis ordering mu = j, j-1, ..., -j.
inline int index_of(HalfInteger j, HalfInteger mu) {
    require_projection(j, mu);
    return (j.twice() - mu.twice()) / 2;
}

inline HalfInteger projection_at(HalfInteger j, int index) {
    return HalfInteger::from_twice(j.twice() - 2 * index);
}

} // namespace spintomo
