#ifndef DYADINT_DYADIC_RATIONAL_HPP
#define DYADINT_DYADIC_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dyadint {

using BigInt = boost::multiprecision::cpp_int;

// Exact value numerator / 2^exponent, kept canonical: the numerator is odd,
// or zero with exponent 0. Sums, differences and products stay exact.
class DyadicRational {
public:
    DyadicRational() = default;
    DyadicRational(std::int64_t value) : num_(value) {} // NOLINT(google-explicit-constructor)
    DyadicRational(BigInt numerator, std::uint32_t exponent);

    // Exact conversion; every finite binary64 value is dyadic.
    static DyadicRational from_double(double value);
    // 2^-k.
    static DyadicRational pow2(int k);
    // Accepts "3", "-0.375", "5/2^3", "3/8". Rejects values that are not
    // exactly dyadic (e.g. "0.1", "1/3").
    static DyadicRational parse(std::string_view text);

    const BigInt& numerator() const noexcept { return num_; }
    std::uint32_t exponent() const noexcept { return exp_; }

    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_.sign(); }

    // Exact double if representable, nullopt otherwise.
    std::optional<double> exact_double() const;
    // Nearest double (round to nearest even, via long division).
    double to_double() const;

    std::string to_string() const;

    // floor(value * 2^k).
    BigInt floor_scaled(int k) const;

    friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b);
    friend DyadicRational operator-(const DyadicRational& a, const DyadicRational& b);
    friend DyadicRational operator*(const DyadicRational& a, const DyadicRational& b);
    DyadicRational operator-() const;

    friend bool operator==(const DyadicRational& a, const DyadicRational& b) {
        return a.exp_ == b.exp_ && a.num_ == b.num_;
    }
    friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b);

private:
    void normalize();

    BigInt num_{0};
    std::uint32_t exp_{0};
};

} // namespace dyadint

#endif
