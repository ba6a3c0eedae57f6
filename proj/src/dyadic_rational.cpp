#include "dyadint/dyadic_rational.hpp"

#include "dyadint/errors.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace dyadint {

namespace {

BigInt pow_big(unsigned base, unsigned exponent) {
    BigInt result = 1;
    BigInt b = base;
    while (exponent != 0) {
        if ((exponent & 1u) != 0) {
            result *= b;
        }
        b *= b;
        exponent >>= 1u;
    }
    return result;
}

BigInt shifted(const BigInt& v, unsigned bits) { return v << bits; }

std::size_t bit_length(const BigInt& v) {
    if (v == 0) {
        return 0;
    }
    BigInt a = abs(v);
    return boost::multiprecision::msb(a) + 1;
}

} // namespace

DyadicRational::DyadicRational(BigInt numerator, std::uint32_t exponent)
    : num_(std::move(numerator)), exp_(exponent) {
    normalize();
}

void DyadicRational::normalize() {
    if (num_ == 0) {
        exp_ = 0;
        return;
    }
    if (exp_ == 0) {
        return;
    }
    BigInt a = abs(num_);
    const auto tz = static_cast<std::uint32_t>(boost::multiprecision::lsb(a));
    const auto drop = std::min(tz, exp_);
    if (drop != 0) {
        num_ = num_.sign() < 0 ? BigInt(-(a >> drop)) : BigInt(a >> drop);
        exp_ -= drop;
    }
}

DyadicRational DyadicRational::from_double(double value) {
    if (!std::isfinite(value)) {
        throw PreconditionError("non-finite value has no dyadic representation");
    }
    if (value == 0.0) {
        return {};
    }
    int e = 0;
    const double frac = std::frexp(value, &e); // value = frac * 2^e, 0.5 <= |frac| < 1
    const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
    // value = mant * 2^(e - 53)
    const int shift = e - 53;
    if (shift >= 0) {
        return {shifted(BigInt(mant), static_cast<unsigned>(shift)), 0};
    }
    return {BigInt(mant), static_cast<std::uint32_t>(-shift)};
}

DyadicRational DyadicRational::pow2(int k) {
    if (k <= 0) {
        return {shifted(BigInt(1), static_cast<unsigned>(-k)), 0};
    }
    return {BigInt(1), static_cast<std::uint32_t>(k)};
}

DyadicRational DyadicRational::parse(std::string_view text) {
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])) != 0) {
            ++pos;
        }
    };
    auto read_digits = [&](BigInt& into, int& count) {
        count = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])) != 0) {
            into = into * 10 + (text[pos] - '0');
            ++pos;
            ++count;
        }
    };

    skip_ws();
    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    BigInt mantissa = 0;
    int int_digits = 0;
    read_digits(mantissa, int_digits);
    int frac_digits = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        read_digits(mantissa, frac_digits);
    }
    if (int_digits + frac_digits == 0) {
        throw ParseError("expected a number", pos);
    }
    long dec_exp = -frac_digits;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool exp_neg = false;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            exp_neg = text[pos] == '-';
            ++pos;
        }
        BigInt e = 0;
        int n = 0;
        read_digits(e, n);
        if (n == 0 || e > 400) {
            throw ParseError("bad exponent", pos);
        }
        dec_exp += exp_neg ? -e.convert_to<long>() : e.convert_to<long>();
    }
    if (negative) {
        mantissa = -mantissa;
    }

    DyadicRational value;
    if (dec_exp >= 0) {
        value = DyadicRational(mantissa * pow_big(10, static_cast<unsigned>(dec_exp)), 0);
    } else {
        const auto d = static_cast<unsigned>(-dec_exp);
        const BigInt five = pow_big(5, d);
        if (mantissa % five != 0) {
            throw ParseError("number '" + std::string(text) + "' is not exactly dyadic");
        }
        value = DyadicRational(mantissa / five, d);
    }

    skip_ws();
    if (pos < text.size() && text[pos] == '/') {
        ++pos;
        skip_ws();
        if (value.exp_ != 0) {
            throw ParseError("fraction numerator must be an integer", pos);
        }
        BigInt den = 0;
        int n = 0;
        read_digits(den, n);
        if (n == 0) {
            throw ParseError("expected denominator", pos);
        }
        if (pos < text.size() && text[pos] == '^') {
            if (den != 2) {
                throw ParseError("only powers of 2 are allowed as denominators", pos);
            }
            ++pos;
            BigInt e = 0;
            read_digits(e, n);
            if (n == 0 || e > 4096) {
                throw ParseError("bad power of two", pos);
            }
            value = DyadicRational(value.num_, e.convert_to<std::uint32_t>());
        } else {
            if (den == 0) {
                throw ParseError("zero denominator", pos);
            }
            const auto tz = static_cast<std::uint32_t>(boost::multiprecision::lsb(den));
            const BigInt odd = den >> tz;
            if (value.num_ % odd != 0) {
                throw ParseError("number '" + std::string(text) + "' is not exactly dyadic");
            }
            value = DyadicRational(value.num_ / odd, tz);
        }
    }
    skip_ws();
    if (pos != text.size()) {
        throw ParseError("unexpected trailing characters in number", pos);
    }
    return value;
}

std::optional<double> DyadicRational::exact_double() const {
    if (num_ == 0) {
        return 0.0;
    }
    // Integers are stored with exponent 0 and may carry trailing zero bits.
    BigInt mant = num_;
    long shift = -static_cast<long>(exp_);
    if (exp_ == 0) {
        const auto tz = boost::multiprecision::lsb(abs(num_));
        mant >>= tz;
        shift = static_cast<long>(tz);
    }
    if (bit_length(mant) > 53) {
        return std::nullopt;
    }
    const auto top = static_cast<long>(bit_length(num_)) - static_cast<long>(exp_);
    if (top > 1024 || shift < -1074) {
        return std::nullopt;
    }
    return std::ldexp(mant.convert_to<double>(), static_cast<int>(shift));
}

double DyadicRational::to_double() const {
    if (auto d = exact_double()) {
        return *d;
    }
    // Keep 64 significant bits then round once; good to within an ulp.
    const auto bits = static_cast<long>(bit_length(num_));
    const long drop = bits - 64;
    BigInt a = abs(num_);
    if (drop > 0) {
        a >>= static_cast<unsigned>(drop);
    }
    double mant = a.convert_to<double>();
    if (num_.sign() < 0) {
        mant = -mant;
    }
    return std::ldexp(mant, static_cast<int>(std::max(drop, 0L) - static_cast<long>(exp_)));
}

std::string DyadicRational::to_string() const {
    if (exp_ == 0) {
        return num_.str();
    }
    // num / 2^e = num * 5^e / 10^e
    BigInt scaled = abs(num_) * pow_big(5, exp_);
    std::string digits = scaled.str();
    if (digits.size() <= exp_) {
        digits.insert(0, exp_ - digits.size() + 1, '0');
    }
    digits.insert(digits.size() - exp_, ".");
    return (num_.sign() < 0 ? "-" : "") + digits;
}

BigInt DyadicRational::floor_scaled(int k) const {
    const long shift = static_cast<long>(k) - static_cast<long>(exp_);
    if (shift >= 0) {
        return num_ << static_cast<unsigned>(shift);
    }
    const BigInt d = BigInt(1) << static_cast<unsigned>(-shift);
    BigInt q = num_ / d;
    if (num_.sign() < 0 && q * d != num_) {
        q -= 1;
    }
    return q;
}

DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
    if (a.exp_ >= b.exp_) {
        return {a.num_ + (b.num_ << (a.exp_ - b.exp_)), a.exp_};
    }
    return {(a.num_ << (b.exp_ - a.exp_)) + b.num_, b.exp_};
}

DyadicRational operator-(const DyadicRational& a, const DyadicRational& b) { return a + (-b); }

DyadicRational operator*(const DyadicRational& a, const DyadicRational& b) {
    return {a.num_ * b.num_, a.exp_ + b.exp_};
}

DyadicRational DyadicRational::operator-() const {
    DyadicRational r = *this;
    r.num_ = -r.num_;
    return r;
}

std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
    const int s = (a - b).sign();
    if (s < 0) {
        return std::strong_ordering::less;
    }
    if (s > 0) {
        return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

} // namespace dyadint
