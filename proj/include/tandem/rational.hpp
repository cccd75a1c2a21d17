#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "tandem/errors.hpp"

namespace tandem {

/// Exact rational arithmetic on int64 numerator/denominator, normalized with
/// den > 0. Used for arithmetic verification where float division artifacts
/// would misjudge fraction-valued intermediates.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t numerator, std::int64_t denominator = 1) {
        if (denominator == 0) throw ValidationError("rational: zero denominator");
        num_ = numerator;
        den_ = denominator;
        normalize();
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                       i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                       i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw ValidationError("rational: division by zero");
        return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }

    friend bool operator==(const Rational&, const Rational&) = default;

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Decimal text when the denominator divides a power of ten (always true
    /// for values parsed from decimal text), "num/den" otherwise.
    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        std::int64_t odd_part = den_;
        int twos = 0;
        int fives = 0;
        while (odd_part % 2 == 0) { odd_part /= 2; ++twos; }
        while (odd_part % 5 == 0) { odd_part /= 5; ++fives; }
        if (odd_part != 1) {
            return std::to_string(num_) + "/" + std::to_string(den_);
        }
        const int places = twos > fives ? twos : fives;
        i128 pow10 = 1;
        for (int i = 0; i < places; ++i) pow10 *= 10;
        i128 digits = i128(num_ < 0 ? -num_ : num_) * pow10 / den_;  // exact: den_ | 10^places
        std::string raw = u128_to_string(digits);
        while (static_cast<int>(raw.size()) <= places) raw.insert(raw.begin(), '0');
        std::string out =
            raw.substr(0, raw.size() - places) + "." + raw.substr(raw.size() - places);
        while (out.back() == '0') out.pop_back();
        if (out.back() == '.') out.pop_back();
        return (num_ < 0 ? "-" : "") + out;
    }

private:
    using i128 = __int128;

    static Rational from128(i128 numerator, i128 denominator) {
        if (denominator == 0) throw ValidationError("rational: zero denominator");
        if (denominator < 0) {
            numerator = -numerator;
            denominator = -denominator;
        }
        i128 g = gcd128(numerator < 0 ? -numerator : numerator, denominator);
        if (g > 1) {
            numerator /= g;
            denominator /= g;
        }
        constexpr i128 max64 = INT64_MAX;
        if (numerator > max64 || numerator < -max64 || denominator > max64) {
            throw Error("rational overflow");
        }
        Rational r;
        r.num_ = static_cast<std::int64_t>(numerator);
        r.den_ = static_cast<std::int64_t>(denominator);
        return r;
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) {
            i128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    static std::string u128_to_string(i128 value) {
        if (value == 0) return "0";
        std::string out;
        while (value > 0) {
            out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(value % 10)));
            value /= 10;
        }
        return out;
    }

    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace tandem
