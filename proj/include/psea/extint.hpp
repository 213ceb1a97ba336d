#pragma once

#include <cstdint>
#include <compare>
#include <stdexcept>
#include <string>

namespace psea {

// Integer extended by +/-infinity, totally ordered -inf < n < +inf.
// Infinities are first-class values so the arithmetic conventions
// (inf - inf = 0, inf - n = inf, etc.) live in one place.
class ExtInt {
public:
    constexpr ExtInt() : kind_(Kind::Finite), v_(0) {}
    constexpr ExtInt(std::int64_t v) : kind_(Kind::Finite), v_(v) {}

    static constexpr ExtInt pos_inf() { return ExtInt(Kind::PosInf); }
    static constexpr ExtInt neg_inf() { return ExtInt(Kind::NegInf); }

    constexpr bool is_finite() const { return kind_ == Kind::Finite; }
    constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }
    constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }

    std::int64_t value() const {
        if (!is_finite()) throw std::domain_error("ExtInt: value() on infinite");
        return v_;
    }

    friend constexpr bool operator==(const ExtInt& a, const ExtInt& b) {
        if (a.kind_ != b.kind_) return false;
        return a.kind_ != Kind::Finite || a.v_ == b.v_;
    }
    friend constexpr bool operator<(const ExtInt& a, const ExtInt& b) {
        if (a.kind_ == Kind::NegInf) return b.kind_ != Kind::NegInf;
        if (a.kind_ == Kind::PosInf) return false;
        if (b.kind_ == Kind::PosInf) return true;
        if (b.kind_ == Kind::NegInf) return false;
        return a.v_ < b.v_;
    }
    friend constexpr bool operator<=(const ExtInt& a, const ExtInt& b) { return a < b || a == b; }
    friend constexpr bool operator>(const ExtInt& a, const ExtInt& b) { return b < a; }
    friend constexpr bool operator>=(const ExtInt& a, const ExtInt& b) { return b <= a; }
    friend constexpr bool operator!=(const ExtInt& a, const ExtInt& b) { return !(a == b); }

    friend constexpr ExtInt min(const ExtInt& a, const ExtInt& b) { return a < b ? a : b; }
    friend constexpr ExtInt max(const ExtInt& a, const ExtInt& b) { return a < b ? b : a; }

    // Skew-size difference a - b under the conventions
    // inf - inf = (-inf) - (-inf) = 0, inf - n = n - (-inf) = inf.
    // Returns {finite?, value}; callers treat non-finite as infinite size.
    friend ExtInt skew_diff(const ExtInt& a, const ExtInt& b) {
        if (a.is_pos_inf() && b.is_pos_inf()) return ExtInt(0);
        if (a.is_neg_inf() && b.is_neg_inf()) return ExtInt(0);
        if (a.is_pos_inf() || b.is_neg_inf()) return pos_inf();
        if (a.is_neg_inf() || b.is_pos_inf())
            throw std::domain_error("skew_diff: negative infinite difference");
        return ExtInt(a.v_ - b.v_);
    }

    std::string str() const {
        if (is_pos_inf()) return "inf";
        if (is_neg_inf()) return "-inf";
        return std::to_string(v_);
    }

private:
    enum class Kind : std::int8_t { NegInf = -1, Finite = 0, PosInf = 1 };
    constexpr explicit ExtInt(Kind k) : kind_(k), v_(0) {}
    Kind kind_;
    std::int64_t v_;
};

} // namespace psea
