#pragma once

#include <algorithm>
#include <concepts>
#include <optional>
#include <span>

#include "rest/polynomial.hpp"

namespace rest {

// Carrier with a plus whose identity (zero) annihilates times. Equality is
// part of the interface so identities can be checked on sampled elements.
template <typename S>
concept Semiring = requires(const S s, const typename S::Value a, const typename S::Value b) {
    { s.zero() } -> std::convertible_to<typename S::Value>;
    { s.plus(a, b) } -> std::convertible_to<typename S::Value>;
    { s.times(a, b) } -> std::convertible_to<typename S::Value>;
    { s.equal(a, b) } -> std::convertible_to<bool>;
};

struct IntegerSemiring {
    using Value = BigInt;
    static constexpr const char* descriptor = "integer(+,*)";
    Value zero() const { return 0; }
    Value plus(const Value& a, const Value& b) const { return a + b; }
    Value times(const Value& a, const Value& b) const { return a * b; }
    bool equal(const Value& a, const Value& b) const { return a == b; }
};

// One indeterminate per relation id; the carrier that makes the unrolled
// message-passing coefficients observable.
struct PolynomialSemiring {
    using Value = Polynomial;
    static constexpr const char* descriptor = "polynomial(+,*)";
    Value zero() const { return Polynomial(); }
    Value plus(const Value& a, const Value& b) const { return a + b; }
    Value times(const Value& a, const Value& b) const { return a * b; }
    bool equal(const Value& a, const Value& b) const { return a == b; }
};

// (max, +) with nullopt as -infinity; max over an idempotent plus collapses
// all multiplicities, leaving the best-walk value.
struct TropicalSemiring {
    using Value = std::optional<long long>;
    static constexpr const char* descriptor = "tropical(max,+)";
    Value zero() const { return std::nullopt; }
    Value plus(const Value& a, const Value& b) const {
        if (!a) return b;
        if (!b) return a;
        return std::max(*a, *b);
    }
    Value times(const Value& a, const Value& b) const {
        if (!a || !b) return std::nullopt;
        return *a + *b;
    }
    bool equal(const Value& a, const Value& b) const { return a == b; }
};

// Checks zero (+) a == a and zero (*) a == zero over the samples.
template <Semiring S>
bool check_semiring_identities(const S& s, std::span<const typename S::Value> samples) {
    for (const auto& a : samples) {
        if (!s.equal(s.plus(s.zero(), a), a)) return false;
        if (!s.equal(s.plus(a, s.zero()), a)) return false;
        if (!s.equal(s.times(s.zero(), a), s.zero())) return false;
        if (!s.equal(s.times(a, s.zero()), s.zero())) return false;
    }
    return true;
}

}  // namespace rest
