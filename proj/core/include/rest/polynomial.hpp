#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rest/kg.hpp"

namespace rest {

using BigInt = boost::multiprecision::cpp_int;

// Exponent vector stored sparsely as (relation id, exponent) pairs, sorted by
// relation id, exponents strictly positive. The empty monomial is 1.
using Monomial = std::vector<std::pair<RelationId, std::uint32_t>>;

Monomial monomial_mul(const Monomial& a, const Monomial& b);
std::string monomial_str(const Monomial& m);

// Sparse multivariate polynomial over relation indeterminates with exact
// arbitrary-precision integer coefficients. Zero coefficients are never
// stored, so is_zero() and support() are structural.
class Polynomial {
public:
    using Terms = std::map<Monomial, BigInt>;

    Polynomial() = default;

    static Polynomial variable(RelationId r);
    static Polynomial constant(BigInt c);

    bool is_zero() const noexcept { return terms_.empty(); }
    const Terms& terms() const noexcept { return terms_; }

    Polynomial& operator+=(const Polynomial& other);
    friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) {
        lhs += rhs;
        return lhs;
    }
    Polynomial operator*(const Polynomial& other) const;

    std::set<Monomial> support() const;
    bool all_coefficients_positive() const;

    BigInt coefficient(const Monomial& m) const;

    std::string str() const;

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    Terms terms_;
};

}  // namespace rest
