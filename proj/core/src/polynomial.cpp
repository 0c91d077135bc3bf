#include "rest/polynomial.hpp"

#include <sstream>

namespace rest {

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            out.push_back(a[i++]);
        } else if (b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return out;
}

std::string monomial_str(const Monomial& m) {
    if (m.empty()) return "1";
    std::ostringstream out;
    bool first = true;
    for (const auto& [rel, exp] : m) {
        if (!first) out << '*';
        first = false;
        out << 'r' << rel;
        if (exp > 1) out << '^' << exp;
    }
    return out.str();
}

Polynomial Polynomial::variable(RelationId r) {
    Polynomial p;
    p.terms_[Monomial{{r, 1}}] = 1;
    return p;
}

Polynomial Polynomial::constant(BigInt c) {
    Polynomial p;
    if (c != 0) p.terms_[Monomial{}] = std::move(c);
    return p;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    for (const auto& [mono, coeff] : other.terms_) {
        auto it = terms_.find(mono);
        if (it == terms_.end()) {
            terms_.emplace(mono, coeff);
        } else {
            it->second += coeff;
            if (it->second == 0) terms_.erase(it);
        }
    }
    return *this;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
    Polynomial out;
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : other.terms_) {
            Monomial m = monomial_mul(ma, mb);
            auto it = out.terms_.find(m);
            if (it == out.terms_.end()) {
                out.terms_.emplace(std::move(m), ca * cb);
            } else {
                it->second += ca * cb;
                if (it->second == 0) out.terms_.erase(it);
            }
        }
    }
    return out;
}

std::set<Monomial> Polynomial::support() const {
    std::set<Monomial> s;
    for (const auto& [mono, coeff] : terms_) s.insert(mono);
    return s;
}

bool Polynomial::all_coefficients_positive() const {
    for (const auto& [mono, coeff] : terms_)
        if (coeff <= 0) return false;
    return true;
}

BigInt Polynomial::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? BigInt(0) : it->second;
}

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [mono, coeff] : terms_) {
        if (!first) out << " + ";
        first = false;
        if (mono.empty()) {
            out << coeff;
        } else if (coeff == 1) {
            out << monomial_str(mono);
        } else {
            out << coeff << '*' << monomial_str(mono);
        }
    }
    return out.str();
}

}  // namespace rest
