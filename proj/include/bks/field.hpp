#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bks {

using Rational = boost::multiprecision::cpp_rational;

/// Exact element of Q(sqrt 2): rat + rad*sqrt(2).
///
/// Every coordinate in the bundled ray catalogs lives in this field, so
/// orthogonality can be decided with zero numerical error.  Zero testing is
/// exact because sqrt(2) is irrational: rat + rad*sqrt(2) = 0 iff both parts
/// vanish.
struct FieldElement {
    Rational rat{0};
    Rational rad{0};

    FieldElement() = default;
    FieldElement(Rational a) : rat(std::move(a)) {}
    FieldElement(Rational a, Rational b) : rat(std::move(a)), rad(std::move(b)) {}
    FieldElement(int a) : rat(a) {}

    bool is_zero() const { return rat == 0 && rad == 0; }
    bool is_rational() const { return rad == 0; }

    friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
        return {x.rat + y.rat, x.rad + y.rad};
    }
    friend FieldElement operator-(const FieldElement& x, const FieldElement& y) {
        return {x.rat - y.rat, x.rad - y.rad};
    }
    friend FieldElement operator-(const FieldElement& x) { return {-x.rat, -x.rad}; }
    friend FieldElement operator*(const FieldElement& x, const FieldElement& y) {
        return {x.rat * y.rat + 2 * x.rad * y.rad, x.rat * y.rad + x.rad * y.rat};
    }
    friend bool operator==(const FieldElement& x, const FieldElement& y) {
        return x.rat == y.rat && x.rad == y.rad;
    }
    friend bool operator!=(const FieldElement& x, const FieldElement& y) { return !(x == y); }

    /// Multiplicative inverse (a - b*sqrt2) / (a^2 - 2 b^2); throws on zero.
    FieldElement inverse() const {
        Rational den = rat * rat - 2 * rad * rad;
        if (den == 0) {
            if (rad == 0) throw std::invalid_argument("FieldElement: inverse of zero");
            // pure radical b*sqrt2: inverse is sqrt2/(2b)
            return {Rational(0), Rational(1) / (2 * rad)};
        }
        return {rat / den, -rad / den};
    }
    friend FieldElement operator/(const FieldElement& x, const FieldElement& y) {
        return x * y.inverse();
    }

    double approx() const {
        return static_cast<double>(rat) + static_cast<double>(rad) * std::sqrt(2.0);
    }

    /// Canonical string: "p/q", "(r/s)sqrt2" or "p/q+(r/s)sqrt2".
    std::string str() const {
        if (rad == 0) return rat.str();
        std::string radical = "(" + rad.str() + ")sqrt2";
        if (rat == 0) return radical;
        return rat.str() + "+" + radical;
    }
};

namespace detail {

inline bool parse_rational(std::string_view s, Rational& out) {
    if (s.empty()) return false;
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    boost::multiprecision::cpp_int num = 0, den = 1;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i)
        num = num * 10 + (s[i] - '0');
    if (i < s.size()) {
        if (s[i] != '/') return false;
        ++i;
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        den = 0;
        for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i)
            den = den * 10 + (s[i] - '0');
        if (i != s.size() || den == 0) return false;
    }
    out = Rational(num, den);
    if (neg) out = -out;
    return true;
}

}  // namespace detail

/// Parses the grammar emitted by FieldElement::str().  The radical
/// coefficient may appear with or without parentheses: "(−3/2)sqrt2",
/// "1sqrt2".  Returns nullopt on malformed input.
inline std::optional<FieldElement> parse_field_element(std::string_view s) {
    auto parse_radical = [](std::string_view r, Rational& coeff) -> bool {
        if (r.size() < 5 || r.substr(r.size() - 5) != "sqrt2") return false;
        std::string_view c = r.substr(0, r.size() - 5);
        if (c.size() >= 2 && c.front() == '(' && c.back() == ')')
            c = c.substr(1, c.size() - 2);
        if (c.empty()) {
            coeff = 1;
            return true;
        }
        return detail::parse_rational(c, coeff);
    };
    FieldElement out;
    // split at a '+' that is not leading and not inside parentheses
    int depth = 0;
    std::size_t split = std::string_view::npos;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        else if (s[i] == ')') --depth;
        else if (s[i] == '+' && depth == 0) {
            split = i;
            break;
        }
    }
    if (split != std::string_view::npos) {
        if (!detail::parse_rational(s.substr(0, split), out.rat)) return std::nullopt;
        if (!parse_radical(s.substr(split + 1), out.rad)) return std::nullopt;
        return out;
    }
    if (s.find("sqrt2") != std::string_view::npos) {
        if (!parse_radical(s, out.rad)) return std::nullopt;
        return out;
    }
    if (!detail::parse_rational(s, out.rat)) return std::nullopt;
    return out;
}

/// Vector with exact coordinates.  Compared projectively for deduplication:
/// v and lambda*v denote the same ray.
struct ExactVector {
    std::vector<FieldElement> coords;

    ExactVector() = default;
    explicit ExactVector(std::vector<FieldElement> c) : coords(std::move(c)) {}

    std::size_t dim() const { return coords.size(); }
    bool is_zero() const {
        for (const auto& c : coords)
            if (!c.is_zero()) return false;
        return true;
    }

    /// Canonical ray representative: divide by the first nonzero coordinate.
    ExactVector projective_normal_form() const {
        for (const auto& c : coords) {
            if (!c.is_zero()) {
                ExactVector out;
                out.coords.reserve(coords.size());
                FieldElement inv = c.inverse();
                for (const auto& x : coords) out.coords.push_back(x * inv);
                return out;
            }
        }
        throw std::invalid_argument("ExactVector: zero vector has no ray representative");
    }

    friend bool operator==(const ExactVector& a, const ExactVector& b) {
        return a.coords == b.coords;
    }
};

inline FieldElement inner_product(const ExactVector& u, const ExactVector& v) {
    if (u.dim() != v.dim())
        throw std::invalid_argument("inner_product: dimension mismatch");
    FieldElement acc;
    for (std::size_t i = 0; i < u.dim(); ++i) acc = acc + u.coords[i] * v.coords[i];
    return acc;
}

inline bool same_ray(const ExactVector& a, const ExactVector& b) {
    if (a.dim() != b.dim()) return false;
    return a.projective_normal_form() == b.projective_normal_form();
}

}  // namespace bks
