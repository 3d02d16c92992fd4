#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace sftri {

using Int = boost::multiprecision::cpp_int;

inline Int gcd_int(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Extended slope q/p on the boundary torus, p >= 0; 1/0 is the slope at infinity.
// Stored in lowest terms with the sign carried by q.
struct Slope {
    Int q;  // numerator
    Int p;  // denominator, >= 0

    Slope() : q(1), p(0) {}
    Slope(Int q_, Int p_) : q(std::move(q_)), p(std::move(p_)) { normalize(); }

    static Slope infinity() { return Slope(1, 0); }

    void normalize() {
        if (p == 0 && q == 0) throw std::invalid_argument("Slope: 0/0");
        if (p < 0) {
            p = -p;
            q = -q;
        }
        Int g = gcd_int(q, p);
        if (g > 1) {
            q /= g;
            p /= g;
        }
        if (p == 0 && q < 0) q = -q;
    }

    bool is_infinity() const { return p == 0; }
    bool is_integer() const { return p == 1; }

    friend bool operator==(const Slope& a, const Slope& b) { return a.q == b.q && a.p == b.p; }
    friend bool operator!=(const Slope& a, const Slope& b) { return !(a == b); }
    // Order by value on the extended line, infinity last.
    friend bool operator<(const Slope& a, const Slope& b) {
        if (a.p == 0) return false;
        if (b.p == 0) return true;
        return a.q * b.p < b.q * a.p;
    }

    std::string str() const { return q.str() + "/" + p.str(); }

    static Slope parse(const std::string& s) {
        auto bar = s.find('/');
        try {
            if (bar == std::string::npos) return Slope(Int(s), 1);
            return Slope(Int(s.substr(0, bar)), Int(s.substr(bar + 1)));
        } catch (const std::runtime_error&) {
            throw std::invalid_argument("Slope: cannot parse '" + s + "'");
        }
    }
};

// det(a, b) = a.q * b.p - a.p * b.q; two slopes are Farey neighbours iff |det| = 1.
inline Int det(const Slope& a, const Slope& b) { return a.q * b.p - a.p * b.q; }

inline bool farey_adjacent(const Slope& a, const Slope& b) {
    Int d = det(a, b);
    return d == 1 || d == -1;
}

inline Slope mediant(const Slope& a, const Slope& b) { return Slope(a.q + b.q, a.p + b.p); }

}  // namespace sftri
