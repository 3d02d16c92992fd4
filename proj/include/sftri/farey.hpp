#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "sftri/slope.hpp"

namespace sftri {

// Positive continued fraction q/p = a0 + 1/(a1 + 1/(... + 1/an)), ai > 0 for i > 0.
struct ContinuedFraction {
    std::vector<Int> terms;

    Int sum() const {
        Int s = 0;
        for (const Int& a : terms) s += a;
        return s;
    }

    // Evaluate the nested fraction back to a slope.
    Slope value() const {
        if (terms.empty()) throw std::logic_error("ContinuedFraction: empty");
        Int num = terms.back(), den = 1;
        for (auto it = terms.rbegin() + 1; it != terms.rend(); ++it) {
            Int n2 = *it * num + den;
            den = num;
            num = n2;
        }
        return Slope(num, den);
    }

    std::string str() const {
        std::string s = "[" + terms[0].str();
        for (std::size_t i = 1; i < terms.size(); ++i) s += (i == 1 ? ";" : ",") + terms[i].str();
        return s + "]";
    }
};

inline ContinuedFraction continued_fraction(const Slope& s) {
    if (s.is_infinity()) throw std::invalid_argument("continued_fraction: slope is infinite");
    if (s.q <= 0) throw std::invalid_argument("continued_fraction: slope must be positive");
    ContinuedFraction cf;
    Int q = s.q, p = s.p;
    while (p != 0) {
        cf.terms.push_back(q / p);
        Int r = q % p;
        q = p;
        p = r;
    }
    return cf;
}

// ||q/p||: sum of the continued-fraction terms of |q|/p.
inline Int norm(const Slope& s) {
    if (s.is_infinity()) throw std::invalid_argument("norm: slope is infinite");
    if (s.q == 0) throw std::invalid_argument("norm: slope is zero");
    Slope a = s;
    if (a.q < 0) a.q = -a.q;
    return continued_fraction(a).sum();
}

// Reflection q/p -> (p-q)/p, a norm-preserving symmetry.
inline Slope complement_slope(const Slope& s) {
    if (!(s.q > 0 && s.q < s.p)) throw std::invalid_argument("complement_slope: need 0 < q < p");
    return Slope(s.p - s.q, s.p);
}

// Ideal triangle of the Farey tessellation: three pairwise adjacent slopes.
struct FareyTriangle {
    std::array<Slope, 3> v;

    FareyTriangle(Slope a, Slope b, Slope c) : v{std::move(a), std::move(b), std::move(c)} {
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (!farey_adjacent(v[i], v[j]))
                    throw std::invalid_argument("FareyTriangle: vertices " + v[i].str() + ", " + v[j].str() +
                                                " are not Farey neighbours");
    }

    bool contains(const Slope& s) const { return v[0] == s || v[1] == s || v[2] == s; }

    // Vertex set equality; the stored order is presentational only.
    friend bool operator==(const FareyTriangle& a, const FareyTriangle& b) {
        auto key = [](const FareyTriangle& t) {
            std::array<Slope, 3> k = t.v;
            std::sort(k.begin(), k.end(), [](const Slope& x, const Slope& y) { return x < y; });
            return k;
        };
        auto ka = key(a), kb = key(b);
        for (int i = 0; i < 3; ++i)
            if (ka[i] != kb[i]) return false;
        return true;
    }
    friend bool operator!=(const FareyTriangle& a, const FareyTriangle& b) { return !(a == b); }

    std::string str() const { return "(" + v[0].str() + "," + v[1].str() + "," + v[2].str() + ")"; }

    // Canonical serialization used as a map key (vertex order independent).
    std::string key() const {
        std::array<Slope, 3> k = v;
        std::sort(k.begin(), k.end(), [](const Slope& x, const Slope& y) { return x < y; });
        return k[0].str() + "|" + k[1].str() + "|" + k[2].str();
    }
};

inline FareyTriangle base_triangle(bool positive = true) {
    return FareyTriangle(Slope(0, 1), Slope::infinity(), Slope(positive ? 1 : -1, 1));
}

namespace detail {

// Side of the geodesic with ideal endpoints a, b; x must not be an endpoint.
inline bool geodesic_side(const Slope& x, const Slope& a, const Slope& b) {
    if (a.is_infinity() || b.is_infinity()) {
        const Slope& f = a.is_infinity() ? b : a;
        return x < f;  // x finite here: an infinite x would be an endpoint
    }
    const Slope& lo = (a < b) ? a : b;
    const Slope& hi = (a < b) ? b : a;
    if (x.is_infinity()) return false;
    return lo < x && x < hi;
}

// The two triangles sharing edge (a, b) have third vertices mediant(a,b) and
// the difference mediant; return the one that is not `away`.
inline Slope flip_partner(const Slope& a, const Slope& b, const Slope& away) {
    Slope sum = mediant(a, b);
    Slope diff(a.q - b.q, a.p - b.p);
    if (sum == away) return diff;
    if (diff != away) throw std::logic_error("flip_partner: " + away.str() + " is not opposite edge (" + a.str() +
                                             "," + b.str() + ")");
    return sum;
}

// Geodesic walk in the dual graph to the first triangle containing target;
// accepts any reduced slope. Each step keeps two vertices (in place) and
// appends the new one.
inline std::vector<FareyTriangle> walk_to(const Slope& target, const FareyTriangle& start) {
    std::vector<FareyTriangle> out{start};
    Int fuel = 8;
    if (!target.is_infinity() && target.q != 0) fuel += norm(target);
    while (!out.back().contains(target)) {
        if (fuel-- <= 0) throw std::logic_error("walk_to: did not converge");
        const FareyTriangle& t = out.back();
        int crossed = -1;
        for (int k = 0; k < 3; ++k) {
            const Slope& a = t.v[(k + 1) % 3];
            const Slope& b = t.v[(k + 2) % 3];
            if (geodesic_side(target, a, b) != geodesic_side(t.v[k], a, b)) {
                crossed = k;
                break;
            }
        }
        if (crossed < 0) throw std::logic_error("walk_to: no separating edge");
        const Slope& a = t.v[crossed == 0 ? 1 : 0];
        const Slope& b = t.v[crossed == 2 ? 1 : 2];
        Slope n = flip_partner(a, b, t.v[crossed]);
        out.push_back(FareyTriangle(a, b, std::move(n)));
    }
    return out;
}

}  // namespace detail

// Walk from a base triangle to the first triangle containing target in (0,1).
inline std::vector<FareyTriangle> farey_walk(const Slope& target, const FareyTriangle& start) {
    if (start != base_triangle(true) && start != base_triangle(false))
        throw std::invalid_argument("farey_walk: start must be (0,inf,1) or (0,inf,-1)");
    if (target.is_infinity() || target.q <= 0 || target.q >= target.p)
        throw std::invalid_argument("farey_walk: target " + target.str() + " outside (0,1)");
    return detail::walk_to(target, start);
}

// The base triangle giving the shorter walk to target; ties go to (0,inf,1).
inline FareyTriangle better_base(const Slope& target) {
    auto pos = farey_walk(target, base_triangle(true));
    auto neg = farey_walk(target, base_triangle(false));
    return neg.size() < pos.size() ? base_triangle(false) : base_triangle(true);
}

namespace detail {

struct FanMember {
    FareyTriangle tri;
    std::vector<std::string> path;  // triangle keys from the base triangle down to tri
};

// All triangles incident to `a` within dual-graph distance `depth` of the base
// triangle, each with its geodesic path from the base. Empty when the nearest
// such triangle is out of range.
inline std::vector<FanMember> fan_within(const Slope& a, long depth) {
    auto walk = walk_to(a, base_triangle(true));
    if (static_cast<long>(walk.size()) - 1 > depth) return {};
    std::vector<std::string> anchor_path;
    for (const auto& t : walk) anchor_path.push_back(t.key());
    std::vector<FanMember> out{{walk.back(), anchor_path}};

    const FareyTriangle& t0 = walk.back();
    std::array<Slope, 2> others{};
    int n_oth = 0;
    for (int i = 0; i < 3; ++i)
        if (t0.v[i] != a) others[n_oth++] = t0.v[i];

    for (int arm = 0; arm < 2; ++arm) {
        Slope x = others[arm], y = others[1 - arm];
        long d = static_cast<long>(walk.size()) - 1;
        std::vector<std::string> path = anchor_path;
        while (d < depth) {
            Slope n = flip_partner(a, x, y);
            FareyTriangle next(a, x, n);
            ++d;
            path.push_back(next.key());
            out.push_back({next, path});
            y = x;
            x = n;
        }
    }
    return out;
}

}  // namespace detail

// BFS distance in the tessellation's dual graph between the triangle fans of a
// and b, using only triangles within `depth` of the base triangle (0,inf,1).
inline long farey_line_distance_oracle(const Slope& a, const Slope& b, long depth) {
    if (depth <= 0) throw std::invalid_argument("farey_line_distance_oracle: depth must be positive");
    if (a == b) throw std::invalid_argument("farey_line_distance_oracle: slopes must be distinct");
    auto fan_a = detail::fan_within(a, depth);
    auto fan_b = detail::fan_within(b, depth);
    if (fan_a.empty() || fan_b.empty()) throw std::runtime_error("farey_line_distance_oracle: depth insufficient");
    long best = -1;
    for (const auto& x : fan_a)
        for (const auto& y : fan_b) {
            // dual graph is a tree: distance = path lengths minus twice the common prefix
            std::size_t lcp = 0;
            while (lcp < x.path.size() && lcp < y.path.size() && x.path[lcp] == y.path[lcp]) ++lcp;
            long d = static_cast<long>(x.path.size() + y.path.size()) - 2 * static_cast<long>(lcp);
            if (best < 0 || d < best) best = d;
        }
    return best;
}

}  // namespace sftri
