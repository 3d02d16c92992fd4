#pragma once

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sftri/farey.hpp"
#include "sftri/homology.hpp"
#include "sftri/intmatrix.hpp"
#include "sftri/slope.hpp"

namespace sftri {

using Rational = boost::multiprecision::cpp_rational;

// Seifert data for a fibred space with boundary: base surface given by `a`
// (twice the genus when orientable, crosscap count otherwise), `b` boundary
// components, and the exceptional fibre invariants (p, q) with 0 < q < p.
struct SeifertData {
    bool orientable_base = true;
    long a = 0;
    long b = 1;
    std::vector<Slope> fibres;  // fibre (p, q) stored as Slope with .p = p, .q = q

    friend bool operator==(const SeifertData& x, const SeifertData& y) {
        return x.orientable_base == y.orientable_base && x.a == y.a && x.b == y.b && x.fibres == y.fibres;
    }
    friend bool operator!=(const SeifertData& x, const SeifertData& y) { return !(x == y); }
};

struct ChiValue {
    long value = 0;
};

inline ChiValue base_chi(const SeifertData& d) { return ChiValue{2 - d.a - d.b}; }

namespace detail {

inline void require_normalized(const SeifertData& d) {
    if (d.b < 1) throw std::invalid_argument("seifert data needs at least one boundary component");
    if (d.a < 0) throw std::invalid_argument("seifert data needs a non-negative genus parameter");
    if (d.orientable_base && d.a % 2 != 0)
        throw std::invalid_argument("an orientable base carries twice its genus, which is even");
    for (const Slope& f : d.fibres)
        if (!(f.p >= 2 && f.q > 0 && f.q < f.p))
            throw std::invalid_argument("fibre " + f.str() + " is not normalized to 0 < q < p");
}

}  // namespace detail

// Reduce raw fibre invariants mod p, dropping regular fibres (p = 1 or q = 0 mod p).
inline SeifertData normalize_seifert_data(bool orientable_base, long a, long b,
                                          const std::vector<std::pair<Int, Int>>& raw_fibres) {
    SeifertData d;
    d.orientable_base = orientable_base;
    d.a = a;
    d.b = b;
    for (const auto& [p, q] : raw_fibres) {
        if (p < 1) throw std::invalid_argument("fibre multiplicity must be positive");
        Int qm = q % p;
        if (qm < 0) qm += p;
        if (p == 1 || qm == 0) continue;  // regular fibre
        if (gcd_int(p, qm) != 1) throw std::invalid_argument("fibre invariants must be coprime");
        d.fibres.emplace_back(qm, p);
    }
    detail::require_normalized(d);
    return d;
}

inline SeifertData normalize_seifert_data(const SeifertData& d) {
    std::vector<std::pair<Int, Int>> raw;
    raw.reserve(d.fibres.size());
    for (const Slope& f : d.fibres) raw.emplace_back(f.p, f.q);
    return normalize_seifert_data(d.orientable_base, d.a, d.b, raw);
}

// 96|chi| + 176 + 70 sum ||q_i/p_i||: the construction's tetrahedron budget.
inline Int upper_bound(const SeifertData& d) {
    detail::require_normalized(d);
    Int chi = base_chi(d).value;
    Int total = 96 * abs(chi) + 176;
    for (const Slope& f : d.fibres) total += 70 * norm(f);
    return total;
}

// (|chi| + 1)/6: the complexity lower bound coming from homology rank.
inline Rational chi_lower_bound(const SeifertData& d) {
    detail::require_normalized(d);
    Int chi = base_chi(d).value;
    return Rational(abs(chi) + 1) / 6;
}

// Abelianized fundamental group of the fibred space.  Generators: `a` surface
// generators, b - 1 free boundary classes, the exceptional classes x_i and the
// fibre class h.  Relations: p_i x_i + q_i h = 0, and 2h = 0 over a
// nonorientable base (an orientation-reversing loop conjugates h to -h).
inline AbelianGroup expected_h1(const SeifertData& d) {
    detail::require_normalized(d);
    const int n = static_cast<int>(d.fibres.size());
    const long free_base = d.a + d.b - 1;
    const int rows = n + (d.orientable_base ? 0 : 1);
    const int cols = n + 1;

    long coker_rank = 0;
    std::vector<Int> torsion;
    if (rows == 0) {
        coker_rank = cols;
    } else {
        IntMatrix m(rows, cols);
        for (int i = 0; i < n; ++i) {
            m.at(i, i) = d.fibres[static_cast<std::size_t>(i)].p;
            m.at(i, cols - 1) = d.fibres[static_cast<std::size_t>(i)].q;
        }
        if (!d.orientable_base) m.at(rows - 1, cols - 1) = 2;
        auto snf = smith_normal_form(m);
        long rank = 0;
        for (const Int& f : snf.factors) {
            if (f == 0) continue;
            ++rank;
            if (f > 1) torsion.push_back(f);
        }
        coker_rank = cols - rank;
    }

    const long rank_total = free_base + coker_rank;
    const long chi = base_chi(d).value;
    const long lemma_rank = d.orientable_base ? (chi > 2 ? chi - 2 : 2 - chi) : (chi > 1 ? chi - 1 : 1 - chi);
    if (rank_total != lemma_rank) throw std::logic_error("expected_h1: free rank disagrees with the chi formula");
    return AbelianGroup(rank_total, std::move(torsion));
}

struct TheoremBoundReport {
    Int proxy = 0;  // |chi| + sum ||q_i/p_i|| + 1
    Int upper = 0;
    Rational chi_lower = 0;
    bool solid_torus_exclusion = false;
    std::optional<long> achieved_tets;

    std::string str() const {
        std::ostringstream os;
        os << "proxy = " << proxy << "\n";
        os << "upper bound = " << upper << "\n";
        os << "chi lower bound = " << chi_lower << "\n";
        if (achieved_tets) {
            os << "achieved = " << *achieved_tets << " tets, ratio achieved/proxy = "
               << Rational(*achieved_tets) / Rational(proxy) << "\n";
        }
        if (solid_torus_exclusion)
            os << "note: [disc, one fibre] is a solid torus for every (p, q) and is excluded from the "
                  "two-sided bound\n";
        return os.str();
    }
};

inline TheoremBoundReport theorem_bound_report(const SeifertData& d,
                                               std::optional<long> achieved_tets = std::nullopt) {
    detail::require_normalized(d);
    TheoremBoundReport r;
    r.proxy = abs(Int(base_chi(d).value)) + 1;
    for (const Slope& f : d.fibres) r.proxy += norm(f);
    r.upper = upper_bound(d);
    r.chi_lower = chi_lower_bound(d);
    r.solid_torus_exclusion = d.orientable_base && d.a == 0 && d.b == 1 && d.fibres.size() == 1;
    r.achieved_tets = achieved_tets;
    return r;
}

// Text grammar: "sfs <o|n> a=<int> b=<int> fibres=<p1>/<q1>,<p2>/<q2>,..."
// with the fibres field omitted when there are none.
inline std::string seifert_str(const SeifertData& d) {
    std::string s = "sfs ";
    s += d.orientable_base ? "o" : "n";
    s += " a=" + std::to_string(d.a) + " b=" + std::to_string(d.b);
    if (!d.fibres.empty()) {
        s += " fibres=";
        for (std::size_t i = 0; i < d.fibres.size(); ++i) {
            if (i) s += ",";
            s += d.fibres[i].p.str() + "/" + d.fibres[i].q.str();
        }
    }
    return s;
}

inline SeifertData parse_seifert(const std::string& text) {
    std::istringstream is(text);
    auto fail = [](const std::string& why) { return std::invalid_argument("seifert data: " + why); };
    std::string tok;
    if (!(is >> tok) || tok != "sfs") throw fail("expected leading \"sfs\"");
    if (!(is >> tok) || (tok != "o" && tok != "n")) throw fail("expected base orientability \"o\" or \"n\"");
    const bool orientable = tok == "o";

    long a = 0, b = 0;
    std::vector<std::pair<Int, Int>> raw;
    bool have_a = false, have_b = false;
    auto parse_long = [&fail](const std::string& s, const std::string& what) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(s, &used);
        } catch (const std::exception&) {
            throw fail("bad " + what + " value \"" + s + "\"");
        }
        if (used != s.size()) throw fail("bad " + what + " value \"" + s + "\"");
        return v;
    };
    while (is >> tok) {
        if (tok.rfind("a=", 0) == 0 && !have_a) {
            a = parse_long(tok.substr(2), "a");
            have_a = true;
        } else if (tok.rfind("b=", 0) == 0 && !have_b) {
            b = parse_long(tok.substr(2), "b");
            have_b = true;
        } else if (tok.rfind("fibres=", 0) == 0 && raw.empty()) {
            std::string body = tok.substr(7);
            if (body.empty()) throw fail("empty fibre list");
            std::istringstream fs(body);
            std::string item;
            while (std::getline(fs, item, ',')) {
                auto slash = item.find('/');
                if (slash == std::string::npos || slash == 0 || slash + 1 == item.size())
                    throw fail("fibre \"" + item + "\" is not <p>/<q>");
                raw.emplace_back(Int(parse_long(item.substr(0, slash), "fibre p")),
                                 Int(parse_long(item.substr(slash + 1), "fibre q")));
            }
        } else {
            throw fail("unexpected token \"" + tok + "\"");
        }
    }
    if (!have_a || !have_b) throw fail("missing a= or b= field");
    return normalize_seifert_data(orientable, a, b, raw);
}

}  // namespace sftri
