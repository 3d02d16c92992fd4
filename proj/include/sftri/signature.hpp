#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sftri/skeleton.hpp"
#include "sftri/triangulation.hpp"

namespace sftri {

namespace detail {

inline const char* sig_alphabet() {
    return "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+-";
}

// Values < 63 use one character; larger ones are escaped with '-' and four
// base-64 digits.
inline void sig_push(std::string& s, long v) {
    const char* alpha = sig_alphabet();
    if (v < 0) throw std::logic_error("sig_push: negative value");
    if (v < 63) {
        s.push_back(alpha[v]);
        return;
    }
    if (v >= (1L << 24)) throw std::invalid_argument("signature: triangulation too large");
    s.push_back(alpha[63]);
    for (int shift = 18; shift >= 0; shift -= 6) s.push_back(alpha[(v >> shift) & 63]);
}

inline long sig_value(char c) {
    const char* alpha = sig_alphabet();
    for (long i = 0; i < 64; ++i)
        if (alpha[i] == c) return i;
    throw std::runtime_error("bad signature: unexpected character");
}

inline long sig_pull(const std::string& s, std::size_t& pos) {
    if (pos >= s.size()) throw std::runtime_error("bad signature: truncated");
    long v = sig_value(s[pos++]);
    if (v < 63) return v;
    long out = 0;
    for (int k = 0; k < 4; ++k) {
        if (pos >= s.size()) throw std::runtime_error("bad signature: truncated");
        out = (out << 6) | sig_value(s[pos++]);
    }
    return out;
}

// Gluing table re-indexed by breadth-first discovery from (start, labeling):
// per face of each renamed tet, (partner+1, partner face, renamed σ code),
// with 0s for boundary.  Comparison of these tables over all starts yields a
// combinatorial isomorphism invariant.
inline std::vector<int> bfs_table(const Triangulation& tri, int start, VertexPerm labeling) {
    const int nt = tri.tet_count();
    std::vector<int> new_index(nt, -1);
    std::vector<VertexPerm> relabel(nt);
    std::vector<int> order;
    new_index[start] = 0;
    relabel[start] = labeling;
    order.push_back(start);
    std::vector<int> table;
    table.reserve(12 * nt);
    for (std::size_t i = 0; i < order.size(); ++i) {
        int t = order[i];
        VertexPerm rho = relabel[t];
        VertexPerm rho_inv = rho.inverse();
        for (int nf = 0; nf < 4; ++nf) {
            int f = rho_inv[nf];
            if (!tri.is_glued(t, f)) {
                table.push_back(0);
                table.push_back(0);
                table.push_back(0);
                continue;
            }
            const Gluing& g = tri.gluing(t, f);
            if (new_index[g.tet] < 0) {
                // first discovery: choose the partner's labels so this gluing
                // reads as the identity permutation
                new_index[g.tet] = static_cast<int>(order.size());
                relabel[g.tet] = rho * g.perm.inverse();
                order.push_back(g.tet);
            }
            VertexPerm sigma_new = relabel[g.tet] * g.perm * rho_inv;
            table.push_back(new_index[g.tet] + 1);
            table.push_back(relabel[g.tet][g.face]);
            table.push_back(sigma_new.code());
        }
    }
    if (static_cast<int>(order.size()) != nt) throw std::invalid_argument("canonical_signature: triangulation is disconnected");
    return table;
}

}  // namespace detail

// Relabeling-invariant encoding: equal strings exactly for combinatorially
// isomorphic triangulations.  Printable token prefixed "sig:".
inline std::string canonical_signature(const Triangulation& tri) {
    const int nt = tri.tet_count();
    std::vector<int> best;
    for (int start = 0; start < nt; ++start)
        for (int code = 0; code < 24; ++code) {
            std::vector<int> cand = detail::bfs_table(tri, start, VertexPerm::from_code(code));
            if (best.empty() || cand < best) best = std::move(cand);
        }
    std::string s = "sig:";
    detail::sig_push(s, nt);
    for (int v : best) detail::sig_push(s, v);
    return s;
}

inline Triangulation parse_signature(const std::string& sig) {
    if (sig.rfind("sig:", 0) != 0) throw std::runtime_error("bad signature: missing \"sig:\" prefix");
    std::size_t pos = 4;
    long nt = detail::sig_pull(sig, pos);
    Triangulation out(static_cast<int>(nt));
    for (long t = 0; t < nt; ++t)
        for (int f = 0; f < 4; ++f) {
            long partner = detail::sig_pull(sig, pos);
            long pf = detail::sig_pull(sig, pos);
            long pc = detail::sig_pull(sig, pos);
            if (partner == 0) {
                if (pf != 0 || pc != 0) throw std::runtime_error("bad signature: malformed boundary entry");
                continue;
            }
            if (partner > nt || pf > 3 || pc > 23) throw std::runtime_error("bad signature: entry out of range");
            if (out.is_glued(static_cast<int>(t), f)) {
                const Gluing& g = out.gluing(static_cast<int>(t), f);
                if (g.tet != partner - 1 || g.face != pf || g.perm.code() != pc)
                    throw std::runtime_error("bad signature: gluing table is not an involution");
                continue;
            }
            try {
                out.glue(static_cast<int>(t), f, static_cast<int>(partner - 1), static_cast<int>(pf),
                         VertexPerm::from_code(static_cast<int>(pc)));
            } catch (const std::invalid_argument& e) {
                throw std::runtime_error(std::string("bad signature: ") + e.what());
            }
        }
    if (pos != sig.size()) throw std::runtime_error("bad signature: trailing characters");
    return out;
}

}  // namespace sftri
