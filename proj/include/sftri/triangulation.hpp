#pragma once

#include <array>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sftri/perm.hpp"

namespace sftri {

// One glued side: face `face` of tetrahedron `tet`, reached via permutation σ.
struct Gluing {
    int tet;
    int face;
    VertexPerm perm;

    friend bool operator==(const Gluing& a, const Gluing& b) {
        return a.tet == b.tet && a.face == b.face && a.perm == b.perm;
    }
};

// Generalized triangulation: tetrahedra with a partial face-pairing.
// Face f of a tetrahedron is the face opposite vertex f.  A gluing
// (t,f) -> (t',f',σ) carries σ acting on all four labels with σ(f) = f',
// and is stored in both directions (σ and σ⁻¹).
class Triangulation {
public:
    Triangulation() = default;
    explicit Triangulation(int tets) { add_tets(tets); }

    int tet_count() const { return static_cast<int>(glue_.size()); }

    // Returns the index of the first tetrahedron added.
    int add_tets(int n) {
        if (n < 0) throw std::invalid_argument("add_tets: negative count");
        int first = tet_count();
        glue_.resize(glue_.size() + static_cast<std::size_t>(n));
        return first;
    }

    bool is_glued(int t, int f) const { return side(t, f).has_value(); }

    const Gluing& gluing(int t, int f) const {
        const auto& g = side(t, f);
        if (!g) throw std::invalid_argument("gluing: face is not glued");
        return *g;
    }

    const std::optional<Gluing>& gluing_or_none(int t, int f) const { return side(t, f); }

    void glue(int t, int f, int t2, int f2, VertexPerm sigma) {
        check_face(t, f);
        check_face(t2, f2);
        if (t == t2 && f == f2) throw std::invalid_argument("glue: cannot glue a face to itself");
        if (sigma[f] != f2)
            throw std::invalid_argument("glue: permutation must carry face index " + std::to_string(f) + " to " +
                                        std::to_string(f2));
        if (side(t, f) || side(t2, f2)) throw std::invalid_argument("glue: face already glued");
        side(t, f) = Gluing{t2, f2, sigma};
        side(t2, f2) = Gluing{t, f, sigma.inverse()};
    }

    void unglue(int t, int f) {
        check_face(t, f);
        auto& g = side(t, f);
        if (!g) return;
        side(g->tet, g->face).reset();
        g.reset();
    }

    std::vector<std::pair<int, int>> boundary_faces() const {
        std::vector<std::pair<int, int>> out;
        for (int t = 0; t < tet_count(); ++t)
            for (int f = 0; f < 4; ++f)
                if (!is_glued(t, f)) out.emplace_back(t, f);
        return out;
    }

    // Disjoint union; tetrahedra of `other` are appended and re-indexed.
    int append(const Triangulation& other) {
        int off = add_tets(other.tet_count());
        for (int t = 0; t < other.tet_count(); ++t)
            for (int f = 0; f < 4; ++f) {
                const auto& g = other.side(t, f);
                if (g && (t < g->tet || (t == g->tet && f < g->face)))
                    glue(off + t, f, off + g->tet, g->face, g->perm);
            }
        return off;
    }

    // New triangulation with tetrahedron t renamed tet_map[t] and its vertex
    // labels renamed by vertex_map[t].
    Triangulation relabeled(const std::vector<int>& tet_map, const std::vector<VertexPerm>& vertex_map) const {
        int n = tet_count();
        if (static_cast<int>(tet_map.size()) != n || static_cast<int>(vertex_map.size()) != n)
            throw std::invalid_argument("relabeled: map size mismatch");
        std::vector<bool> hit(n, false);
        for (int t : tet_map) {
            if (t < 0 || t >= n || hit[t]) throw std::invalid_argument("relabeled: tet map is not a bijection");
            hit[t] = true;
        }
        Triangulation out(n);
        for (int t = 0; t < n; ++t)
            for (int f = 0; f < 4; ++f) {
                const auto& g = side(t, f);
                if (!g) continue;
                int nt = tet_map[t], nf = vertex_map[t][f];
                if (out.side(nt, nf)) continue;  // reverse direction already set
                VertexPerm ns = vertex_map[g->tet] * g->perm * vertex_map[t].inverse();
                out.glue(nt, nf, tet_map[g->tet], vertex_map[g->tet][g->face], ns);
            }
        return out;
    }

    friend bool operator==(const Triangulation& a, const Triangulation& b) { return a.glue_ == b.glue_; }

    // Text form: "tri <tet_count>" then "<t> <f> : <t'> <f'> <σ images of 0123>"
    // for every glued face; unglued faces are omitted.
    std::string str() const {
        std::ostringstream os;
        os << "tri " << tet_count() << "\n";
        for (int t = 0; t < tet_count(); ++t)
            for (int f = 0; f < 4; ++f) {
                const auto& g = side(t, f);
                if (g) os << t << " " << f << " : " << g->tet << " " << g->face << " " << g->perm.str() << "\n";
            }
        return os.str();
    }

    static Triangulation parse(const std::string& text) {
        std::istringstream is(text);
        std::string line;
        int line_no = 0;
        auto fail = [&](const std::string& why) -> std::runtime_error {
            return std::runtime_error("line " + std::to_string(line_no) + ": " + why);
        };
        int tets = -1;
        std::vector<std::array<std::optional<Gluing>, 4>> raw;
        std::vector<std::array<int, 4>> at_line;
        while (std::getline(is, line)) {
            ++line_no;
            std::istringstream ls(line);
            std::string tok;
            if (!(ls >> tok)) continue;  // blank line
            if (tets < 0) {
                if (tok != "tri") throw fail("expected header \"tri <tet_count>\"");
                if (!(ls >> tets) || tets < 0) throw fail("bad tetrahedron count");
                raw.resize(static_cast<std::size_t>(tets));
                at_line.assign(static_cast<std::size_t>(tets), {0, 0, 0, 0});
                continue;
            }
            int t, f, t2, f2;
            std::string colon, perm;
            std::istringstream ls2(line);
            if (!(ls2 >> t >> f >> colon >> t2 >> f2 >> perm) || colon != ":") throw fail("malformed gluing line");
            if (t < 0 || t >= tets || t2 < 0 || t2 >= tets) throw fail("tetrahedron index out of range");
            if (f < 0 || f > 3 || f2 < 0 || f2 > 3) throw fail("face index out of range");
            VertexPerm sigma;
            try {
                sigma = VertexPerm::parse(perm);
            } catch (const std::invalid_argument& e) {
                throw fail(e.what());
            }
            if (sigma[f] != f2) throw fail("permutation does not carry face " + std::to_string(f) + " to face " +
                                           std::to_string(f2));
            if (t == t2 && f == f2) throw fail("face glued to itself");
            if (raw[t][f]) throw fail("face " + std::to_string(t) + " " + std::to_string(f) + " glued twice");
            raw[t][f] = Gluing{t2, f2, sigma};
            at_line[t][f] = line_no;
        }
        if (tets < 0) throw std::runtime_error("line 1: missing \"tri\" header");
        Triangulation out(tets);
        for (int t = 0; t < tets; ++t)
            for (int f = 0; f < 4; ++f) {
                const auto& g = raw[t][f];
                if (!g) continue;
                line_no = at_line[t][f];
                const auto& back = raw[g->tet][g->face];
                if (!back || back->tet != t || back->face != f || back->perm != g->perm.inverse())
                    throw fail("gluing is not an involution");
                if (!out.side(t, f)) out.glue(t, f, g->tet, g->face, g->perm);
            }
        return out;
    }

private:
    std::vector<std::array<std::optional<Gluing>, 4>> glue_;

    void check_face(int t, int f) const {
        if (t < 0 || t >= tet_count()) throw std::invalid_argument("tetrahedron index out of range");
        if (f < 0 || f > 3) throw std::invalid_argument("face index out of range");
    }

    std::optional<Gluing>& side(int t, int f) {
        check_face(t, f);
        return glue_[t][f];
    }
    const std::optional<Gluing>& side(int t, int f) const {
        check_face(t, f);
        return glue_[t][f];
    }
};

// The two vertices of edge {a,b} and the two faces of a tetrahedron containing
// it (the faces opposite the other two vertices).
inline std::pair<int, int> edge_adjacent_faces(int a, int b) {
    int c = -1, d = -1;
    for (int v = 0; v < 4; ++v)
        if (v != a && v != b) (c < 0 ? c : d) = v;
    return {c, d};
}

// Index 0..5 of the unordered edge {a,b}; pairs in lexicographic order.
inline int edge_index(int a, int b) {
    if (a > b) std::swap(a, b);
    if (a < 0 || b > 3 || a == b) throw std::invalid_argument("edge_index: bad vertex pair");
    static constexpr int idx[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    return idx[a][b];
}

inline std::pair<int, int> edge_vertices(int e) {
    static constexpr std::pair<int, int> v[6] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    if (e < 0 || e > 5) throw std::invalid_argument("edge_vertices: bad edge index");
    return v[e];
}

}  // namespace sftri
