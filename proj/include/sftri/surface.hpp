#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sftri {

// Union-find with an orientation parity bit on each element.
class ParityUnionFind {
public:
    explicit ParityUnionFind(int n) : parent_(n), parity_(n, 0), consistent_(true) {
        for (int i = 0; i < n; ++i) parent_[i] = i;
    }

    // Returns (root, parity of x relative to root).
    std::pair<int, int> find(int x) {
        int r = x, p = 0;
        while (parent_[r] != r) {
            p ^= parity_[r];
            r = parent_[r];
        }
        int cur = x, prefix = 0;
        while (parent_[cur] != cur) {
            int next = parent_[cur];
            int np = parity_[cur];
            parent_[cur] = r;
            parity_[cur] = static_cast<std::uint8_t>(p ^ prefix);
            prefix ^= np;
            cur = next;
        }
        return {r, p};
    }

    // Declare parity(a) xor parity(b) == differ.
    void unite(int a, int b, int differ) {
        auto [ra, pa] = find(a);
        auto [rb, pb] = find(b);
        if (ra == rb) {
            if ((pa ^ pb) != differ) consistent_ = false;
            return;
        }
        parent_[ra] = rb;
        parity_[ra] = pa ^ pb ^ differ;
    }

    bool consistent() const { return consistent_; }

private:
    std::vector<int> parent_;
    std::vector<std::uint8_t> parity_;
    bool consistent_;
};

// Assigns dense ids 0,1,2,... to union-find roots in first-touch order.
class ClassIds {
public:
    explicit ClassIds(int n) : id_(n, -1), count_(0) {}
    int assign(int root) {
        if (id_[root] < 0) id_[root] = count_++;
        return id_[root];
    }
    int count() const { return count_; }

private:
    std::vector<int> id_;
    int count_;
};

struct SurfaceGluing {
    int tri;
    int edge;
    bool flip;  // true when the gluing reverses the sorted endpoint order

    friend bool operator==(const SurfaceGluing& a, const SurfaceGluing& b) {
        return a.tri == b.tri && a.edge == b.edge && a.flip == b.flip;
    }
};

// Triangulated surface: triangles with a partial edge-pairing.  Edge e of a
// triangle is the edge opposite vertex e; unglued edges form the boundary.
class SurfaceTriangulation {
public:
    SurfaceTriangulation() = default;
    explicit SurfaceTriangulation(int triangles) { add_triangles(triangles); }

    int triangle_count() const { return static_cast<int>(glue_.size()); }

    int add_triangles(int n) {
        if (n < 0) throw std::invalid_argument("add_triangles: negative count");
        int first = triangle_count();
        glue_.resize(glue_.size() + static_cast<std::size_t>(n));
        return first;
    }

    bool is_glued(int t, int e) const { return side(t, e).has_value(); }

    const SurfaceGluing& gluing(int t, int e) const {
        const auto& g = side(t, e);
        if (!g) throw std::invalid_argument("gluing: edge is not glued");
        return *g;
    }

    void glue(int t, int e, int t2, int e2, bool flip) {
        check(t, e);
        check(t2, e2);
        if (t == t2 && e == e2) throw std::invalid_argument("glue: cannot glue an edge to itself");
        if (side(t, e) || side(t2, e2)) throw std::invalid_argument("glue: edge already glued");
        side(t, e) = SurfaceGluing{t2, e2, flip};
        side(t2, e2) = SurfaceGluing{t, e, flip};
    }

    std::vector<std::pair<int, int>> boundary_edges() const {
        std::vector<std::pair<int, int>> out;
        for (int t = 0; t < triangle_count(); ++t)
            for (int e = 0; e < 3; ++e)
                if (!is_glued(t, e)) out.emplace_back(t, e);
        return out;
    }

    friend bool operator==(const SurfaceTriangulation& a, const SurfaceTriangulation& b) {
        return a.glue_ == b.glue_;
    }

private:
    std::vector<std::array<std::optional<SurfaceGluing>, 3>> glue_;

    void check(int t, int e) const {
        if (t < 0 || t >= triangle_count()) throw std::invalid_argument("triangle index out of range");
        if (e < 0 || e > 2) throw std::invalid_argument("edge index out of range");
    }

    std::optional<SurfaceGluing>& side(int t, int e) {
        check(t, e);
        return glue_[t][e];
    }
    const std::optional<SurfaceGluing>& side(int t, int e) const {
        check(t, e);
        return glue_[t][e];
    }
};

// The two endpoints of edge e of a triangle, in sorted order.
inline std::pair<int, int> surface_edge_vertices(int e) {
    switch (e) {
        case 0: return {1, 2};
        case 1: return {0, 2};
        case 2: return {0, 1};
    }
    throw std::invalid_argument("surface_edge_vertices: bad edge index");
}

// Direction of the oriented boundary traversal of a triangle along edge e,
// relative to the sorted endpoint order: (1->2), (2->0), (0->1).
inline int surface_edge_direction(int e) {
    switch (e) {
        case 0: return 1;
        case 1: return -1;
        case 2: return 1;
    }
    throw std::invalid_argument("surface_edge_direction: bad edge index");
}

// Topological summary of one connected surface piece.
struct SurfaceKind {
    bool orientable = true;
    long genus = 0;  // cross-cap count when nonorientable
    long boundary_circles = 0;
    long chi = 2;

    bool is_sphere() const { return orientable && genus == 0 && boundary_circles == 0; }
    bool is_torus() const { return orientable && genus == 1 && boundary_circles == 0; }
    bool is_disc() const { return chi == 1 && boundary_circles == 1; }

    std::string str() const {
        std::string s = orientable ? "orientable genus " : "nonorientable genus ";
        s += std::to_string(genus) + ", " + std::to_string(boundary_circles) + " boundary";
        return s;
    }

    friend bool operator==(const SurfaceKind& a, const SurfaceKind& b) {
        return a.orientable == b.orientable && a.genus == b.genus && a.boundary_circles == b.boundary_circles &&
               a.chi == b.chi;
    }
};

struct SurfaceSkeleton {
    long vertex_classes = 0;
    long edge_classes = 0;
    long chi = 0;
    bool orientable = true;
    long components = 0;
    std::vector<int> vertex_class_of;  // indexed 3*tri + v
    std::vector<int> edge_class_of;    // indexed 3*tri + e
    std::vector<int> component_of;     // per triangle
    std::vector<int> orientation_sign;  // per triangle; all +1 when nonorientable
    std::vector<std::vector<std::pair<int, int>>> boundary_circles;  // (tri, edge) in cyclic order
    std::vector<SurfaceKind> component_kinds;
};

inline SurfaceSkeleton surface_skeleton(const SurfaceTriangulation& s) {
    const int nt = s.triangle_count();
    SurfaceSkeleton out;

    // vertex and edge orbits
    ParityUnionFind vuf(3 * nt), euf(3 * nt), ouf(nt);
    for (int t = 0; t < nt; ++t)
        for (int e = 0; e < 3; ++e) {
            if (!s.is_glued(t, e)) continue;
            const auto& g = s.gluing(t, e);
            auto [a, b] = surface_edge_vertices(e);
            auto [a2, b2] = surface_edge_vertices(g.edge);
            if (g.flip) std::swap(a2, b2);
            vuf.unite(3 * t + a, 3 * g.tri + a2, 0);
            vuf.unite(3 * t + b, 3 * g.tri + b2, 0);
            euf.unite(3 * t + e, 3 * g.tri + g.edge, 0);
            int differ = (surface_edge_direction(e) * surface_edge_direction(g.edge) * (g.flip ? -1 : 1)) == 1;
            ouf.unite(t, g.tri, differ);
        }
    out.orientable = ouf.consistent();

    ClassIds vids(3 * nt), eids(3 * nt), cids(nt);
    out.vertex_class_of.resize(3 * nt);
    out.edge_class_of.resize(3 * nt);
    out.component_of.resize(nt);
    out.orientation_sign.assign(nt, 1);
    for (int t = 0; t < nt; ++t) {
        auto [root, parity] = ouf.find(t);
        out.component_of[t] = cids.assign(root);
        if (out.orientable) out.orientation_sign[t] = parity ? -1 : 1;
        for (int x = 0; x < 3; ++x) {
            out.vertex_class_of[3 * t + x] = vids.assign(vuf.find(3 * t + x).first);
            out.edge_class_of[3 * t + x] = eids.assign(euf.find(3 * t + x).first);
        }
    }
    out.vertex_classes = vids.count();
    out.edge_classes = eids.count();
    out.components = cids.count();
    out.chi = out.vertex_classes - out.edge_classes + nt;

    // boundary circles by pivoting around vertices through glued edges
    std::vector<std::vector<bool>> seen(nt, std::vector<bool>(3, false));
    for (int t0 = 0; t0 < nt; ++t0)
        for (int e0 = 0; e0 < 3; ++e0) {
            if (s.is_glued(t0, e0) || seen[t0][e0]) continue;
            std::vector<std::pair<int, int>> circle;
            int t = t0, e = e0;
            int pivot = surface_edge_vertices(e0).second;
            do {
                circle.emplace_back(t, e);
                seen[t][e] = true;
                // rotate around `pivot` through glued edges until the next unglued edge;
                // the other edge of a triangle at vertex v besides edge e is 3-e-v
                int ct = t, cv = pivot, ce = 3 - e - pivot;
                while (s.is_glued(ct, ce)) {
                    const auto& g = s.gluing(ct, ce);
                    auto [a, b] = surface_edge_vertices(ce);
                    auto [a2, b2] = surface_edge_vertices(g.edge);
                    if (g.flip) std::swap(a2, b2);
                    cv = (cv == a) ? a2 : b2;
                    ct = g.tri;
                    ce = 3 - g.edge - cv;
                }
                t = ct;
                e = ce;
                auto [p, q] = surface_edge_vertices(e);
                pivot = (cv == p) ? q : p;
            } while (!(t == t0 && e == e0));
            out.boundary_circles.push_back(std::move(circle));
        }

    // per-component summaries
    if (out.components > 0) {
        std::vector<long> vc(out.components, 0), ec(out.components, 0), fc(out.components, 0), bc(out.components, 0);
        std::vector<int> vcomp(out.vertex_classes, -1), ecomp(out.edge_classes, -1);
        std::vector<bool> ori(out.components, out.orientable);
        for (int t = 0; t < nt; ++t) {
            int c = out.component_of[t];
            ++fc[c];
            for (int x = 0; x < 3; ++x) {
                if (vcomp[out.vertex_class_of[3 * t + x]] < 0) {
                    vcomp[out.vertex_class_of[3 * t + x]] = c;
                    ++vc[c];
                }
                if (ecomp[out.edge_class_of[3 * t + x]] < 0) {
                    ecomp[out.edge_class_of[3 * t + x]] = c;
                    ++ec[c];
                }
            }
        }
        if (!out.orientable) {
            // decide orientability per component in isolation
            for (int c = 0; c < out.components; ++c) {
                ParityUnionFind u(nt);
                bool ok = true;
                for (int t = 0; t < nt; ++t) {
                    if (out.component_of[t] != c) continue;
                    for (int e = 0; e < 3; ++e) {
                        if (!s.is_glued(t, e)) continue;
                        const auto& g = s.gluing(t, e);
                        int differ =
                            (surface_edge_direction(e) * surface_edge_direction(g.edge) * (g.flip ? -1 : 1)) == 1;
                        u.unite(t, g.tri, differ);
                    }
                    ok = ok && u.consistent();
                }
                ori[c] = ok;
            }
        }
        for (const auto& circle : out.boundary_circles) ++bc[out.component_of[circle.front().first]];
        for (int c = 0; c < out.components; ++c) {
            SurfaceKind k;
            k.orientable = ori[c];
            k.boundary_circles = bc[c];
            k.chi = vc[c] - ec[c] + fc[c];
            k.genus = k.orientable ? (2 - k.chi - k.boundary_circles) / 2 : (2 - k.chi - k.boundary_circles);
            out.component_kinds.push_back(k);
        }
    }
    return out;
}

}  // namespace sftri
