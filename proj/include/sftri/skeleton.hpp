#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "sftri/surface.hpp"
#include "sftri/triangulation.hpp"

namespace sftri {

// The three vertices of face f in increasing order.
inline std::array<int, 3> face_vertices(int f) {
    std::array<int, 3> out{};
    int n = 0;
    for (int v = 0; v < 4; ++v)
        if (v != f) out[n++] = v;
    return out;
}

// Position of vertex w among the three vertices of face f (sorted order).
inline int face_vertex_position(int f, int w) {
    auto fv = face_vertices(f);
    for (int i = 0; i < 3; ++i)
        if (fv[i] == w) return i;
    throw std::invalid_argument("face_vertex_position: vertex not in face");
}

namespace detail {

// One step of the rotation around edge (a,b) of tet `tet`, leaving through the
// face opposite `exit`.  Returns false at an unglued face.
struct EdgeWalkState {
    int tet, a, b, exit;
    friend bool operator==(const EdgeWalkState& x, const EdgeWalkState& y) {
        return x.tet == y.tet && x.a == y.a && x.b == y.b && x.exit == y.exit;
    }
};

inline bool edge_walk_step(const Triangulation& tri, EdgeWalkState& s) {
    if (!tri.is_glued(s.tet, s.exit)) return false;
    const Gluing& g = tri.gluing(s.tet, s.exit);
    int na = g.perm[s.a], nb = g.perm[s.b], entered = g.perm[s.exit];
    s = EdgeWalkState{g.tet, na, nb, 6 - na - nb - entered};
    return true;
}

}  // namespace detail

// Boundary surface of a triangulation.  Surface triangle i corresponds to the
// i-th unglued (tet, face) pair in scan order; vertex k of the surface
// triangle is the k-th smallest vertex of that face.
struct BoundaryCorrespondence {
    std::vector<std::pair<int, int>> tri_to_face;  // surface triangle -> (tet, face)

    int tri_of(int tet, int face) const {
        for (int i = 0; i < static_cast<int>(tri_to_face.size()); ++i)
            if (tri_to_face[i] == std::make_pair(tet, face)) return i;
        throw std::invalid_argument("tri_of: face is not a boundary face");
    }
};

inline std::pair<SurfaceTriangulation, BoundaryCorrespondence> boundary_surface(const Triangulation& tri) {
    BoundaryCorrespondence corr;
    std::vector<int> index(4 * tri.tet_count(), -1);
    for (int t = 0; t < tri.tet_count(); ++t)
        for (int f = 0; f < 4; ++f)
            if (!tri.is_glued(t, f)) {
                index[4 * t + f] = static_cast<int>(corr.tri_to_face.size());
                corr.tri_to_face.emplace_back(t, f);
            }
    SurfaceTriangulation surf(static_cast<int>(corr.tri_to_face.size()));
    for (int i = 0; i < surf.triangle_count(); ++i) {
        auto [t, f] = corr.tri_to_face[i];
        auto fv = face_vertices(f);
        for (int e = 0; e < 3; ++e) {
            if (surf.is_glued(i, e)) continue;
            // surface edge e is opposite surface vertex e: tet edge {a,b}, a < b
            int a = fv[(e + 1) % 3], b = fv[(e + 2) % 3];
            if (a > b) std::swap(a, b);
            // rotate around the tet edge away from face f until the boundary
            detail::EdgeWalkState s{t, a, b, 6 - a - b - f};
            long cap = 6L * tri.tet_count() + 2;
            while (detail::edge_walk_step(tri, s))
                if (--cap < 0) throw std::logic_error("boundary_surface: edge rotation does not terminate");
            int j = index[4 * s.tet + s.exit];
            if (j < 0) throw std::logic_error("boundary_surface: rotation ended at a glued face");
            int lo = std::min(s.a, s.b), hi = std::max(s.a, s.b);
            int e2 = -1;
            for (int k = 0; k < 3; ++k) {
                auto gv = face_vertices(s.exit);
                if (gv[(k + 1) % 3] != lo && gv[(k + 1) % 3] != hi) continue;
                if (gv[(k + 2) % 3] != lo && gv[(k + 2) % 3] != hi) continue;
                e2 = k;
            }
            bool flip = s.a > s.b;  // s.a is the image of a, the smaller source endpoint
            surf.glue(i, e, j, e2, flip);
        }
    }
    return {std::move(surf), std::move(corr)};
}

struct SkeletonReport {
    long vertex_classes = 0;
    long edge_classes = 0;
    long face_classes = 0;
    long euler_characteristic = 0;
    bool orientable = true;
    bool valid_manifold = true;
    std::vector<SurfaceKind> boundary_components;
    std::vector<long> edge_link_lengths;  // corners around each edge class

    // orbit partitions
    std::vector<int> vertex_class_of;  // indexed 4t+v
    std::vector<int> edge_class_of;    // indexed 6t+e (edge_index order)
    std::vector<int> face_class_of;    // indexed 4t+f
    std::vector<bool> edge_class_boundary;
    std::vector<bool> vertex_class_boundary;
    std::vector<int> tet_orientation;  // ±1 per tet when orientable

    std::string invalid_reason;  // empty when valid_manifold

    bool closed() const { return boundary_components.empty(); }
};

inline SkeletonReport validate(const Triangulation& tri) {
    const int nt = tri.tet_count();
    SkeletonReport rep;
    auto invalidate = [&rep](const std::string& why) {
        if (rep.valid_manifold) {
            rep.valid_manifold = false;
            rep.invalid_reason = why;
        }
    };

    // ---- orbits ---------------------------------------------------------
    ParityUnionFind vuf(4 * nt), euf(6 * nt), ouf(nt);
    for (int t = 0; t < nt; ++t)
        for (int f = 0; f < 4; ++f) {
            if (!tri.is_glued(t, f)) continue;
            const Gluing& g = tri.gluing(t, f);
            auto fv = face_vertices(f);
            for (int v : fv) vuf.unite(4 * t + v, 4 * g.tet + g.perm[v], 0);
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    int a = fv[i], b = fv[j];
                    int a2 = g.perm[a], b2 = g.perm[b];
                    euf.unite(6 * t + edge_index(a, b), 6 * g.tet + edge_index(a2, b2), a2 > b2 ? 1 : 0);
                }
            // coherent orientations across a gluing need odd permutation parity
            ouf.unite(t, g.tet, g.perm.sign() == 1 ? 1 : 0);
        }
    if (!euf.consistent()) invalidate("an edge class is identified with itself in reverse");
    rep.orientable = ouf.consistent();

    ClassIds vids(4 * nt), eids(6 * nt), fids(4 * nt);
    rep.vertex_class_of.resize(4 * nt);
    rep.edge_class_of.resize(6 * nt);
    rep.face_class_of.assign(4 * nt, -1);
    rep.tet_orientation.assign(nt, 1);
    for (int t = 0; t < nt; ++t) {
        if (rep.orientable) rep.tet_orientation[t] = ouf.find(t).second ? -1 : 1;
        for (int v = 0; v < 4; ++v) rep.vertex_class_of[4 * t + v] = vids.assign(vuf.find(4 * t + v).first);
        for (int e = 0; e < 6; ++e) rep.edge_class_of[6 * t + e] = eids.assign(euf.find(6 * t + e).first);
        for (int f = 0; f < 4; ++f) {
            if (rep.face_class_of[4 * t + f] >= 0) continue;
            int id = fids.assign(4 * t + f);
            rep.face_class_of[4 * t + f] = id;
            if (tri.is_glued(t, f)) {
                const Gluing& g = tri.gluing(t, f);
                rep.face_class_of[4 * g.tet + g.face] = id;
            }
        }
    }
    rep.vertex_classes = vids.count();
    rep.edge_classes = eids.count();
    rep.face_classes = fids.count();
    rep.euler_characteristic = rep.vertex_classes - rep.edge_classes + rep.face_classes - nt;

    // ---- edge links by rotation -----------------------------------------
    std::vector<long> orbit_size(rep.edge_classes, 0);
    std::vector<int> orbit_rep(rep.edge_classes, -1);
    for (int t = 0; t < nt; ++t)
        for (int e = 0; e < 6; ++e) {
            int c = rep.edge_class_of[6 * t + e];
            ++orbit_size[c];
            if (orbit_rep[c] < 0) orbit_rep[c] = 6 * t + e;
        }
    rep.edge_link_lengths.assign(rep.edge_classes, 0);
    rep.edge_class_boundary.assign(rep.edge_classes, false);
    for (int c = 0; c < rep.edge_classes; ++c) {
        int t0 = orbit_rep[c] / 6;
        auto [a0, b0] = edge_vertices(orbit_rep[c] % 6);
        auto [x0, y0] = edge_adjacent_faces(a0, b0);
        detail::EdgeWalkState start{t0, a0, b0, x0};
        detail::EdgeWalkState s = start;
        long corners = 1;
        long cap = 2 * orbit_size[c] + 2;
        bool closed_up = false;
        while (detail::edge_walk_step(tri, s)) {
            if (s == start) {
                closed_up = true;
                break;
            }
            ++corners;
            if (--cap < 0) break;
        }
        if (cap < 0) {
            invalidate("edge rotation does not close up");
        } else if (!closed_up) {
            // hit the boundary; walk the other way from the start
            detail::EdgeWalkState back{t0, a0, b0, y0};
            while (detail::edge_walk_step(tri, back)) {
                ++corners;
                if (--cap < 0) {
                    invalidate("edge rotation does not close up");
                    break;
                }
            }
            rep.edge_class_boundary[c] = true;
        }
        rep.edge_link_lengths[c] = corners;
        if (corners != orbit_size[c]) invalidate("edge link does not cover its orbit");
    }

    // ---- vertex links as explicit surfaces ------------------------------
    rep.vertex_class_boundary.assign(rep.vertex_classes, false);
    {
        std::vector<std::vector<std::pair<int, int>>> members(rep.vertex_classes);
        std::vector<int> local(4 * nt, -1);
        for (int t = 0; t < nt; ++t)
            for (int v = 0; v < 4; ++v) {
                int c = rep.vertex_class_of[4 * t + v];
                local[4 * t + v] = static_cast<int>(members[c].size());
                members[c].emplace_back(t, v);
            }
        // link triangle of (t,v): vertices are the other three tet vertices in
        // sorted order; its edge "at face f" is opposite link vertex f
        for (int c = 0; c < rep.vertex_classes; ++c) {
            SurfaceTriangulation link(static_cast<int>(members[c].size()));
            for (auto [t, v] : members[c]) {
                for (int f = 0; f < 4; ++f) {
                    if (f == v || !tri.is_glued(t, f)) continue;
                    const Gluing& g = tri.gluing(t, f);
                    int t2 = g.tet, v2 = g.perm[v], f2 = g.face;
                    if (std::make_pair(t, f) > std::make_pair(t2, f2)) continue;  // add each pairing once
                    int e = face_vertex_position(v, f);
                    int e2 = face_vertex_position(v2, f2);
                    std::array<int, 2> ends{};
                    int n = 0;
                    for (int w = 0; w < 4; ++w)
                        if (w != v && w != f) ends[n++] = w;
                    bool flip =
                        face_vertex_position(v2, g.perm[ends[0]]) > face_vertex_position(v2, g.perm[ends[1]]);
                    link.glue(local[4 * t + v], e, local[4 * t2 + v2], e2, flip);
                }
            }
            SurfaceSkeleton lsk = surface_skeleton(link);
            bool has_boundary = !lsk.boundary_circles.empty();
            rep.vertex_class_boundary[c] = has_boundary;
            if (lsk.components != 1)
                invalidate("vertex link is disconnected");
            else if (!has_boundary && lsk.chi != 2)
                invalidate("closed vertex link is not a sphere");
            else if (has_boundary && !(lsk.chi == 1 && lsk.boundary_circles.size() == 1))
                invalidate("vertex link with boundary is not a disc");
        }
    }

    // ---- boundary surface topology --------------------------------------
    try {
        rep.boundary_components = surface_skeleton(boundary_surface(tri).first).component_kinds;
    } catch (const std::logic_error&) {
        invalidate("boundary surface is degenerate");
    }
    return rep;
}

// Number of connected components of the triangulation itself.
inline int component_count(const Triangulation& tri) {
    ParityUnionFind uf(tri.tet_count());
    for (int t = 0; t < tri.tet_count(); ++t)
        for (int f = 0; f < 4; ++f)
            if (tri.is_glued(t, f)) uf.unite(t, tri.gluing(t, f).tet, 0);
    ClassIds ids(tri.tet_count());
    for (int t = 0; t < tri.tet_count(); ++t) ids.assign(uf.find(t).first);
    return ids.count();
}

}  // namespace sftri
