#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "sftri/skeleton.hpp"
#include "sftri/surface.hpp"
#include "sftri/triangulation.hpp"

namespace sftri {

namespace detail {

// End of the boundary arc of edge (a,b) of tet t, rotating away through the
// face opposite `first_exit`: the unglued face reached, with the carried edge
// orientation (s.a is the image of a).  Throws if the edge is interior.
inline EdgeWalkState boundary_arc_end(const Triangulation& tri, int t, int a, int b, int first_exit) {
    EdgeWalkState start{t, a, b, first_exit};
    EdgeWalkState s = start;
    long cap = 6L * tri.tet_count() + 2;
    while (edge_walk_step(tri, s)) {
        if (s == start || --cap < 0) throw std::invalid_argument("edge is interior");
    }
    return s;
}

}  // namespace detail

// Attach one tetrahedron across boundary edge (a,b) of tet t, performing a
// 2-2 flip of that edge on the boundary.  The new tetrahedron is the last
// one; its edge (0,1) covers the old edge and its edge (2,3) is the flipped
// boundary edge, with faces 0 and 1 exposed.
inline Triangulation layer_on_boundary_edge(const Triangulation& tri, int t, int a, int b) {
    if (a == b || a < 0 || b < 0 || a > 3 || b > 3) throw std::invalid_argument("bad edge vertices");
    auto [x, y] = edge_adjacent_faces(a, b);
    detail::EdgeWalkState end1 = detail::boundary_arc_end(tri, t, a, b, x);
    detail::EdgeWalkState end2 = detail::boundary_arc_end(tri, t, a, b, y);
    if (end1.tet == end2.tet && end1.exit == end2.exit)
        throw std::invalid_argument("the two sides of the edge lie on the same boundary face");

    Triangulation out = tri;
    int n = out.add_tets(1);
    int w1 = 6 - end1.a - end1.b - end1.exit;  // third vertex of the first boundary face
    int w2 = 6 - end2.a - end2.b - end2.exit;
    out.glue(n, 3, end1.tet, end1.exit, VertexPerm::from_images(end1.a, end1.b, w1, end1.exit));
    out.glue(n, 2, end2.tet, end2.exit, VertexPerm::from_images(end2.a, end2.b, end2.exit, w2));
    return out;
}

// Cone a tetrahedron over a boundary vertex of face-valence 3 (the 3-1 move):
// the three boundary faces around vertex v of tet t are covered and replaced
// by the single opposite face of the new tetrahedron.
inline Triangulation fill_three_faces(const Triangulation& tri, int tet, int v) {
    SkeletonReport rep = validate(tri);
    int vclass = rep.vertex_class_of[4 * tet + v];
    auto [surf, corr] = boundary_surface(tri);
    SurfaceSkeleton ssk = surface_skeleton(surf);

    // corners of this vertex class on the boundary
    std::vector<std::pair<int, int>> corners;  // (surface triangle, local vertex)
    for (int i = 0; i < surf.triangle_count(); ++i) {
        auto [ft, ff] = corr.tri_to_face[i];
        for (int k = 0; k < 3; ++k)
            if (rep.vertex_class_of[4 * ft + face_vertices(ff)[k]] == vclass) corners.emplace_back(i, k);
    }
    if (corners.empty()) throw std::invalid_argument("vertex is not a boundary vertex");
    if (corners.size() != 3) throw std::invalid_argument("vertex face-valence is not 3");
    int sclass = ssk.vertex_class_of[3 * corners[0].first + corners[0].second];
    for (auto [i, k] : corners)
        if (ssk.vertex_class_of[3 * i + k] != sclass)
            throw std::invalid_argument("the three faces do not form an embedded disc");
    if (corr.tri_to_face[corners[0].first] == corr.tri_to_face[corners[1].first] ||
        corr.tri_to_face[corners[0].first] == corr.tri_to_face[corners[2].first] ||
        corr.tri_to_face[corners[1].first] == corr.tri_to_face[corners[2].first])
        throw std::invalid_argument("the three faces do not form an embedded disc");

    // rotate around the vertex to list the star in cyclic order; each step j
    // crosses the surface edge shared by face j and face j+1, and we record
    // the non-corner endpoint of that edge as seen from both sides
    struct StarEntry {
        int stri = -1, svert = -1;
        int out_shared = -1;  // local vertex: this face's copy of the vertex shared with the next face
        int in_shared = -1;   // this face's copy of the vertex shared with the previous face
    };
    std::array<StarEntry, 3> star;
    int ci = corners[0].first, ck = corners[0].second;
    int ce = (ck == 0) ? 1 : 0;  // an edge of the triangle containing vertex ck
    for (int j = 0; j < 3; ++j) {
        star[j].stri = ci;
        star[j].svert = ck;
        auto [p, q] = surface_edge_vertices(ce);
        int other = (p == ck) ? q : p;
        star[j].out_shared = other;
        const SurfaceGluing& g = surf.gluing(ci, ce);  // the boundary surface is closed
        auto [a2, b2] = surface_edge_vertices(g.edge);
        if (g.flip) std::swap(a2, b2);
        star[(j + 1) % 3].in_shared = (other == p) ? a2 : b2;
        ck = (ck == p) ? a2 : b2;
        ci = g.tri;
        ce = 3 - g.edge - ck;
    }
    if (!(ci == corners[0].first && ck == corners[0].second))
        throw std::logic_error("fill_three_faces: star rotation did not close up");

    // reject outer edges glued to one another (the disc would be pinched)
    for (int j = 0; j < 3; ++j) {
        const int oi = star[j].stri, oe = star[j].svert;  // outer edge is opposite the corner
        if (!surf.is_glued(oi, oe)) continue;
        const SurfaceGluing& g = surf.gluing(oi, oe);
        for (int l = 0; l < 3; ++l)
            if (g.tri == star[l].stri && g.edge == star[l].svert)
                throw std::invalid_argument("the three faces do not form an embedded disc");
    }

    Triangulation out = tri;
    int n = out.add_tets(1);
    std::array<int, 3> ftet{}, fface{}, fcorner{};
    for (int j = 0; j < 3; ++j) {
        auto [ft, ff] = corr.tri_to_face[star[j].stri];
        ftet[j] = ft;
        fface[j] = ff;
        fcorner[j] = face_vertices(ff)[star[j].svert];
    }
    auto copy_of = [&](int j, int local) { return face_vertices(fface[j])[local]; };
    // new tet: vertex 3 at the filled vertex; vertices 2,0,1 at the shared
    // vertices F0∩F1, F1∩F2, F2∩F0 respectively; face j covers Fj
    out.glue(n, 0, ftet[0], fface[0],
             VertexPerm::from_images(fface[0], copy_of(0, star[0].in_shared), copy_of(0, star[0].out_shared),
                                     fcorner[0]));
    out.glue(n, 1, ftet[1], fface[1],
             VertexPerm::from_images(copy_of(1, star[1].out_shared), fface[1], copy_of(1, star[1].in_shared),
                                     fcorner[1]));
    out.glue(n, 2, ftet[2], fface[2],
             VertexPerm::from_images(copy_of(2, star[2].in_shared), copy_of(2, star[2].out_shared), fface[2],
                                     fcorner[2]));
    return out;
}

}  // namespace sftri
