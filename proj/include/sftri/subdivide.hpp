#pragma once

#include "sftri/triangulation.hpp"

namespace sftri {

// Barycentric subdivision.  Each tetrahedron becomes 24 flag tetrahedra, one
// per permutation π of its vertices: the flag (t, π) has vertices
//   u0 = vertex π(0), u1 = midpoint of edge (π0,π1),
//   u2 = centroid of face {π0,π1,π2}, u3 = centre of t.
// In this labeling every gluing permutation is the identity:
//   face 0 ↔ flag (t, π·(01)), face 1 ↔ flag (t, π·(12)),
//   face 2 ↔ flag (t, π·(23)), and face 3 lies in the old face opposite π(3),
//   glued to flag (t', Σ·π) when that face was glued via Σ.
inline Triangulation barycentric_subdivide(const Triangulation& tri) {
    const int nt = tri.tet_count();
    Triangulation out(24 * nt);
    const VertexPerm s01 = VertexPerm::transposition(0, 1);
    const VertexPerm s12 = VertexPerm::transposition(1, 2);
    const VertexPerm s23 = VertexPerm::transposition(2, 3);
    auto flag = [](int t, VertexPerm pi) { return 24 * t + pi.code(); };
    for (int t = 0; t < nt; ++t)
        for (int code = 0; code < 24; ++code) {
            VertexPerm pi = VertexPerm::from_code(code);
            int self = flag(t, pi);
            int n0 = flag(t, pi * s01);
            int n1 = flag(t, pi * s12);
            int n2 = flag(t, pi * s23);
            if (self < n0) out.glue(self, 0, n0, 0, VertexPerm());
            if (self < n1) out.glue(self, 1, n1, 1, VertexPerm());
            if (self < n2) out.glue(self, 2, n2, 2, VertexPerm());
            int old_face = pi[3];
            if (tri.is_glued(t, old_face)) {
                const Gluing& g = tri.gluing(t, old_face);
                int partner = flag(g.tet, g.perm * pi);
                if (self < partner) out.glue(self, 3, partner, 3, VertexPerm());
            }
        }
    return out;
}

// The flag tetrahedron and edge that subdivide edge (a,b) of tet t at its
// `a` end: edge (0,1) of the flag with π = (a, b, rest...).  Applying this
// repeatedly tracks a descendant of an original edge through iterated
// subdivisions (in them, a and b are always 0 and 1).
inline std::pair<int, std::pair<int, int>> subdivided_half_edge(int t, int a, int b) {
    std::array<int, 4> im{};
    im[0] = a;
    im[1] = b;
    int n = 2;
    for (int v = 0; v < 4; ++v)
        if (v != a && v != b) im[n++] = v;
    VertexPerm pi = VertexPerm::from_images(im[0], im[1], im[2], im[3]);
    return {24 * t + pi.code(), {0, 1}};
}

}  // namespace sftri
