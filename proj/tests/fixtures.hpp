#pragma once

// Small reference triangulations shared by the test suites.

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "sftri/skeleton.hpp"
#include "sftri/triangulation.hpp"

namespace fixtures {

inline sftri::Triangulation free_tet() { return sftri::Triangulation(1); }

inline sftri::Triangulation doubled_tet() {
    sftri::Triangulation t(2);
    for (int f = 0; f < 4; ++f) t.glue(0, f, 1, f, sftri::VertexPerm());
    return t;
}

// First solid torus in the fixed scan over one-tetrahedron two-face gluings.
inline sftri::Triangulation one_tet_solid_torus() {
    for (int f1 = 0; f1 < 4; ++f1)
        for (int f2 = f1 + 1; f2 < 4; ++f2)
            for (int code = 0; code < 24; ++code) {
                sftri::VertexPerm sigma = sftri::VertexPerm::from_code(code);
                if (sigma[f1] != f2) continue;
                sftri::Triangulation t(1);
                t.glue(0, f1, 0, f2, sigma);
                sftri::SkeletonReport rep = sftri::validate(t);
                if (rep.valid_manifold && rep.orientable && rep.euler_characteristic == 0 &&
                    rep.boundary_components.size() == 1 && rep.boundary_components[0].is_torus())
                    return t;
            }
    throw std::logic_error("no one-tet solid torus found");
}

// First two-tetrahedron complex with two torus boundary components in the
// fixed scan over pairs of face gluings.
// Two prisms over the one-vertex two-triangle torus, each cut into three
// tetrahedra along a staircase; corner orders chosen so the diagonals of the
// three shared side quads agree.  Both boundary tori have a single vertex.
inline sftri::Triangulation torus_times_interval() {
    using sftri::VertexPerm;
    sftri::Triangulation t(6);
    VertexPerm id;
    VertexPerm rot = VertexPerm::from_images(1, 2, 3, 0);
    VertexPerm tor = VertexPerm::from_images(3, 0, 1, 2);
    t.glue(0, 2, 1, 2, id);   // prism A staircase
    t.glue(1, 1, 2, 1, id);
    t.glue(3, 2, 4, 2, id);   // prism B staircase
    t.glue(4, 1, 5, 1, id);
    t.glue(0, 1, 3, 1, id);   // quad over the torus diagonal
    t.glue(2, 2, 5, 2, id);
    t.glue(1, 3, 3, 0, rot);  // quad over the horizontal edge
    t.glue(2, 3, 4, 0, rot);
    t.glue(0, 0, 4, 3, tor);  // quad over the vertical edge
    t.glue(1, 0, 5, 3, tor);
    return t;
}

inline sftri::Triangulation torus_times_interval_grid() {
    // (3x3 grid torus) x interval: each of the 18 triangles spans a prism cut
    // into three tetrahedra along the staircase of its sorted vertex labels.
    auto vid = [](int i, int j) { return 3 * (j % 3) + (i % 3); };
    std::vector<std::array<int, 3>> tris;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            tris.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            tris.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    std::vector<std::array<int, 4>> tets;  // product vertex = label + 9 * level
    for (std::array<int, 3> s : tris) {
        std::sort(s.begin(), s.end());
        tets.push_back({s[0], s[1], s[2], s[2] + 9});
        tets.push_back({s[0], s[1], s[1] + 9, s[2] + 9});
        tets.push_back({s[0], s[0] + 9, s[1] + 9, s[2] + 9});
    }
    sftri::Triangulation tri(static_cast<int>(tets.size()));
    std::map<std::array<int, 3>, std::pair<int, int>> open_face;
    for (int t = 0; t < static_cast<int>(tets.size()); ++t)
        for (int f = 0; f < 4; ++f) {
            std::array<int, 3> key{};
            int k = 0;
            for (int v = 0; v < 4; ++v)
                if (v != f) key[k++] = tets[t][v];
            std::sort(key.begin(), key.end());
            auto it = open_face.find(key);
            if (it == open_face.end()) {
                open_face.emplace(key, std::make_pair(t, f));
                continue;
            }
            auto [t2, f2] = it->second;
            std::array<int, 4> img{};
            for (int v = 0; v < 4; ++v) {
                if (v == f2) {
                    img[v] = f;
                    continue;
                }
                int* pos = std::find(tets[t].begin(), tets[t].end(), tets[t2][v]);
                img[v] = static_cast<int>(pos - tets[t].begin());
            }
            tri.glue(t2, f2, t, f, sftri::VertexPerm::from_images(img[0], img[1], img[2], img[3]));
        }
    return tri;
}

inline sftri::Triangulation random_relabel(const sftri::Triangulation& tri, std::mt19937& rng) {
    int n = tri.tet_count();
    std::vector<int> tet_map(n);
    for (int i = 0; i < n; ++i) tet_map[i] = i;
    std::shuffle(tet_map.begin(), tet_map.end(), rng);
    std::vector<sftri::VertexPerm> vmap;
    for (int i = 0; i < n; ++i) vmap.push_back(sftri::VertexPerm::from_code(static_cast<int>(rng() % 24)));
    return tri.relabeled(tet_map, vmap);
}

}  // namespace fixtures
