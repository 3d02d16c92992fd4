#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sftri/farey.hpp"
#include "sftri/homology.hpp"
#include "sftri/moves.hpp"
#include "sftri/seifert.hpp"
#include "sftri/skeleton.hpp"
#include "sftri/surface.hpp"
#include "sftri/triangulation.hpp"

namespace sftri {

// Stage-by-stage tetrahedron accounting for a construction.
struct BuildStage {
    std::string name;
    int tets = 0;

    friend bool operator==(const BuildStage& a, const BuildStage& b) {
        return a.name == b.name && a.tets == b.tets;
    }
};

struct BuildReport {
    int tets_used = 0;
    int budget = 0;
    std::vector<BuildStage> stages;

    void add_stage(std::string name, int tets) {
        stages.push_back(BuildStage{std::move(name), tets});
        tets_used += tets;
    }

    void absorb(const BuildReport& other) {
        for (const auto& s : other.stages) add_stage(s.name, s.tets);
    }

    std::string str() const {
        std::string out;
        for (const auto& s : stages) out += "stage " + s.name + ": " + std::to_string(s.tets) + " tets\n";
        out += "total " + std::to_string(tets_used) + " of " + std::to_string(budget) + " tets\n";
        return out;
    }
};

// A boundary torus together with names for its three edge classes.  The
// ledger records the curve each labelled edge carries, written as a slope in
// the reference frame that filling coefficients refer to.  Unlabelled
// components (labels -1) only carry the component id and an anchor face.
struct LabeledBoundary {
    int component = -1;
    int mu = -1, lambda = -1, diag = -1;  // edge class ids
    std::map<std::string, Slope> ledger;
    int anchor_tet = -1, anchor_face = -1;  // one boundary face of the component

    bool labeled() const { return mu >= 0 && lambda >= 0 && diag >= 0; }
};

namespace detail {

// Tet edge corresponding to surface-edge e of the boundary triangle living on
// face `face`: the edge joining the two face vertices other than corner e.
inline std::pair<int, int> boundary_edge_in_tet(int face, int e) {
    auto fv = face_vertices(face);
    auto [i, j] = surface_edge_vertices(e);
    return {fv[i], fv[j]};
}

struct BoundaryView {
    SurfaceTriangulation surf;
    BoundaryCorrespondence corr;
    SurfaceSkeleton ssk;
};

inline BoundaryView boundary_view(const Triangulation& tri) {
    auto [s, corr] = boundary_surface(tri);
    auto ssk = surface_skeleton(s);
    return BoundaryView{std::move(s), std::move(corr), std::move(ssk)};
}

inline int component_of_face(const BoundaryView& bv, int tet, int face) {
    return bv.ssk.component_of[bv.corr.tri_of(tet, face)];
}

// First instance (tet, a, b) of an edge class.
inline std::tuple<int, int, int> edge_instance(const SkeletonReport& rep, int cls) {
    for (int i = 0; i < static_cast<int>(rep.edge_class_of.size()); ++i)
        if (rep.edge_class_of[i] == cls) {
            auto [a, b] = edge_vertices(i % 6);
            return {i / 6, a, b};
        }
    throw std::invalid_argument("edge_instance: no such edge class");
}

inline std::pair<Triangulation, LabeledBoundary> make_one_tet_solid_torus() {
    for (int f1 = 0; f1 < 4; ++f1)
        for (int f2 = f1 + 1; f2 < 4; ++f2)
            for (int code = 0; code < 24; ++code) {
                VertexPerm sigma = VertexPerm::from_code(code);
                if (sigma[f1] != f2) continue;
                Triangulation tri(1);
                tri.glue(0, f1, 0, f2, sigma);
                SkeletonReport rep = validate(tri);
                if (!rep.valid_manifold || !rep.orientable) continue;
                if (rep.boundary_components.size() != 1 || !rep.boundary_components[0].is_torus()) continue;
                if (homology(tri, 1) != AbelianGroup(1, {})) continue;

                // the three boundary edge classes, ascending
                std::vector<int> cls;
                for (int e = 0; e < 6; ++e) {
                    int c = rep.edge_class_of[e];
                    if (rep.edge_class_boundary[c] && std::find(cls.begin(), cls.end(), c) == cls.end())
                        cls.push_back(c);
                }
                if (cls.size() != 3) continue;
                std::sort(cls.begin(), cls.end());

                // the meridian crosses the three boundary edges 1, 2 and 3
                // times; the crossing numbers name the edges
                Slope k01 = peripheral_kernel(tri, rep, peripheral_basis(tri, rep, 0, cls[0], cls[1]));
                Slope k02 = peripheral_kernel(tri, rep, peripheral_basis(tri, rep, 0, cls[0], cls[2]));
                Int i0 = abs(k01.q), i1 = abs(k01.p), i2 = abs(k02.p);
                if (abs(k02.q) != i0) continue;
                std::array<Int, 3> m{i0, i1, i2};
                std::array<Int, 3> ms = m;
                std::sort(ms.begin(), ms.end());
                if (!(ms[0] == 1 && ms[1] == 2 && ms[2] == 3)) continue;
                auto at = [&](const Int& v) {
                    for (int k = 0; k < 3; ++k)
                        if (m[k] == v) return k;
                    throw std::logic_error("one_tet_solid_torus: crossing number missing");
                };

                LabeledBoundary lb;
                lb.component = 0;
                lb.lambda = cls[at(1)];
                lb.mu = cls[at(2)];
                lb.diag = cls[at(3)];
                Slope kk = peripheral_kernel(tri, rep, peripheral_basis(tri, rep, 0, lb.mu, lb.lambda));
                if (!(kk.p == 1 && abs(kk.q) == 2)) continue;
                // in (meridian, longitude) coordinates the edges carry the
                // longitude l, m + 2l and m + 3l
                lb.ledger["mu"] = Slope(2, 1);
                lb.ledger["lambda"] = Slope(1, 0);
                lb.ledger["diag"] = Slope(3, 1);
                auto bf = tri.boundary_faces();
                lb.anchor_tet = bf[0].first;
                lb.anchor_face = bf[0].second;
                return {tri, lb};
            }
    throw std::logic_error("one_tet_solid_torus: search found no valid gluing");
}

}  // namespace detail

inline const std::pair<Triangulation, LabeledBoundary>& one_tet_solid_torus_data() {
    static const std::pair<Triangulation, LabeledBoundary> data = detail::make_one_tet_solid_torus();
    return data;
}

// One-tetrahedron solid torus with a one-vertex torus boundary.
inline std::pair<Triangulation, LabeledBoundary> one_tet_solid_torus() { return one_tet_solid_torus_data(); }

namespace detail {

struct TrackedEdge {
    int tet = -1, a = -1, b = -1;  // one instance of the boundary edge class
    Int cp, cq;                    // curve carried, in reference-frame coordinates
};

inline Slope tracked_slope(const TrackedEdge& e) { return Slope(e.cq, e.cp); }

struct LstPiece {
    Triangulation tri;
    std::array<TrackedEdge, 3> edges;  // the final boundary edge classes
    std::vector<BuildStage> stages;
};

// Layered solid torus whose final boundary triangle realizes `frame` and
// whose meridian disc is bounded by the curve of slope `target`.  Built
// backwards: start from the one-tet solid torus, then layer once per triangle
// of the Farey walk from `frame` to `target`.
inline LstPiece layered_solid_torus(const Slope& target, const FareyTriangle& frame) {
    if (frame.contains(target))
        throw std::invalid_argument("layered_solid_torus: meridian lies on the boundary triangle");
    auto walk = walk_to(target, frame);
    if (walk.size() < 2) throw std::logic_error("layered_solid_torus: degenerate walk");

    // The walk's last flip would expose the meridian as a boundary edge; the
    // solid torus instead closes the triangle adjacent across the preceding
    // edge, whose vertices the meridian crosses 1, 2 and 3 times.
    const FareyTriangle& last = walk.back();
    const FareyTriangle& prev = walk[walk.size() - 2];
    std::array<Slope, 2> rest;  // shared edge of the final two triangles
    {
        int n = 0;
        for (const Slope& v : last.v)
            if (!(v == target)) {
                if (n == 2) throw std::logic_error("layered_solid_torus: degenerate walk end");
                rest[n++] = v;
            }
        if (n != 2) throw std::logic_error("layered_solid_torus: degenerate walk end");
    }
    Slope kept = std::max(rest[0], rest[1]);      // crossing number 1
    Slope dropped = std::min(rest[0], rest[1]);
    Slope across = [&] {  // crossing number 2
        for (const Slope& v : prev.v)
            if (!(v == rest[0]) && !(v == rest[1])) return v;
        throw std::logic_error("layered_solid_torus: final triangles share no edge");
    }();
    // orient across so that kept + across is the closing triangle's third
    // vertex (crossing number 3) rather than the flipped-out vertex
    Int v2p, v2q, v3p, v3q;
    {
        bool found = false;
        for (int sgn : {1, -1}) {
            Int cp = kept.p + sgn * across.p, cq = kept.q + sgn * across.q;
            if (!(Slope(cq, cp) == dropped)) {
                v2p = sgn * across.p;
                v2q = sgn * across.q;
                v3p = std::move(cp);
                v3q = std::move(cq);
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("layered_solid_torus: no closing vertex");
    }
    if (!(Slope(v2q - 2 * kept.q, v2p - 2 * kept.p) == target))
        throw std::logic_error("layered_solid_torus: fold does not kill the meridian");

    LstPiece out;
    const auto& [st, stlb] = one_tet_solid_torus_data();
    out.tri = st;
    out.stages.push_back({"solid torus", 1});

    SkeletonReport strep = validate(st);
    auto assign = [&](int cls, Int cp, Int cq) {
        auto [t, a, b] = edge_instance(strep, cls);
        return TrackedEdge{t, a, b, std::move(cp), std::move(cq)};
    };
    out.edges[0] = assign(stlb.lambda, kept.p, kept.q);
    out.edges[1] = assign(stlb.mu, std::move(v2p), std::move(v2q));
    out.edges[2] = assign(stlb.diag, std::move(v3p), std::move(v3q));

    for (int j = static_cast<int>(walk.size()) - 2; j >= 0; --j) {
        const FareyTriangle& next = walk[j];
        int leave = -1;
        for (int k = 0; k < 3; ++k)
            if (!next.contains(tracked_slope(out.edges[k]))) {
                leave = k;
                break;
            }
        if (leave < 0) throw std::logic_error("layered_solid_torus: no edge leaves the triangle");
        const TrackedEdge le = out.edges[leave];
        out.tri = layer_on_boundary_edge(out.tri, le.tet, le.a, le.b);
        int nt = out.tri.tet_count() - 1;

        const TrackedEdge& e1 = out.edges[(leave + 1) % 3];
        const TrackedEdge& e2 = out.edges[(leave + 2) % 3];
        Slope enter = [&] {
            for (const Slope& v : next.v)
                if (!(v == tracked_slope(e1)) && !(v == tracked_slope(e2))) return v;
            throw std::logic_error("layered_solid_torus: no entering edge");
        }();
        bool found = false;
        for (int sgn : {1, -1}) {
            Int cp = e1.cp + sgn * e2.cp, cq = e1.cq + sgn * e2.cq;
            if (Slope(cq, cp) == enter) {
                out.edges[leave] = TrackedEdge{nt, 2, 3, std::move(cp), std::move(cq)};
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("layered_solid_torus: entering edge is not a sum");
        out.stages.push_back({"layer " + next.key(), 1});
    }
    return out;
}

// One boundary face of a torus component; corner_label[i] names the edge
// opposite corner i (0 = mu, 1 = lambda, 2 = diag).
struct TorusSide {
    int tet = -1, face = -1;
    std::array<int, 3> corner_label{-1, -1, -1};
};

struct PreparedTorus {
    std::array<TorusSide, 2> sides;
    std::array<Slope, 3> frame;  // ledger slopes for mu, lambda, diag
};

inline std::array<int, 3> face_corner_labels(const SkeletonReport& rep, int tet, int face,
                                             const std::array<int, 3>& label_cls) {
    std::array<int, 3> out{-1, -1, -1};
    for (int i = 0; i < 3; ++i) {
        auto [a, b] = boundary_edge_in_tet(face, i);
        int c = rep.edge_class_of[6 * tet + edge_index(a, b)];
        for (int l = 0; l < 3; ++l)
            if (label_cls[l] == c) out[i] = l;
        if (out[i] < 0) throw std::invalid_argument("dehn_fill: basis invalid (face edge is unlabelled)");
    }
    return out;
}

inline PreparedTorus prepare_torus(const Triangulation& tri, const SkeletonReport& rep, const LabeledBoundary& b) {
    if (!b.labeled()) throw std::invalid_argument("dehn_fill: basis invalid (unlabelled boundary)");
    if (b.component < 0 || b.component >= static_cast<int>(rep.boundary_components.size()))
        throw std::invalid_argument("dehn_fill: no such boundary component");
    if (!rep.boundary_components[b.component].is_torus())
        throw std::invalid_argument("dehn_fill: boundary component is not a torus");

    PreparedTorus out;
    for (const char* key : {"mu", "lambda", "diag"})
        if (!b.ledger.count(key)) throw std::invalid_argument("dehn_fill: basis invalid (ledger incomplete)");
    out.frame = {b.ledger.at("mu"), b.ledger.at("lambda"), b.ledger.at("diag")};
    try {
        FareyTriangle check(out.frame[0], out.frame[1], out.frame[2]);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("dehn_fill: basis invalid (ledger is not a Farey triangle)");
    }

    std::array<int, 3> label_cls{b.mu, b.lambda, b.diag};
    for (int c : label_cls)
        if (c < 0 || c >= static_cast<int>(rep.edge_classes) || !rep.edge_class_boundary[c])
            throw std::invalid_argument("dehn_fill: basis invalid (label is not a boundary edge class)");

    BoundaryView bv = boundary_view(tri);
    std::vector<std::pair<int, int>> faces;
    for (int i = 0; i < bv.surf.triangle_count(); ++i)
        if (bv.ssk.component_of[i] == b.component) faces.push_back(bv.corr.tri_to_face[i]);
    if (faces.size() != 2)
        throw std::invalid_argument("dehn_fill: basis invalid (component is not a one-vertex torus)");
    for (int s = 0; s < 2; ++s) {
        out.sides[s].tet = faces[s].first;
        out.sides[s].face = faces[s].second;
        out.sides[s].corner_label = face_corner_labels(rep, faces[s].first, faces[s].second, label_cls);
    }
    return out;
}

struct PreparedLst {
    Triangulation tri;
    std::array<TorusSide, 2> sides;
    std::vector<BuildStage> stages;
};

inline PreparedLst prepare_lst(const Slope& target, const std::array<Slope, 3>& frame) {
    LstPiece piece = layered_solid_torus(target, FareyTriangle(frame[0], frame[1], frame[2]));
    SkeletonReport rep = validate(piece.tri);

    std::array<int, 3> label_cls{-1, -1, -1};
    for (const TrackedEdge& e : piece.edges) {
        Slope s = tracked_slope(e);
        int cls = rep.edge_class_of[6 * e.tet + edge_index(e.a, e.b)];
        for (int l = 0; l < 3; ++l)
            if (frame[l] == s) label_cls[l] = cls;
    }
    for (int l = 0; l < 3; ++l)
        if (label_cls[l] < 0) throw std::logic_error("prepare_lst: boundary does not realize the frame");

    auto bf = piece.tri.boundary_faces();
    if (bf.size() != 2) throw std::logic_error("prepare_lst: expected two boundary faces");
    PreparedLst out;
    out.tri = std::move(piece.tri);
    out.stages = std::move(piece.stages);
    for (int s = 0; s < 2; ++s) {
        out.sides[s].tet = bf[s].first;
        out.sides[s].face = bf[s].second;
        out.sides[s].corner_label = face_corner_labels(rep, bf[s].first, bf[s].second, label_cls);
    }
    return out;
}

// Glue a prepared layered solid torus onto the two faces of a prepared torus
// boundary.  Corners are matched by edge label; this is the unique
// class-preserving identification.
inline void fill_with_lst(Triangulation& out, const PreparedTorus& pt, const PreparedLst& lst,
                          BuildReport& report) {
    int off = out.append(lst.tri);
    for (int s = 0; s < 2; ++s) {
        const TorusSide& h = pt.sides[s];
        const TorusSide& g = lst.sides[s];
        auto hfv = face_vertices(h.face);
        auto gfv = face_vertices(g.face);
        std::array<int, 4> img{-1, -1, -1, -1};
        img[h.face] = g.face;
        for (int i = 0; i < 3; ++i) {
            int j = -1;
            for (int k = 0; k < 3; ++k)
                if (g.corner_label[k] == h.corner_label[i]) j = k;
            if (j < 0) throw std::logic_error("fill_with_lst: labels do not match");
            img[hfv[i]] = gfv[j];
        }
        out.glue(h.tet, h.face, off + g.tet, g.face, VertexPerm::from_images(img[0], img[1], img[2], img[3]));
    }
    for (const auto& st : lst.stages) report.add_stage(st.name, st.tets);
}

}  // namespace detail

// Solid torus whose boundary basis (mu, lambda) sees the meridian as +-(p, q).
inline std::tuple<Triangulation, LabeledBoundary, BuildReport> standalone_lst(const Int& p, const Int& q) {
    if (!(q > 0 && q < p && gcd_int(p, q) == 1))
        throw std::invalid_argument("standalone_lst: slope must be reduced with 0 < q < p");
    Slope s(q, p);
    FareyTriangle frame = better_base(s);
    detail::LstPiece piece = detail::layered_solid_torus(s, frame);

    BuildReport report;
    report.budget = static_cast<int>(norm(s)) + 2;
    for (const auto& st : piece.stages) report.add_stage(st.name, st.tets);
    if (report.tets_used != piece.tri.tet_count() || report.tets_used > report.budget)
        throw std::logic_error("standalone_lst: budget exceeded");

    SkeletonReport rep = validate(piece.tri);
    if (!rep.valid_manifold || !rep.orientable || rep.boundary_components.size() != 1 ||
        !rep.boundary_components[0].is_torus() || homology(piece.tri, 1) != AbelianGroup(1, {}))
        throw std::logic_error("standalone_lst: result is not a solid torus");

    LabeledBoundary lb;
    lb.component = 0;
    for (const detail::TrackedEdge& e : piece.edges) {
        Slope v = detail::tracked_slope(e);
        int cls = rep.edge_class_of[6 * e.tet + edge_index(e.a, e.b)];
        if (v == Slope(0, 1))
            lb.mu = cls;
        else if (v == Slope(1, 0))
            lb.lambda = cls;
        else
            lb.diag = cls;
        lb.ledger[v == Slope(0, 1) ? "mu" : v == Slope(1, 0) ? "lambda" : "diag"] = v;
    }
    if (!lb.labeled()) throw std::logic_error("standalone_lst: boundary does not realize the base triangle");
    auto bf = piece.tri.boundary_faces();
    lb.anchor_tet = bf[0].first;
    lb.anchor_face = bf[0].second;
    return {std::move(piece.tri), std::move(lb), std::move(report)};
}

// Close off boundary component b with a layered solid torus whose meridian is
// the curve with coordinates (p, q) = (s.p, s.q) in b's reference frame.
inline std::pair<Triangulation, BuildReport> dehn_fill(const Triangulation& host, const LabeledBoundary& b,
                                                       const Slope& s) {
    if (!(s.p > 0 && s.q != 0 && abs(s.q) < s.p))
        throw std::invalid_argument("dehn_fill: slope must satisfy 0 < |q| < p");
    SkeletonReport rep = validate(host);
    detail::PreparedTorus pt = detail::prepare_torus(host, rep, b);
    FareyTriangle frame(pt.frame[0], pt.frame[1], pt.frame[2]);
    if (frame.contains(s))
        throw std::invalid_argument("dehn_fill: slope lies on the boundary triangle");

    detail::PreparedLst lst = detail::prepare_lst(s, pt.frame);
    Triangulation out = host;
    BuildReport report;
    // filling from the standard section/fibre bases stays within this
    // budget; exotic relabelled ledgers may run over, so only record it
    report.budget = static_cast<int>(norm(s)) + 2;
    detail::fill_with_lst(out, pt, lst, report);

    SkeletonReport rep2 = validate(out);
    if (!rep2.valid_manifold || rep2.orientable != rep.orientable ||
        rep2.boundary_components.size() + 1 != rep.boundary_components.size())
        throw std::logic_error("dehn_fill: filled triangulation failed validation");
    return {std::move(out), std::move(report)};
}

namespace detail {

// --- base surface building blocks -------------------------------------------

// Cone on a one-vertex circle: a single triangle with its two cone sides
// identified.  Boundary: edge 0, a loop.
inline SurfaceTriangulation one_vertex_disc() {
    SurfaceTriangulation s(1);
    s.glue(0, 1, 0, 2, false);
    return s;
}

// One-vertex Moebius band on three triangles; boundary: (2, 1), a loop.
inline SurfaceTriangulation moebius_block() {
    SurfaceTriangulation s(3);
    s.glue(0, 1, 1, 2, false);  // square diagonal
    s.glue(1, 1, 0, 0, true);   // side identification with a reversal
    s.glue(2, 2, 0, 2, false);
    s.glue(2, 0, 1, 0, true);
    return s;
}

// Closed orientable surface of genus g as a fan over the 4g-gon with the
// standard commutator side pairing; 4g - 2 triangles, one vertex.
inline SurfaceTriangulation closed_orientable_surface(long g) {
    if (g < 1) throw std::invalid_argument("closed_orientable_surface: genus must be positive");
    const long N = 4 * g;
    SurfaceTriangulation s(static_cast<int>(N - 2));
    for (long t = 1; t <= N - 3; ++t) s.glue(static_cast<int>(t - 1), 1, static_cast<int>(t), 2, false);

    struct Side {
        int tri, edge, ps, pe;  // corner positions of the side's start and end
    };
    std::vector<Side> sides;
    sides.push_back({0, 2, 0, 1});
    for (long j = 1; j <= N - 2; ++j) sides.push_back({static_cast<int>(j - 1), 0, 1, 2});
    sides.push_back({static_cast<int>(N - 3), 1, 2, 0});

    // identify side x with side y reversed (start to end)
    auto rev_glue = [&](const Side& x, const Side& y) {
        bool xf = x.ps < x.pe, yf = y.ps < y.pe;
        s.glue(x.tri, x.edge, y.tri, y.edge, xf == yf);
    };
    for (long k = 0; k < g; ++k) {
        rev_glue(sides[4 * k], sides[4 * k + 2]);
        rev_glue(sides[4 * k + 1], sides[4 * k + 3]);
    }
    return s;
}

// Open a hole in the interior of `face` (all of whose edges must be glued
// unless tracked slots tolerate moving): replaces the face by four triangles
// and adds a one-vertex boundary circle at the new hole.  Tracked boundary
// slots are rewritten through the rebuild.
inline void insert_boundary_hole(SurfaceTriangulation& s, int face, std::vector<std::pair<int, int>>* tracked) {
    const int n = s.triangle_count();
    const int B = n, C = n + 1, D = n + 2;
    SurfaceTriangulation out(n + 3);
    // slot map: (t, e) -> (t', e', flip toggled)
    auto remap = [&](int t, int e) -> std::tuple<int, int, bool> {
        if (t == face && e == 0) return {B, 2, false};
        if (t == face && e == 1) return {C, 2, true};  // corner order reverses
        if (t == face && e == 2) return {face, 2, false};
        return {t, e, false};
    };
    for (int t = 0; t < n; ++t)
        for (int e = 0; e < 3; ++e) {
            if (!s.is_glued(t, e)) continue;
            auto g = s.gluing(t, e);
            if (std::make_pair(g.tri, g.edge) < std::make_pair(t, e)) continue;
            auto [t1, e1, x1] = remap(t, e);
            auto [t2, e2, x2] = remap(g.tri, g.edge);
            out.glue(t1, e1, t2, e2, g.flip != (x1 != x2));
        }
    out.glue(face, 0, B, 1, false);
    out.glue(B, 0, C, 1, false);
    out.glue(C, 0, D, 1, false);
    out.glue(D, 2, face, 1, false);
    // new boundary: (D, 0), a loop
    if (tracked)
        for (auto& sl : *tracked) {
            auto [t2, e2, x] = remap(sl.first, sl.second);
            sl = {t2, e2};
        }
    s = std::move(out);
}

inline int append_surface(SurfaceTriangulation& s, const SurfaceTriangulation& other) {
    int off = s.add_triangles(other.triangle_count());
    for (int t = 0; t < other.triangle_count(); ++t)
        for (int e = 0; e < 3; ++e) {
            if (!other.is_glued(t, e)) continue;
            auto g = other.gluing(t, e);
            if (std::make_pair(t, e) < std::make_pair(g.tri, g.edge))
                s.glue(off + t, e, off + g.tri, g.edge, g.flip);
        }
    return off;
}

// Moebius band with p one-vertex boundary circles (3p triangles); the loop
// slots come back in `loops`, original boundary first.
inline SurfaceTriangulation gamma_block(long p, std::vector<std::pair<int, int>>& loops) {
    SurfaceTriangulation s = moebius_block();
    loops = {{2, 1}};
    for (long i = 1; i < p; ++i) {
        insert_boundary_hole(s, 0, &loops);
        loops.push_back({s.triangle_count() - 1, 0});
    }
    return s;
}

}  // namespace detail

// Triangulated compact surface with one vertex on each boundary circle.
// a is twice the genus (orientable) or the nonorientable genus.
inline SurfaceTriangulation base_surface(bool orientable, long a, long b) {
    if (b < 1) throw std::invalid_argument("base_surface: need at least one boundary component");
    if (a < 0) throw std::invalid_argument("base_surface: negative genus");
    if (orientable && a % 2 != 0)
        throw std::invalid_argument("base_surface: an orientable base carries twice its genus, which is even");
    if (!orientable && a < 1) throw std::invalid_argument("base_surface: nonorientable base needs a >= 1");

    if (orientable) {
        if (a == 0) {
            SurfaceTriangulation s = detail::one_vertex_disc();
            for (long i = 1; i < b; ++i) detail::insert_boundary_hole(s, 0, nullptr);
            return s;
        }
        SurfaceTriangulation s = detail::closed_orientable_surface(a / 2);
        for (long i = 0; i < b; ++i) detail::insert_boundary_hole(s, 0, nullptr);
        return s;
    }
    std::vector<std::pair<int, int>> loops;
    if (a == 1) return detail::gamma_block(b, loops);
    // chain of Moebius blocks; the last block carries the genuine boundary
    SurfaceTriangulation s = detail::gamma_block(1, loops);
    std::pair<int, int> open = loops[0];
    for (long i = 1; i < a; ++i) {
        std::vector<std::pair<int, int>> bl;
        SurfaceTriangulation block = detail::gamma_block(i == a - 1 ? 1 + b : 2, bl);
        int off = detail::append_surface(s, block);
        s.glue(open.first, open.second, off + bl[0].first, bl[0].second, false);
        if (bl.size() > 1) open = {off + bl[1].first, bl[1].second};
    }
    return s;
}

namespace detail {

// vertical direction of surface-edge e within the corner cycle 0 -> 1 -> 2
inline int edge_direction(int e) { return e == 1 ? -1 : 1; }

}  // namespace detail

// Circle bundle over S built from one prism per triangle (two parallel copies
// when twisted), each prism coned from an interior point into 8 tetrahedra.
// Boundary tori over one-vertex circles of an untwisted bundle come back
// fully labelled (mu = section, lambda = fibre); twisted-bundle boundaries
// keep only component and anchor, to be reduced afterwards.
inline std::pair<Triangulation, std::vector<LabeledBoundary>> circle_bundle(const SurfaceTriangulation& S,
                                                                            bool twisted) {
    SurfaceSkeleton ssk = surface_skeleton(S);
    if (ssk.boundary_circles.empty()) throw std::invalid_argument("circle_bundle: base surface is closed");
    if (twisted && ssk.orientable)
        throw std::invalid_argument("circle_bundle: twisted bundle needs a nonorientable base");
    const int F = S.triangle_count();
    const int copies = twisted ? 2 : 1;

    // sheet signs: spanning-tree gluings carry no vertical flip, so all
    // orientation holonomy sits on the remaining edges
    std::vector<int> sigma(F, 0);
    for (int seed = 0; seed < F; ++seed) {
        if (sigma[seed] != 0) continue;
        sigma[seed] = 1;
        std::vector<int> stack{seed};
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            for (int e = 0; e < 3; ++e) {
                if (!S.is_glued(t, e)) continue;
                auto g = S.gluing(t, e);
                if (sigma[g.tri] != 0) continue;
                int d = detail::edge_direction(e) * detail::edge_direction(g.edge);
                sigma[g.tri] = (g.flip ? d : -d) * sigma[t];
                stack.push_back(g.tri);
            }
        }
    }
    auto straight = [&](int t, int e) {
        auto g = S.gluing(t, e);
        int lhs = detail::edge_direction(e) * sigma[t];
        int rhs = detail::edge_direction(g.edge) * sigma[g.tri];
        return g.flip ? lhs == rhs : lhs == -rhs;
    };

    // quad diagonals: true = from the bottom of the smaller endpoint to the
    // top of the larger; canonical interior sides use it, partners inherit
    // the transported choice; twisted boundary quads alternate per copy so
    // the doubled strip can be reduced later
    std::vector<std::array<bool, 3>> xdiag(static_cast<std::size_t>(copies) * F, {true, true, true});
    for (int c = 0; c < copies; ++c)
        for (int t = 0; t < F; ++t)
            for (int e = 0; e < 3; ++e) {
                bool xd;
                if (S.is_glued(t, e)) {
                    auto g = S.gluing(t, e);
                    bool canonical = std::make_pair(t, e) < std::make_pair(g.tri, g.edge);
                    xd = canonical ? true : (g.flip != straight(t, e));
                } else {
                    xd = twisted ? c == 0 : true;
                }
                xdiag[static_cast<std::size_t>(c) * F + t][e] = xd;
            }

    // prism boundary triangles as label triples; labels 0..2 bottom, 3..5 top
    auto prism_triples = [&](int c, int t) {
        std::array<std::array<int, 3>, 8> out{};
        out[0] = {0, 1, 2};
        out[1] = {3, 4, 5};
        for (int e = 0; e < 3; ++e) {
            auto [x, y] = surface_edge_vertices(e);
            bool xd = xdiag[static_cast<std::size_t>(c) * F + t][e];
            std::array<int, 3> lower = xd ? std::array<int, 3>{x, y, 3 + y} : std::array<int, 3>{x, y, 3 + x};
            std::array<int, 3> upper = xd ? std::array<int, 3>{x, 3 + y, 3 + x} : std::array<int, 3>{y, 3 + y, 3 + x};
            std::sort(lower.begin(), lower.end());
            std::sort(upper.begin(), upper.end());
            out[2 + 2 * e] = lower;
            out[3 + 2 * e] = upper;
        }
        return out;
    };
    auto prism_base = [&](int c, int t) { return 8 * (c * F + t); };

    Triangulation out(8 * copies * F);

    // cone faces inside each prism: triangles sharing two labels meet along
    // the face spanned by those labels and the cone point
    for (int c = 0; c < copies; ++c)
        for (int t = 0; t < F; ++t) {
            auto tr = prism_triples(c, t);
            int base = prism_base(c, t);
            int glued = 0;
            for (int i = 0; i < 8; ++i)
                for (int j = i + 1; j < 8; ++j) {
                    std::vector<int> shared;
                    for (int x : tr[i])
                        for (int y : tr[j])
                            if (x == y) shared.push_back(x);
                    if (shared.size() != 2) continue;
                    auto pos = [](const std::array<int, 3>& a, int v) {
                        return static_cast<int>(std::find(a.begin(), a.end(), v) - a.begin());
                    };
                    int ui = tr[i][0] + tr[i][1] + tr[i][2] - shared[0] - shared[1];
                    int uj = tr[j][0] + tr[j][1] + tr[j][2] - shared[0] - shared[1];
                    std::array<int, 4> img{-1, -1, -1, -1};
                    img[pos(tr[i], shared[0])] = pos(tr[j], shared[0]);
                    img[pos(tr[i], shared[1])] = pos(tr[j], shared[1]);
                    img[pos(tr[i], ui)] = pos(tr[j], uj);
                    img[3] = 3;
                    out.glue(base + i, pos(tr[i], ui), base + j, pos(tr[j], uj),
                             VertexPerm::from_images(img[0], img[1], img[2], img[3]));
                    ++glued;
                }
            if (glued != 12) throw std::logic_error("circle_bundle: prism gluing miscount");
        }

    // vertical interfaces over interior surface edges
    for (int c = 0; c < copies; ++c)
        for (int t = 0; t < F; ++t)
            for (int e = 0; e < 3; ++e) {
                if (!S.is_glued(t, e)) continue;
                auto g = S.gluing(t, e);
                if (!(std::make_pair(t, e) < std::make_pair(g.tri, g.edge))) continue;
                bool str = straight(t, e);
                auto [x, y] = surface_edge_vertices(e);
                auto [x2, y2] = surface_edge_vertices(g.edge);
                auto image = [&](int label) {
                    int v = label % 3;
                    bool top = label >= 3;
                    int m = (v == x) == !g.flip ? x2 : y2;
                    if (!str) top = !top;
                    return m + (top ? 3 : 0);
                };
                auto trA = prism_triples(c, t);
                auto trB = prism_triples(c, g.tri);
                int baseA = prism_base(c, t), baseB = prism_base(c, g.tri);
                for (int k : {2 + 2 * e, 3 + 2 * e}) {
                    std::array<int, 3> want{image(trA[k][0]), image(trA[k][1]), image(trA[k][2])};
                    std::sort(want.begin(), want.end());
                    int kb = -1;
                    for (int cand : {2 + 2 * g.edge, 3 + 2 * g.edge})
                        if (trB[cand] == want) kb = cand;
                    if (kb < 0) throw std::logic_error("circle_bundle: transported quad triangle missing");
                    auto pos = [](const std::array<int, 3>& a, int v) {
                        return static_cast<int>(std::find(a.begin(), a.end(), v) - a.begin());
                    };
                    std::array<int, 4> img{-1, -1, -1, -1};
                    for (int i = 0; i < 3; ++i) img[pos(trA[k], trA[k][i])] = pos(trB[kb], image(trA[k][i]));
                    img[3] = 3;
                    out.glue(baseA + k, 3, baseB + kb, 3,
                             VertexPerm::from_images(img[0], img[1], img[2], img[3]));
                }
            }

    // close the interval direction: product glues top to bottom in the same
    // prism; the twisted double glues the two copies leaf to leaf
    for (int t = 0; t < F; ++t) {
        if (copies == 1) {
            out.glue(prism_base(0, t) + 1, 3, prism_base(0, t) + 0, 3, VertexPerm());
        } else {
            out.glue(prism_base(0, t) + 1, 3, prism_base(1, t) + 1, 3, VertexPerm());
            out.glue(prism_base(0, t) + 0, 3, prism_base(1, t) + 0, 3, VertexPerm());
        }
    }

    SkeletonReport rep = validate(out);
    if (!rep.valid_manifold) throw std::logic_error("circle_bundle: assembly failed validation");
    if (twisted && !rep.orientable) throw std::logic_error("circle_bundle: twisted double is not orientable");
    if (!twisted && rep.orientable != ssk.orientable)
        throw std::logic_error("circle_bundle: orientability mismatch");
    if (rep.boundary_components.size() != ssk.boundary_circles.size())
        throw std::logic_error("circle_bundle: boundary component miscount");

    detail::BoundaryView bv = detail::boundary_view(out);
    std::vector<LabeledBoundary> labels;
    for (const auto& circle : ssk.boundary_circles) {
        auto [t, e] = circle.front();
        int lower = prism_base(0, t) + 2 + 2 * e;
        LabeledBoundary lb;
        lb.anchor_tet = lower;
        lb.anchor_face = 3;
        lb.component = detail::component_of_face(bv, lower, 3);
        if (circle.size() == 1 && copies == 1) {
            auto tr = prism_triples(0, t);
            auto [x, y] = surface_edge_vertices(e);
            auto class_of = [&](int la, int lb2) {
                for (int k : {0, 2 + 2 * e, 3 + 2 * e}) {
                    auto pos = std::find(tr[k].begin(), tr[k].end(), la);
                    auto pos2 = std::find(tr[k].begin(), tr[k].end(), lb2);
                    if (pos != tr[k].end() && pos2 != tr[k].end()) {
                        int a = static_cast<int>(pos - tr[k].begin());
                        int b2 = static_cast<int>(pos2 - tr[k].begin());
                        return rep.edge_class_of[6 * (prism_base(0, t) + k) + edge_index(a, b2)];
                    }
                }
                throw std::logic_error("circle_bundle: label pair not found in prism");
            };
            lb.mu = class_of(x, y);          // section: the circle edge downstairs
            lb.lambda = class_of(x, 3 + x);  // fibre: the vertical edge
            bool xd = xdiag[t][e];
            lb.diag = xd ? class_of(x, 3 + y) : class_of(y, 3 + x);
            lb.ledger["mu"] = Slope(0, 1);
            lb.ledger["lambda"] = Slope(1, 0);
            lb.ledger["diag"] = Slope(1, 1);
            if (lb.mu == lb.lambda || lb.mu == lb.diag || lb.lambda == lb.diag)
                throw std::logic_error("circle_bundle: boundary labels collide");
        }
        labels.push_back(std::move(lb));
    }
    return {std::move(out), std::move(labels)};
}

// Reduce a circle-bundle boundary torus to a one-vertex torus with labelled
// fibre and section edges.  Already-reduced components are left alone; the
// doubled strip of a twisted bundle takes two layerings and one fill.
inline std::tuple<Triangulation, LabeledBoundary, BuildReport> reduce_boundary_torus(const Triangulation& T,
                                                                                    int component) {
    SkeletonReport rep = validate(T);
    if (component < 0 || component >= static_cast<int>(rep.boundary_components.size()))
        throw std::invalid_argument("reduce_boundary_torus: no such boundary component");
    if (!rep.boundary_components[component].is_torus())
        throw std::invalid_argument("reduce_boundary_torus: component is not a torus");

    detail::BoundaryView bv = detail::boundary_view(T);
    std::vector<int> tris;
    for (int i = 0; i < bv.surf.triangle_count(); ++i)
        if (bv.ssk.component_of[i] == component) tris.push_back(i);

    std::set<int> vcls;
    for (int i : tris)
        for (int v = 0; v < 3; ++v) vcls.insert(bv.ssk.vertex_class_of[3 * i + v]);

    if (vcls.size() == 1) {
        // already a one-vertex torus; name the classes in ascending order
        std::set<int> ecls;
        for (int i : tris)
            for (int e = 0; e < 3; ++e) {
                auto [t, f] = bv.corr.tri_to_face[i];
                auto [a, b] = detail::boundary_edge_in_tet(f, e);
                ecls.insert(rep.edge_class_of[6 * t + edge_index(a, b)]);
            }
        if (ecls.size() != 3) throw std::logic_error("reduce_boundary_torus: one-vertex torus edge miscount");
        auto it = ecls.begin();
        LabeledBoundary lb;
        lb.component = component;
        lb.mu = *it++;
        lb.lambda = *it++;
        lb.diag = *it;
        lb.ledger["mu"] = Slope(0, 1);
        lb.ledger["lambda"] = Slope(1, 0);
        lb.ledger["diag"] = Slope(1, 1);
        auto [at, af] = bv.corr.tri_to_face[tris[0]];
        lb.anchor_tet = at;
        lb.anchor_face = af;
        BuildReport report;
        report.budget = 3;
        report.add_stage("already reduced", 0);
        return {T, std::move(lb), std::move(report)};
    }

    if (vcls.size() != 2 || tris.size() != 4)
        throw std::invalid_argument("reduce_boundary_torus: unsupported boundary pattern");

    // the doubled strip: two loop edges (the two section circles); layer on
    // one loop, layer on a transversal, then fill the freed vertex
    struct Inst {
        int tet, a, b, cls;
    };
    std::vector<Inst> loop_insts;
    for (int i : tris)
        for (int e = 0; e < 3; ++e) {
            auto [lo, hi] = surface_edge_vertices(e);
            if (bv.ssk.vertex_class_of[3 * i + lo] != bv.ssk.vertex_class_of[3 * i + hi]) continue;
            auto [t, f] = bv.corr.tri_to_face[i];
            auto [a, b] = detail::boundary_edge_in_tet(f, e);
            int cls = rep.edge_class_of[6 * t + edge_index(a, b)];
            bool seen = false;
            for (const Inst& li : loop_insts) seen = seen || li.cls == cls;
            if (!seen) loop_insts.push_back({t, a, b, cls});
        }
    if (loop_insts.size() != 2) throw std::invalid_argument("reduce_boundary_torus: unsupported boundary pattern");
    if (loop_insts[0].cls > loop_insts[1].cls) std::swap(loop_insts[0], loop_insts[1]);

    for (int first : {1, 0}) {
        const Inst& flip1 = loop_insts[first];
        const Inst& keep = loop_insts[1 - first];
        Triangulation cur = layer_on_boundary_edge(T, flip1.tet, flip1.a, flip1.b);
        std::array<int, 3> n1{cur.tet_count() - 1, 2, 3};
        SkeletonReport rep2 = validate(cur);
        int acls = rep2.vertex_class_of[4 * keep.tet + keep.a];
        int bcls = rep2.vertex_class_of[4 * flip1.tet + flip1.a];

        // transversal candidates join the two strip vertices; prefer wall
        // diagonals (two corners around them in the host), which keep the
        // fibre class on the reduced torus
        struct Cand {
            Inst inst;
            long host_len;
        };
        std::vector<Cand> cands;
        for (int t = 0; t < T.tet_count(); ++t)
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b) {
                    int cls = rep2.edge_class_of[6 * t + edge_index(a, b)];
                    if (!rep2.edge_class_boundary[cls]) continue;
                    int u = rep2.vertex_class_of[4 * t + a], v = rep2.vertex_class_of[4 * t + b];
                    if (std::min(u, v) != std::min(acls, bcls) || std::max(u, v) != std::max(acls, bcls))
                        continue;
                    bool seen = false;
                    for (const Cand& ci : cands) seen = seen || ci.inst.cls == cls;
                    if (seen) continue;
                    long len = rep.edge_link_lengths[rep.edge_class_of[6 * t + edge_index(a, b)]];
                    cands.push_back({{t, a, b, cls}, len});
                }
        std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
            return std::make_pair(x.host_len, x.inst.cls) < std::make_pair(y.host_len, y.inst.cls);
        });

        for (const auto& [inst, host_len] : cands) {
            const Inst& cand = inst;
            Triangulation cur2 = layer_on_boundary_edge(cur, cand.tet, cand.a, cand.b);
            std::array<int, 3> n2{cur2.tet_count() - 1, 2, 3};
            Triangulation fin;
            try {
                fin = fill_three_faces(cur2, flip1.tet, flip1.a);
            } catch (const std::invalid_argument&) {
                continue;
            }
            SkeletonReport repf = validate(fin);
            if (!repf.valid_manifold) continue;
            LabeledBoundary lb;
            lb.mu = repf.edge_class_of[6 * keep.tet + edge_index(keep.a, keep.b)];
            lb.lambda = repf.edge_class_of[6 * n2[0] + edge_index(n2[1], n2[2])];
            lb.diag = repf.edge_class_of[6 * n1[0] + edge_index(n1[1], n1[2])];
            if (lb.mu == lb.lambda || lb.mu == lb.diag || lb.lambda == lb.diag) continue;
            bool ok = repf.edge_class_boundary[lb.mu] && repf.edge_class_boundary[lb.lambda] &&
                      repf.edge_class_boundary[lb.diag];
            if (!ok) continue;
            // the reduced component must be a one-vertex torus carrying the labels
            detail::BoundaryView bvf = detail::boundary_view(fin);
            int comp = -1;
            for (int i = 0; i < bvf.surf.triangle_count(); ++i) {
                auto [t, f] = bvf.corr.tri_to_face[i];
                for (int e = 0; e < 3; ++e) {
                    auto [a, b] = detail::boundary_edge_in_tet(f, e);
                    if (repf.edge_class_of[6 * t + edge_index(a, b)] == lb.mu) comp = bvf.ssk.component_of[i];
                }
            }
            if (comp < 0) continue;
            std::set<int> cvcls, cecls;
            std::pair<int, int> anchor{-1, -1};
            for (int i = 0; i < bvf.surf.triangle_count(); ++i) {
                if (bvf.ssk.component_of[i] != comp) continue;
                if (anchor.first < 0) anchor = bvf.corr.tri_to_face[i];
                for (int v = 0; v < 3; ++v) cvcls.insert(bvf.ssk.vertex_class_of[3 * i + v]);
                auto [t, f] = bvf.corr.tri_to_face[i];
                for (int e = 0; e < 3; ++e) {
                    auto [a, b] = detail::boundary_edge_in_tet(f, e);
                    cecls.insert(repf.edge_class_of[6 * t + edge_index(a, b)]);
                }
            }
            if (cvcls.size() != 1 || cecls != std::set<int>{lb.mu, lb.lambda, lb.diag}) continue;
            lb.component = comp;
            lb.anchor_tet = anchor.first;
            lb.anchor_face = anchor.second;
            lb.ledger["mu"] = Slope(0, 1);
            lb.ledger["lambda"] = Slope(1, 0);
            lb.ledger["diag"] = Slope(1, 1);
            BuildReport report;
            report.budget = 3;
            report.add_stage("flip edge " + std::to_string(flip1.cls), 1);
            report.add_stage("flip edge " + std::to_string(cand.cls), 1);
            report.add_stage("fill vertex " + std::to_string(bcls), 1);
            return {std::move(fin), std::move(lb), std::move(report)};
        }
    }
    throw std::logic_error("reduce_boundary_torus: no reduction sequence found");
}

// --- Seifert assembly --------------------------------------------------------

// Caches base bundles and layered solid tori across builds; build_sfs uses a
// fresh instance, grid drivers share one.
class SfsAssembler {
public:
    struct Result {
        Triangulation tri;
        BuildReport report;
    };

    Result build(const SeifertData& d) {
        detail::require_normalized(d);
        const long n = static_cast<long>(d.fibres.size());
        const Bundle& pb = bundle(d.orientable_base, d.a, d.b + n);

        Result r;
        r.tri = pb.tri;
        r.report.budget = static_cast<int>(upper_bound(d));
        for (const auto& st : pb.stages) r.report.add_stage(st.name, st.tets);
        for (long i = 0; i < n; ++i) {
            const detail::PreparedTorus& pt = pb.prepared[static_cast<std::size_t>(d.b + i)];
            detail::fill_with_lst(r.tri, pt, lst(d.fibres[static_cast<std::size_t>(i)]), r.report);
        }
        if (r.report.tets_used > r.report.budget) throw std::logic_error("build_sfs: budget exceeded");
        return r;
    }

private:
    struct Bundle {
        Triangulation tri;
        std::vector<detail::PreparedTorus> prepared;  // indexed by base boundary circle
        std::vector<BuildStage> stages;
    };

    std::map<std::tuple<bool, long, long>, Bundle> bundles_;
    std::map<Slope, detail::PreparedLst> lsts_;

    const detail::PreparedLst& lst(const Slope& s) {
        auto it = lsts_.find(s);
        if (it == lsts_.end())
            it = lsts_.emplace(s, detail::prepare_lst(s, {Slope(0, 1), Slope(1, 0), Slope(1, 1)})).first;
        return it->second;
    }

    const Bundle& bundle(bool orientable, long a, long btot) {
        auto key = std::make_tuple(orientable, a, btot);
        auto it = bundles_.find(key);
        if (it != bundles_.end()) return it->second;

        Bundle pb;
        SurfaceTriangulation base = base_surface(orientable, a, btot);
        auto [tri, labels] = circle_bundle(base, !orientable);
        pb.stages.push_back({"circle bundle", tri.tet_count()});
        if (!orientable) {
            // reduce every torus so any circle can be filled afterwards
            for (auto& lb : labels) {
                detail::BoundaryView bv = detail::boundary_view(tri);
                int comp = detail::component_of_face(bv, lb.anchor_tet, lb.anchor_face);
                auto [tri2, lb2, rr] = reduce_boundary_torus(tri, comp);
                tri = std::move(tri2);
                lb = std::move(lb2);
                for (const auto& st : rr.stages) pb.stages.push_back(st);
            }
        }
        SkeletonReport rep = validate(tri);
        detail::BoundaryView bv = detail::boundary_view(tri);
        for (auto& lb : labels) {
            lb.component = detail::component_of_face(bv, lb.anchor_tet, lb.anchor_face);
            if (!lb.labeled()) throw std::logic_error("build_sfs: bundle boundary is unlabelled");
            pb.prepared.push_back(detail::prepare_torus(tri, rep, lb));
            for (const Slope& f : pb.prepared.back().frame)
                if (!(f == Slope(0, 1) || f == Slope(1, 0) || f == Slope(1, 1)))
                    throw std::logic_error("build_sfs: bundle ledger is not in section-fibre form");
        }
        pb.tri = std::move(tri);
        return bundles_.emplace(key, std::move(pb)).first->second;
    }
};

// Seifert fibered space over the base described by d, built as a circle
// bundle over an enlarged base with each extra boundary torus Dehn filled
// along its fibre invariant.
inline std::pair<Triangulation, BuildReport> build_sfs(const SeifertData& d) {
    SfsAssembler assembler;
    SfsAssembler::Result r = assembler.build(d);
    SkeletonReport rep = validate(r.tri);
    if (!rep.valid_manifold || !rep.orientable) throw std::logic_error("build_sfs: result failed validation");
    if (static_cast<long>(rep.boundary_components.size()) != d.b)
        throw std::logic_error("build_sfs: wrong boundary component count");
    for (const SurfaceKind& k : rep.boundary_components)
        if (!k.is_torus()) throw std::logic_error("build_sfs: boundary component is not a torus");
    return {std::move(r.tri), std::move(r.report)};
}

namespace detail {

// Barycentric subdivision of a surface: six triangles per triangle, children
// (corner v, midpoint of edge e, centre) for v an endpoint of edge e.
inline SurfaceTriangulation subdivide_surface(const SurfaceTriangulation& s) {
    const int n = s.triangle_count();
    SurfaceTriangulation out(6 * n);
    // child (t, e, k): corners (endpoint k of e, midpoint of e, centre)
    auto child = [](int t, int e, int k) { return 6 * t + 2 * e + k; };
    for (int t = 0; t < n; ++t) {
        for (int v = 0; v < 3; ++v) {
            // the two edges at corner v meet along the spoke (v, centre)
            std::array<int, 2> es{};
            int m = 0;
            for (int e = 0; e < 3; ++e)
                if (e != v) es[m++] = e;
            auto end_pos = [&](int e) {
                auto [lo, hi] = surface_edge_vertices(e);
                return v == lo ? 0 : 1;
            };
            out.glue(child(t, es[0], end_pos(es[0])), 1, child(t, es[1], end_pos(es[1])), 1, false);
        }
        // the two children of an edge share the midpoint-centre median
        for (int e = 0; e < 3; ++e) out.glue(child(t, e, 0), 0, child(t, e, 1), 0, false);
        for (int e = 0; e < 3; ++e) {
            if (!s.is_glued(t, e)) continue;
            auto g = s.gluing(t, e);
            if (!(std::make_pair(t, e) < std::make_pair(g.tri, g.edge))) continue;
            for (int k = 0; k < 2; ++k)
                out.glue(child(t, e, k), 2, child(g.tri, g.edge, g.flip ? 1 - k : k), 2, false);
        }
    }
    return out;
}

inline bool surface_is_simplicial(const SurfaceTriangulation& s, const SurfaceSkeleton& ssk) {
    std::set<std::pair<int, int>> edge_pairs;
    std::set<int> seen_edges;
    std::set<std::array<int, 3>> seen_tris;
    for (int t = 0; t < s.triangle_count(); ++t) {
        std::array<int, 3> corners{ssk.vertex_class_of[3 * t], ssk.vertex_class_of[3 * t + 1],
                                   ssk.vertex_class_of[3 * t + 2]};
        std::array<int, 3> sorted = corners;
        std::sort(sorted.begin(), sorted.end());
        if (sorted[0] == sorted[1] || sorted[1] == sorted[2]) return false;
        if (!seen_tris.insert(sorted).second) return false;
        for (int e = 0; e < 3; ++e) {
            int cls = ssk.edge_class_of[3 * t + e];
            if (!seen_edges.insert(cls).second) continue;
            auto [lo, hi] = surface_edge_vertices(e);
            std::pair<int, int> ends{std::min(corners[lo], corners[hi]), std::max(corners[lo], corners[hi])};
            if (ends.first == ends.second) return false;
            if (!edge_pairs.insert(ends).second) return false;
        }
    }
    return true;
}

// Assemble tetrahedra given by distinct vertex-label 4-sets, gluing faces
// with equal label triples.  Corner i of a tet is its i-th smallest label.
inline Triangulation assemble_simplicial(const std::vector<std::array<int, 4>>& tets) {
    Triangulation out(static_cast<int>(tets.size()));
    std::map<std::array<int, 3>, std::vector<std::pair<int, int>>> slots;
    std::vector<std::array<int, 4>> sorted(tets);
    for (auto& q : sorted) {
        std::sort(q.begin(), q.end());
        if (q[0] == q[1] || q[1] == q[2] || q[2] == q[3])
            throw std::logic_error("assemble_simplicial: repeated label in a tetrahedron");
    }
    for (int t = 0; t < static_cast<int>(sorted.size()); ++t)
        for (int f = 0; f < 4; ++f) {
            std::array<int, 3> triple{};
            int m = 0;
            for (int v = 0; v < 4; ++v)
                if (v != f) triple[m++] = sorted[t][v];
            slots[triple].push_back({t, f});
        }
    for (const auto& [triple, where] : slots) {
        if (where.size() == 1) continue;
        if (where.size() != 2) throw std::logic_error("assemble_simplicial: face shared by more than two tets");
        auto [t1, f1] = where[0];
        auto [t2, f2] = where[1];
        std::array<int, 4> img{-1, -1, -1, -1};
        img[f1] = f2;
        for (int v = 0; v < 4; ++v) {
            if (v == f1) continue;
            int label = sorted[t1][v];
            for (int w = 0; w < 4; ++w)
                if (sorted[t2][w] == label) img[v] = w;
        }
        out.glue(t1, f1, t2, f2, VertexPerm::from_images(img[0], img[1], img[2], img[3]));
    }
    return out;
}

}  // namespace detail

// Triangulation of D^2 x I inducing the annulus A on its vertical boundary:
// cone A to a centre point, then cone each boundary circle's fan to a point
// on the end disc.  Non-simplicial annuli are subdivided once first.
inline std::pair<Triangulation, BuildReport> cone_annulus_to_d2xi(const SurfaceTriangulation& A) {
    SurfaceTriangulation work = A;
    SurfaceSkeleton ssk = surface_skeleton(work);
    auto is_annulus = [](const SurfaceSkeleton& k) {
        return k.components == 1 && k.orientable && k.chi == 0 && k.boundary_circles.size() == 2;
    };
    if (!is_annulus(ssk)) throw std::invalid_argument("cone_annulus_to_d2xi: input is not an annulus");
    bool subdivided = false;
    if (!detail::surface_is_simplicial(work, ssk)) {
        work = detail::subdivide_surface(work);
        ssk = surface_skeleton(work);
        subdivided = true;
        if (!is_annulus(ssk) || !detail::surface_is_simplicial(work, ssk))
            throw std::invalid_argument("cone_annulus_to_d2xi: annulus is not simplicial after subdivision");
    }

    const int V = static_cast<int>(ssk.vertex_classes);
    const int centre = V;
    std::vector<std::array<int, 4>> tets;
    for (int t = 0; t < work.triangle_count(); ++t)
        tets.push_back({ssk.vertex_class_of[3 * t], ssk.vertex_class_of[3 * t + 1],
                        ssk.vertex_class_of[3 * t + 2], centre});
    int boundary_cells = 0;
    for (std::size_t i = 0; i < ssk.boundary_circles.size(); ++i) {
        int apex = V + 1 + static_cast<int>(i);
        for (auto [t, e] : ssk.boundary_circles[i]) {
            auto [lo, hi] = surface_edge_vertices(e);
            tets.push_back({ssk.vertex_class_of[3 * t + lo], ssk.vertex_class_of[3 * t + hi], centre, apex});
            ++boundary_cells;
        }
    }
    Triangulation out = detail::assemble_simplicial(tets);

    BuildReport report;
    report.budget = 3 * work.triangle_count();
    if (subdivided) report.add_stage("subdivide", 0);
    report.add_stage("cone annulus", work.triangle_count());
    report.add_stage("cone end discs", boundary_cells);
    if (report.tets_used > report.budget) throw std::logic_error("cone_annulus_to_d2xi: budget exceeded");

    SkeletonReport rep = validate(out);
    if (!rep.valid_manifold || rep.boundary_components.size() != 1 ||
        !rep.boundary_components[0].is_sphere())
        throw std::logic_error("cone_annulus_to_d2xi: result is not a ball");
    return {std::move(out), std::move(report)};
}

namespace detail {

struct IdealOrbits {
    int vertex_classes = 0;
    std::vector<int> vertex_class_of;  // 4t + v
    std::vector<long> link_chi;        // per vertex class
};

// Vertex classes of a boundaryless triangulation viewed as an ideal complex,
// with the Euler characteristic of each vertex link counted from edge-end and
// corner orbits (no link surface is built).
inline IdealOrbits ideal_orbits(const Triangulation& tri) {
    const int n = tri.tet_count();
    ClassIds vclasses(4 * n);
    ParityUnionFind vuf(4 * n);
    ParityUnionFind huf(12 * n);  // ordered edge ends (t, a, b), a = the near end
    auto hidx = [](int t, int a, int b) { return 12 * t + 3 * a + (b > a ? b - 1 : b); };
    for (int t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            if (!tri.is_glued(t, f)) throw std::invalid_argument("ideal_orbits: input has boundary faces");
            const Gluing& g = tri.gluing(t, f);
            for (int v = 0; v < 4; ++v) {
                if (v == f) continue;
                vuf.unite(4 * t + v, 4 * g.tet + g.perm[v], 0);
                for (int w = 0; w < 4; ++w) {
                    if (w == f || w == v) continue;
                    huf.unite(hidx(t, v, w), hidx(g.tet, g.perm[v], g.perm[w]), 0);
                }
            }
        }
    IdealOrbits out;
    out.vertex_class_of.resize(4 * n);
    for (int i = 0; i < 4 * n; ++i) out.vertex_class_of[i] = vclasses.assign(vuf.find(i).first);
    out.vertex_classes = vclasses.count();

    std::vector<long> corners(out.vertex_classes, 0);
    for (int i = 0; i < 4 * n; ++i) ++corners[out.vertex_class_of[i]];
    std::vector<long> ends(out.vertex_classes, 0);
    std::set<int> seen;
    for (int t = 0; t < n; ++t)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                if (a == b) continue;
                int root = huf.find(hidx(t, a, b)).first;
                if (!seen.insert(root).second) continue;
                ++ends[out.vertex_class_of[4 * t + a]];
            }
    out.link_chi.resize(out.vertex_classes);
    for (int c = 0; c < out.vertex_classes; ++c) {
        if (corners[c] % 2 != 0) throw std::logic_error("ideal_orbits: odd corner count in a vertex link");
        out.link_chi[c] = ends[c] - corners[c] / 2;
    }
    return out;
}

}  // namespace detail

// Material triangulation of the manifold obtained by truncating every ideal
// vertex of T: cut the corners, cone each hexagonal face from its lowest
// vertex (chosen on the lex-smaller side of the gluing), and cone each
// truncated cell from a vertex of maximal valence.
inline std::pair<Triangulation, BuildReport> truncate_ideal(const Triangulation& X) {
    if (!X.boundary_faces().empty()) throw std::invalid_argument("truncate_ideal: input has boundary faces");
    const int n = X.tet_count();

    // local truncation vertices: pair (x, y), x != y, sits on edge (x, y) near x
    auto pidx = [](int x, int y) { return 3 * x + (y > x ? y - 1 : y); };
    auto glabel = [&](int t, std::pair<int, int> p) { return 12 * t + pidx(p.first, p.second); };

    // hexagon fan triangles per (tet, face), as local vertex pairs
    std::vector<std::array<std::array<std::pair<int, int>, 3>, 4>> fans(
        static_cast<std::size_t>(n), std::array<std::array<std::pair<int, int>, 3>, 4>{});
    std::vector<std::array<bool, 4>> fan_set(static_cast<std::size_t>(n), {false, false, false, false});
    std::vector<std::vector<std::array<std::pair<int, int>, 3>>> fan_list(
        static_cast<std::size_t>(n) * 4);
    for (int t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = X.gluing(t, f);
            if (!(std::make_pair(t, f) < std::make_pair(g.tet, g.face))) continue;
            auto fv = face_vertices(f);
            std::array<std::pair<int, int>, 6> cycle{
                std::make_pair(fv[0], fv[1]), std::make_pair(fv[1], fv[0]), std::make_pair(fv[1], fv[2]),
                std::make_pair(fv[2], fv[1]), std::make_pair(fv[2], fv[0]), std::make_pair(fv[0], fv[2])};
            int w = 0;
            for (int i = 1; i < 6; ++i)
                if (cycle[i] < cycle[w]) w = i;
            for (int k = 0; k < 4; ++k) {
                std::array<std::pair<int, int>, 3> tri{cycle[w], cycle[(w + k + 1) % 6], cycle[(w + k + 2) % 6]};
                fan_list[static_cast<std::size_t>(t) * 4 + f].push_back(tri);
                std::array<std::pair<int, int>, 3> other;
                for (int j = 0; j < 3; ++j) other[j] = {g.perm[tri[j].first], g.perm[tri[j].second]};
                fan_list[static_cast<std::size_t>(g.tet) * 4 + g.face].push_back(other);
            }
        }

    // cone each truncated cell from its highest-valence truncation vertex
    std::vector<std::array<int, 4>> tets;
    std::vector<std::map<std::array<int, 3>, std::pair<int, int>>> cell_slots(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        std::vector<std::array<int, 3>> cell;  // local vertex indices 0..11
        for (int x = 0; x < 4; ++x) {
            std::array<int, 3> corner{};
            int m = 0;
            for (int y = 0; y < 4; ++y)
                if (y != x) corner[m++] = pidx(x, y);
            std::sort(corner.begin(), corner.end());
            cell.push_back(corner);
        }
        for (int f = 0; f < 4; ++f)
            for (const auto& tri : fan_list[static_cast<std::size_t>(t) * 4 + f]) {
                std::array<int, 3> loc{pidx(tri[0].first, tri[0].second), pidx(tri[1].first, tri[1].second),
                                       pidx(tri[2].first, tri[2].second)};
                std::sort(loc.begin(), loc.end());
                cell.push_back(loc);
            }
        if (cell.size() != 20) throw std::logic_error("truncate_ideal: cell boundary miscount");

        std::array<int, 12> valence{};
        for (const auto& tri : cell)
            for (int v : tri) ++valence[v];
        int apex = 0;
        for (int v = 1; v < 12; ++v)
            if (valence[v] > valence[apex]) apex = v;
        if (valence[apex] < 6) throw std::logic_error("truncate_ideal: cone vertex valence below six");

        for (const auto& tri : cell) {
            if (std::find(tri.begin(), tri.end(), apex) != tri.end()) continue;
            std::array<int, 4> q{12 * t + tri[0], 12 * t + tri[1], 12 * t + tri[2], 12 * t + apex};
            std::sort(q.begin(), q.end());
            tets.push_back(q);
        }
    }

    // face slots by label triple, per cell
    Triangulation out(static_cast<int>(tets.size()));
    std::map<std::array<int, 3>, std::vector<std::pair<int, int>>> slots;
    for (int i = 0; i < static_cast<int>(tets.size()); ++i)
        for (int f = 0; f < 4; ++f) {
            std::array<int, 3> triple{};
            int m = 0;
            for (int v = 0; v < 4; ++v)
                if (v != f) triple[m++] = tets[static_cast<std::size_t>(i)][v];
            slots[triple].push_back({i, f});
        }
    auto glue_slots = [&](std::pair<int, int> s1, std::pair<int, int> s2,
                          const std::map<int, int>& label_map) {
        std::array<int, 4> img{-1, -1, -1, -1};
        for (int v = 0; v < 4; ++v) {
            int lab = tets[static_cast<std::size_t>(s1.first)][v];
            int target = v == s1.second ? -1 : label_map.count(lab) ? label_map.at(lab) : -1;
            if (v == s1.second) {
                img[v] = s2.second;
                continue;
            }
            for (int w = 0; w < 4; ++w)
                if (tets[static_cast<std::size_t>(s2.first)][w] == target) img[v] = w;
        }
        out.glue(s1.first, s1.second, s2.first, s2.second,
                 VertexPerm::from_images(img[0], img[1], img[2], img[3]));
    };
    // identity label map inside a cell
    for (const auto& [triple, where] : slots) {
        if (where.size() == 1) continue;
        if (where.size() != 2) throw std::logic_error("truncate_ideal: face shared by more than two tets");
        std::map<int, int> id;
        for (int lab : triple) id[lab] = lab;
        glue_slots(where[0], where[1], id);
    }
    // hexagon fans glue across the original face pairings
    for (int t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = X.gluing(t, f);
            if (!(std::make_pair(t, f) < std::make_pair(g.tet, g.face))) continue;
            for (const auto& tri : fan_list[static_cast<std::size_t>(t) * 4 + f]) {
                std::array<int, 3> a{}, b{};
                std::map<int, int> label_map;
                for (int j = 0; j < 3; ++j) {
                    a[j] = glabel(t, tri[j]);
                    b[j] = glabel(g.tet, {g.perm[tri[j].first], g.perm[tri[j].second]});
                    label_map[a[j]] = b[j];
                }
                std::sort(a.begin(), a.end());
                std::sort(b.begin(), b.end());
                const auto &sa = slots.at(a), &sb = slots.at(b);
                if (sa.size() != 1 || sb.size() != 1)
                    throw std::logic_error("truncate_ideal: hexagon triangle is not a free face");
                glue_slots(sa[0], sb[0], label_map);
            }
        }

    BuildReport report;
    report.budget = 14 * n;
    report.add_stage("truncate cells", out.tet_count());
    if (report.tets_used > report.budget) throw std::logic_error("truncate_ideal: budget exceeded");

    SkeletonReport rep = validate(out);
    if (!rep.valid_manifold) throw std::logic_error("truncate_ideal: result failed validation");
    detail::IdealOrbits orbits = detail::ideal_orbits(X);
    std::vector<long> want(orbits.link_chi), got;
    for (const SurfaceKind& k : rep.boundary_components) got.push_back(k.chi);
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got) throw std::logic_error("truncate_ideal: boundary does not match the ideal vertex links");
    return {std::move(out), std::move(report)};
}

}  // namespace sftri
