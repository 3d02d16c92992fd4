// Acceptance suite: one line per criterion, pass/fail plus elapsed time.
// Runs against the library only; exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sftri/builders.hpp>
#include <sftri/cli.hpp>
#include <sftri/farey.hpp>
#include <sftri/homology.hpp>
#include <sftri/seifert.hpp>
#include <sftri/signature.hpp>
#include <sftri/skeleton.hpp>
#include <sftri/slope.hpp>
#include <sftri/subdivide.hpp>
#include <sftri/triangulation.hpp>

#include "fixtures.hpp"

namespace {

using namespace sftri;

int failures = 0;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

void criterion(int number, const std::string& title, double budget_seconds,
               const std::function<void(std::string&)>& body) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    std::string why;
    bool ok = true;
    try {
        body(detail);
    } catch (const std::exception& e) {
        ok = false;
        why = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && secs > budget_seconds) {
        ok = false;
        why = "time budget exceeded (" + std::to_string(budget_seconds) + "s)";
    }
    std::ostringstream line;
    line << (ok ? "pass" : "FAIL") << "  " << std::setw(2) << number << "  " << title;
    if (!detail.empty()) line << " (" << detail << ")";
    line << "  [" << std::fixed << std::setprecision(2) << secs << "s]";
    if (!ok) line << "  -- " << why;
    std::cout << line.str() << "\n" << std::flush;
    if (!ok) ++failures;
}

bool reduced(long p, long q) { return gcd_int(Int(p), Int(q)) == 1; }

std::string at(long p, long q) { return " at " + std::to_string(q) + "/" + std::to_string(p); }

// Annulus triangulated as a ladder of 2n triangles: lower row i, upper row n+i.
SurfaceTriangulation ladder_annulus(int n) {
    SurfaceTriangulation s(2 * n);
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        s.glue(i, 0, n + i, 1, false);
        s.glue(n + i, 2, j, 1, false);
    }
    return s;
}

Triangulation two_tet_ideal(long codes) {
    Triangulation t(2);
    for (int f = 0; f < 4; ++f) {
        t.glue(0, f, 1, f, VertexPerm::from_code(static_cast<int>(codes % 24)));
        codes /= 24;
    }
    return t;
}

Triangulation three_tet_ideal(const std::array<int, 6>& codes) {
    Triangulation t(3);
    t.glue(0, 0, 1, 0, VertexPerm::from_code(codes[0]));
    t.glue(0, 1, 1, 1, VertexPerm::from_code(codes[1]));
    t.glue(0, 2, 2, 0, VertexPerm::from_code(codes[2]));
    t.glue(0, 3, 2, 1, VertexPerm::from_code(codes[3]));
    t.glue(1, 2, 2, 2, VertexPerm::from_code(codes[4]));
    t.glue(1, 3, 2, 3, VertexPerm::from_code(codes[5]));
    return t;
}

std::vector<std::string> boundary_kinds(const SkeletonReport& rep) {
    std::vector<std::string> out;
    for (const SurfaceKind& k : rep.boundary_components) out.push_back(k.str());
    std::sort(out.begin(), out.end());
    return out;
}

// Interior edge-link lengths present in a complex, as a set.
std::set<long> interior_link_lengths(const SkeletonReport& rep) {
    std::set<long> out;
    for (size_t e = 0; e < rep.edge_link_lengths.size(); ++e)
        if (!rep.edge_class_boundary[e]) out.insert(rep.edge_link_lengths[e]);
    return out;
}

void c1_norm_symmetries(std::string& detail) {
    long checked = 0;
    for (long p = 2; p <= 200; ++p)
        for (long q = 1; q < p; ++q) {
            if (!reduced(p, q)) continue;
            Int n = norm(Slope(q, p));
            require(n == norm(Slope(p - q, p)), "norm(q/p) != norm((p-q)/p)" + at(p, q));
            require(n == norm(Slope(p, q)), "norm(q/p) != norm(p/q)" + at(p, q));
            ++checked;
        }
    detail = std::to_string(checked) + " slopes";
}

void c2_farey_distance(std::string& detail) {
    long checked = 0;
    for (long p = 2; p <= 50; ++p)
        for (long q = 1; q < p; ++q) {
            if (!reduced(p, q)) continue;
            Slope s(q, p);
            long steps = static_cast<long>(norm(s)) - 1;
            long dist = farey_line_distance_oracle(Slope::infinity(), s, steps + 2);
            require(dist == steps, "oracle distance != norm - 1" + at(p, q));
            std::vector<FareyTriangle> walk = farey_walk(s, better_base(s));
            require(static_cast<long>(walk.size()) - 1 == steps, "walk length != norm - 1" + at(p, q));
            ++checked;
        }
    detail = std::to_string(checked) + " slopes";
}

void c3_lst_contract(std::string& detail) {
    long checked = 0;
    for (long p = 2; p <= 30; ++p)
        for (long q = 1; q < p; ++q) {
            if (!reduced(p, q)) continue;
            auto [tri, label, report] = standalone_lst(p, q);
            SkeletonReport rep = validate(tri);
            require(rep.valid_manifold, "invalid triangulation" + at(p, q));
            require(rep.orientable, "nonorientable" + at(p, q));
            require(rep.boundary_components.size() == 1 && rep.boundary_components[0].is_torus(),
                    "boundary is not one torus" + at(p, q));
            require(homology(tri, rep, 1) == AbelianGroup(1, {}), "H1 != Z" + at(p, q));
            Slope k = peripheral_kernel(tri, rep,
                                        peripheral_basis(tri, rep, label.component, label.mu, label.lambda));
            require(k.p == p && abs(k.q) == q, "kernel != +-(p,q)" + at(p, q));
            require(report.tets_used <= norm(Slope(q, p)) + 2, "tets above norm + 2" + at(p, q));
            ++checked;
        }
    detail = std::to_string(checked) + " slopes";
}

void c4_build_grid(std::string& detail) {
    // rank of the predicted H1 depends only on the base: |2 - chi| with an
    // orientable base, |1 - chi| otherwise.
    std::vector<std::vector<Slope>> probes = {
        {}, {Slope(1, 2)}, {Slope(11, 12), Slope(11, 12), Slope(11, 12)}};
    for (int o = 0; o < 2; ++o) {
        bool orientable = o == 0;
        for (long a = orientable ? 0 : 1; 2 - a - 1 >= -4; a += orientable ? 2 : 1)
            for (long b = 1; b <= 3 && 2 - a - b >= -4; ++b)
                for (const std::vector<Slope>& fs : probes) {
                    SeifertData d{orientable, a, b, fs};
                    long chi = 2 - a - b;
                    long want = orientable ? std::abs(2 - chi) : std::abs(1 - chi);
                    require(expected_h1(d).rank == want,
                            "predicted rank breaks the base formula at a=" + std::to_string(a) +
                                " b=" + std::to_string(b));
                }
    }
    std::ostringstream table;
    cli::GridOutcome g = cli::run_grid(12, -4, table);
    require(g.failures == 0, std::to_string(g.failures) + " grid failures of " +
                                 std::to_string(g.instances) + ":\n" + table.str());
    require(g.instances == 345920, "unexpected instance census: " + std::to_string(g.instances));
    detail = std::to_string(g.instances) + " instances";
}

void c5_spot_instance(std::string& detail) {
    SeifertData d{true, 0, 1, {Slope(1, 2), Slope(1, 3)}};
    auto [tri, report] = build_sfs(d);
    require(report.tets_used <= 622, "more than 622 tets: " + std::to_string(report.tets_used));
    SkeletonReport rep = validate(tri);
    require(rep.valid_manifold, "invalid triangulation");
    require(homology(tri, rep, 1) == AbelianGroup(1, {}), "H1 != Z");
    detail = std::to_string(report.tets_used) + " tets";
}

void c6_subdivision_invariants(std::string& detail) {
    std::vector<std::pair<std::string, Triangulation>> inputs;
    inputs.emplace_back("closed 2-tet", fixtures::doubled_tet());
    inputs.emplace_back("solid torus", one_tet_solid_torus().first);
    long deepest = 0;
    for (const auto& [name, input] : inputs) {
        SkeletonReport before = validate(input);
        require(before.valid_manifold, name + ": input invalid");
        Triangulation sd = barycentric_subdivide(input);
        SkeletonReport after = validate(sd);
        require(sd.tet_count() == 24 * input.tet_count(), name + ": not exactly 24x tets");
        require(after.valid_manifold, name + ": subdivision invalid");
        require(after.euler_characteristic == before.euler_characteristic, name + ": chi changed");
        require(after.orientable == before.orientable, name + ": orientability changed");
        require(boundary_kinds(after) == boundary_kinds(before), name + ": boundary topology changed");
        require(homology(sd, after, 1) == homology(input, before, 1), name + ": H1 changed");

        std::set<long> links1 = interior_link_lengths(after);
        for (long L : links1)
            require(L == 4 || L == 6, name + ": interior link of length " + std::to_string(L));

        Triangulation deep = sd;
        for (int i = 0; i < 3; ++i) deep = barycentric_subdivide(deep);
        SkeletonReport drep = validate(deep);
        require(drep.valid_manifold, name + ": deep subdivision invalid");
        std::set<long> links4 = interior_link_lengths(drep);
        for (long L : links1)
            require(links4.count(8 * L) == 1,
                    name + ": link length " + std::to_string(L) + " not multiplied by 8");
        require(*links4.rbegin() == 8 * *links1.rbegin(),
                name + ": largest link is not 8x the subdivided largest");
        deepest = std::max(deepest, static_cast<long>(deep.tet_count()));
    }
    detail = "largest complex " + std::to_string(deepest) + " tets";
}

void c7_cone_annuli(std::string& detail) {
    long checked = 0;
    for (int n = 3; n <= 30; ++n) {
        SurfaceTriangulation A = ladder_annulus(n);
        std::string tag = " on the " + std::to_string(2 * n) + "-triangle annulus";
        auto [tri, report] = cone_annulus_to_d2xi(A);
        require(tri.tet_count() == 2 * n + 2 * n, "tets != |A| + |bdA|" + tag);
        require(tri.tet_count() <= 3 * (2 * n), "tets above 3|A|" + tag);
        SkeletonReport rep = validate(tri);
        require(rep.valid_manifold && rep.orientable, "not a valid orientable complex" + tag);
        require(rep.boundary_components.size() == 1 && rep.boundary_components[0].is_sphere(),
                "boundary is not one sphere" + tag);
        require(homology(tri, rep, 1).trivial(), "H1 nontrivial" + tag);
        ++checked;
    }
    detail = std::to_string(checked) + " annuli";
}

void c8_ideal_truncation(std::string& detail) {
    std::vector<Triangulation> inputs;
    inputs.push_back(two_tet_ideal(363));
    inputs.push_back(two_tet_ideal(364));
    inputs.push_back(three_tet_ideal({0, 0, 8, 3, 6, 2}));
    inputs.push_back(three_tet_ideal({0, 0, 8, 3, 21, 14}));
    for (size_t i = 0; i < inputs.size(); ++i) {
        const Triangulation& X = inputs[i];
        std::string tag = " on input " + std::to_string(i);
        sftri::detail::IdealOrbits orbits = sftri::detail::ideal_orbits(X);
        for (long chi : orbits.link_chi)
            require(chi == 0, "vertex link is not flat" + tag);
        auto [cut, report] = truncate_ideal(X);
        require(cut.tet_count() <= 14 * X.tet_count(), "more than 14 tets per input tet" + tag);
        SkeletonReport rep = validate(cut);
        require(rep.valid_manifold, "truncation invalid" + tag);
        require(static_cast<long>(rep.boundary_components.size()) == orbits.vertex_classes,
                "boundary components != ideal vertex classes" + tag);
        for (const SurfaceKind& k : rep.boundary_components)
            require(k.is_torus(), "boundary component is not a torus" + tag);
    }
    detail = std::to_string(inputs.size()) + " complexes";
}

void c9_solid_torus_floor(std::string& detail) {
    auto [tri, label] = one_tet_solid_torus();
    require(tri.tet_count() == 1, "not one tetrahedron");
    SkeletonReport rep = validate(tri);
    require(rep.valid_manifold && rep.orientable, "not a valid orientable complex");
    require(rep.boundary_components.size() == 1 && rep.boundary_components[0].is_torus(),
            "boundary is not one torus");
    require(homology(tri, rep, 1) == AbelianGroup(1, {}), "H1 != Z");
    Slope meridian = peripheral_kernel(
        tri, rep, peripheral_basis(tri, rep, label.component, label.mu, label.lambda));
    require(meridian.p == 1 && abs(meridian.q) == 2, "peripheral kernel is not the meridian");
    detail = "meridian " + meridian.str();
}

void c10_signature_determinism(std::string& detail) {
    std::vector<SeifertData> samples = {
        {true, 0, 1, {Slope(1, 2), Slope(1, 3)}},
        {false, 1, 1, {}},
    };
    std::mt19937 rng(20260823u);
    size_t len = 0;
    for (const SeifertData& d : samples) {
        auto [t1, r1] = build_sfs(d);
        auto [t2, r2] = build_sfs(d);
        std::string sig = canonical_signature(t1);
        require(canonical_signature(t2) == sig, "rebuild changed the signature");
        for (int i = 0; i < 6; ++i) {
            Triangulation shuffled = fixtures::random_relabel(t1, rng);
            require(canonical_signature(shuffled) == sig, "relabeling changed the signature");
        }
        len = std::max(len, sig.size());
    }
    detail = "longest signature " + std::to_string(len) + " chars";
}

}  // namespace

int main() {
    criterion(1, "continued-fraction norm symmetries, p <= 200", 1, c1_norm_symmetries);
    criterion(2, "Farey distance equals norm minus one, p <= 50", 10, c2_farey_distance);
    criterion(3, "layered solid torus contract, p <= 30", 60, c3_lst_contract);
    criterion(4, "Seifert build grid, chi in [-4,1], p <= 12", 600, c4_build_grid);
    criterion(5, "spot build: disc with fibres (2,1) and (3,1)", 60, c5_spot_instance);
    criterion(6, "barycentric subdivision invariants", 60, c6_subdivision_invariants);
    criterion(7, "coning simplicial annuli, 6 <= |A| <= 60", 10, c7_cone_annuli);
    criterion(8, "ideal truncation on torus-link complexes", 10, c8_ideal_truncation);
    criterion(9, "one-tetrahedron solid torus floor", 60, c9_solid_torus_floor);
    criterion(10, "canonical signature under relabeling", 60, c10_signature_determinism);
    if (failures == 0)
        std::cout << "acceptance: all criteria pass\n";
    else
        std::cout << "acceptance: " << failures << " criteria FAILED\n";
    return failures == 0 ? 0 : 1;
}
