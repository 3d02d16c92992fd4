#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "sftri/homology.hpp"
#include "sftri/intmatrix.hpp"
#include "sftri/moves.hpp"
#include "sftri/subdivide.hpp"

using namespace sftri;
using fixtures::doubled_tet;
using fixtures::free_tet;
using fixtures::one_tet_solid_torus;
using fixtures::random_relabel;
using fixtures::torus_times_interval;
using fixtures::torus_times_interval_grid;

namespace {

using Rat = boost::multiprecision::cpp_rational;

IntMatrix mk(const std::vector<std::vector<long long>>& rows) {
    int r = static_cast<int>(rows.size());
    int c = r ? static_cast<int>(rows[0].size()) : 0;
    IntMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
    return m;
}

Int det_laplace(const std::vector<std::vector<Int>>& m) {
    int n = static_cast<int>(m.size());
    if (n == 0) return 1;
    if (n == 1) return m[0][0];
    Int out = 0;
    for (int j = 0; j < n; ++j) {
        if (m[0][j] == 0) continue;
        std::vector<std::vector<Int>> minor;
        for (int i = 1; i < n; ++i) {
            std::vector<Int> row;
            for (int k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(std::move(row));
        }
        out += ((j % 2) ? -1 : 1) * m[0][j] * det_laplace(minor);
    }
    return out;
}

Int det_laplace(const IntMatrix& m) {
    std::vector<std::vector<Int>> v(m.rows(), std::vector<Int>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) v[i][j] = m.at(i, j);
    return det_laplace(v);
}

// invariant factors via gcds of k x k minors
std::vector<Int> snf_minors_oracle(const IntMatrix& m) {
    int r = m.rows(), c = m.cols(), n = std::min(r, c);
    std::vector<Int> d(n + 1);
    d[0] = 1;
    for (int k = 1; k <= n; ++k) {
        Int g = 0;
        for (unsigned rm = 0; rm < (1u << r); ++rm) {
            if (__builtin_popcount(rm) != k) continue;
            for (unsigned cm = 0; cm < (1u << c); ++cm) {
                if (__builtin_popcount(cm) != k) continue;
                std::vector<std::vector<Int>> sub;
                for (int i = 0; i < r; ++i) {
                    if (!(rm & (1u << i))) continue;
                    std::vector<Int> row;
                    for (int j = 0; j < c; ++j)
                        if (cm & (1u << j)) row.push_back(m.at(i, j));
                    sub.push_back(std::move(row));
                }
                Int dd = det_laplace(sub);
                if (dd < 0) dd = -dd;
                g = gcd_int(g, dd);
            }
        }
        d[k] = g;
    }
    std::vector<Int> factors(n);
    for (int k = 1; k <= n; ++k) factors[k - 1] = (d[k] == 0) ? Int(0) : Int(d[k] / d[k - 1]);
    return factors;
}

int rank_rational(std::vector<std::vector<Rat>> m) {
    if (m.empty()) return 0;
    int rows = static_cast<int>(m.size()), cols = static_cast<int>(m[0].size());
    int rank = 0;
    std::vector<bool> used(rows, false);
    for (int j = 0; j < cols; ++j) {
        int pr = -1;
        for (int i = 0; i < rows; ++i)
            if (!used[i] && m[i][j] != 0) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        used[pr] = true;
        ++rank;
        for (int i = 0; i < rows; ++i) {
            if (i == pr || m[i][j] == 0) continue;
            Rat f = m[i][j] / m[pr][j];
            for (int l = j; l < cols; ++l) m[i][l] -= f * m[pr][l];
        }
    }
    return rank;
}

std::vector<std::vector<Rat>> rat_columns(const IntMatrix& m, const std::vector<std::vector<Int>>& extra) {
    std::vector<std::vector<Rat>> out(m.rows(), std::vector<Rat>(m.cols() + extra.size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out[i][j] = Rat(m.at(i, j));
    for (size_t e = 0; e < extra.size(); ++e)
        for (int i = 0; i < m.rows(); ++i) out[i][m.cols() + e] = Rat(extra[e][i]);
    return out;
}

std::vector<int> boundary_edge_classes(const SkeletonReport& rep) {
    std::vector<int> out;
    for (int c = 0; c < rep.edge_classes; ++c)
        if (rep.edge_class_boundary[c]) out.push_back(c);
    return out;
}

bool is_zero(const IntMatrix& m) { return m == IntMatrix(m.rows(), m.cols()); }

}  // namespace

TEST_CASE("smith normal form frozen examples", "[homology]") {
    auto f1 = smith_normal_form(mk({{2, 0, 1}, {0, 3, 1}})).factors;
    CHECK(f1 == std::vector<Int>{1, 1});
    CHECK(smith_normal_form(IntMatrix::identity(3)).factors == std::vector<Int>{1, 1, 1});
    CHECK(smith_normal_form(mk({{6}})).factors == std::vector<Int>{6});
    CHECK(smith_normal_form(IntMatrix(2, 2)).factors == std::vector<Int>{0, 0});
    CHECK(smith_normal_form(mk({{2, 4}, {4, 2}})).factors == std::vector<Int>{2, 6});
}

TEST_CASE("smith normal form agrees with the minors oracle", "[homology]") {
    std::mt19937 rng(402211);
    for (int trial = 0; trial < 90; ++trial) {
        int r = 1 + static_cast<int>(rng() % 4), c = 1 + static_cast<int>(rng() % 4);
        IntMatrix m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m.at(i, j) = static_cast<long long>(rng() % 19) - 9;
        std::vector<Int> expect = snf_minors_oracle(m);
        SmithNormalForm s = smith_normal_form(m);
        CHECK(s.factors == expect);
        IntMatrix d(r, c);
        for (int k = 0; k < static_cast<int>(s.factors.size()); ++k) d.at(k, k) = s.factors[k];
        CHECK(s.u * m * s.v == d);
        Int du = det_laplace(s.u), dv = det_laplace(s.v);
        CHECK((du == 1 || du == -1));
        CHECK((dv == 1 || dv == -1));
        // the sparse elimination used on big complexes must agree on the nonzero part
        std::vector<detail::Triplet> ts;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j)
                if (m.at(i, j) != 0)
                    ts.push_back({i, j, static_cast<long long>(m.at(i, j).convert_to<long long>())});
        std::vector<Int> nonzero;
        for (const Int& f : expect)
            if (f != 0) nonzero.push_back(f);
        CHECK(detail::sparse_snf_factors(r, c, ts) == nonzero);
    }
}

TEST_CASE("abelian group printing and validation", "[homology]") {
    CHECK(AbelianGroup(0, {}).str() == "0");
    CHECK(AbelianGroup(1, {}).str() == "Z");
    CHECK(AbelianGroup(2, {Int(2), Int(6)}).str() == "Z^2 + Z/2 + Z/6");
    CHECK(AbelianGroup(0, {Int(3)}).str() == "Z/3");
    CHECK(AbelianGroup(1, {}) != AbelianGroup(1, {Int(2)}));
    CHECK_THROWS_AS(AbelianGroup(-1, {}), std::invalid_argument);
    CHECK_THROWS_AS(AbelianGroup(0, {Int(1)}), std::invalid_argument);
    CHECK_THROWS_AS(AbelianGroup(0, {Int(2), Int(3)}), std::invalid_argument);
}

TEST_CASE("chain boundaries compose to zero", "[homology]") {
    for (const Triangulation& fix : {free_tet(), doubled_tet(), one_tet_solid_torus(),
                                     barycentric_subdivide(one_tet_solid_torus()),
                                     layer_on_boundary_edge(one_tet_solid_torus(), 0, 0, 1),
                                     torus_times_interval(), torus_times_interval_grid()}) {
        SkeletonReport rep = validate(fix);
        IntMatrix b1 = boundary_matrix(fix, rep, 1), b2 = boundary_matrix(fix, rep, 2),
                  b3 = boundary_matrix(fix, rep, 3);
        CHECK(b1.rows() == rep.vertex_classes);
        CHECK(b1.cols() == rep.edge_classes);
        CHECK(b2.cols() == rep.face_classes);
        CHECK(b3.cols() == fix.tet_count());
        CHECK(is_zero(b1 * b2));
        CHECK(is_zero(b2 * b3));
    }
    CHECK_THROWS_AS(boundary_matrix(free_tet(), 0), std::invalid_argument);
}

TEST_CASE("homology of the basic fixtures", "[homology]") {
    Triangulation st = one_tet_solid_torus();
    CHECK(homology(st, 0) == AbelianGroup(1, {}));
    CHECK(homology(st, 1) == AbelianGroup(1, {}));
    CHECK(homology(st, 2) == AbelianGroup(0, {}));
    CHECK(homology(st, 3) == AbelianGroup(0, {}));

    Triangulation ball = free_tet();
    for (int k = 1; k <= 3; ++k) CHECK(homology(ball, k).trivial());
    CHECK(homology(ball, 0) == AbelianGroup(1, {}));

    Triangulation sphere3 = doubled_tet();  // two tetrahedra glued along all faces
    CHECK(homology(sphere3, 0) == AbelianGroup(1, {}));
    CHECK(homology(sphere3, 1).trivial());
    CHECK(homology(sphere3, 2).trivial());
    CHECK(homology(sphere3, 3) == AbelianGroup(1, {}));

    CHECK(homology(Triangulation(2), 0) == AbelianGroup(2, {}));
    CHECK_THROWS_AS(homology(ball, 4), std::invalid_argument);
    CHECK_THROWS_AS(homology(ball, -1), std::invalid_argument);

    // two very different triangulations of the same product
    for (const Triangulation& t2i : {torus_times_interval(), torus_times_interval_grid()}) {
        CHECK(homology(t2i, 0) == AbelianGroup(1, {}));
        CHECK(homology(t2i, 1) == AbelianGroup(2, {}));
        CHECK(homology(t2i, 2) == AbelianGroup(1, {}));
        CHECK(homology(t2i, 3).trivial());
    }
}

TEST_CASE("euler characteristic equals the alternating betti sum", "[homology]") {
    for (const Triangulation& fix : {free_tet(), doubled_tet(), one_tet_solid_torus(), torus_times_interval(),
                                     torus_times_interval_grid(), fill_three_faces(free_tet(), 0, 3)}) {
        SkeletonReport rep = validate(fix);
        long chi = 0;
        for (int k = 0; k <= 3; ++k) {
            AbelianGroup h = homology(fix, rep, k);
            chi += (k % 2 ? -1 : 1) * h.rank;
            if (k == 1) CHECK(h.rank <= 6 * fix.tet_count());
        }
        CHECK(chi == rep.euler_characteristic);
    }
}

TEST_CASE("homology is invariant under relabeling and subdivision", "[homology]") {
    std::mt19937 rng(90125);
    for (const Triangulation& fix : {free_tet(), doubled_tet(), one_tet_solid_torus(), torus_times_interval(),
                                     torus_times_interval_grid()}) {
        std::vector<AbelianGroup> base;
        for (int k = 0; k <= 3; ++k) base.push_back(homology(fix, k));
        for (int trial = 0; trial < 3; ++trial) {
            Triangulation rel = random_relabel(fix, rng);
            for (int k = 0; k <= 3; ++k) CHECK(homology(rel, k) == base[k]);
        }
        Triangulation sub = barycentric_subdivide(fix);
        for (int k = 0; k <= 3; ++k) CHECK(homology(sub, k) == base[k]);
    }
}

TEST_CASE("homology is unchanged by layering and filling", "[homology]") {
    Triangulation st = one_tet_solid_torus();
    SkeletonReport rep = validate(st);
    for (int e = 0; e < 6; ++e) {
        if (!rep.edge_class_boundary[rep.edge_class_of[e]]) continue;
        auto [a, b] = edge_vertices(e);
        Triangulation layered = layer_on_boundary_edge(st, 0, a, b);
        for (int k = 0; k <= 3; ++k) CHECK(homology(layered, k) == homology(st, k));
    }
    Triangulation filled = fill_three_faces(free_tet(), 0, 3);
    for (int k = 0; k <= 3; ++k) CHECK(homology(filled, k) == homology(free_tet(), k));
}

TEST_CASE("peripheral basis validation", "[homology]") {
    Triangulation st = one_tet_solid_torus();
    SkeletonReport rep = validate(st);
    std::vector<int> bc = boundary_edge_classes(rep);
    REQUIRE(bc.size() == 3);
    for (int i : bc)
        for (int j : bc)
            if (i != j) CHECK_NOTHROW(peripheral_basis(st, rep, 0, i, j));
    CHECK_THROWS_WITH(peripheral_basis(st, rep, 0, bc[0], bc[0]), Catch::Matchers::ContainsSubstring("distinct"));
    CHECK_THROWS_WITH(peripheral_basis(st, rep, 1, bc[0], bc[1]),
                      Catch::Matchers::ContainsSubstring("no such boundary component"));
    CHECK_THROWS_WITH(peripheral_basis(st, rep, 0, 99, bc[1]), Catch::Matchers::ContainsSubstring("no such edge"));

    Triangulation ball = free_tet();
    SkeletonReport brep = validate(ball);
    CHECK_THROWS_WITH(peripheral_basis(ball, brep, 0, 0, 1), Catch::Matchers::ContainsSubstring("not a torus"));

    // layering buries the flipped edge: interior classes are rejected
    Triangulation layered = layer_on_boundary_edge(st, 0, 0, 1);
    SkeletonReport lrep = validate(layered);
    int interior = -1;
    for (int c = 0; c < lrep.edge_classes; ++c)
        if (!lrep.edge_class_boundary[c]) interior = c;
    REQUIRE(interior >= 0);
    int other = boundary_edge_classes(lrep)[0];
    CHECK_THROWS_WITH(peripheral_basis(layered, lrep, 0, interior, other),
                      Catch::Matchers::ContainsSubstring("not on the boundary"));

    // after subdivision no boundary edge class is a loop
    Triangulation sub = barycentric_subdivide(st);
    SkeletonReport srep = validate(sub);
    std::vector<int> sbc = boundary_edge_classes(srep);
    CHECK_THROWS_WITH(peripheral_basis(sub, srep, 0, sbc[0], sbc[1]),
                      Catch::Matchers::ContainsSubstring("loop"));
}

TEST_CASE("peripheral kernel of the solid torus", "[homology]") {
    Triangulation st = one_tet_solid_torus();
    SkeletonReport rep = validate(st);
    std::vector<int> bc = boundary_edge_classes(rep);
    IntMatrix b2 = boundary_matrix(st, rep, 2);
    int base_rank = rank_rational(rat_columns(b2, {}));
    for (int i : bc)
        for (int j : bc) {
            if (i == j) continue;
            PeripheralBasis b = peripheral_basis(st, rep, 0, i, j);
            Slope k = peripheral_kernel(st, rep, b);
            CHECK((k.p > 0 || (k.p == 0 && k.q == 1)));
            // cross-check with an independent full-matrix rational rank computation
            std::vector<Int> emu(rep.edge_classes, Int(0)), ela(rep.edge_classes, Int(0)), comb(rep.edge_classes, Int(0));
            emu[i] = 1;
            ela[j] = 1;
            comb[i] = k.p;
            comb[j] = k.q;
            CHECK(rank_rational(rat_columns(b2, {emu, ela})) == base_rank + 1);  // kernel rank one
            CHECK(rank_rational(rat_columns(b2, {comb})) == base_rank);          // the combination dies
            // swapping the basis swaps the coordinates
            Slope swapped = peripheral_kernel(st, rep, peripheral_basis(st, rep, 0, j, i));
            CHECK(swapped == Slope(k.p, k.q));
        }
}

TEST_CASE("peripheral kernel is stable under mirroring", "[homology]") {
    Triangulation st = one_tet_solid_torus();
    SkeletonReport rep = validate(st);
    std::vector<int> bc = boundary_edge_classes(rep);
    PeripheralBasis b = peripheral_basis(st, rep, 0, bc[0], bc[1]);
    Slope k1 = peripheral_kernel(st, rep, b);

    Triangulation mirror = st.relabeled({0}, {VertexPerm::transposition(0, 1)});
    SkeletonReport mrep = validate(mirror);
    VertexPerm tau = VertexPerm::transposition(0, 1);
    auto mapped = [&](int cls) {
        for (int e = 0; e < 6; ++e)
            if (rep.edge_class_of[e] == cls) {
                auto [a, bb] = edge_vertices(e);
                return mrep.edge_class_of[edge_index(tau[a], tau[bb])];
            }
        throw std::logic_error("class not found");
    };
    Slope k2 = peripheral_kernel(mirror, mrep, peripheral_basis(mirror, mrep, 0, mapped(bc[0]), mapped(bc[1])));
    CHECK(k2.p == k1.p);
    CHECK(detail::int_abs(k2.q) == detail::int_abs(k1.q));
}

TEST_CASE("a degenerate peripheral kernel is reported", "[homology]") {
    // both boundary classes of T^2 x I survive in H1, so no slope dies
    Triangulation t2i = torus_times_interval();
    SkeletonReport rep = validate(t2i);
    REQUIRE(rep.boundary_components.size() == 2);
    std::vector<int> bc = boundary_edge_classes(rep);
    int tested = 0;
    for (size_t i = 0; i < bc.size(); ++i)
        for (size_t j = 0; j < bc.size(); ++j) {
            if (i == j) continue;
            PeripheralBasis basis{};
            try {
                basis = peripheral_basis(t2i, rep, 0, bc[i], bc[j]);
            } catch (const std::invalid_argument&) {
                continue;  // classes on the other boundary torus
            }
            ++tested;
            CHECK_THROWS_WITH(peripheral_kernel(t2i, rep, basis),
                              Catch::Matchers::ContainsSubstring("kernel rank 0"));
        }
    CHECK(tested == 6);  // three loop classes on the designated torus, all pairs
}
