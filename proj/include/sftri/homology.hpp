#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sftri/intmatrix.hpp"
#include "sftri/skeleton.hpp"
#include "sftri/slope.hpp"
#include "sftri/triangulation.hpp"

namespace sftri {

struct AbelianGroup {
    long rank = 0;
    std::vector<Int> invariant_factors;  // d1 | d2 | ..., each >= 2

    AbelianGroup() = default;
    AbelianGroup(long rank_, std::vector<Int> factors) : rank(rank_), invariant_factors(std::move(factors)) {
        if (rank < 0) throw std::invalid_argument("abelian group rank must be non-negative");
        for (size_t i = 0; i < invariant_factors.size(); ++i) {
            if (invariant_factors[i] < 2) throw std::invalid_argument("invariant factors must be at least 2");
            if (i > 0 && invariant_factors[i] % invariant_factors[i - 1] != 0)
                throw std::invalid_argument("invariant factors must form a divisibility chain");
        }
    }

    bool trivial() const { return rank == 0 && invariant_factors.empty(); }

    std::string str() const {
        if (trivial()) return "0";
        std::string s;
        if (rank == 1)
            s = "Z";
        else if (rank > 1)
            s = "Z^" + std::to_string(rank);
        for (const Int& d : invariant_factors) {
            if (!s.empty()) s += " + ";
            s += "Z/" + d.str();
        }
        return s;
    }

    friend bool operator==(const AbelianGroup& a, const AbelianGroup& b) {
        return a.rank == b.rank && a.invariant_factors == b.invariant_factors;
    }
    friend bool operator!=(const AbelianGroup& a, const AbelianGroup& b) { return !(a == b); }
};

namespace detail {

// Parity of the vertex map face f -> face f2 induced by sigma, with both
// faces read in ascending vertex order.
inline int face_pair_sign(int f, int f2, const VertexPerm& sigma) {
    auto fv = face_vertices(f);
    std::array<int, 3> img{};
    for (int i = 0; i < 3; ++i) img[i] = face_vertex_position(f2, sigma[fv[i]]);
    int inversions = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (img[i] > img[j]) ++inversions;
    return inversions % 2 ? -1 : 1;
}

// Cellular chain complex of the glued triangulation.  Generators are orbit
// classes; each class is oriented by a fixed representative instance (faces by
// the first instance in scan order, edges by the union-find root) and every
// other instance carries the sign of the identification path to it.
struct ChainComplex {
    int components = 0;
    int n0 = 0, n1 = 0, n2 = 0, n3 = 0;
    std::vector<Triplet> d1;  // rows: vertex classes, cols: edge classes
    std::vector<Triplet> d2;  // rows: edge classes, cols: face classes
    std::vector<Triplet> d3;  // rows: face classes, cols: tetrahedra

    std::vector<bool> edge_is_loop;
    std::vector<int> nt_row;  // edge class -> row of the tree-reduced matrix, -1 on spanning-tree edges
    int nt_rows = 0;
    std::vector<Triplet> d2_nt;  // d2 restricted to non-tree rows
};

inline ChainComplex chain_complex(const Triangulation& tri, const SkeletonReport& rep) {
    const int nt = tri.tet_count();
    ChainComplex cc;
    cc.n0 = static_cast<int>(rep.vertex_classes);
    cc.n1 = static_cast<int>(rep.edge_classes);
    cc.n2 = static_cast<int>(rep.face_classes);
    cc.n3 = nt;

    // independent parity pass over the edge identifications
    ParityUnionFind euf(6 * nt);
    for (int t = 0; t < nt; ++t)
        for (int f = 0; f < 4; ++f) {
            if (!tri.is_glued(t, f)) continue;
            const Gluing& g = tri.gluing(t, f);
            auto fv = face_vertices(f);
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    int a2 = g.perm[fv[i]], b2 = g.perm[fv[j]];
                    euf.unite(6 * t + edge_index(fv[i], fv[j]), 6 * g.tet + edge_index(a2, b2), a2 > b2 ? 1 : 0);
                }
        }
    if (!euf.consistent())
        throw std::invalid_argument("homology: an edge class is identified with itself in reverse");
    auto edge_sign = [&euf](int inst) { return euf.find(inst).second ? -1 : 1; };

    // face representatives and boundary of tetrahedra
    std::vector<std::pair<int, int>> face_rep(cc.n2, {-1, -1});
    for (int t = 0; t < nt; ++t)
        for (int f = 0; f < 4; ++f) {
            int c = rep.face_class_of[4 * t + f];
            int sign = 1;
            if (face_rep[c].first < 0)
                face_rep[c] = {t, f};
            else
                sign = face_pair_sign(f, face_rep[c].second, tri.gluing(t, f).perm);
            cc.d3.push_back({c, t, (f % 2 ? -1 : 1) * sign});
        }

    // boundary of face classes, from their representative instance
    for (int c = 0; c < cc.n2; ++c) {
        auto [t, f] = face_rep[c];
        auto fv = face_vertices(f);
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                int coeff = (i + j) % 2 ? 1 : -1;
                int inst = 6 * t + edge_index(fv[i], fv[j]);
                cc.d2.push_back({rep.edge_class_of[inst], c, coeff * edge_sign(inst)});
            }
    }

    // boundary of edge classes, from the union-find root instance
    std::vector<int> edge_root(cc.n1, -1);
    for (int inst = 0; inst < 6 * nt; ++inst) {
        int root = euf.find(inst).first;
        edge_root[rep.edge_class_of[inst]] = root;
    }
    std::vector<std::pair<int, int>> edge_ends(cc.n1);
    cc.edge_is_loop.assign(cc.n1, false);
    for (int c = 0; c < cc.n1; ++c) {
        int t = edge_root[c] / 6;
        auto [a, b] = edge_vertices(edge_root[c] % 6);
        int va = rep.vertex_class_of[4 * t + a], vb = rep.vertex_class_of[4 * t + b];
        edge_ends[c] = {va, vb};
        if (va == vb) {
            cc.edge_is_loop[c] = true;
        } else {
            cc.d1.push_back({vb, c, 1});
            cc.d1.push_back({va, c, -1});
        }
    }

    // spanning forest of the 1-skeleton; non-tree edge classes carry H1
    std::vector<std::vector<std::pair<int, int>>> adj(cc.n0);  // (other vertex, edge class)
    for (int c = 0; c < cc.n1; ++c)
        if (!cc.edge_is_loop[c]) {
            adj[edge_ends[c].first].emplace_back(edge_ends[c].second, c);
            adj[edge_ends[c].second].emplace_back(edge_ends[c].first, c);
        }
    std::vector<bool> tree(cc.n1, false), seen(cc.n0, false);
    for (int s = 0; s < cc.n0; ++s) {
        if (seen[s]) continue;
        ++cc.components;
        std::vector<int> stack{s};
        seen[s] = true;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (auto [w, c] : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    tree[c] = true;
                    stack.push_back(w);
                }
        }
    }
    cc.nt_row.assign(cc.n1, -1);
    for (int c = 0; c < cc.n1; ++c)
        if (!tree[c]) cc.nt_row[c] = cc.nt_rows++;
    for (const Triplet& t : cc.d2)
        if (cc.nt_row[t.row] >= 0) cc.d2_nt.push_back({cc.nt_row[t.row], t.col, t.val});
    return cc;
}

inline IntMatrix dense_from_triplets(int rows, int cols, const std::vector<Triplet>& ts) {
    IntMatrix m(rows, cols);
    for (const Triplet& t : ts) m.at(t.row, t.col) += t.val;
    return m;
}

}  // namespace detail

// Boundary map of the chain complex as a dense matrix (for k = 1, 2, 3).
inline IntMatrix boundary_matrix(const Triangulation& tri, const SkeletonReport& rep, int k) {
    detail::ChainComplex cc = detail::chain_complex(tri, rep);
    if (k == 1) return detail::dense_from_triplets(cc.n0, cc.n1, cc.d1);
    if (k == 2) return detail::dense_from_triplets(cc.n1, cc.n2, cc.d2);
    if (k == 3) return detail::dense_from_triplets(cc.n2, cc.n3, cc.d3);
    throw std::invalid_argument("boundary_matrix: k must be 1, 2 or 3");
}

inline IntMatrix boundary_matrix(const Triangulation& tri, int k) {
    return boundary_matrix(tri, validate(tri), k);
}

inline AbelianGroup homology(const Triangulation& tri, const SkeletonReport& rep, int k) {
    if (k < 0 || k > 3) throw std::invalid_argument("homology: k must be 0, 1, 2 or 3");
    detail::ChainComplex cc = detail::chain_complex(tri, rep);
    auto torsion = [](const std::vector<Int>& factors) {
        std::vector<Int> out;
        for (const Int& d : factors)
            if (d > 1) out.push_back(d);
        return out;
    };
    if (k == 0) return AbelianGroup(cc.components, {});
    if (k == 1) {
        auto f2 = detail::sparse_snf_factors(cc.nt_rows, cc.n2, cc.d2_nt);
        long rank = cc.nt_rows - static_cast<long>(f2.size());
        if (rank > 6L * tri.tet_count())
            throw std::logic_error("homology: first homology rank exceeds six times the tetrahedron count");
        return AbelianGroup(rank, torsion(f2));
    }
    if (k == 2) {
        long r2 = static_cast<long>(detail::sparse_snf_factors(cc.nt_rows, cc.n2, cc.d2_nt).size());
        auto f3 = detail::sparse_snf_factors(cc.n2, cc.n3, cc.d3);
        return AbelianGroup(cc.n2 - r2 - static_cast<long>(f3.size()), torsion(f3));
    }
    long r3 = static_cast<long>(detail::sparse_snf_factors(cc.n2, cc.n3, cc.d3).size());
    return AbelianGroup(cc.n3 - r3, {});
}

inline AbelianGroup homology(const Triangulation& tri, int k) { return homology(tri, validate(tri), k); }

// A (mu, lambda) curve basis on a torus boundary component, named by edge
// classes of the ambient triangulation.
struct PeripheralBasis {
    int component = 0;
    int mu = 0;
    int lambda = 0;
};

namespace detail {

using Rat = boost::multiprecision::cpp_rational;

// Exact solution of the square system a x = b; throws if a is singular.
inline std::vector<Rat> solve_square(const IntMatrix& a, const std::vector<Int>& b) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n) throw std::invalid_argument("solve_square: bad shape");
    std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n + 1));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[i][j] = Rat(a.at(i, j));
        m[i][n] = Rat(b[i]);
    }
    std::vector<int> pivot_of_col(n, -1);
    std::vector<bool> used(n, false);
    for (int j = 0; j < n; ++j) {
        int pr = -1;
        for (int i = 0; i < n; ++i)
            if (!used[i] && m[i][j] != 0) {
                pr = i;
                break;
            }
        if (pr < 0) throw std::logic_error("solve_square: singular matrix");
        used[pr] = true;
        pivot_of_col[j] = pr;
        for (int i = 0; i < n; ++i) {
            if (i == pr || m[i][j] == 0) continue;
            Rat f = m[i][j] / m[pr][j];
            for (int l = j; l <= n; ++l) m[i][l] -= f * m[pr][l];
        }
    }
    std::vector<Rat> x(n);
    for (int j = 0; j < n; ++j) x[j] = m[pivot_of_col[j]][n] / m[pivot_of_col[j]][j];
    return x;
}

inline Int rat_to_int(const Rat& r) {
    if (boost::multiprecision::denominator(r) != 1)
        throw std::logic_error("expected an integer solution");
    return boost::multiprecision::numerator(r);
}

}  // namespace detail

// Validates that the two edge classes form a basis of the first homology of
// the given torus boundary component.
inline PeripheralBasis peripheral_basis(const Triangulation& tri, const SkeletonReport& rep, int component,
                                        int mu, int lambda) {
    if (component < 0 || component >= static_cast<int>(rep.boundary_components.size()))
        throw std::invalid_argument("no such boundary component");
    if (!rep.boundary_components[component].is_torus())
        throw std::invalid_argument("boundary component is not a torus");
    if (mu == lambda) throw std::invalid_argument("mu and lambda must be distinct edge classes");
    for (int c : {mu, lambda}) {
        if (c < 0 || c >= static_cast<int>(rep.edge_classes)) throw std::invalid_argument("no such edge class");
        if (!rep.edge_class_boundary[c]) throw std::invalid_argument("edge class is not on the boundary");
    }

    auto [surf, corr] = boundary_surface(tri);
    SurfaceSkeleton ssk = surface_skeleton(surf);
    std::vector<int> comp_tris, sub_of(surf.triangle_count(), -1);
    for (int i = 0; i < surf.triangle_count(); ++i)
        if (ssk.component_of[i] == component) {
            sub_of[i] = static_cast<int>(comp_tris.size());
            comp_tris.push_back(i);
        }
    const int n = static_cast<int>(comp_tris.size());
    SurfaceTriangulation sub(n);
    for (int t = 0; t < n; ++t)
        for (int e = 0; e < 3; ++e) {
            if (sub.is_glued(t, e) || !surf.is_glued(comp_tris[t], e)) continue;
            const SurfaceGluing& g = surf.gluing(comp_tris[t], e);
            sub.glue(t, e, sub_of[g.tri], g.edge, g.flip);
        }
    SurfaceSkeleton subsk = surface_skeleton(sub);

    // orbit classes of the subsurface with direction parities
    ParityUnionFind seuf(3 * n), svuf(3 * n);
    for (int t = 0; t < n; ++t)
        for (int e = 0; e < 3; ++e) {
            if (!sub.is_glued(t, e)) continue;
            const SurfaceGluing& g = sub.gluing(t, e);
            seuf.unite(3 * t + e, 3 * g.tri + g.edge, g.flip ? 1 : 0);
            auto [a, b] = surface_edge_vertices(e);
            auto [a2, b2] = surface_edge_vertices(g.edge);
            svuf.unite(3 * t + a, 3 * g.tri + (g.flip ? b2 : a2), 0);
            svuf.unite(3 * t + b, 3 * g.tri + (g.flip ? a2 : b2), 0);
        }
    ClassIds vids(3 * n), eids(3 * n);
    std::vector<int> vclass(3 * n), eclass(3 * n), eroot(3 * n, -1);
    for (int i = 0; i < 3 * n; ++i) vclass[i] = vids.assign(svuf.find(i).first);
    for (int i = 0; i < 3 * n; ++i) {
        eclass[i] = eids.assign(seuf.find(i).first);
        eroot[eclass[i]] = seuf.find(i).first;
    }
    const int n0 = vids.count(), n1 = eids.count();

    // locate mu and lambda on the subsurface
    std::vector<int> class3(n1, -1);
    for (int t = 0; t < n; ++t) {
        auto [tt, ff] = corr.tri_to_face[comp_tris[t]];
        auto fv = face_vertices(ff);
        for (int e = 0; e < 3; ++e) {
            int a = fv[(e + 1) % 3], b = fv[(e + 2) % 3];
            if (a > b) std::swap(a, b);
            int c3 = rep.edge_class_of[6 * tt + edge_index(a, b)];
            if (class3[eclass[3 * t + e]] >= 0 && class3[eclass[3 * t + e]] != c3)
                throw std::logic_error("boundary edge correspondence is inconsistent");
            class3[eclass[3 * t + e]] = c3;
        }
    }
    int smu = -1, slam = -1;
    for (int c = 0; c < n1; ++c) {
        if (class3[c] == mu) smu = c;
        if (class3[c] == lambda) slam = c;
    }
    if (smu < 0 || slam < 0) throw std::invalid_argument("edge class is not on that boundary component");

    IntMatrix d1(n0, n1), d2(n1, n);
    for (int c = 0; c < n1; ++c) {
        int t = eroot[c] / 3, e = eroot[c] % 3;
        auto [a, b] = surface_edge_vertices(e);
        d1.at(vclass[3 * t + b], c) += 1;
        d1.at(vclass[3 * t + a], c) -= 1;
    }
    for (int t = 0; t < n; ++t)
        for (int e = 0; e < 3; ++e) {
            int sgn = subsk.orientation_sign[t] * surface_edge_direction(e) * (seuf.find(3 * t + e).second ? -1 : 1);
            d2.at(eclass[3 * t + e], t) += sgn;
        }
    for (int c : {smu, slam})
        for (int i = 0; i < n0; ++i)
            if (d1.at(i, c) != 0) throw std::invalid_argument("peripheral edge class is not a closed loop");

    // kernel basis of d1 from its Smith decomposition
    SmithNormalForm snf1 = smith_normal_form(d1);
    int rank1 = 0;
    for (const Int& d : snf1.factors)
        if (d != 0) ++rank1;
    const int kdim = n1 - rank1;

    // coordinates of the face boundaries and of mu, lambda in that kernel basis
    auto kernel_coords = [&](const std::vector<Int>& c) {
        std::vector<detail::Rat> y = detail::solve_square(snf1.v, c);
        for (int j = 0; j < rank1; ++j)
            if (y[j] != 0) throw std::logic_error("chain is not a cycle");
        std::vector<Int> out(kdim);
        for (int j = 0; j < kdim; ++j) out[j] = detail::rat_to_int(y[rank1 + j]);
        return out;
    };
    IntMatrix quot(kdim, n + 2);
    for (int t = 0; t < n; ++t) {
        std::vector<Int> colv(n1);
        for (int i = 0; i < n1; ++i) colv[i] = d2.at(i, t);
        std::vector<Int> x = kernel_coords(colv);
        for (int j = 0; j < kdim; ++j) quot.at(j, t) = x[j];
    }
    for (int which = 0; which < 2; ++which) {
        std::vector<Int> unit(n1);
        unit[which == 0 ? smu : slam] = 1;
        std::vector<Int> x = kernel_coords(unit);
        for (int j = 0; j < kdim; ++j) quot.at(j, n + which) = x[j];
    }
    std::vector<Int> qf = smith_normal_form(quot).factors;
    long nonzero = 0;
    bool all_units = true;
    for (const Int& d : qf)
        if (d != 0) {
            ++nonzero;
            if (d != 1) all_units = false;
        }
    if (nonzero != kdim || !all_units)
        throw std::invalid_argument("mu and lambda do not form a basis of the boundary torus homology");
    return PeripheralBasis{component, mu, lambda};
}

// Primitive (p, q) with p*mu + q*lambda generating the kernel of the map
// H1 of the boundary torus -> H1 of the manifold, over the rationals.
inline Slope peripheral_kernel(const Triangulation& tri, const SkeletonReport& rep, const PeripheralBasis& b) {
    for (int c : {b.mu, b.lambda}) {
        if (c < 0 || c >= static_cast<int>(rep.edge_classes)) throw std::invalid_argument("no such edge class");
        if (!rep.edge_class_boundary[c]) throw std::invalid_argument("edge class is not on the boundary");
    }
    detail::ChainComplex cc = detail::chain_complex(tri, rep);
    if (!cc.edge_is_loop[b.mu] || !cc.edge_is_loop[b.lambda])
        throw std::invalid_argument("peripheral edge class is not a closed loop");

    std::vector<detail::Triplet> entries = cc.d2_nt;
    entries.push_back({cc.nt_row[b.mu], cc.n2, 1});
    entries.push_back({cc.nt_row[b.lambda], cc.n2 + 1, 1});

    // residues of the two cycles modulo the face boundaries
    std::vector<std::vector<std::pair<int, detail::Rat>>> residue(2);
    std::vector<std::vector<std::pair<int, detail::Rat>>> leftover;
    auto ingest = [&](auto&& elim) {
        for (int w = 0; w < 2; ++w)
            for (auto& [r, v] : elim.passive[w]) residue[w].emplace_back(r, detail::Rat(v));
        for (auto& dc : elim.deferred) {
            std::vector<std::pair<int, detail::Rat>> conv;
            for (auto& [r, v] : dc) conv.emplace_back(r, detail::Rat(v));
            leftover.push_back(std::move(conv));
        }
    };
    try {
        ingest(detail::sparse_eliminate<long long>(cc.nt_rows, cc.n2, entries, 2));
    } catch (const detail::SnfOverflow&) {
        ingest(detail::sparse_eliminate<Int>(cc.nt_rows, cc.n2, entries, 2));
    }
    if (!leftover.empty()) {
        // dense rational finish on whatever the unit pivots could not clear
        std::map<int, int> rows;
        for (auto& colv : leftover)
            for (auto& [r, v] : colv) {
                (void)v;
                rows.emplace(r, 0);
            }
        for (auto& colv : residue)
            for (auto& [r, v] : colv) {
                (void)v;
                rows.emplace(r, 0);
            }
        int nr = 0;
        for (auto& [r, idx] : rows) idx = nr++;
        const int nc = static_cast<int>(leftover.size());
        std::vector<std::vector<detail::Rat>> m(nr, std::vector<detail::Rat>(nc + 2));
        for (int c = 0; c < nc; ++c)
            for (auto& [r, v] : leftover[c]) m[rows[r]][c] = v;
        for (int w = 0; w < 2; ++w)
            for (auto& [r, v] : residue[w]) m[rows[r]][nc + w] = v;
        std::vector<bool> used(nr, false);
        for (int c = 0; c < nc; ++c) {
            int pr = -1;
            for (int i = 0; i < nr; ++i)
                if (!used[i] && m[i][c] != 0) {
                    pr = i;
                    break;
                }
            if (pr < 0) continue;
            used[pr] = true;
            for (int i = 0; i < nr; ++i) {
                if (i == pr || m[i][c] == 0) continue;
                detail::Rat f = m[i][c] / m[pr][c];
                for (int l = c; l < nc + 2; ++l) m[i][l] -= f * m[pr][l];
            }
        }
        for (int w = 0; w < 2; ++w) {
            residue[w].clear();
            for (int i = 0; i < nr; ++i)
                if (!used[i] && m[i][nc + w] != 0) residue[w].emplace_back(i, m[i][nc + w]);
        }
    }

    std::map<int, std::pair<detail::Rat, detail::Rat>> res;
    for (auto& [r, v] : residue[0]) res[r].first = v;
    for (auto& [r, v] : residue[1]) res[r].second = v;
    bool mu_dies = residue[0].empty(), lambda_dies = residue[1].empty();
    if (mu_dies && lambda_dies) throw std::runtime_error("kernel rank 2");
    if (mu_dies) return Slope(0, 1);      // kernel generated by mu alone
    if (lambda_dies) return Slope(1, 0);  // kernel generated by lambda alone
    detail::Rat rm, rl;
    for (auto& [r, pair] : res) {
        (void)r;
        if (pair.first != 0) {
            rm = pair.first;
            rl = pair.second;
            break;
        }
    }
    for (auto& [r, pair] : res) {
        (void)r;
        if (rm * pair.second != rl * pair.first) throw std::runtime_error("kernel rank 0");
    }
    // x mu + y lambda dies, with (x, y) proportional to (rl, -rm)
    Int xd = boost::multiprecision::denominator(rl), yd = boost::multiprecision::denominator(rm);
    Int l = xd / gcd_int(xd, yd) * yd;
    Int x = boost::multiprecision::numerator(rl) * (l / xd);
    Int y = -boost::multiprecision::numerator(rm) * (l / yd);
    return Slope(std::move(y), std::move(x));
}

inline Slope peripheral_kernel(const Triangulation& tri, const PeripheralBasis& b) {
    return peripheral_kernel(tri, validate(tri), b);
}

}  // namespace sftri
