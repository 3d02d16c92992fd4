#pragma once

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sftri/builders.hpp"
#include "sftri/farey.hpp"
#include "sftri/homology.hpp"
#include "sftri/seifert.hpp"
#include "sftri/signature.hpp"
#include "sftri/subdivide.hpp"

namespace sftri {
namespace cli {

// Exit statuses: 0 success, 1 a verified postcondition failed, 2 input error.
enum Status { status_ok = 0, status_fail = 1, status_input = 2 };

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << text;
    if (!out) throw std::invalid_argument("cannot write " + path);
}

// group string without spaces, for the RESULT key=value line
inline std::string compact(const AbelianGroup& g) {
    std::string s = g.str();
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    return s;
}

inline int ok_line(std::ostream& out, const std::string& verb, const std::string& kv) {
    out << "RESULT ok " << verb << (kv.empty() ? "" : " ") << kv << "\n";
    return status_ok;
}

inline int fail_line(std::ostream& out, const std::string& verb, const std::string& why,
                     const std::string& reason) {
    out << "error: " << why << "\n";
    out << "RESULT fail " << verb << " reason=" << reason << "\n";
    return status_fail;
}

inline Triangulation parse_file(const std::string& path) {
    return Triangulation::parse(read_file(path));
}

inline void boundary_summary(std::ostream& out, const SkeletonReport& rep) {
    out << "boundary components = " << rep.boundary_components.size() << "\n";
    for (const SurfaceKind& k : rep.boundary_components) out << "  " << k.str() << "\n";
}

inline int do_norm(const std::string& text, std::ostream& out) {
    Slope s = Slope::parse(text);
    if (s.is_infinity()) throw std::invalid_argument("norm: slope is infinite");
    if (s.q == 0) throw std::invalid_argument("norm: slope is zero");
    Slope a = s;
    if (a.q < 0) a.q = -a.q;
    ContinuedFraction cf = continued_fraction(a);
    out << cf.str() << " norm=" << cf.sum() << "\n";
    return ok_line(out, "norm", "slope=" + s.str() + " norm=" + cf.sum().str());
}

inline int do_walk(const std::string& text, std::ostream& out) {
    Slope s = Slope::parse(text);
    FareyTriangle base = better_base(s);
    std::vector<FareyTriangle> walk = farey_walk(s, base);
    for (const FareyTriangle& t : walk) out << t.key() << "\n";
    long length = static_cast<long>(walk.size()) - 1;
    out << "length=" << length << "\n";
    bool positive = base == base_triangle(true);
    return ok_line(out, "walk", "slope=" + s.str() + " length=" + std::to_string(length) +
                                    " base=" + (positive ? "1/1" : "-1/1"));
}

inline int do_lst(long p, long q, const std::optional<std::string>& outfile, std::ostream& out) {
    auto [tri, lb, report] = standalone_lst(p, q);
    out << report.str();

    SkeletonReport rep = validate(tri);
    Slope k = peripheral_kernel(tri, rep, peripheral_basis(tri, rep, lb.component, lb.mu, lb.lambda));
    out << "kernel = " << k.str() << " for meridian " << Slope(q, p).str() << "\n";
    if (!(k.p == p && abs(k.q) == q))
        return fail_line(out, "lst", "peripheral kernel " + k.str() + " does not match the meridian",
                         "kernel-mismatch");
    if (report.tets_used > report.budget)
        return fail_line(out, "lst", "tetrahedron budget exceeded", "budget-exceeded");
    if (outfile) {
        write_file(*outfile, tri.str());
        out << "wrote " << *outfile << "\n";
    }
    return ok_line(out, "lst", "p=" + std::to_string(p) + " q=" + std::to_string(q) +
                                   " tets=" + std::to_string(report.tets_used) +
                                   " budget=" + std::to_string(report.budget) + " kernel=" + k.str());
}

inline int do_build(const std::string& grammar, const std::optional<std::string>& outfile,
                    std::ostream& out) {
    SeifertData d = parse_seifert(grammar);
    auto [tri, report] = build_sfs(d);
    out << report.str();

    AbelianGroup h = homology(tri, 1);
    AbelianGroup e = expected_h1(d);
    out << "H1 = " << h.str() << "\n";
    out << "expected H1 = " << e.str() << "\n";
    if (h != e)
        return fail_line(out, "build", "homology disagrees with the fibre presentation",
                         "homology-mismatch");
    if (report.tets_used > report.budget)
        return fail_line(out, "build", "tetrahedron budget exceeded", "budget-exceeded");
    if (outfile) {
        write_file(*outfile, tri.str());
        out << "wrote " << *outfile << "\n";
    }
    return ok_line(out, "build", "tets=" + std::to_string(report.tets_used) +
                                     " budget=" + std::to_string(report.budget) + " h1=" + compact(h));
}

inline int do_verify(const std::string& path, std::ostream& out) {
    Triangulation tri = parse_file(path);
    SkeletonReport rep = validate(tri);
    out << "tets = " << tri.tet_count() << "\n";
    if (!rep.valid_manifold) {
        out << "invalid: " << rep.invalid_reason << "\n";
        return fail_line(out, "verify", rep.invalid_reason, "invalid-manifold");
    }
    out << "orientable = " << (rep.orientable ? "yes" : "no") << "\n";
    out << "euler characteristic = " << rep.euler_characteristic << "\n";
    boundary_summary(out, rep);
    AbelianGroup h = homology(tri, rep, 1);
    out << "H1 = " << h.str() << "\n";
    return ok_line(out, "verify", "tets=" + std::to_string(tri.tet_count()) +
                                      " orientable=" + (rep.orientable ? "yes" : "no") +
                                      " boundary=" + std::to_string(rep.boundary_components.size()) +
                                      " h1=" + compact(h));
}

inline int do_homology(const std::string& path, std::optional<long> k, std::ostream& out) {
    if (k && (*k < 0 || *k > 3)) throw std::invalid_argument("homology: k must lie in 0..3");
    Triangulation tri = parse_file(path);
    SkeletonReport rep = validate(tri);
    if (k) {
        AbelianGroup h = homology(tri, rep, static_cast<int>(*k));
        out << "H" << *k << " = " << h.str() << "\n";
        return ok_line(out, "homology",
                       "k=" + std::to_string(*k) + " h" + std::to_string(*k) + "=" + compact(h));
    }
    std::string kv;
    for (int i = 0; i <= 3; ++i) {
        AbelianGroup h = homology(tri, rep, i);
        out << "H" << i << " = " << h.str() << "\n";
        kv += (i ? " " : "") + ("h" + std::to_string(i) + "=" + compact(h));
    }
    return ok_line(out, "homology", kv);
}

inline int do_subdivide(const std::string& path, long n, const std::optional<std::string>& outfile,
                        std::ostream& out) {
    if (n < 0) throw std::invalid_argument("subdivide: n must be non-negative");
    Triangulation tri = parse_file(path);
    SkeletonReport before = validate(tri);
    AbelianGroup h_before = homology(tri, before, 1);

    Triangulation cur = tri;
    for (long i = 0; i < n; ++i) cur = barycentric_subdivide(cur);
    SkeletonReport after = validate(cur);
    AbelianGroup h_after = homology(cur, after, 1);

    out << "tets " << tri.tet_count() << " -> " << cur.tet_count() << "\n";
    struct Item {
        std::string name;
        std::string was, is;
    };
    const Item items[] = {
        {"valid", before.valid_manifold ? "yes" : "no", after.valid_manifold ? "yes" : "no"},
        {"orientable", before.orientable ? "yes" : "no", after.orientable ? "yes" : "no"},
        {"euler characteristic", std::to_string(before.euler_characteristic),
         std::to_string(after.euler_characteristic)},
        {"boundary components", std::to_string(before.boundary_components.size()),
         std::to_string(after.boundary_components.size())},
        {"H1", h_before.str(), h_after.str()},
    };
    for (const Item& it : items) {
        out << it.name << " " << it.was << " -> " << it.is << (it.was == it.is ? "" : "  CHANGED")
            << "\n";
        if (it.was != it.is)
            return fail_line(out, "subdivide", "subdivision changed " + it.name, "invariant-drift");
    }
    if (outfile) {
        write_file(*outfile, cur.str());
        out << "wrote " << *outfile << "\n";
    }
    return ok_line(out, "subdivide", "n=" + std::to_string(n) +
                                         " tets=" + std::to_string(cur.tet_count()) +
                                         " h1=" + compact(h_after));
}

inline int do_truncate(const std::string& path, const std::optional<std::string>& outfile,
                       std::ostream& out) {
    Triangulation x = parse_file(path);
    sftri::detail::IdealOrbits orbits = sftri::detail::ideal_orbits(x);
    auto [tri, report] = truncate_ideal(x);
    out << report.str();

    SkeletonReport rep = validate(tri);
    if (!rep.valid_manifold)
        return fail_line(out, "truncate", "truncation failed validation: " + rep.invalid_reason,
                         "invalid-manifold");
    if (static_cast<int>(rep.boundary_components.size()) != orbits.vertex_classes)
        return fail_line(out, "truncate", "boundary components do not match ideal vertex classes",
                         "cusp-mismatch");
    if (report.tets_used > report.budget)
        return fail_line(out, "truncate", "tetrahedron budget exceeded", "budget-exceeded");
    boundary_summary(out, rep);
    out << "H1 = " << homology(tri, rep, 1).str() << "\n";
    if (outfile) {
        write_file(*outfile, tri.str());
        out << "wrote " << *outfile << "\n";
    }
    return ok_line(out, "truncate", "tets=" + std::to_string(report.tets_used) +
                                        " budget=" + std::to_string(report.budget) +
                                        " cusps=" + std::to_string(orbits.vertex_classes));
}

inline int do_bound(const std::string& grammar, std::ostream& out) {
    SeifertData d = parse_seifert(grammar);
    TheoremBoundReport r = theorem_bound_report(d);
    out << r.str();
    return ok_line(out, "bound", "proxy=" + r.proxy.str() + " upper=" + r.upper.str());
}

}  // namespace detail

struct GridOutcome {
    long instances = 0;
    long failures = 0;
};

// Every normalized Seifert datum with base chi in [chi_min, 1], 1 <= b <= 3,
// at most three exceptional fibres with multiplicities up to pmax, over both
// base orientabilities; each instance is built, verified and cross-checked
// against its presentation homology.  Fibre multisets are enumerated once.
inline GridOutcome run_grid(long pmax, long chi_min, std::ostream& out) {
    if (pmax < 2) throw std::invalid_argument("grid: fibre multiplicity cap must be at least 2");
    if (chi_min > 1) throw std::invalid_argument("grid: chi floor must be at most 1");

    std::vector<Slope> fib;
    for (long p = 2; p <= pmax; ++p)
        for (long q = 1; q < p; ++q)
            if (gcd_int(p, q) == 1) fib.emplace_back(q, p);
    const long F = static_cast<long>(fib.size());

    SfsAssembler assembler;
    GridOutcome total;
    for (bool orientable : {true, false}) {
        for (long a = orientable ? 0 : 1;; a += orientable ? 2 : 1) {
            if (2 - a - 1 < chi_min) break;
            for (long b = 1; b <= 3; ++b) {
                if (2 - a - b < chi_min) continue;
                long instances = 0, failures = 0;
                auto check = [&](const std::vector<Slope>& fibres) {
                    SeifertData d{orientable, a, b, fibres};
                    ++instances;
                    try {
                        SfsAssembler::Result r = assembler.build(d);
                        SkeletonReport rep = validate(r.tri);
                        bool ok = rep.valid_manifold && rep.orientable &&
                                  static_cast<long>(rep.boundary_components.size()) == b &&
                                  r.report.tets_used <= r.report.budget &&
                                  homology(r.tri, rep, 1) == expected_h1(d);
                        for (const SurfaceKind& k : rep.boundary_components) ok = ok && k.is_torus();
                        if (!ok) ++failures;
                    } catch (const std::exception&) {
                        ++failures;
                    }
                };
                check({});
                for (long i = 0; i < F; ++i) {
                    check({fib[i]});
                    for (long j = i; j < F; ++j) {
                        check({fib[i], fib[j]});
                        for (long l = j; l < F; ++l) check({fib[i], fib[j], fib[l]});
                    }
                }
                out << "base " << (orientable ? "o" : "n") << " a=" << a << " b=" << b
                    << ": instances=" << instances << " failures=" << failures << "\n";
                total.instances += instances;
                total.failures += failures;
            }
        }
    }
    return total;
}

namespace detail {

inline int do_grid(long pmax, long chi_min, std::ostream& out) {
    GridOutcome g = run_grid(pmax, chi_min, out);
    out << "total instances=" << g.instances << " failures=" << g.failures << "\n";
    if (g.failures > 0)
        return fail_line(out, "grid",
                         std::to_string(g.failures) + " instances failed verification", "grid-failures");
    return ok_line(out, "grid",
                   "instances=" + std::to_string(g.instances) + " failures=" + std::to_string(g.failures));
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out) {
    CLI::App app{"Seifert fibered space triangulator"};
    app.require_subcommand(1);

    std::string slope_text, grammar, path;
    long p = 0, q = 0;
    std::optional<long> hom_k;
    long subdiv_n = 1;
    long grid_pmax = 0, grid_chi_min = 0;
    std::optional<std::string> outfile;

    CLI::App* c_norm = app.add_subcommand("norm", "continued fraction and norm of a slope");
    c_norm->add_option("slope", slope_text, "slope q/p")->required();

    CLI::App* c_walk = app.add_subcommand("walk", "Farey geodesic from the better base triangle");
    c_walk->add_option("slope", slope_text, "slope q/p in (0,1)")->required();

    CLI::App* c_lst = app.add_subcommand("lst", "layered solid torus with meridian (p, q)");
    c_lst->add_option("p", p, "meridian coefficient p")->required();
    c_lst->add_option("q", q, "meridian coefficient q")->required();
    c_lst->add_option("-o,--out", outfile, "write the triangulation to this file");

    CLI::App* c_build = app.add_subcommand("build", "build a Seifert fibered space");
    c_build->add_option("data", grammar, "\"sfs <o|n> a=<int> b=<int> fibres=p/q,...\"")->required();
    c_build->add_option("-o,--out", outfile, "write the triangulation to this file");

    CLI::App* c_verify = app.add_subcommand("verify", "validate a triangulation file");
    c_verify->add_option("file", path, "triangulation file")->required();

    CLI::App* c_hom = app.add_subcommand("homology", "integer homology of a triangulation file");
    c_hom->add_option("file", path, "triangulation file")->required();
    c_hom->add_option("k", hom_k, "degree 0..3 (all four when omitted)");

    CLI::App* c_sub = app.add_subcommand("subdivide", "barycentric subdivision with invariance report");
    c_sub->add_option("file", path, "triangulation file")->required();
    c_sub->add_option("n", subdiv_n, "number of subdivisions (default 1)");
    c_sub->add_option("-o,--out", outfile, "write the subdivided triangulation to this file");

    CLI::App* c_trunc = app.add_subcommand("truncate", "truncate the ideal vertices of a closed complex");
    c_trunc->add_option("file", path, "triangulation file")->required();
    c_trunc->add_option("-o,--out", outfile, "write the truncated triangulation to this file");

    CLI::App* c_bound = app.add_subcommand("bound", "tetrahedron bounds without building");
    c_bound->add_option("data", grammar, "\"sfs <o|n> a=<int> b=<int> fibres=p/q,...\"")->required();

    CLI::App* c_grid = app.add_subcommand("grid", "build and verify a whole parameter grid");
    c_grid->add_option("pmax", grid_pmax, "largest fibre multiplicity")->required();
    c_grid->add_option("chimin", grid_chi_min, "smallest base Euler characteristic")->required();

    std::reverse(args.begin(), args.end());  // CLI11 consumes the vector as a stack
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        out << "error: " << e.what() << "\n";
        out << "RESULT fail cli reason=input\n";
        return status_input;
    }

    std::string verb = app.get_subcommands().front()->get_name();
    try {
        if (c_norm->parsed()) return detail::do_norm(slope_text, out);
        if (c_walk->parsed()) return detail::do_walk(slope_text, out);
        if (c_lst->parsed()) return detail::do_lst(p, q, outfile, out);
        if (c_build->parsed()) return detail::do_build(grammar, outfile, out);
        if (c_verify->parsed()) return detail::do_verify(path, out);
        if (c_hom->parsed()) return detail::do_homology(path, hom_k, out);
        if (c_sub->parsed()) return detail::do_subdivide(path, subdiv_n, outfile, out);
        if (c_trunc->parsed()) return detail::do_truncate(path, outfile, out);
        if (c_bound->parsed()) return detail::do_bound(grammar, out);
        if (c_grid->parsed()) return detail::do_grid(grid_pmax, grid_chi_min, out);
    } catch (const std::invalid_argument& e) {
        out << "error: " << e.what() << "\n";
        out << "RESULT fail " << verb << " reason=input\n";
        return status_input;
    } catch (const std::runtime_error& e) {
        out << "error: " << e.what() << "\n";
        out << "RESULT fail " << verb << " reason=input\n";
        return status_input;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        out << "RESULT fail " << verb << " reason=violation\n";
        return status_fail;
    }
    out << "error: no verb\n";
    return status_input;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(std::move(args), std::cout);
}

}  // namespace cli
}  // namespace sftri
