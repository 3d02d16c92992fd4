#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sftri/cli.hpp"

using namespace sftri;
using Catch::Matchers::ContainsSubstring;

namespace {

struct Run {
    int status;
    std::string out;
};

Run run_cli(std::vector<std::string> args) {
    std::ostringstream os;
    int status = cli::run(std::move(args), os);
    return {status, os.str()};
}

std::string last_line(const std::string& text) {
    auto end = text.find_last_not_of('\n');
    if (end == std::string::npos) return "";
    auto start = text.rfind('\n', end);
    return text.substr(start == std::string::npos ? 0 : start + 1, end - (start == std::string::npos ? 0 : start + 1) + 1);
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::string ideal_two_tet_text() {
    Triangulation t(2);
    long codes = 363;
    for (int i = 0; i < 4; ++i) {
        t.glue(0, i, 1, i, VertexPerm::from_code(static_cast<int>(codes % 24)));
        codes /= 24;
    }
    return t.str();
}

}  // namespace

TEST_CASE("norm verb prints the continued fraction", "[cli]") {
    Run r = run_cli({"norm", "2/5"});
    CHECK(r.status == 0);
    CHECK_THAT(r.out, ContainsSubstring("[0;2,2] norm=4"));
    CHECK(last_line(r.out) == "RESULT ok norm slope=2/5 norm=4");

    CHECK(run_cli({"norm", "7/3"}).status == 0);
    CHECK_THAT(run_cli({"norm", "7/3"}).out, ContainsSubstring("[2;3] norm=5"));

    CHECK(run_cli({"norm", "1/0"}).status == 2);
    CHECK(run_cli({"norm", "0/1"}).status == 2);
    CHECK(run_cli({"norm", "pretzel"}).status == 2);
}

TEST_CASE("walk verb prints the farey geodesic", "[cli]") {
    Run r = run_cli({"walk", "2/5"});
    CHECK(r.status == 0);
    std::vector<FareyTriangle> walk = farey_walk(Slope(2, 5), better_base(Slope(2, 5)));
    for (const FareyTriangle& t : walk) CHECK_THAT(r.out, ContainsSubstring(t.key() + "\n"));
    CHECK_THAT(r.out, ContainsSubstring("length=3"));
    CHECK_THAT(last_line(r.out), ContainsSubstring("RESULT ok walk slope=2/5 length=3"));

    // the walk length realizes the norm minus one on both bases
    Run n = run_cli({"walk", "4/7"});
    CHECK(n.status == 0);
    CHECK_THAT(n.out, ContainsSubstring("length=" + std::string(1, '0' + static_cast<char>(
                                                                       static_cast<long>(norm(Slope(4, 7))) - 1))));

    CHECK(run_cli({"walk", "3/2"}).status == 2);   // outside (0,1)
    CHECK(run_cli({"walk", "1/0"}).status == 2);
    CHECK(run_cli({"walk", "-1/3"}).status == 2);
}

TEST_CASE("lst verb writes a file that verify accepts", "[cli]") {
    auto path = temp_file("sftri_cli_lst.tri");
    Run r = run_cli({"lst", "5", "2", "-o", path.string()});
    CHECK(r.status == 0);
    CHECK_THAT(r.out, ContainsSubstring("stage solid torus: 1 tets"));
    CHECK_THAT(r.out, ContainsSubstring("total 4 of 6 tets"));
    CHECK_THAT(r.out, ContainsSubstring("kernel = "));
    CHECK_THAT(last_line(r.out), ContainsSubstring("RESULT ok lst p=5 q=2 tets=4 budget=6"));

    Run v = run_cli({"verify", path.string()});
    CHECK(v.status == 0);
    CHECK_THAT(last_line(v.out), ContainsSubstring("RESULT ok verify tets=4 orientable=yes boundary=1 h1=Z"));
    std::filesystem::remove(path);

    CHECK(run_cli({"lst", "4", "2"}).status == 2);
    CHECK(run_cli({"lst", "3", "3"}).status == 2);
}

TEST_CASE("build verb round-trips through verify", "[cli]") {
    auto path = temp_file("sftri_cli_build.tri");
    Run r = run_cli({"build", "sfs o a=0 b=1 fibres=2/1,3/1", "-o", path.string()});
    CHECK(r.status == 0);
    CHECK_THAT(r.out, ContainsSubstring("H1 = Z"));
    CHECK_THAT(r.out, ContainsSubstring("expected H1 = Z"));
    CHECK(last_line(r.out) == "RESULT ok build tets=61 budget=622 h1=Z");

    Run v = run_cli({"verify", path.string()});
    CHECK(v.status == 0);
    CHECK_THAT(last_line(v.out), ContainsSubstring("boundary=1 h1=Z"));
    std::filesystem::remove(path);

    Run m = run_cli({"build", "sfs n a=1 b=1"});
    CHECK(m.status == 0);
    CHECK_THAT(last_line(m.out), ContainsSubstring("h1=Z+Z/2"));

    CHECK(run_cli({"build", "sfs x a=0 b=1"}).status == 2);
    CHECK(run_cli({"build", "sfs o a=1 b=1"}).status == 2);      // odd doubled genus
    CHECK(run_cli({"build", "sfs o a=0 b=0"}).status == 2);
    CHECK(run_cli({"build", "sfs o a=0 b=1 fibres=4/2"}).status == 2);
}

TEST_CASE("verify verb distinguishes input and verification failures", "[cli]") {
    auto path = temp_file("sftri_cli_verify.tri");

    // a one-directional gluing line breaks the involution at parse time
    std::ofstream(path) << "tri 2\n0 0 : 1 0 0123\n";
    Run broken = run_cli({"verify", path.string()});
    CHECK(broken.status == 2);
    CHECK_THAT(broken.out, ContainsSubstring("line"));
    CHECK_THAT(last_line(broken.out), ContainsSubstring("RESULT fail verify reason=input"));

    // an ideal complex parses but is not a material manifold
    std::ofstream(path) << ideal_two_tet_text();
    Run ideal = run_cli({"verify", path.string()});
    CHECK(ideal.status == 1);
    CHECK_THAT(ideal.out, ContainsSubstring("closed vertex link is not a sphere"));
    CHECK_THAT(last_line(ideal.out), ContainsSubstring("RESULT fail verify reason=invalid-manifold"));
    std::filesystem::remove(path);

    CHECK(run_cli({"verify", "/nonexistent/sftri.tri"}).status == 2);
}

TEST_CASE("homology verb prints the requested degrees", "[cli]") {
    auto path = temp_file("sftri_cli_h.tri");
    REQUIRE(run_cli({"lst", "3", "1", "-o", path.string()}).status == 0);

    Run all = run_cli({"homology", path.string()});
    CHECK(all.status == 0);
    CHECK_THAT(all.out, ContainsSubstring("H0 = Z"));
    CHECK_THAT(all.out, ContainsSubstring("H1 = Z"));
    CHECK_THAT(all.out, ContainsSubstring("H2 = 0"));
    CHECK_THAT(all.out, ContainsSubstring("H3 = 0"));
    CHECK(last_line(all.out) == "RESULT ok homology h0=Z h1=Z h2=0 h3=0");

    Run one = run_cli({"homology", path.string(), "1"});
    CHECK(one.status == 0);
    CHECK(last_line(one.out) == "RESULT ok homology k=1 h1=Z");

    CHECK(run_cli({"homology", path.string(), "5"}).status == 2);
    std::filesystem::remove(path);
}

TEST_CASE("subdivide verb reports invariance", "[cli]") {
    auto path = temp_file("sftri_cli_sub.tri");
    auto out_path = temp_file("sftri_cli_sub_out.tri");
    REQUIRE(run_cli({"lst", "5", "2", "-o", path.string()}).status == 0);

    Run r = run_cli({"subdivide", path.string(), "1", "-o", out_path.string()});
    CHECK(r.status == 0);
    CHECK_THAT(r.out, ContainsSubstring("tets 4 -> 96"));
    CHECK_THAT(r.out, ContainsSubstring("H1 Z -> Z"));
    CHECK_THAT(last_line(r.out), ContainsSubstring("RESULT ok subdivide n=1 tets=96 h1=Z"));

    Run v = run_cli({"verify", out_path.string()});
    CHECK(v.status == 0);
    CHECK_THAT(last_line(v.out), ContainsSubstring("tets=96"));

    Run zero = run_cli({"subdivide", path.string(), "0"});
    CHECK(zero.status == 0);
    CHECK_THAT(zero.out, ContainsSubstring("tets 4 -> 4"));

    CHECK(run_cli({"subdivide", path.string(), "-1"}).status == 2);
    std::filesystem::remove(path);
    std::filesystem::remove(out_path);
}

TEST_CASE("truncate verb recovers the cusped manifold", "[cli]") {
    auto path = temp_file("sftri_cli_ideal.tri");
    auto out_path = temp_file("sftri_cli_trunc.tri");
    std::ofstream(path) << ideal_two_tet_text();

    Run r = run_cli({"truncate", path.string(), "-o", out_path.string()});
    CHECK(r.status == 0);
    CHECK_THAT(r.out, ContainsSubstring("total 22 of 28 tets"));
    CHECK_THAT(r.out, ContainsSubstring("H1 = Z + Z/3"));
    CHECK(last_line(r.out) == "RESULT ok truncate tets=22 budget=28 cusps=1");

    Run v = run_cli({"verify", out_path.string()});
    CHECK(v.status == 0);
    CHECK_THAT(last_line(v.out), ContainsSubstring("tets=22 orientable=yes boundary=1 h1=Z+Z/3"));
    std::filesystem::remove(path);
    std::filesystem::remove(out_path);

    auto bounded = temp_file("sftri_cli_bounded.tri");
    REQUIRE(run_cli({"lst", "3", "1", "-o", bounded.string()}).status == 0);
    CHECK(run_cli({"truncate", bounded.string()}).status == 2);
    std::filesystem::remove(bounded);
}

TEST_CASE("bound verb prints the budget without building", "[cli]") {
    Run r = run_cli({"bound", "sfs o a=0 b=1 fibres=2/1,3/1"});
    CHECK(r.status == 0);
    CHECK_THAT(r.out, ContainsSubstring("proxy = 7"));
    CHECK_THAT(r.out, ContainsSubstring("upper bound = 622"));
    CHECK(last_line(r.out) == "RESULT ok bound proxy=7 upper=622");

    // a regular fibre is normalized away rather than rejected
    Run reg = run_cli({"bound", "sfs o a=0 b=1 fibres=5/0"});
    CHECK(reg.status == 0);
    CHECK_THAT(last_line(reg.out), ContainsSubstring("upper=272"));

    CHECK(run_cli({"bound", "sfs o a=0 b=1 fibres=4/2"}).status == 2);
    CHECK(run_cli({"bound", "sfs o a=0 fibres=2/1"}).status == 2);
}

TEST_CASE("grid verb verifies a small parameter box", "[cli]") {
    Run r = run_cli({"grid", "3", "0"});
    CHECK(r.status == 0);
    CHECK_THAT(r.out, ContainsSubstring("base o a=0 b=1: instances=20 failures=0"));
    CHECK_THAT(r.out, ContainsSubstring("base o a=0 b=2: instances=20 failures=0"));
    CHECK_THAT(r.out, ContainsSubstring("base n a=1 b=1: instances=20 failures=0"));
    CHECK(last_line(r.out) == "RESULT ok grid instances=60 failures=0");

    CHECK(run_cli({"grid", "1", "0"}).status == 2);
    CHECK(run_cli({"grid", "2", "2"}).status == 2);
}

TEST_CASE("argument mistakes are input errors", "[cli]") {
    CHECK(run_cli({}).status == 2);
    CHECK(run_cli({"conjure"}).status == 2);
    CHECK(run_cli({"lst", "5"}).status == 2);
    CHECK(run_cli({"norm"}).status == 2);
    CHECK(run_cli({"grid", "3"}).status == 2);
}
