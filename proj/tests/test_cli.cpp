#include "doctest.h"

#include "wallenergy/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    RunResult r;
    r.code = wallenergy::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

int count_data_rows(const std::string& text) {
    int rows = 0;
    std::istringstream ss(text);
    std::string line;
    bool past_header = false;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!past_header) { // first non-comment line is the column header
            past_header = true;
            continue;
        }
        ++rows;
    }
    return rows;
}

// A scratch directory that cleans up after itself.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("wallenergy_cli_" + tag);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("unknown subcommands print usage and exit 2") {
    const RunResult r = run_cli({"frobnicate"});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("Subcommands") != std::string::npos);

    const RunResult none = run_cli({});
    CHECK(none.code == 2);
    CHECK(none.err.find("Subcommands") != std::string::npos);
}

TEST_CASE("help is not an error") {
    const RunResult r = run_cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("convergence-study") != std::string::npos);
    CHECK(r.err.empty());
}

TEST_CASE("argument problems exit 2 before any computation") {
    // missing required value
    CHECK(run_cli({"compute-beta"}).code == 2);
    // unparsable and non-finite numbers
    CHECK(run_cli({"compute-beta", "--t", "wall"}).code == 2);
    CHECK(run_cli({"compute-beta", "--t", "nan"}).code == 2);
    CHECK(run_cli({"compute-beta", "--t", "inf"}).code == 2);
    // unknown flag
    CHECK(run_cli({"compute-alpha", "--frob", "1"}).code == 2);
    // library-side validation surfaces as an argument error too
    CHECK(run_cli({"beta-curve", "--t-min", "0", "--t-max", "1", "--steps",
                   "1"})
              .code == 2);
    CHECK(run_cli({"minimize", "--eps", "-0.5"}).code == 2);
    // pinning one endpoint without the other
    CHECK(run_cli({"minimize", "--eps", "0.2", "--a-eps", "-1"}).code == 2);
}

TEST_CASE("the resting wall costs nothing on both routes") {
    const RunResult r =
        run_cli({"compute-beta", "--t", "-1", "--cells", "64"});
    REQUIRE(r.code == 0);
    CHECK(count_data_rows(r.out) == 1);
    // Exact zeros, well under the 1e-6 budget.
    CHECK(r.out.find("\n-1,0,0,") != std::string::npos);
    // Resolved config rides along as sorted comment lines.
    CHECK(r.out.find("# command=compute-beta\n") != std::string::npos);
    CHECK(r.out.find("# n_cells=64\n") != std::string::npos);
    CHECK(r.out.find("# version=") != std::string::npos);
}

TEST_CASE("beta-curve emits one row per step") {
    const RunResult r =
        run_cli({"beta-curve", "--t-min", "-1.2", "--t-max", "-0.8",
                 "--steps", "9", "--cells", "48"});
    REQUIRE(r.code == 0);
    CHECK(count_data_rows(r.out) == 9);
    CHECK(r.out.find("t,beta_phi,beta_psi,L_max,converged\n") !=
          std::string::npos);

    const RunResult cold =
        run_cli({"beta-curve", "--t-min", "-1.2", "--t-max", "-0.8",
                 "--steps", "3", "--cells", "48", "--no-warm-start"});
    REQUIRE(cold.code == 0);
    CHECK(count_data_rows(cold.out) == 3);
    CHECK(cold.out.find("# warm_start=0\n") != std::string::npos);
}

TEST_CASE("seeded sweeps are reproducible and seed-sensitive") {
    const std::vector<std::string> args = {"glue-test", "--count", "6"};
    const RunResult a = run_cli(args);
    const RunResult b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out); // byte-identical bodies
    CHECK(count_data_rows(a.out) == 6);
    CHECK(a.out.find("A,m,T,f0,df0,fT,dfT,sup_f,ratio_k0,ratio_k2\n") !=
          std::string::npos);

    const RunResult other =
        run_cli({"glue-test", "--count", "6", "--seed", "7"});
    REQUIRE(other.code == 0);
    CHECK(other.out != a.out);
    CHECK(other.out.find("# seed=7\n") != std::string::npos);
}

TEST_CASE("the ratio battery stacks all three families") {
    const RunResult r = run_cli(
        {"check-inequalities", "--count", "3", "--cells", "64"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("name,seed,lhs,rhs,ratio\n") != std::string::npos);
    CHECK(r.out.find("inter1,") != std::string::npos);
    CHECK(r.out.find("inter2[") != std::string::npos);
    CHECK(r.out.find("inter3[0],") != std::string::npos);
    // 3 first-family rows, 9 section lengths per seed for the second, two
    // shrinking walls for the third.
    CHECK(count_data_rows(r.out) == 3 + 27 + 2);
}

TEST_CASE("free minimization reports a resting profile") {
    const RunResult r = run_cli({"minimize", "--eps", "0.2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# constraints=free\n") != std::string::npos);
    CHECK(r.out.find("# converged=1\n") != std::string::npos);
    CHECK(r.out.find("P,C,phi,psi,eps,f_eps\n") != std::string::npos);
    // Both wells cost zero; every column but eps vanishes.
    CHECK(r.out.find("\n0,0,0,0,0.2") != std::string::npos);
}

TEST_CASE("pinned minimization writes files under --out-dir") {
    TempDir dir("minimize");
    const RunResult r =
        run_cli({"minimize", "--eps", "0.2", "--a-eps", "-1", "--b-eps",
                 "1", "--out-dir", dir.str(), "--dump-profile"});
    REQUIRE(r.code == 0);

    std::ifstream csv(dir.path / "minimize.csv");
    REQUIRE(csv.good());
    std::stringstream body;
    body << csv.rdbuf();
    CHECK(body.str().find("# a_eps=-1\n") != std::string::npos);
    CHECK(body.str().find("P,C,phi,psi,eps,f_eps\n") != std::string::npos);

    std::ifstream prof(dir.path / "minimize_profile.csv");
    REQUIRE(prof.good());
    std::string first;
    std::getline(prof, first);
    CHECK(first.rfind("# ", 0) == 0);
    std::stringstream pbody;
    pbody << prof.rdbuf();
    CHECK(pbody.str().find("x,u,du\n") != std::string::npos);

    // The dump needs somewhere to land.
    CHECK(run_cli({"minimize", "--eps", "0.2", "--dump-profile"}).code == 2);
}

TEST_CASE("convergence studies run from a config file") {
    TempDir dir("study");
    const auto cfg_path = dir.path / "study.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "# two cheap rungs\n"
               "epsilons = 0.2, 0.1\n"
               "a0 = -1\n"
               "b0 = -1\n"
               "a_eps = const:-1\n"
               "b_eps = const:-1\n"
               "cells_per_layer = 32\n"
               "seed = 42\n";
    }

    const RunResult r =
        run_cli({"convergence-study", "--config", cfg_path.string()});
    REQUIRE(r.code == 0);
    CHECK(count_data_rows(r.out) == 2);
    CHECK(r.out.find("eps,direct_min,recovery_energy,predicted,"
                     "predicted_alt,rel_gap,offwell_measure,inferred_jumps"
                     "\n") != std::string::npos);
    CHECK(r.out.find("# a_eps=const:-1\n") != std::string::npos);
    CHECK(r.out.find("# epsilons=0.2,0.1\n") != std::string::npos);
    // Data pinned at the resting well: both rungs predict zero exactly.
    CHECK(r.out.find(",0,0,") != std::string::npos);

    // Flag overrides beat config values and show up in the header.
    const RunResult reseeded = run_cli({"convergence-study", "--config",
                                        cfg_path.string(), "--seed", "9"});
    REQUIRE(reseeded.code == 0);
    CHECK(reseeded.out.find("# seed=9\n") != std::string::npos);
}

TEST_CASE("bad study configs are argument errors") {
    TempDir dir("badcfg");

    CHECK(run_cli({"convergence-study", "--config",
                   (dir.path / "missing.cfg").string()})
              .code == 2);

    const auto bad_key = dir.path / "bad_key.cfg";
    std::ofstream(bad_key) << "epsilons = 0.2\nwibble = 3\n";
    CHECK(run_cli({"convergence-study", "--config", bad_key.string()})
              .code == 2);

    const auto bad_rule = dir.path / "bad_rule.cfg";
    std::ofstream(bad_rule) << "a_eps = drift:0.5\n";
    CHECK(run_cli({"convergence-study", "--config", bad_rule.string()})
              .code == 2);

    const auto bad_number = dir.path / "bad_number.cfg";
    std::ofstream(bad_number) << "a0 = wall\n";
    CHECK(run_cli({"convergence-study", "--config", bad_number.string()})
              .code == 2);

    const auto not_kv = dir.path / "not_kv.cfg";
    std::ofstream(not_kv) << "epsilons 0.2\n";
    CHECK(run_cli({"convergence-study", "--config", not_kv.string()})
              .code == 2);
}

TEST_CASE("approach rules parse into eps-dependent data") {
    TempDir dir("approach");
    const auto cfg_path = dir.path / "study.cfg";
    // Rates only shape the data; one cheap rung keeps this fast. The b datum
    // at eps = 0.25 is -1 + (0.5 - (-1)) * 0.25^0.5 = -0.25.
    std::ofstream(cfg_path) << "epsilons = 0.25\n"
                               "a0 = -1\n"
                               "b0 = -1\n"
                               "b_eps = approach:0.5,0.5\n"
                               "cells_per_layer = 32\n";

    const RunResult r =
        run_cli({"convergence-study", "--config", cfg_path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# b_eps=approach:0.5,0.5\n") != std::string::npos);
    CHECK(count_data_rows(r.out) == 1);
}

} // TEST_SUITE
