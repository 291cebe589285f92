#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fkcg/config.hpp"
#include "fkcg/experiments.hpp"

using namespace fkcg;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string &leaf) {
    fs::path dir = fs::temp_directory_path() / "fkcg-test" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing and accessors") {
    Config cfg = Config::from_text(
        "# comment\n"
        "d = 2\n"
        "rho.bernoulli = 0.8   # inline comment\n"
        "interaction.family=linear\n"
        "interaction.param = 0.9\n"
        "Ns = 16, 32, 64\n"
        "bc = wired\n");
    CHECK(cfg.integer("d") == 2);
    CHECK(cfg.real("rho.bernoulli") == doctest::Approx(0.8));
    CHECK(cfg.str("bc") == "wired");
    CHECK(cfg.int_list("Ns") == std::vector<int>{16, 32, 64});
    CHECK(cfg.integer("missing", 7) == 7);
    CHECK(cfg.flag("absent", true));

    CHECK_THROWS_AS(cfg.str("nope"), ConfigError);
    CHECK_THROWS_AS(cfg.integer("bc"), ConfigError);
    CHECK_THROWS_AS(Config::from_text("novalue\n"), ConfigError);

    DisorderLaw rho = cfg.disorder("rho");
    CHECK(rho.atoms.size() == 2);
    FKParams params = cfg.fk_params();
    CHECK(params.interaction(1.0) == doctest::Approx(0.9));

    Config atoms = Config::from_text("rho.atoms = 0:0.3, 0.5:0.2, 1:0.5\n");
    CHECK(atoms.disorder("rho").atoms.size() == 3);
    CHECK_THROWS_AS(Config::from_text("rho.atoms = 0:0.5, 1:0.6\n").disorder("rho"),
                    ConfigError);
    CHECK_THROWS_AS(Config{}.disorder("rho"), ConfigError);
}

TEST_CASE("config hash is stable and value-sensitive") {
    Config a = Config::from_text("x = 1\ny = 2\n");
    Config b = Config::from_text("y = 2\nx = 1\n");  // order does not matter
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);

    Config c = a;
    c.set("x", "3");
    CHECK(c.hash() != a.hash());
    Config d = a;
    d.set("z", "0");
    CHECK(d.hash() != a.hash());
}

TEST_CASE("experiment dispatch and outputs") {
    CHECK(experiment_names().size() == 11);
    CHECK_THROWS_AS(run_experiment("nonsense", Config{}, 1, scratch_dir("bad").string()),
                    ConfigError);

    fs::path dir = scratch_dir("dlr");
    CHECK(run_experiment("dlr-failure", Config{}, 1, dir.string()) == 0);
    CHECK(fs::exists(dir / "config.resolved"));
    std::string records = slurp(dir / "records.jsonl");
    CHECK(records.find("\"metric\":\"margin\"") != std::string::npos);
    CHECK(records.find("\"experiment\":\"dlr-failure\"") != std::string::npos);
    // 17-significant-digit reals with '.' decimal
    CHECK(records.find("0.27272727272727271") != std::string::npos);

    fs::path en = scratch_dir("enum");
    Config ecfg = Config::from_text("q = 2\ninteraction.param = 0.6\nbc = free\n");
    CHECK(run_experiment("enumerate", ecfg, 1, en.string()) == 0);
    std::string csv = slurp(en / "marginals.csv");
    CHECK(csv.substr(0, 14) == "edge,marginal\n");
    CHECK(csv.find("\r") == std::string::npos);  // LF only

    fs::path cov = scratch_dir("cov");
    Config ccfg = Config::from_text("dims = 2\nmax_side = 8\n");
    CHECK(run_experiment("covering-check", ccfg, 1, cov.string()) == 0);

    fs::path piv = scratch_dir("piv");
    Config pcfg = Config::from_text("N = 4\nconfigs = 25\n");
    CHECK(run_experiment("pivotal-audit", pcfg, 5, piv.string()) == 0);
}

TEST_CASE("reproduce: byte-identical rerun and tamper detection") {
    fs::path dir = scratch_dir("repro");
    Config cfg = Config::from_text(
        "Ns = 6, 8\nreplicas = 40\nrho.bernoulli = 0.9\ninteraction.param = 0.9\n");
    REQUIRE(run_experiment("crossing", cfg, 42, dir.string()) == 0);

    std::ostringstream diag;
    CHECK(reproduce(dir.string(), diag) == 0);

    // altered seed: every sampled value shifts and the config hash changes
    fs::path tampered = scratch_dir("repro-tamper");
    fs::copy(dir, tampered, fs::copy_options::recursive);
    std::string resolved = slurp(tampered / "config.resolved");
    std::size_t at = resolved.find("seed=42");
    REQUIRE(at != std::string::npos);
    resolved.replace(at, 7, "seed=43");
    std::ofstream(tampered / "config.resolved", std::ios::binary) << resolved;
    std::ostringstream diag2;
    CHECK(reproduce(tampered.string(), diag2) == 2);
    CHECK(diag2.str().find("config_hash") != std::string::npos);
    CHECK(diag2.str().find("value") != std::string::npos);

    // altered replica count: mismatch attributed to the replicas field
    fs::path tampered2 = scratch_dir("repro-tamper2");
    fs::copy(dir, tampered2, fs::copy_options::recursive);
    std::string resolved2 = slurp(tampered2 / "config.resolved");
    std::size_t at2 = resolved2.find("replicas=40");
    REQUIRE(at2 != std::string::npos);
    resolved2.replace(at2, 11, "replicas=41");
    std::ofstream(tampered2 / "config.resolved", std::ios::binary) << resolved2;
    std::ostringstream diag3;
    CHECK(reproduce(tampered2.string(), diag3) == 2);
    CHECK(diag3.str().find("replicas") != std::string::npos);
}

TEST_CASE("experiment exit codes") {
    // a single run covers both the passing and the fixture path
    fs::path ok = scratch_dir("dom-ok");
    Config cfg = Config::from_text(
        "L = 4\nreplicas = 300\nevents = 8\nq = 1\ninteraction.param = 0.6\n");
    cfg.set("rho.bernoulli", "0.8");
    CHECK(run_experiment("psi-domination", cfg, 11, ok.string()) == 0);

    fs::path bad = scratch_dir("dom-bad");
    cfg.set("violate", "true");
    CHECK(run_experiment("psi-domination", cfg, 11, bad.string()) == 0);
}
