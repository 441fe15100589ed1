#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef RWG_CLI_PATH
#define RWG_CLI_PATH "rwg"
#endif

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args,
            const std::string& stderr_path = "/dev/null") {
    const std::string cmd = std::string(RWG_CLI_PATH) + " " + args +
                            " >/dev/null 2>" + stderr_path;
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_config(const fs::path& p, const std::string& extra = "") {
    std::ofstream f(p);
    f << R"([waveguide]
n = 2.0
d = 1.0
k = 10.0
x_s = 0.05

[perturbation]
type = typeII
kernel = gaussian
variance = 1e-4
corr_length = 2.0

[numerics]
gamma_panels = 16
gamma_order = 8
grid = 32

[mc]
paths = 1500
seed = 42
dz = 5e-3
z_max = 0.4

[run]
z_points = 0.2, 0.4
x_probe = 0.0
)" << extra;
}

} // namespace

TEST_CASE("cli: modes writes CSV and sidecar deterministically") {
    TempDir tmp("rwg_cli_modes");
    const fs::path cfg = tmp.path / "exp.cfg";
    write_config(cfg);
    const fs::path out1 = tmp.path / "out1";
    const fs::path out2 = tmp.path / "out2";
    REQUIRE(run_cli("modes " + cfg.string() + " --out " + out1.string()) == 0);
    REQUIRE(run_cli("modes " + cfg.string() + " --out " + out2.string()) == 0);
    const std::string csv = slurp(out1 / "modes.csv");
    CHECK(csv.find("schema=rwg.modes.v1") != std::string::npos);
    CHECK(csv.find("j,parity,sigma,zeta,beta,A") != std::string::npos);
    // byte-identical rerun
    CHECK(csv == slurp(out2 / "modes.csv"));
    const std::string side = slurp(out1 / "modes.json");
    CHECK(side.find("n_formula") != std::string::npos);
    CHECK(side.find("n_roots") != std::string::npos);
}

TEST_CASE("cli: invalid config fails naming the key") {
    TempDir tmp("rwg_cli_bad");
    const fs::path cfg = tmp.path / "bad.cfg";
    std::ofstream(cfg) << "[waveguide]\nn = 0.9\n";
    const fs::path errfile = tmp.path / "stderr.txt";
    CHECK(run_cli("modes " + cfg.string() + " --out " +
                      (tmp.path / "out").string(),
                  errfile.string()) != 0);
    const std::string err = slurp(errfile);
    CHECK(err.find("waveguide.n") != std::string::npos);
}

TEST_CASE("cli: coupling, spectrum, moments pipeline") {
    TempDir tmp("rwg_cli_pipe");
    const fs::path cfg = tmp.path / "exp.cfg";
    write_config(cfg);
    const fs::path out = tmp.path / "out";
    REQUIRE(run_cli("coupling " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(slurp(out / "coupling.json").find("rwg.coupling.v1") !=
          std::string::npos);
    REQUIRE(run_cli("spectrum " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(slurp(out / "spectrum.json").find("\"gap\"") != std::string::npos);
    REQUIRE(run_cli("moments " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(slurp(out / "moments_mean.csv").find("z,Q_0") != std::string::npos);
    CHECK(slurp(out / "moments_second.csv").find("S_0_0") != std::string::npos);
}

TEST_CASE("cli: expansions on a synthetic weak-dissipation family") {
    TempDir tmp("rwg_cli_exp");
    const fs::path cfg = tmp.path / "exp.cfg";
    write_config(cfg, R"(synthetic = true
gamma_const = 1.0
lambda1 = 0.9, 0.3, 0.6, 1.2
theta_list = 1e-2, 5e-3, 2.5e-3
expansion_mode = dissipation
)");
    const fs::path out = tmp.path / "out";
    REQUIRE(run_cli("expansions " + cfg.string() + " --out " + out.string()) == 0);
    const std::string csv = slurp(out / "expansions.csv");
    CHECK(csv.find("theta,lambda_exact,lambda_pred") != std::string::npos);
    // order-3 agreement: per-row error shrinks by about 8x per halving
    std::istringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    std::getline(ss, line);
    std::vector<double> errs;
    while (std::getline(ss, line)) {
        double th, le, lp, me, mp, ge, gp;
        REQUIRE(std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%lg,%lg,%lg", &th,
                            &le, &lp, &me, &mp, &ge, &gp) == 7);
        errs.push_back(std::abs(le - lp));
    }
    REQUIRE(errs.size() == 3);
    CHECK(errs[0] / errs[2] > 30.0); // ~64x for a clean third order
}

TEST_CASE("cli: scintillation emits the growth curve and prediction") {
    TempDir tmp("rwg_cli_sc");
    const fs::path cfg = tmp.path / "exp.cfg";
    write_config(cfg, R"(synthetic = true
gamma_const = 1.0
lambda1 = 1.0, 0.2, 0.6
theta = 0.05
z_points = 40, 80, 120, 160, 200, 240, 280, 320, 360, 400
)");
    const fs::path out = tmp.path / "out";
    REQUIRE(run_cli("scintillation " + cfg.string() + " --out " + out.string()) ==
            0);
    const std::string csv = slurp(out / "scintillation.csv");
    CHECK(csv.find("z,m2,m4,ratio,exponent") != std::string::npos);
    const std::string doc = slurp(out / "scintillation.json");
    CHECK(doc.find("exponent_weak_dissipation_prediction") != std::string::npos);

    // the measured slope of log(ratio) matches the eigensolve exponent
    std::istringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    std::getline(ss, line);
    std::vector<double> zs, ratios;
    double exponent = 0.0;
    while (std::getline(ss, line)) {
        double z, m2, m4, ratio, expn;
        REQUIRE(std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%lg", &z, &m2, &m4,
                            &ratio, &expn) == 5);
        zs.push_back(z);
        ratios.push_back(ratio);
        exponent = expn;
    }
    REQUIRE(zs.size() >= 2);
    const double slope = (std::log(ratios.back()) - std::log(ratios.front())) /
                         (zs.back() - zs.front());
    CHECK(slope == doctest::Approx(exponent).epsilon(0.01));
    CHECK(exponent > 0.0);
}

TEST_CASE("cli: montecarlo comparison table stays within 3 sigma") {
    TempDir tmp("rwg_cli_mc");
    const fs::path cfg = tmp.path / "exp.cfg";
    write_config(cfg, R"(synthetic = true
gamma_const = 0.8
lambda1 = 0.3, 0.6
)");
    const fs::path out = tmp.path / "out";
    REQUIRE(run_cli("montecarlo " + cfg.string() + " --out " + out.string()) == 0);
    const std::string doc = slurp(out / "montecarlo.json");
    const auto pos = doc.find("fk_fraction_within_3se");
    REQUIRE(pos != std::string::npos);
    double frac = 0.0;
    REQUIRE(std::sscanf(doc.c_str() + pos, "fk_fraction_within_3se\": %lf",
                        &frac) == 1);
    CHECK(frac >= 0.98);
    CHECK(slurp(out / "montecarlo_fk.csv").find("component,ode,mc") !=
          std::string::npos);
    CHECK(slurp(out / "montecarlo_sde.csv").find("z,component,ode,mc") !=
          std::string::npos);
    // seed override changes the sample, deterministic rerun does not
    const fs::path out2 = tmp.path / "out2";
    REQUIRE(run_cli("montecarlo " + cfg.string() + " --out " + out2.string()) ==
            0);
    CHECK(slurp(out / "montecarlo_fk.csv") == slurp(out2 / "montecarlo_fk.csv"));
}

TEST_CASE("cli: continuum command") {
    TempDir tmp("rwg_cli_cont");
    const fs::path cfg = tmp.path / "exp.cfg";
    write_config(cfg, R"(synthetic = true
gamma_const = 1.0
ns = 8, 16
lambda_absorb = 1.0
)");
    const fs::path out = tmp.path / "out";
    REQUIRE(run_cli("continuum " + cfg.string() + " --out " + out.string()) == 0);
    const std::string doc = slurp(out / "continuum.json");
    CHECK(doc.find("lambda_cont") != std::string::npos);
    CHECK(doc.find("mu_square") != std::string::npos);
    CHECK(slurp(out / "continuum_convergence.csv").find("lambda_N_scaled") !=
          std::string::npos);
}

TEST_CASE("cli: overrides, sample dump, refinement table, zero-dissipation gap") {
    TempDir tmp("rwg_cli_extra");
    const fs::path cfg = tmp.path / "exp.cfg";
    write_config(cfg, R"(synthetic = true
gamma_const = 0.8
lambda1 = 0.3, 0.6
sample_dump = 16
)");
    const fs::path out = tmp.path / "a", out2 = tmp.path / "b";
    REQUIRE(run_cli("montecarlo " + cfg.string() + " --out " + out.string()) == 0);
    REQUIRE(run_cli("montecarlo " + cfg.string() + " --out " + out2.string() +
                    " --seed 777") == 0);
    // the seed override changes the sample stream
    CHECK(slurp(out / "montecarlo_fk.csv") != slurp(out2 / "montecarlo_fk.csv"));
    // raw sample dump capped at 16 rows
    const std::string dump = slurp(out / "montecarlo_samples.csv");
    CHECK(dump.find("payoff_from_0") != std::string::npos);
    CHECK(std::count(dump.begin(), dump.end(), '\n') == 2 + 16);

    // --paths override is honored
    const fs::path out3 = tmp.path / "c";
    REQUIRE(run_cli("montecarlo " + cfg.string() + " --out " + out3.string() +
                    " --paths 500") == 0);
    CHECK(slurp(out3 / "montecarlo.json").find("\"paths\": 500") !=
          std::string::npos);

    // continuum refinement table
    write_config(cfg, R"(synthetic = true
gamma_const = 1.0
ns = 8
)");
    REQUIRE(run_cli("continuum " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(slurp(out / "continuum_refinement.csv").find("M,lambda_cont_M") !=
          std::string::npos);

    // spectrum on a zero-dissipation synthetic config: gap within 1e-10
    write_config(cfg, R"(synthetic = true
gamma_const = 1.0
lambda1 = 0.0, 0.0, 0.0
theta = 1.0
)");
    REQUIRE(run_cli("spectrum " + cfg.string() + " --out " + out.string()) == 0);
    const std::string doc = slurp(out / "spectrum.json");
    const auto pos = doc.find("\"gap\": ");
    REQUIRE(pos != std::string::npos);
    double gap = 1.0;
    REQUIRE(std::sscanf(doc.c_str() + pos, "\"gap\": %lf", &gap) == 1);
    CHECK(std::abs(gap) < 1e-10);
}

TEST_CASE("cli: scintillation exponent matches the weak-dissipation formula") {
    TempDir tmp("rwg_cli_sc2");
    const fs::path cfg = tmp.path / "exp.cfg";
    write_config(cfg, R"(synthetic = true
gamma_const = 1.0
lambda1 = 1.0, 0.2, 0.6, 0.4
theta = 0.05
z_points = 50, 500
)");
    const fs::path out = tmp.path / "out";
    REQUIRE(run_cli("scintillation " + cfg.string() + " --out " + out.string()) ==
            0);
    const std::string doc = slurp(out / "scintillation.json");
    double expn = 0.0, pred = 0.0;
    auto grab = [&](const char* key, double& val) {
        const auto pos = doc.find(key);
        REQUIRE(pos != std::string::npos);
        REQUIRE(std::sscanf(doc.c_str() + pos + std::strlen(key), "\": %lf",
                            &val) == 1);
    };
    grab("\"exponent", expn);
    grab("\"exponent_weak_dissipation_prediction", pred);
    CHECK(expn > 0.0);
    CHECK(std::abs(expn - pred) < 0.1 * pred);
}
