#include "doctest.h"

// End-to-end tests of the perpetua binary: exit codes, manifest stamping,
// byte-level determinism, and the documented JSON/CSV surfaces.

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

using nlohmann::json;

struct CliResult {
    int exit_code = -1;
    std::string stdout_text;
};

std::string work_dir() {
    static const std::string dir = [] {
        std::string d = "/tmp/perpetua_cli_test_XXXXXX";
        if (mkdtemp(d.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        return d;
    }();
    return dir;
}

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(PERPETUA_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), buf.size(), pipe) != nullptr) result.stdout_text += buf.data();
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* kPqdModel =
    R"({"kind":"independent","A":{"law":"uniform","a_plus":0.5},"B":{"sigma":1,"rho":2}})";

}  // namespace

TEST_CASE("transform on the pqd example reproduces the fixed point") {
    const std::string out = work_dir() + "/transform.csv";
    const auto r = run_cli("transform --ldm '{\"kind\":\"pqd\",\"gamma\":1,\"a_plus\":0.5,"
                           "\"rho\":2}' --seed 42 --out " + out);
    REQUIRE(r.exit_code == 0);
    const json manifest = json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest["summary"]["lambda_star"].get<double>() ==
          doctest::Approx(0.75).epsilon(1e-9));
    CHECK(manifest["summary"]["admissible"].get<bool>());
    CHECK(manifest["summary"]["residual"].get<double>() < 1e-6);
    CHECK(manifest["config_sha256"].get<std::string>().size() == 64);
}

TEST_CASE("transform derives the pqd ldm from a model + f pair") {
    const std::string out = work_dir() + "/transform_model.csv";
    const auto r = run_cli(std::string("transform --model '") + kPqdModel +
                           "' --f '{\"rho\":2}' --seed 42 --out " + out);
    REQUIRE(r.exit_code == 0);
    const json manifest = json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest["summary"]["lambda_star"].get<double>() ==
          doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("compare-bk18 verdicts") {
    const std::string out = work_dir() + "/bk18.csv";
    auto r = run_cli("compare-bk18 --case a --rho 2 --seed 1 --out " + out);
    REQUIRE(r.exit_code == 0);
    json manifest = json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest["summary"]["verdict"] == "equal");
    CHECK(std::abs(manifest["summary"]["gap"].get<double>()) < 1e-6);

    r = run_cli("compare-bk18 --case b --rho 3 --seed 1 --out " + out);
    REQUIRE(r.exit_code == 0);
    manifest = json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest["summary"]["verdict"] == "strict_gap");
    CHECK(manifest["summary"]["gap"].get<double>() > 0.1);
}

TEST_CASE("csv outputs start with the manifest line and repeat byte-identically") {
    const std::string out1 = work_dir() + "/mc1.csv";
    const std::string base = std::string("ldm --model '") + kPqdModel +
                             "' --f '{\"rho\":2}' --y-grid 0.5 --t-grid 1.5,2.5 "
                             "--mode monte_carlo --n-samples 200000 --workers 2 ";
    REQUIRE(run_cli(base + "--seed 7 --out " + out1).exit_code == 0);
    const std::string a = slurp(out1);
    REQUIRE(run_cli(base + "--seed 7 --out " + out1).exit_code == 0);
    const std::string b = slurp(out1);
    CHECK(a == b);  // identical config + seed + worker count => identical bytes

    const json manifest = json::parse(slurp(out1 + ".manifest.json"));
    const std::string expected_first =
        "# perpetua-manifest: " + manifest["config_sha256"].get<std::string>();
    CHECK(a.substr(0, expected_first.size()) == expected_first);
    CHECK(a.find('\r') == std::string::npos);  // LF endings only

    REQUIRE(run_cli(base + "--seed 8 --out " + out1).exit_code == 0);
    const std::string c = slurp(out1);
    // the seed reaches the sampler: the data rows differ, not just the stamp
    CHECK(c.substr(c.find('\n')) != a.substr(a.find('\n')));
}

TEST_CASE("json format embeds the manifest hash in the document") {
    const std::string out = work_dir() + "/tr.json";
    const auto r = run_cli("transform --ldm '{\"kind\":\"pqd\",\"gamma\":1,\"a_plus\":0.5,"
                           "\"rho\":2}' --seed 42 --format json --out " + out);
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(slurp(out));
    CHECK(doc.contains("perpetua_manifest"));
    CHECK(doc["columns"] == json({"lambda", "phi", "argmin_y"}));
    CHECK(doc["summary"]["lambda_star"].get<double>() == doctest::Approx(0.75));
}

TEST_CASE("config file plus flag overrides, flags win") {
    const std::string cfg = work_dir() + "/cfg.json";
    {
        std::ofstream os(cfg);
        os << R"({"ldm":{"kind":"pqd","gamma":1,"a_plus":0.5,"rho":2},"seed":1,)"
           << R"("lambda_grid":[0.1,0.75,2.0],"out":")" << work_dir() << "/flagwin.csv\"}";
    }
    const std::string out = work_dir() + "/flagwin2.csv";
    const auto r = run_cli("transform --config " + cfg + " --out " + out);
    REQUIRE(r.exit_code == 0);
    const std::string data = slurp(out);  // the flag's path, not the config's
    CHECK(data.find("0.75") != std::string::npos);
}

TEST_CASE("exit codes") {
    SUBCASE("schema violations exit 2") {
        CHECK(run_cli("tail --seed 1").exit_code == 2);  // missing model/f/t-grid
        CHECK(run_cli("transform --ldm '{\"kind\":\"pqd\",\"gamma\":\"x\",\"a_plus\":0.5,"
                      "\"rho\":2}' --seed 1")
                  .exit_code == 2);
        CHECK(run_cli(std::string("ldm --model '") + kPqdModel +
                      "' --f '{\"rho\":2}' --y-grid 0.5 --t-grid 2,1 --seed 1")
                  .exit_code == 2);  // unsorted grid
        const std::string out = work_dir() + "/noseed.csv";
        CHECK(run_cli(std::string("ldm --model '") + kPqdModel +
                      "' --f '{\"rho\":2}' --y-grid 0.5 --t-grid 2 --out " + out)
                  .exit_code == 2);  // seed mandatory
    }
    SUBCASE("model/command mismatches exit 3") {
        const std::string out = work_dir() + "/mismatch.csv";
        // bounded B: the LDM is a non-admissible step, lambda* is not in (0, inf)
        CHECK(run_cli("envelope --model '{\"kind\":\"independent\",\"A\":{\"law\":\"uniform\","
                      "\"a_plus\":0.5},\"B\":{\"constant\":1}}' --f '{\"rho\":2}' --seed 1 "
                      "--out " + out)
                  .exit_code == 3);
        // f index mismatched to the B tail
        CHECK(run_cli(std::string("transform --model '") + kPqdModel +
                      "' --f '{\"rho\":3}' --seed 1 --out " + out)
                  .exit_code == 3);
    }
    SUBCASE("validate-model property failures exit 4") {
        const std::string cfg = work_dir() + "/expect_bad.json";
        {
            std::ofstream os(cfg);
            os << R"({"model":{"kind":"atom_survival","rho":2,"alpha":{"variant":"case_a"}},)"
               << R"("n_samples":50000,"seed":10,"out":")" << work_dir()
               << R"(/vbad.csv","expect_joint":[[0.3,1.5,0.05]]})";
        }
        CHECK(run_cli("validate-model --config " + cfg).exit_code == 4);
    }
    SUBCASE("environment seed fallback") {
        const std::string out = work_dir() + "/envseed.csv";
        const std::string cmd = std::string("PERPETUA_SEED=9 ") + PERPETUA_CLI_PATH +
                                " ldm --model '" + kPqdModel +
                                "' --f '{\"rho\":2}' --y-grid 0.5 --t-grid 2 "
                                "--out " + out + " >/dev/null 2>&1";
        CHECK(std::system(cmd.c_str()) == 0);
    }
}

TEST_CASE("validate-model accepts the atom-survival family") {
    const std::string out = work_dir() + "/validate.csv";
    const auto r =
        run_cli("validate-model --model '{\"kind\":\"atom_survival\",\"rho\":2,"
                "\"alpha\":{\"variant\":\"case_a\"}}' --n-samples 100000 --seed 2 --out " +
                out);
    CHECK(r.exit_code == 0);
    const std::string data = slurp(out);
    CHECK(data.find("pqd_violation_exists,1") != std::string::npos);
    CHECK(data.find("atom_mass") != std::string::npos);
}

TEST_CASE("transform derives the atom-family ldm from model + f") {
    const std::string out = work_dir() + "/transform_atom.csv";
    const auto r = run_cli(
        "transform --model '{\"kind\":\"atom_survival\",\"rho\":3,"
        "\"alpha\":{\"variant\":\"case_b\"}}' --f '{\"rho\":3}' --seed 1 --out " + out);
    REQUIRE(r.exit_code == 0);
    const json manifest = json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest["summary"]["lambda_star"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-5));
    CHECK(manifest["summary"]["admissible"].get<bool>());
}

TEST_CASE("one-step command reports the predicted phi value") {
    const std::string out = work_dir() + "/onestep.csv";
    const auto r = run_cli(std::string("one-step --model '") + kPqdModel +
                           "' --f '{\"rho\":2}' --lambda 0.75 --t-grid 1,2 "
                           "--n-samples 50000 --seed 6 --out " + out);
    REQUIRE(r.exit_code == 0);
    const json manifest = json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest["summary"]["predicted_phi"].get<double>() ==
          doctest::Approx(0.75).epsilon(1e-6));
    CHECK(manifest["summary"]["lambda"].get<double>() == 0.75);
}

TEST_CASE("envelope command emits checkpoints and the predicted limit") {
    const std::string out = work_dir() + "/envelope.csv";
    const auto r = run_cli(std::string("envelope --model '") + kPqdModel +
                           "' --f '{\"rho\":2}' --N 20000 --n-traj 2 --seed 5 --out " + out);
    REQUIRE(r.exit_code == 0);
    const json manifest = json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest["summary"]["lambda_star"].get<double>() ==
          doctest::Approx(0.75).epsilon(1e-9));
    CHECK(manifest["summary"]["predicted_limit"].get<double>() ==
          doctest::Approx(std::pow(0.75, -0.5)).epsilon(1e-12));
    CHECK(manifest["summary"]["final_window_ratios"].size() == 2);
    const std::string data = slurp(out);
    CHECK(data.find("n,traj,running_max_ratio") != std::string::npos);
}

TEST_CASE("tail command reports the predicted exponent next to the ratios") {
    const std::string out = work_dir() + "/tail.csv";
    const auto r = run_cli(std::string("tail --model '") + kPqdModel +
                           "' --f '{\"rho\":2}' --t-grid 1,2 --n-samples 100000 "
                           "--seed 3 --out " + out);
    REQUIRE(r.exit_code == 0);
    const json manifest = json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest["summary"]["predicted_lambda_star"].get<double>() ==
          doctest::Approx(0.75).epsilon(1e-9));
    CHECK(manifest["summary"]["method"] == "series");
}
