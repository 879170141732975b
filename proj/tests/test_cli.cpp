#include <doctest.h>
#include <cstdlib>
#include <string>
#include <svreg/io.hpp>

namespace io = svreg::io;

namespace {

const std::string kCli = SVREG_CLI_PATH;

io::fs::path scratch(const std::string& name)
{
    const auto dir = io::fs::temp_directory_path() / ("svreg_cli_test_" + name);
    io::fs::remove_all(dir);
    io::fs::create_directories(dir);
    return dir;
}

int run(const std::string& args)
{
    const int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("simulate writes the dataset deterministically")
{
    const auto a = scratch("sim_a"), b = scratch("sim_b");
    REQUIRE(run("simulate --setting s1 --n 100 --seed 7 --out " + a.string()) == 0);
    REQUIRE(run("simulate --setting s1 --n 100 --seed 7 --out " + b.string()) == 0);
    for (const char* f : {"X.csv", "Z.csv", "y.csv", "groups.json", "truth.json", "meta.json"}) {
        REQUIRE(io::fs::exists(a / f));
        CHECK(io::sha256_file(a / f) == io::sha256_file(b / f));
    }
    CHECK(io::fs::exists(a / "manifest.json"));
    const auto t = io::read_csv(a / "X.csv");
    CHECK(t.values.rows() == 100);
    CHECK(t.values.cols() == 50);
    CHECK(run("simulate --setting s9 --n 100 --seed 7 --out " + a.string()) == 2);
}

TEST_CASE("fit subcommand")
{
    const auto data = scratch("fit_data");
    REQUIRE(run("simulate --setting s1 --n 80 --seed 3 --out " + data.string()) == 0);
    const auto big = scratch("fit_big");
    REQUIRE(run("fit --method svreg --data " + data.string() + " --lambda 99 --out " + big.string()) == 0);
    const auto j = io::read_json(big / "fit.json");
    const auto c = io::coefficients_from_json(j["coefficients_original"]);
    CHECK((c.beta.array() == 0.0).all());
    CHECK((c.theta.array() == 0.0).all());

    const auto p = scratch("fit_plasso"), s = scratch("fit_single");
    REQUIRE(run("fit --method plasso --data " + data.string() + " --lambda 0.2 --out " + p.string()) == 0);
    REQUIRE(run("fit --method svreg --x " + (data / "X.csv").string() + " --z " + (data / "Z.csv").string() + " --y "
                + (data / "y.csv").string() + " --singleton-groups --unit-weights --lambda 0.2 --out " + s.string())
            == 0);
    const double op = io::read_json(p / "fit.json")["final_objective"];
    const double os = io::read_json(s / "fit.json")["final_objective"];
    CHECK(std::abs(op - os) < 1e-8);

    const auto none = scratch("fit_nogroups");
    CHECK(run("fit --method svreg --x " + (data / "X.csv").string() + " --z " + (data / "Z.csv").string() + " --y "
              + (data / "y.csv").string() + " --lambda 0.2 --out " + none.string())
          == 2);
    const std::string msg_file = (none / "msg.txt").string();
    const int rc = std::system((kCli + " fit --method svreg --x " + (data / "X.csv").string() + " --z " + (data / "Z.csv").string()
                 + " --y " + (data / "y.csv").string() + " --lambda 0.2 --out " + none.string() + " 2> " + msg_file)
                    .c_str());
    CHECK(rc != 0);
    CHECK(io::read_text(msg_file).find("--singleton-groups") != std::string::npos);
}

TEST_CASE("cv subcommand validates folds and is reproducible")
{
    const auto data = scratch("cv_data");
    REQUIRE(run("simulate --setting s3 --n 60 --seed 4 --out " + data.string()) == 0);
    const auto a = scratch("cv_a"), b = scratch("cv_b");
    CHECK(run("cv --method plasso --data " + data.string() + " --v 1 --seed 1 --out " + a.string()) == 2);
    const std::string common = "cv --method svreg --data " + data.string() + " --grid-coarse --v 5 --seed 11 --out ";
    REQUIRE(run(common + a.string()) == 0);
    REQUIRE(run(common + b.string()) == 0);
    CHECK(io::read_text(a / "cv.json") == io::read_text(b / "cv.json"));
    const auto cv = io::read_json(a / "cv.json");
    CHECK(cv["lambdas"].size() == 60);
    CHECK(io::fs::exists(a / "fit.json"));
}

TEST_CASE("config file supplies flags and command-line flags win")
{
    const auto data = scratch("cfg_data");
    REQUIRE(run("simulate --setting s3 --n 40 --seed 5 --out " + data.string()) == 0);
    const auto out = scratch("cfg_out");
    io::write_json(out / "config.json", io::json{{"method", "plasso"}, {"fit", {{"lambda", 0.3}}}});
    REQUIRE(run("--config " + (out / "config.json").string() + " fit --data " + data.string() + " --out " + out.string())
            == 0);
    CHECK(io::read_json(out / "fit.json")["lambda"] == 0.3);
    REQUIRE(run("--config " + (out / "config.json").string() + " fit --data " + data.string()
                + " --lambda 0.5 --out " + out.string())
            == 0);
    CHECK(io::read_json(out / "fit.json")["lambda"] == 0.5);
}

TEST_CASE("metrics subcommand recomputes rates from saved fits")
{
    const auto data = scratch("met_data");
    REQUIRE(run("simulate --setting s1 --n 80 --seed 6 --out " + data.string()) == 0);
    const auto f = scratch("met_fit");
    REQUIRE(run("fit --method svreg --data " + data.string() + " --lambda 0.1 --out " + f.string()) == 0);
    const auto m = scratch("met_out");
    REQUIRE(run("metrics --fit " + (f / "fit.json").string() + " --truth " + (data / "truth.json").string() + " --data "
                + data.string() + " --out " + m.string())
            == 0);
    const auto j = io::read_json(m / "metrics.json");
    CHECK(j.dump().find("sensitivity") != std::string::npos);
}

TEST_CASE("bench with one replication produces all tables")
{
    const auto out = scratch("bench");
    REQUIRE(run("bench --setting s3 --methods plasso,svreg --reps 1 --seed 2 --grid-coarse --out " + out.string()) == 0);
    for (const char* f : {"table.csv", "roc.csv", "diffcurve.csv", "replications.csv", "manifest.json"}) {
        CHECK(io::fs::exists(out / f));
    }
    const auto table = io::read_text(out / "table.csv");
    CHECK(table.rfind("metric,category,plasso,plasso_se,svreg,svreg_se\n", 0) == 0);
}
