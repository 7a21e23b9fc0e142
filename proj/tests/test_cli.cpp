#include "catch_amalgamated.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spikelab/cli.hpp"
#include "spikelab/csv.hpp"
#include "spikelab/estimate.hpp"
#include "spikelab/ingest.hpp"

using namespace spikelab;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "spikelab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "spikelab_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string("\"") + SPIKELAB_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("help and usage errors", "[cli]") {
    const Run help = run({"--help"});
    CHECK(help.code == 0);
    CHECK_THAT(help.out, ContainsSubstring("study-estimation"));
    CHECK(run({"estimate", "--help"}).code == 0);

    const Run unknown = run({"estimate", "--in", "x.csv", "--bogus"});
    CHECK(unknown.code == 2);
    CHECK_THAT(unknown.err, ContainsSubstring("--bogus"));
    CHECK(run({}).code == 2);
    CHECK(run({"simulate"}).code == 2);
    CHECK(run({"price-forward", "--T", "notanumber"}).code == 2);
}

TEST_CASE("computation errors exit 1 with one line", "[cli]") {
    const Run missing = run({"estimate", "--in", scratch("does_not_exist.csv").string()});
    CHECK(missing.code == 1);
    CHECK(missing.err.rfind("error: ", 0) == 0);
    CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

    const Run bad_mode = run({"price-forward", "--T", "1", "--model", "weird"});
    CHECK(bad_mode.code == 1);
    const Run backwards = run({"price-forward", "--t", "1", "--T", "0.5"});
    CHECK(backwards.code == 1);
}

TEST_CASE("simulate then estimate", "[cli]") {
    const auto path = scratch("sim.csv");
    const Run sim = run({"simulate", "--seed", "11", "--lambda", "10", "--beta", "200", "--out", path.string(), "--json"});
    REQUIRE(sim.code == 0);
    const json s = json::parse(sim.out);
    CHECK(s["n"] == 10000);
    CHECK(std::filesystem::exists(path.string() + ".truth.csv"));
    CHECK(read_csv(path.string() + ".truth.csv").rows.size() == s["jumps"].get<std::size_t>());

    const Run est = run({"estimate", "--in", path.string(), "--json"});
    REQUIRE(est.code == 0);
    const json e = json::parse(est.out);
    CHECK(e["mode"] == "signfiltered");
    CHECK(e["lambda_hat"].get<double>() >= 5.0);
    CHECK(e["lambda_hat"].get<double>() <= 14.0);
    CHECK(e["beta_hat"].get<double>() >= 188.0);
    CHECK(e["beta_hat"].get<double>() <= 224.0);
    CHECK(e.contains("diagnostics"));
    CHECK(e["ingest"]["format"] == "numeric");

    // The library gives the same numbers on the same file.
    const LoadedSeries series = load_spot_csv(path, IngestRules{});
    const auto lib = estimate_spikes(series.path, DetectionConfig{});
    CHECK(e["beta_hat"].get<double>() == lib.estimates.beta_hat);
    CHECK(e["count"].get<Index>() == lib.estimates.count);

    const Run text = run({"estimate", "--in", path.string(), "--horizon-years", "0.5"});
    REQUIRE(text.code == 0);
    CHECK_THAT(text.out, ContainsSubstring("beta_hat: "));
    CHECK_THAT(text.out, ContainsSubstring("per_year.lambda: "));

    const auto flags = scratch("flags.csv");
    const Run det = run({"detect", "--in", path.string(), "--mode", "plain", "--flags-out", flags.string(), "--json"});
    REQUIRE(det.code == 0);
    const json d = json::parse(det.out);
    CHECK(d["mode"] == "plain");
    CHECK(read_csv(flags).rows.size() == d["count"].get<std::size_t>());
    CHECK(d["count"].get<Index>() >= e["count"].get<Index>());

    CHECK(run({"detect", "--in", path.string(), "--mode", "fancy"}).code == 1);
}

TEST_CASE("calendar input reports per-year rates", "[cli]") {
    const auto path = scratch("calendar.csv");
    {
        std::ofstream f(path);
        f << "t,X\n";
        for (int h = 0; h < 200; ++h) {
            const int day = 1 + h / 24, hour = h % 24;
            const double x = 40.0 + ((h * 7919) % 13) * 0.1 + (h == 120 ? 60.0 : 0.0) + (h == 121 ? 30.0 : 0.0);
            f << "2016-01-" << (day < 10 ? "0" : "") << day << "T" << (hour < 10 ? "0" : "") << hour << ":00:00Z," << x
              << "\n";
        }
    }
    const Run est = run({"estimate", "--in", path.string(), "--json"});
    REQUIRE(est.code == 0);
    const json e = json::parse(est.out);
    CHECK(e["ingest"]["format"] == "iso8601");
    CHECK(e["ingest"]["step"] == 3600.0);
    CHECK_THAT(e["per_year"]["horizon_years"].get<double>(), WithinRel(199.0 * 3600.0 / (365.0 * 86400.0), 1e-12));
}

TEST_CASE("forward and strip pricing commands", "[cli]") {
    const Run arith = run({"price-forward", "--T", "0.05", "--json"});
    REQUIRE(arith.code == 0);
    CHECK(json::parse(arith.out)["model"] == "arith");

    const Run delivery = run({"price-forward", "--z", "3", "--T", "0.05", "--theta", "0.01", "--json"});
    REQUIRE(delivery.code == 0);
    CHECK(json::parse(delivery.out)["model"] == "delivery");

    const Run diverging = run({"price-forward", "--T", "0.05", "--log-model"});
    CHECK(diverging.code == 1);

    const auto cfg = scratch("log.cfg");
    std::ofstream(cfg) << "lambda = 10\nbeta = 200\njump.weights = 0.4, 0.6\njump.rates = 6.6667, 10\njump.signs = -1, 1\n";
    const Run log = run({"price-forward", "--config", cfg.string(), "--T", "0.05", "--log-model", "--json"});
    REQUIRE(log.code == 0);
    CHECK(json::parse(log.out)["spike_forward"].get<double>() > 0.0);

    const Run strip = run({"price-strip", "--strike", "40", "--n", "24", "--horizon", "0.00274", "--sims", "200",
                           "--seed", "3", "--json"});
    REQUIRE(strip.code == 0);
    const json p = json::parse(strip.out);
    for (const char* key : {"estimate", "ci95", "stderr", "sims"}) CHECK(p.contains(key));
    CHECK(p["sims"] == 200);
    CHECK(p["ci95"][0].get<double>() <= p["estimate"].get<double>());

    const Run multi = run({"price-strip", "--strike", "40", "--strike", "60", "--n", "24", "--horizon", "0.00274",
                           "--sims", "100", "--no-spikes", "--json"});
    REQUIRE(multi.code == 0);
    CHECK(json::parse(multi.out)["prices"].size() == 2);

    CHECK(run({"price-strip", "--strike", "40", "--n", "24", "--sims", "101", "--antithetic"}).code == 1);
    CHECK(run({"price-strip", "--strike", "40", "--exercises", "weekly"}).code == 1);
}

TEST_CASE("study commands write their outputs", "[cli]") {
    const auto cfg = scratch("study.cfg");
    std::ofstream(cfg) << "study.lambdas = 10\nstudy.betas = 200\nstudy.modes = signfiltered\ngrid.n = 1000\n";
    const auto out = scratch("study_out");
    std::filesystem::remove_all(out);
    const Run study = run({"study-estimation", "--config", cfg.string(), "--reps", "4", "--out", out.string(), "--json"});
    REQUIRE(study.code == 0);
    CHECK(json::parse(study.out)["rows"].size() == 1);
    CHECK(std::filesystem::exists(out / "rows.csv"));
    CHECK(read_csv(out / "replications.csv").rows.size() == 4);

    const auto pout = scratch("pricing_out");
    std::filesystem::remove_all(pout);
    const Run pricing = run({"study-pricing", "--n", "24", "--sims", "50", "--strikes", "40", "300", "--out", pout.string()});
    REQUIRE(pricing.code == 0);
    CHECK(read_csv(pout / "pricing.csv").rows.size() == 4);
}

TEST_CASE("installed binary exit codes", "[cli]") {
    CHECK(run_binary("--help") == 0);
    CHECK(run_binary("estimate --in x.csv --unknown-flag") == 2);
    CHECK(run_binary("estimate --in /nonexistent/spikelab.csv") == 1);
}
