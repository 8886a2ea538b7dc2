#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "json.hpp"

#include "osm/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path work_dir() {
    fs::path dir = fs::path(OSM_WORK_DIR) / "cli_artifacts";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args, const std::string& tag, const std::string& env = "") {
    const fs::path out = work_dir() / (tag + ".out");
    const fs::path err = work_dir() / (tag + ".err");
    std::string cmd = env.empty() ? std::string() : env + " ";
    cmd += '"' + std::string(OSM_CLI_PATH) + "\" " + args;
    cmd += " > \"" + out.string() + "\" 2> \"" + err.string() + '"';
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_text(const std::string& name, const std::string& content) {
    const fs::path p = work_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

} // namespace

TEST_CASE("help and malformed invocations") {
    CHECK(run_cli("--help", "help").code == 0);
    CHECK(run_cli("", "nosub").code == 2);
    CHECK(run_cli("frobnicate", "badsub").code == 2);
    CHECK(run_cli("optimize --sigma notanumber", "badnum").code == 2);
    CHECK(run_cli("optimize --sigma -1 --deltas 1e-2", "badsigma").code == 2);
    CHECK(run_cli("optimize --variant sideways --deltas 1e-2", "badvariant").code == 2);
    CHECK(run_cli("bound --outer neumann --p 2", "badouter").code == 2);
}

TEST_CASE("bound command: parameters, sweep, and JSON round trip") {
    const fs::path out = work_dir() / "bound.json";
    CliResult r = run_cli("bound --p 4 --kmax 100 --knum 10 --json \"" + out.string() + '"',
                          "bound");
    REQUIRE(r.code == 0);

    json doc = json::parse(slurp(out));
    CHECK(doc.at("schema_version") == osm::report::schema_version);
    CHECK(doc.at("command") == "bound");
    CHECK(doc.at("rows").size() == 11); // k = 0 plus the 10-point log sweep
    for (const json& row : doc.at("rows")) CHECK(row.at("bound").get<double>() < 1.0);

    // the emitted config re-parses to an identical JSON object
    osm::ProblemConfig cfg = osm::report::config_from_json(doc.at("config"));
    CHECK(osm::report::to_json(cfg) == doc.at("config"));
    osm::TransmissionParams params = osm::report::params_from_json(doc.at("params"));
    REQUIRE(params.values.size() == 1);
    CHECK(params.values[0] == 4.0);

    CHECK(run_cli("bound", "bound_nop").code == 2);          // no parameters given
    CHECK(run_cli("bound --pminus 2", "bound_half").code == 2); // incomplete pair
    CHECK(run_cli("bound --pminus 2 --pplus 14 --knum 5", "bound_pair").code == 0);
}

TEST_CASE("optimize command: reports, exit codes, and byte-identical reruns") {
    const fs::path csv1 = work_dir() / "opt1.csv";
    const fs::path csv2 = work_dir() / "opt2.csv";
    const fs::path js = work_dir() / "opt.json";
    const std::string base = "optimize --J 2 --outer dirichlet --deltas 1e-2 ";

    CliResult r1 = run_cli(base + "--csv \"" + csv1.string() + "\" --json \"" + js.string() + '"',
                           "opt1");
    REQUIRE(r1.code == 0);
    CliResult r2 = run_cli(base + "--csv \"" + csv2.string() + '"', "opt2");
    REQUIRE(r2.code == 0);
    const std::string bytes1 = slurp(csv1);
    CHECK(bytes1 == slurp(csv2));
    CHECK(bytes1.substr(0, bytes1.find('\n')) ==
          "delta,rho,p,equiosc_residual,evaluations,converged");

    json doc = json::parse(slurp(js));
    CHECK(doc.at("variant") == "uniform");
    CHECK(doc.at("policy").at("seed") == 20240601);
    REQUIRE(doc.at("results").size() == 1);
    const json& res = doc.at("results")[0];
    CHECK(res.at("converged") == true);
    CHECK(std::abs(res.at("rho_star").get<double>() - 0.544714) < 1e-4);
    osm::TransmissionParams params = osm::report::params_from_json(res.at("params"));
    CHECK(std::abs(params.values.at(0) - 4.578225) < 1e-3);

    // a starved budget is an honest failure: exit 1 with a diagnostic
    CliResult starved = run_cli(base + "--max-evals 2", "opt_starved");
    CHECK(starved.code == 1);
    CHECK(starved.err.find("converge") != std::string::npos);
}

TEST_CASE("optimize with the two-sided variant") {
    const fs::path js = work_dir() / "opt_two.json";
    CliResult r = run_cli("optimize --J 2 --outer dirichlet --variant two_sided --deltas 1e-2 "
                          "--json \"" + js.string() + '"',
                          "opt_two");
    REQUIRE(r.code == 0);
    json doc = json::parse(slurp(js));
    const json& res = doc.at("results")[0];
    CHECK(res.at("params").at("variant") == "two_sided");
    CHECK(res.at("params").at("values").size() == 2);
    CHECK(std::abs(res.at("rho_star").get<double>() - 0.433175) < 1e-4);
}

TEST_CASE("simulate command and mesh errors") {
    const fs::path js = work_dir() / "sim.json";
    const fs::path csv = work_dir() / "sim.csv";
    CliResult r = run_cli("simulate --h 0.05 --delta 0.1 --p 4 --iterations 12 --json \"" +
                              js.string() + "\" --csv \"" + csv.string() + '"',
                          "sim");
    REQUIRE(r.code == 0);

    json doc = json::parse(slurp(js));
    CHECK(doc.at("report").at("errors").size() == 12);
    CHECK(doc.at("report").at("measured_rate").get<double>() < 1.0);
    CHECK(doc.at("params").at("values")[0] == 4.0);

    std::istringstream lines(slurp(csv));
    std::string line;
    int count = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++count;
    CHECK(count == 13); // header plus one row per iteration

    CliResult bad = run_cli("simulate --h 0.03 --delta 0.1 --p 4", "sim_mesh");
    CHECK(bad.code == 2);
    CHECK(bad.err.find("0.1") != std::string::npos);
    CHECK(bad.err.find("0.03") != std::string::npos);

    CliResult negative = run_cli("simulate --h 0.05 --delta 0.1 --p -2", "sim_neg");
    CHECK(negative.code == 2); // rejected before it can diverge
}

TEST_CASE("asymptotics command reports constants and fitted exponents") {
    const fs::path js = work_dir() / "asym.json";
    CliResult r = run_cli("asymptotics --J 2 --outer dirichlet --deltas 1e-3,1e-4,1e-5 --json \"" +
                              js.string() + '"',
                          "asym");
    REQUIRE(r.code == 0);

    json doc = json::parse(slurp(js));
    CHECK(std::abs(doc.at("constants").at("two_sub_dirichlet").get<double>() -
                   1.3298630128006120) < 1e-9);
    CHECK(doc.at("constants").contains("many_sub"));
    CHECK(std::abs(doc.at("fits").at("one_minus_rho").get<double>() - 1.0 / 3.0) < 0.05);
    CHECK(std::abs(doc.at("fits").at("p").get<double>() + 1.0 / 3.0) < 0.05);
    CHECK(doc.at("results").size() == 3);
    for (const json& row : doc.at("results")) {
        CHECK(row.at("predicted_rho").get<double>() < 1.0);
        CHECK(row.at("optimized_rho").get<double>() < 1.0);
    }
}

TEST_CASE("configuration file sits below environment below flags") {
    const fs::path cfg = write_text("prec.cfg", "sigma = 5\n# comment line\nknum = 5\n");
    const fs::path js = work_dir() / "prec.json";
    const std::string tail = " --p 1 --json \"" + js.string() + '"';
    const std::string with_cfg = "bound --config \"" + cfg.string() + '"' + tail;

    CliResult file_only = run_cli(with_cfg, "prec_file");
    REQUIRE(file_only.code == 0);
    json doc = json::parse(slurp(js));
    CHECK(doc.at("config").at("sigma") == 5.0);
    CHECK(doc.at("rows").size() == 6); // knum from the file applied too

    CliResult env_over_file = run_cli(with_cfg, "prec_env", "OSM_SIGMA=2");
    REQUIRE(env_over_file.code == 0);
    CHECK(json::parse(slurp(js)).at("config").at("sigma") == 2.0);

    CliResult flag_over_both = run_cli(with_cfg + " --sigma 3", "prec_flag", "OSM_SIGMA=2");
    REQUIRE(flag_over_both.code == 0);
    CHECK(json::parse(slurp(js)).at("config").at("sigma") == 3.0);

    CliResult env_only = run_cli("bound" + tail, "prec_envonly", "OSM_SIGMA=2");
    REQUIRE(env_only.code == 0);
    CHECK(json::parse(slurp(js)).at("config").at("sigma") == 2.0);
}

TEST_CASE("configuration file can supply subcommand parameters") {
    const fs::path cfg = write_text("subopt.cfg", "p = 4\nknum = 7\nkmax = 50\n");
    const fs::path js = work_dir() / "subopt.json";
    CliResult r = run_cli("bound --config \"" + cfg.string() + "\" --json \"" + js.string() + '"',
                          "subopt");
    REQUIRE(r.code == 0);
    json doc = json::parse(slurp(js));
    CHECK(doc.at("params").at("values")[0] == 4.0);
    CHECK(doc.at("rows").size() == 8);
}

TEST_CASE("unknown or malformed configuration keys are fatal") {
    const fs::path bad_key = write_text("bad_key.cfg", "sigmaa = 2\n");
    CliResult r1 = run_cli("bound --p 1 --config \"" + bad_key.string() + '"', "cfg_union");
    CHECK(r1.code == 2);
    CHECK(r1.err.find("sigmaa") != std::string::npos);

    const fs::path bad_line = write_text("bad_line.cfg", "just words\n");
    CHECK(run_cli("bound --p 1 --config \"" + bad_line.string() + '"', "cfg_line").code == 2);

    CHECK(run_cli("bound --p 1 --config /nonexistent/path.cfg", "cfg_missing").code == 2);
}
