// Command-line front-end tests: argument parsing and config round-trip at the
// library level, plus end-to-end subprocess runs of the installed binary
// (located through LRSDP_BIN, with graph files under LRSDP_DATA).
#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lrsdp/cli/cli.hpp"

namespace {

using lrsdp::cli::RunConfig;
using lrsdp::cli::UsageError;

std::string env_or_fail(const char* name) {
  const char* v = std::getenv(name);
  REQUIRE(v != nullptr);
  return v;
}

std::filesystem::path fresh_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("lrsdp_cli_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

// Runs `prefix binary args` with stdout+stderr captured to a scratch file.
CmdResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const auto cap = fresh_dir("cap") / ("out_" + std::to_string(counter++) + ".txt");
  std::string cmd = env_prefix + " \"" + env_or_fail("LRSDP_BIN") + "\" " + args +
                    " > \"" + cap.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CmdResult res;
  REQUIRE(status != -1);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(cap);
  std::ostringstream buf;
  buf << in.rdbuf();
  res.output = buf.str();
  return res;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Serialized form of a JSON object with some top-level members dropped.
std::string dump_without(const lrsdp::json::Value& v,
                         const std::vector<std::string>& keys) {
  lrsdp::json::Value filtered = lrsdp::json::Value::object();
  for (const auto& [k, mv] : v.as_object())
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      filtered.set(k, mv);
  return lrsdp::json::dump(filtered);
}

// First `fields` comma-separated fields of every line (drops timing columns).
std::string csv_prefix_columns(const std::string& text, int fields) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    int seen = 0;
    std::string kept;
    for (char c : line) {
      if (c == ',' && ++seen == fields) break;
      kept.push_back(c);
    }
    out << kept << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("parsed configs round-trip through their serialized form") {
  const std::vector<std::string> args = {
      "solve",    "--kind",     "stableset", "--graph",   "g.txt",   "--eps",
      "1e-6",     "--mode",     "relative",  "--seed",    "42",      "--time-cap",
      "12.5",     "--out",      "r.json",    "--trace",   "t.csv",   "--beta0",
      "2.5",      "--sigma",    "0.25",      "--chi",     "0.02",    "--lambda0",
      "0.5",      "--rho-bar",  "1e-4",      "--s-trigger", "17"};
  const RunConfig rc = lrsdp::cli::parse_args(args);
  CHECK(rc.command == "solve");
  CHECK(rc.kind == "stableset");
  CHECK(rc.eps == 1e-6);
  CHECK(rc.seed == 42);
  CHECK(rc.s_trigger == 17);

  const std::string once = lrsdp::json::dump(lrsdp::cli::config_to_json(rc));
  const RunConfig back =
      lrsdp::cli::config_from_json(lrsdp::json::parse(once));
  const std::string twice = lrsdp::json::dump(lrsdp::cli::config_to_json(back));
  REQUIRE(once == twice);

  const RunConfig gen = lrsdp::cli::parse_args(
      {"generate", "matcomp", "--n1", "50", "--n2", "50", "--r", "2", "--seed", "1"});
  const std::string gen_once = lrsdp::json::dump(lrsdp::cli::config_to_json(gen));
  REQUIRE(gen_once ==
          lrsdp::json::dump(lrsdp::cli::config_to_json(
              lrsdp::cli::config_from_json(lrsdp::json::parse(gen_once)))));
}

TEST_CASE("malformed invocations are rejected at parse time") {
  using lrsdp::cli::parse_args;
  CHECK_THROWS_AS(parse_args({}), UsageError);
  CHECK_THROWS_AS(parse_args({"frobnicate"}), UsageError);
  CHECK_THROWS_AS(parse_args({"solve", "--bogus"}), UsageError);
  CHECK_THROWS_AS(parse_args({"solve", "--kind"}), UsageError);  // missing value
  CHECK_THROWS_AS(parse_args({"solve", "--kind", "stableset", "--graph", "g",
                              "--eps", "fast"}),
                  UsageError);
  CHECK_THROWS_AS(parse_args({"solve", "--kind", "stableset", "--graph", "g",
                              "--eps", "-1"}),
                  UsageError);
  CHECK_THROWS_AS(parse_args({"solve", "--kind", "stableset"}), UsageError);
  CHECK_THROWS_AS(parse_args({"solve", "--kind", "matcomp", "--obs", "a",
                              "--manifest", "b"}),
                  UsageError);
  CHECK_THROWS_AS(parse_args({"solve", "--kind", "stableset", "--graph", "g",
                              "--mode", "theory"}),
                  UsageError);  // theory mode without targets
  CHECK_THROWS_AS(parse_args({"generate", "--n", "8"}), UsageError);
  CHECK_THROWS_AS(parse_args({"generate", "stableset", "--n", "8"}), UsageError);
  CHECK_THROWS_AS(parse_args({"verify"}), UsageError);
  CHECK_THROWS_AS(parse_args({"bench"}), UsageError);
}

TEST_CASE("solve writes a report and maps status to the exit code") {
  const std::string data = env_or_fail("LRSDP_DATA");
  const auto dir = fresh_dir("solve");

  SECTION("five-cycle solve succeeds and the report is well formed") {
    const auto report_path = dir / "c5_report.json";
    const CmdResult r = run_cli("solve --kind stableset --graph \"" + data +
                                "/c5.txt\" --eps 1e-5 --out \"" +
                                report_path.string() + "\"");
    INFO(r.output);
    REQUIRE(r.exit_code == 0);

    const std::string text = read_file(report_path);
    const lrsdp::json::Value doc = lrsdp::json::parse(text);
    CHECK(doc.find("schema")->as_int64() == 1);
    CHECK(doc.find("status")->as_string() == "Solved");
    CHECK(doc.find("kind")->as_string() == "stableset");
    CHECK(std::abs(doc.find("pval_user")->as_number() - 2.2360679) < 1e-3);
    CHECK(doc.find("residuals")->find("primal_rel")->as_number() <= 1e-5);
    CHECK(doc.find("residuals")->find("dual_rel")->as_number() == 0.0);
    CHECK(doc.find("counters")->find("outer")->as_int64() >= 1);
    CHECK(doc.find("rank_history")->as_array().size() ==
          static_cast<std::size_t>(doc.find("counters")->find("outer")->as_int64()));

    // Floating-point serialization is lossless: dump(parse(.)) is idempotent.
    const std::string dumped = lrsdp::json::dump(doc);
    REQUIRE(lrsdp::json::dump(lrsdp::json::parse(dumped)) == dumped);

    // The embedded config echo parses back to an identical serialization.
    const lrsdp::json::Value* echo = doc.find("config_echo");
    REQUIRE(echo != nullptr);
    const std::string echo_text = lrsdp::json::dump(*echo);
    CHECK(lrsdp::json::dump(lrsdp::cli::config_to_json(
              lrsdp::cli::config_from_json(*echo))) == echo_text);
  }

  SECTION("a tiny time cap reports TimeCap through exit code 3") {
    const auto report_path = dir / "cap_report.json";
    const CmdResult r = run_cli("solve --kind stableset --graph \"" + data +
                                "/petersen.txt\" --eps 1e-6 --time-cap 0.0005 --out \"" +
                                report_path.string() + "\"");
    INFO(r.output);
    REQUIRE(r.exit_code == 3);
    const lrsdp::json::Value doc = lrsdp::json::parse(read_file(report_path));
    CHECK(doc.find("status")->as_string() == "TimeCap");
    CHECK(std::isfinite(doc.find("residuals")->find("primal_rel")->as_number()));
    CHECK(std::isfinite(doc.find("residuals")->find("gap_rel")->as_number()));
    CHECK(std::isfinite(doc.find("pval")->as_number()));
  }

  SECTION("argument and input errors exit with code 2") {
    CHECK(run_cli("solve --kind stableset").exit_code == 2);
    CHECK(run_cli("solve --kind stableset --graph /nonexistent/g.txt").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
  }
}

TEST_CASE("identical seeds reproduce every report field except timing") {
  const std::string data = env_or_fail("LRSDP_DATA");
  const auto dir = fresh_dir("determinism");
  const auto a = dir / "a.json";
  const auto b = dir / "b.json";
  const std::string base = "solve --kind stableset --graph \"" + data +
                           "/k4.txt\" --eps 1e-5 --seed 11 --out \"";
  REQUIRE(run_cli(base + a.string() + "\"").exit_code == 0);
  REQUIRE(run_cli(base + b.string() + "\"").exit_code == 0);
  const lrsdp::json::Value da = lrsdp::json::parse(read_file(a));
  const lrsdp::json::Value db = lrsdp::json::parse(read_file(b));
  // The two runs intentionally differ in the --out path recorded inside the
  // config echo; everything else must match bit for bit except wall time.
  REQUIRE(dump_without(da, {"wall_time_s", "config_echo"}) ==
          dump_without(db, {"wall_time_s", "config_echo"}));
  REQUIRE(dump_without(*da.find("config_echo"), {"out"}) ==
          dump_without(*db.find("config_echo"), {"out"}));
}

TEST_CASE("verification recomputes the certificate from the stored solution") {
  const std::string data = env_or_fail("LRSDP_DATA");
  const auto dir = fresh_dir("verify");
  const auto report_path = dir / "report.json";
  REQUIRE(run_cli("solve --kind stableset --graph \"" + data +
                  "/c5.txt\" --eps 1e-5 --out \"" + report_path.string() + "\"")
              .exit_code == 0);

  SECTION("an untouched report passes") {
    const CmdResult r = run_cli("verify --report \"" + report_path.string() + "\"");
    INFO(r.output);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("verify: OK") != std::string::npos);
  }

  SECTION("a tampered objective value is caught") {
    lrsdp::json::Value doc = lrsdp::json::parse(read_file(report_path));
    for (auto& [k, v] : doc.members)
      if (k == "pval") v.number += 1e-3;
    const auto tampered = dir / "tampered.json";
    std::ofstream(tampered) << lrsdp::json::dump(doc, 2);
    const CmdResult r = run_cli("verify --report \"" + tampered.string() + "\"");
    INFO(r.output);
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("MISMATCH") != std::string::npos);
  }
}

TEST_CASE("generated instances reproduce bit-for-bit from their parameters") {
  const auto d1 = fresh_dir("gen1");
  const auto d2 = fresh_dir("gen2");

  SECTION("phase retrieval files are identical across runs") {
    REQUIRE(run_cli("generate phaseretrieval --n 16 --seed 7 --out \"" +
                    (d1 / "pr").string() + "\"")
                .exit_code == 0);
    REQUIRE(run_cli("generate phaseretrieval --n 16 --seed 7 --out \"" +
                    (d2 / "pr").string() + "\"")
                .exit_code == 0);
    CHECK(read_file(d1 / "pr.meas.txt") == read_file(d2 / "pr.meas.txt"));
    CHECK(read_file(d1 / "pr.manifest.json") == read_file(d2 / "pr.manifest.json"));
  }

  SECTION("the completion manifest records the derived sample count") {
    REQUIRE(run_cli("generate matcomp --n1 50 --n2 50 --r 2 --seed 1 --out \"" +
                    (d1 / "mc").string() + "\"")
                .exit_code == 0);
    const lrsdp::json::Value man =
        lrsdp::json::parse(read_file(d1 / "mc.manifest.json"));
    CHECK(man.find("params")->find("m")->as_int64() == 1806);
  }

  SECTION("invalid generator parameters exit with code 2") {
    CHECK(run_cli("generate matcomp --n1 4 --n2 6 --r 5 --seed 1 --out \"" +
                  (d1 / "bad").string() + "\"")
              .exit_code == 2);
    CHECK(run_cli("generate phaseretrieval --n 12 --seed 1 --out \"" +
                  (d1 / "bad").string() + "\"")
              .exit_code == 2);  // not a power of two
  }
}

TEST_CASE("bench writes one row per instance in input order") {
  const std::string data = env_or_fail("LRSDP_DATA");
  const auto dir = fresh_dir("bench");

  SECTION("an empty list yields a header-only CSV") {
    const auto list = dir / "empty.txt";
    std::ofstream(list) << "";
    const auto csv = dir / "empty.csv";
    REQUIRE(run_cli("bench --list \"" + list.string() + "\" --out \"" +
                    csv.string() + "\"")
                .exit_code == 0);
    CHECK(read_file(csv) ==
          "instance,n,m,status,primal_rel,gap_rel,dual_rel,pval,dval,outer_iters,"
          "mev_count,fista_calls,max_rank,wall_time\n");
  }

  SECTION("two instances appear in input order with reproducible numbers") {
    const auto list = dir / "two.txt";
    std::ofstream(list) << "stableset " << data << "/k4.txt\n"
                        << "stableset " << data << "/c5.txt\n";
    const auto csv_a = dir / "a.csv";
    const auto csv_b = dir / "b.csv";
    const auto csv_c = dir / "c.csv";
    const std::string base =
        "bench --list \"" + list.string() + "\" --eps 1e-4 --out \"";
    REQUIRE(run_cli(base + csv_a.string() + "\"").exit_code == 0);
    REQUIRE(run_cli(base + csv_b.string() + "\"").exit_code == 0);
    REQUIRE(run_cli(base + csv_c.string() + "\"", "LRSDP_THREADS=2").exit_code == 0);

    const std::string a = read_file(csv_a);
    std::istringstream lines(a);
    std::string header, row1, row2;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, row1));
    REQUIRE(std::getline(lines, row2));
    CHECK(row1.rfind(data + "/k4.txt,4,", 0) == 0);
    CHECK(row2.rfind(data + "/c5.txt,5,", 0) == 0);
    CHECK(row1.find(",Solved,") != std::string::npos);
    CHECK(row2.find(",Solved,") != std::string::npos);

    // Everything except the trailing wall-time column is reproducible, with
    // one worker or two.
    CHECK(csv_prefix_columns(a, 13) == csv_prefix_columns(read_file(csv_b), 13));
    CHECK(csv_prefix_columns(a, 13) == csv_prefix_columns(read_file(csv_c), 13));
  }

  SECTION("a failing instance is recorded and the batch continues") {
    const auto list = dir / "mixed.txt";
    std::ofstream(list) << "stableset " << dir.string() << "/missing.txt\n"
                        << "stableset " << data << "/k4.txt\n";
    const auto csv = dir / "mixed.csv";
    const CmdResult r = run_cli("bench --list \"" + list.string() +
                                "\" --eps 1e-4 --out \"" + csv.string() + "\"");
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    const std::string text = read_file(csv);
    CHECK(text.find("Error:") != std::string::npos);
    CHECK(text.find(",Solved,") != std::string::npos);
  }
}
