#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "isoent/constructions.hpp"
#include "isoent/io.hpp"
#include "isoent/optimizer.hpp"
#include "isoent/seeding.hpp"
#include "isoent/unitary_param.hpp"
#include "isoent/version.hpp"

using namespace isoent;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("isoent-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& dir, const std::string& env = "") {
  const char* bin = std::getenv("ISOENT_CLI_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "ISOENT_CLI_BIN must point at the CLI binary");
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  std::string cmd = "cd '" + dir.string() + "' && " + env + " '" + bin + "' " + args + " > '" +
                    out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

}  // namespace

TEST_CASE("state JSON round-trips exactly") {
  const PureState psi = random_state(3, 2, 17);
  const json j = state_to_json(psi);
  const PureState back = state_from_json(json::parse(j.dump()));
  CHECK(back.n == psi.n);
  CHECK(back.d == psi.d);
  CHECK((back.amps - psi.amps).cwiseAbs().maxCoeff() == 0.0);

  json bad = j;
  bad["amps_re"][0] = bad["amps_re"][0].get<double>() + 0.5;  // norm now far from 1
  CHECK_THROWS(state_from_json(bad));
  bad = j;
  bad.erase("amps_im");
  CHECK_THROWS_AS(state_from_json(bad), std::runtime_error);
}

TEST_CASE("unitary and basis JSON round-trips") {
  const MatrixXcd u = haar_random_unitary(3, 5);
  CHECK((unitary_from_json(json::parse(unitary_to_json(u).dump())) - u).cwiseAbs().maxCoeff() ==
        0.0);

  const auto strings = state_independent_strings(3);
  const json basis = basis_to_json(3, 2, strings);
  const BasisFile back = basis_from_json(json::parse(basis.dump()));
  CHECK(back.n == 3);
  CHECK(back.d == 2);
  REQUIRE(back.strings.size() == strings.size());
  for (std::size_t j = 0; j < strings.size(); ++j)
    for (int k = 0; k < 3; ++k)
      CHECK((back.strings[j].factors[k] - strings[j].factors[k]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scan records serialize with the documented fields") {
  ScanRecord rec;
  rec.scenario = "two-qutrit";
  rec.sample_id = 3;
  rec.seed = 0xFFFFFFFFFFFFFFF1ull;  // full-width seeds survive
  rec.params = {{"lambda1", 0.25}};
  rec.best_f = 1.5e-9;
  rec.converged = true;
  rec.restarts = 20;
  rec.iterations = 321;
  rec.wall_ms = 77;
  const json j = scan_record_to_json(rec);
  for (const char* key :
       {"scenario", "sample_id", "seed", "params", "best_f", "converged", "restarts", "iterations",
        "wall_ms"})
    CHECK(j.contains(key));
  const ScanRecord back = scan_record_from_json(json::parse(j.dump()));
  CHECK(back.seed == rec.seed);
  CHECK(back.best_f == rec.best_f);
  CHECK(back.params == rec.params);
}

TEST_CASE("written JSON files are byte-stable under read-rewrite") {
  const fs::path dir = fresh_dir("roundtrip");
  const fs::path a = dir / "a.json", b = dir / "b.json";
  write_json_file(a.string(), state_to_json(random_state(2, 3, 9)));
  write_json_file(b.string(), read_json_file(a.string()));
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("cli: construct then verify") {
  const fs::path dir = fresh_dir("cli-construct");
  auto res = run_cli("construct --family w --n 4", dir);
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir / "w-state.json"));
  CHECK(fs::exists(dir / "w-basis.json"));
  CHECK(fs::exists(dir / "construct-w.manifest.json"));
  CHECK(fs::exists(dir / "records.jsonl"));

  res = run_cli("verify --state w-state.json --basis w-basis.json", dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("f = ") != std::string::npos);

  // tamper: replace one string by a duplicate of the identity string
  json basis = read_json_file((dir / "w-basis.json").string());
  basis["strings"][1] = basis["strings"][0];
  write_json_file((dir / "broken.json").string(), basis);
  res = run_cli("verify --state w-state.json --basis broken.json", dir);
  CHECK(res.exit_code == 1);

  // shape mismatch is an input error
  res = run_cli("construct --family bell", dir);
  CHECK(res.exit_code == 0);
  res = run_cli("verify --state bell-state.json --basis w-basis.json", dir);
  CHECK(res.exit_code == 2);

  res = run_cli("construct --family nonsense", dir);
  CHECK(res.exit_code == 2);
}

TEST_CASE("cli: construct honors ISOENT_OUT_DIR") {
  const fs::path dir = fresh_dir("cli-envout");
  const fs::path sub = dir / "outputs";
  const auto res = run_cli("construct --family bell", dir, "ISOENT_OUT_DIR='" + sub.string() + "'");
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(sub / "bell-state.json"));
}

TEST_CASE("cli: state-independent families verify on real states") {
  const fs::path dir = fresh_dir("cli-si-family");
  auto res = run_cli("construct --family three-qubit-si", dir);
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir / "three-qubit-si-basis.json"));
  CHECK(!fs::exists(dir / "three-qubit-si-state.json"));

  res = run_cli("verify --basis three-qubit-si-basis.json --real-scan 20 --tol 1e-10", dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("20 random real states") != std::string::npos);
}

TEST_CASE("cli: search exit codes and outputs") {
  const fs::path dir = fresh_dir("cli-search");
  // m beyond d^n is an input error
  auto res = run_cli("search --builtin hard4 --m 17 --seed 1", dir);
  CHECK(res.exit_code == 2);
  // missing --seed is a parse error
  res = run_cli("search --builtin hard4 --m 4", dir);
  CHECK(res.exit_code == 2);

  res = run_cli("construct --family bell", dir);
  REQUIRE(res.exit_code == 0);
  res = run_cli(
      "search --state bell-state.json --m 4 --restarts 5 --seed 9 --threads 2 --out search.jsonl",
      dir);
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir / "search.jsonl"));
  CHECK(fs::exists(dir / "search-strings.json"));
  CHECK(fs::exists(dir / "search.jsonl.manifest.json"));
  const auto rows = read_jsonl((dir / "search.jsonl").string());
  REQUIRE(rows.size() == 1);
  CHECK(rows[0]["converged"].get<bool>());

  // the written strings file is itself a verifiable basis
  res = run_cli("verify --state bell-state.json --basis search-strings.json --tol 1e-6", dir);
  CHECK(res.exit_code == 0);

  // checkpoint: problem echo plus per-string theta vectors
  const json checkpoint = read_json_file((dir / "search-checkpoint.json").string());
  CHECK(checkpoint["problem"]["m"].get<int>() == 4);
  CHECK(checkpoint["best_theta"].size() == 3);  // free strings only (first is the gauge identity)
  CHECK(checkpoint["best_theta"][0].size() == 2 * 4);
}

TEST_CASE("cli: four-qubit partial sweep records one row per m") {
  const fs::path dir = fresh_dir("cli-partial");
  const auto res = run_cli(
      "scan --scenario four-qubit-partial --m-min 2 --m-max 3 --restarts 3 --seed 6 --threads 2 "
      "--max-iters 400 --out p.jsonl",
      dir);
  CHECK(res.exit_code == 0);
  const auto rows = read_jsonl((dir / "p.jsonl").string());
  REQUIRE(rows.size() == 3);  // two records + summary
  CHECK(rows[0]["sample_id"].get<int>() == 2);
  CHECK(rows[1]["sample_id"].get<int>() == 3);
  CHECK(rows[0]["params"]["m"].get<double>() == 2.0);
  // tiny partial bases of the hard state exist and are found quickly
  CHECK(rows[0]["converged"].get<bool>());
  CHECK(rows[1]["converged"].get<bool>());
}

TEST_CASE("cli: scan streams records plus a summary row, deterministically") {
  const fs::path dir = fresh_dir("cli-scan");
  auto res = run_cli(
      "scan --scenario two-qutrit --samples 3 --restarts 5 --seed 31 --threads 2 --out a.jsonl",
      dir);
  CHECK(res.exit_code == 0);
  const auto rows_a = read_jsonl((dir / "a.jsonl").string());
  REQUIRE(rows_a.size() == 4);  // 3 records + summary
  for (int i = 0; i < 3; ++i) CHECK(rows_a[i]["sample_id"].get<int>() == i);
  CHECK(rows_a[3]["summary"].get<bool>());
  CHECK(rows_a[3]["tool_version"].get<std::string>() == kToolVersion);

  res = run_cli(
      "scan --scenario two-qutrit --samples 3 --restarts 5 --seed 31 --threads 1 --out b.jsonl",
      dir);
  CHECK(res.exit_code == 0);
  const auto rows_b = read_jsonl((dir / "b.jsonl").string());
  REQUIRE(rows_b.size() == 4);
  for (int i = 0; i < 3; ++i) {
    json a = rows_a[i], b = rows_b[i];
    a.erase("wall_ms");
    b.erase("wall_ms");
    CHECK(a == b);
  }

  res = run_cli("scan --scenario bogus --samples 1 --seed 1", dir);
  CHECK(res.exit_code == 2);
}

TEST_CASE("cli: si subcommands") {
  const fs::path dir = fresh_dir("cli-si");
  auto res = run_cli("si enumerate --n 3 --out sols.json --records records.jsonl", dir);
  CHECK(res.exit_code == 0);
  const json sols = read_json_file((dir / "sols.json").string());
  CHECK(sols["solution_count"].get<int>() >= 1);
  CHECK(sols["exhausted"].get<bool>());

  res = run_cli("si enumerate --n 4 --records records.jsonl", dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("0 solutions") != std::string::npos);

  res = run_cli("si enumerate --n 5", dir);
  CHECK(res.exit_code == 2);

  res = run_cli("si certify-4 --out cert.json --records records.jsonl", dir);
  CHECK(res.exit_code == 0);
  const json cert = read_json_file((dir / "cert.json").string());
  CHECK(!cert["full"]["consistent"].get<bool>());
  CHECK(cert["reduced_without_all_flip_row"]["consistent"].get<bool>());

  res = run_cli("construct --family ghz --n 2 --d 3", dir);
  REQUIRE(res.exit_code == 0);
  res = run_cli("si witness --strings ghz-basis.json --records records.jsonl", dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("min eigenvector-witness overlap = 1") != std::string::npos);

  res = run_cli("si odd-dim --d 3 --trials 500 --seed 3 --records records.jsonl", dir);
  CHECK(res.exit_code == 0);
  res = run_cli("si odd-dim --d 4 --trials 10 --seed 3", dir);
  CHECK(res.exit_code == 2);
}

TEST_CASE("cli: report renders the grid and flags mixed versions") {
  const fs::path dir = fresh_dir("cli-report");
  auto res = run_cli("construct --family two-qubit-si", dir);
  REQUIRE(res.exit_code == 0);
  res = run_cli("construct --family three-qubit-si", dir);
  REQUIRE(res.exit_code == 0);
  res = run_cli("construct --family bipartite-pow2 --d 4 --seed 2", dir);
  REQUIRE(res.exit_code == 0);
  res = run_cli("si enumerate --n 4 --records records.jsonl", dir);
  REQUIRE(res.exit_code == 0);
  res = run_cli("si odd-dim --d 3 --trials 100 --seed 1 --records records.jsonl", dir);
  REQUIRE(res.exit_code == 0);
  res = run_cli(
      "scan --scenario two-qutrit --samples 2 --restarts 5 --seed 41 --threads 2 --out scan.jsonl",
      dir);
  REQUIRE(res.exit_code == 0);

  res = run_cli("report records.jsonl scan.jsonl", dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("state-dependent") != std::string::npos);
  CHECK(res.out.find("(Y)") != std::string::npos);  // two-qutrit numerical evidence
  CHECK(res.out.find("X") != std::string::npos);    // four-qubit / odd-dim impossibility
  CHECK(res.out.find("warning") == std::string::npos);

  // a summary row with a different tool version triggers the warning
  std::ofstream extra((dir / "old.jsonl").string());
  extra << json{{"summary", true}, {"scenario", "two-qutrit"}, {"samples", 0},
                {"converged", 0},  {"fraction", 0.0},          {"tool_version", "0.0.9"}}
               .dump()
        << "\n";
  extra.close();
  res = run_cli("report records.jsonl scan.jsonl old.jsonl", dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("warning: mixed tool versions") != std::string::npos);

  res = run_cli("report", dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("no records") != std::string::npos);

  std::ofstream bad((dir / "bad.jsonl").string());
  bad << "{ not json\n";
  bad.close();
  res = run_cli("report bad.jsonl", dir);
  CHECK(res.exit_code == 2);
}

TEST_CASE("cli: jsonl rows re-serialize to the identical line") {
  const fs::path dir = fresh_dir("cli-bytes");
  auto res = run_cli(
      "scan --scenario three-qubit --samples 2 --restarts 5 --seed 8 --threads 2 --out s.jsonl",
      dir);
  REQUIRE(res.exit_code == 0);
  std::ifstream in((dir / "s.jsonl").string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CHECK(json::parse(line).dump() == line);
  }
}
