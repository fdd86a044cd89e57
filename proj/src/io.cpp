#include "isoent/io.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace isoent {

namespace {

json require(const json& j, const char* key) {
  if (!j.contains(key)) throw std::runtime_error(std::string("missing key: ") + key);
  return j.at(key);
}

std::vector<double> to_doubles(const json& j) {
  if (!j.is_array()) throw std::runtime_error("expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw std::runtime_error("expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

json state_to_json(const PureState& psi) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < psi.dim(); ++i) {
    re.push_back(psi.amps(i).real());
    im.push_back(psi.amps(i).imag());
  }
  return json{{"n", psi.n}, {"d", psi.d}, {"amps_re", std::move(re)}, {"amps_im", std::move(im)}};
}

PureState state_from_json(const json& j) {
  const int n = require(j, "n").get<int>();
  const int d = require(j, "d").get<int>();
  const auto re = to_doubles(require(j, "amps_re"));
  const auto im = to_doubles(require(j, "amps_im"));
  if (re.size() != im.size()) throw std::runtime_error("amps_re and amps_im lengths differ");
  VectorXcd amps(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) amps(static_cast<Eigen::Index>(i)) = Complex(re[i], im[i]);
  return make_state(n, d, std::move(amps));
}

json unitary_to_json(const Eigen::Ref<const MatrixXcd>& u) {
  if (u.rows() != u.cols()) throw std::runtime_error("unitary must be square");
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    json row_re = json::array(), row_im = json::array();
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      row_re.push_back(u(i, j).real());
      row_im.push_back(u(i, j).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return json{{"d", static_cast<int>(u.rows())}, {"re", std::move(re)}, {"im", std::move(im)}};
}

MatrixXcd unitary_from_json(const json& j) {
  const int d = require(j, "d").get<int>();
  const json re = require(j, "re"), im = require(j, "im");
  if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != d ||
      static_cast<int>(im.size()) != d)
    throw std::runtime_error("unitary row count does not match d");
  MatrixXcd u(d, d);
  for (int i = 0; i < d; ++i) {
    const auto row_re = to_doubles(re.at(i));
    const auto row_im = to_doubles(im.at(i));
    if (static_cast<int>(row_re.size()) != d || static_cast<int>(row_im.size()) != d)
      throw std::runtime_error("unitary column count does not match d");
    for (int k = 0; k < d; ++k) u(i, k) = Complex(row_re[k], row_im[k]);
  }
  return u;
}

json basis_to_json(int n, int d, const std::vector<LocalUnitaryString>& strings) {
  json arr = json::array();
  for (const auto& s : strings) {
    if (s.n() != n) throw std::runtime_error("string length does not match n");
    json factors = json::array();
    for (const auto& factor : s.factors) {
      if (factor.rows() != d) throw std::runtime_error("factor dimension does not match d");
      factors.push_back(unitary_to_json(factor));
    }
    arr.push_back(json{{"factors", std::move(factors)}});
  }
  return json{{"n", n}, {"d", d}, {"strings", std::move(arr)}};
}

BasisFile basis_from_json(const json& j) {
  BasisFile out;
  out.n = require(j, "n").get<int>();
  out.d = require(j, "d").get<int>();
  const json strings = require(j, "strings");
  if (!strings.is_array() || strings.empty()) throw std::runtime_error("strings must be a nonempty array");
  for (const auto& s : strings) {
    const json factors = require(s, "factors");
    if (!factors.is_array() || static_cast<int>(factors.size()) != out.n)
      throw std::runtime_error("each string needs exactly n factors");
    LocalUnitaryString str;
    for (const auto& fj : factors) {
      MatrixXcd u = unitary_from_json(fj);
      if (u.rows() != out.d) throw std::runtime_error("factor dimension does not match d");
      str.factors.push_back(std::move(u));
    }
    out.strings.push_back(std::move(str));
  }
  return out;
}

json scan_record_to_json(const ScanRecord& rec) {
  json params = json::object();
  for (const auto& [key, value] : rec.params) params[key] = value;
  return json{{"scenario", rec.scenario},
              {"sample_id", rec.sample_id},
              {"seed", rec.seed},
              {"params", std::move(params)},
              {"best_f", rec.best_f},
              {"converged", rec.converged},
              {"restarts", rec.restarts},
              {"iterations", rec.iterations},
              {"wall_ms", rec.wall_ms}};
}

ScanRecord scan_record_from_json(const json& j) {
  ScanRecord rec;
  rec.scenario = require(j, "scenario").get<std::string>();
  rec.sample_id = require(j, "sample_id").get<int>();
  rec.seed = require(j, "seed").get<std::uint64_t>();
  const json params = require(j, "params");
  for (const auto& [key, value] : params.items()) rec.params.emplace_back(key, value.get<double>());
  rec.best_f = require(j, "best_f").get<double>();
  rec.converged = require(j, "converged").get<bool>();
  rec.restarts = require(j, "restarts").get<int>();
  rec.iterations = require(j, "iterations").get<int>();
  rec.wall_ms = require(j, "wall_ms").get<long long>();
  return rec;
}

json enumeration_to_json(const SIEnumeration& e) {
  json solutions = json::array();
  for (const auto& sol : e.solutions) {
    json strings = json::array();
    for (const auto& s : sol) {
      json labels = json::array();
      for (const auto& l : s.labels) labels.push_back(pauli_label_name(l));
      strings.push_back(std::move(labels));
    }
    solutions.push_back(std::move(strings));
  }
  return json{{"n", e.n},
              {"solutions", std::move(solutions)},
              {"solution_count", e.solutions.size()},
              {"nodes_explored", e.nodes_explored},
              {"exhausted", e.exhausted}};
}

json certificate_to_json(const Gf2SystemReport& r) {
  json eqs = json::array();
  for (const auto& eq : r.equations) eqs.push_back(json{{"vars", eq.vars}, {"rhs", eq.rhs}});
  json out{{"num_vars", r.num_vars},
           {"equations", std::move(eqs)},
           {"rank", r.rank},
           {"rank_augmented", r.rank_augmented},
           {"consistent", r.consistent}};
  if (r.witness_solution) out["witness_solution"] = *r.witness_solution;
  return out;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("parse error in " + path + ": " + e.what());
  }
  return j;
}

void append_jsonl(const std::string& path, const json& row) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open for appending: " + path);
  out << row.dump() << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<json> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace isoent
