#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "isoent/optimizer.hpp"
#include "isoent/state.hpp"
#include "isoent/state_independent.hpp"

namespace isoent {

using nlohmann::json;

// State JSON: {"n":int,"d":int,"amps_re":[...],"amps_im":[...]}
json state_to_json(const PureState& psi);
PureState state_from_json(const json& j);

// Unitary JSON: {"d":int,"re":[[...]],"im":[[...]]} row-major.
json unitary_to_json(const Eigen::Ref<const MatrixXcd>& u);
MatrixXcd unitary_from_json(const json& j);

// Basis JSON: {"n":int,"d":int,"strings":[{"factors":[unitary,...]},...]}
json basis_to_json(int n, int d, const std::vector<LocalUnitaryString>& strings);
struct BasisFile {
  int n = 0;
  int d = 0;
  std::vector<LocalUnitaryString> strings;
};
BasisFile basis_from_json(const json& j);

json scan_record_to_json(const ScanRecord& rec);
ScanRecord scan_record_from_json(const json& j);

json enumeration_to_json(const SIEnumeration& e);
json certificate_to_json(const Gf2SystemReport& r);

// File helpers. Files are written with a fixed two-space indentation and
// sorted keys, so a read-then-rewrite reproduces them byte for byte.
void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);
void append_jsonl(const std::string& path, const json& row);
std::vector<json> read_jsonl(const std::string& path);

std::string iso8601_utc_now();

}  // namespace isoent
