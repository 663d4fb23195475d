#include "matchwelfare/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace matchwelfare {

Json profile_to_json(const ValuationProfile& p) {
  Json j;
  j["n"] = p.n;
  j["normalization"] = to_string(p.normalization);
  j["values"] = p.values;
  if (p.ties_flagged) j["allow_ties"] = true;
  return j;
}

ValuationProfile profile_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("normalization") || !j.contains("values")) {
    throw std::invalid_argument("profile JSON needs keys n, normalization, values");
  }
  const int n = j.at("n").get<int>();
  const auto values = j.at("values").get<std::vector<std::vector<double>>>();
  const Normalization norm = normalization_from_string(j.at("normalization").get<std::string>());
  const bool ties = j.value("allow_ties", false);
  return make_profile(n, values, norm, ties);
}

Json matching_to_json(const Matching& m) {
  std::vector<int> one_indexed(m.assignment.size());
  for (std::size_t i = 0; i < m.assignment.size(); ++i) one_indexed[i] = m.assignment[i] + 1;
  Json j;
  j["assignment"] = one_indexed;
  return j;
}

Matching matching_from_json(const Json& j, int n) {
  if (!j.is_object() || !j.contains("assignment")) {
    throw std::invalid_argument("matching JSON needs key assignment");
  }
  auto a = j.at("assignment").get<std::vector<int>>();
  for (int& v : a) v -= 1;
  Matching m{std::move(a)};
  if (!is_permutation(m.assignment, n)) {
    throw std::invalid_argument("assignment is not a 1-indexed permutation of the items");
  }
  return m;
}

Json method_to_json(const EvalMethod& m) {
  Json j;
  j["kind"] = m.kind == EvalMethod::Kind::Exact ? "exact" : "monte-carlo";
  j["algorithm"] = m.algorithm;
  if (m.kind == EvalMethod::Kind::MonteCarlo) {
    j["samples"] = m.samples;
    j["seed"] = m.seed;
    j["ci_radius"] = m.ci_radius;
    j["rng"] = m.rng;
  }
  return j;
}

Json result_to_json(const MechanismResult& r) {
  Json j;
  j["mechanism"] = r.mechanism;
  j["expected_welfare"] = r.expected_welfare;
  j["per_agent_utility"] = r.per_agent_utility;
  if (r.distribution) j["distribution"] = r.distribution->probs;
  j["method"] = method_to_json(r.method);
  return j;
}

Json ratio_to_json(const RatioReport& r) {
  Json j;
  j["mech_welfare"] = r.mech_welfare;
  j["opt_welfare"] = r.opt_welfare;
  j["ratio"] = r.ratio;
  j["provenance"] = method_to_json(r.provenance);
  return j;
}

Json document(const Json& config, const char* payload_key, Json payload) {
  Json j;
  j["format_version"] = kJsonFormatVersion;
  j["config"] = config;
  j[payload_key] = std::move(payload);
  return j;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string csv_header(const Json& config) {
  std::string out = "# ";
  out += kCsvFormatVersion;
  out += "\n# config: ";
  out += config.dump();
  out += "\n";
  return out;
}

}  // namespace

std::string bounds_to_csv(const std::vector<BoundCheck>& checks, const Json& config) {
  std::string out = csv_header(config);
  out += "name,n,lhs,rhs,holds\n";
  for (const BoundCheck& c : checks) {
    out += c.name;
    out += ',';
    out += std::to_string(c.n);
    out += ',';
    out += format_double(c.lhs);
    out += ',';
    out += format_double(c.rhs);
    out += ',';
    out += c.holds ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::string surface_to_csv(const std::vector<n3::SurfaceRow>& rows, const Json& config) {
  std::string out = csv_header(config);
  out += "alpha1,alpha2,alpha3,ratio\n";
  for (const auto& r : rows) {
    out += format_double(r.alpha[0]);
    out += ',';
    out += format_double(r.alpha[1]);
    out += ',';
    out += format_double(r.alpha[2]);
    out += ',';
    out += format_double(r.ratio);
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << content;
}

}  // namespace matchwelfare
