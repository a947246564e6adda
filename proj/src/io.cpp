#include "mdiq/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace mdiq::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("schema violation at " + path + ": " + what);
}

const json& expect(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "/" + key, "missing field");
  return *it;
}

json matrix_to_json(const ComplexMatrix& m) {
  json out = json::array();
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c)
      out.push_back({m(r, c).real(), m(r, c).imag()});
  return out;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected array of [re, im] pairs");
  const std::size_t n = j.size();
  const auto d = static_cast<long>(std::llround(std::sqrt(double(n))));
  if (d * d != static_cast<long>(n))
    fail(path, "entry count is not a perfect square");
  ComplexMatrix m(d, d);
  for (long k = 0; k < static_cast<long>(n); ++k) {
    const auto& e = j[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      fail(path + "/" + std::to_string(k), "expected [re, im]");
    m(k / d, k % d) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

std::string fmt15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

json behaviour_to_json(const Behaviour& b) {
  json j;
  j["parties"] = b.parties();
  j["outcome_counts"] = b.outcome_counts();
  json ens = json::array();
  for (const auto& e : b.ensembles()) {
    json party = json::array();
    for (const auto& s : e.states()) party.push_back(matrix_to_json(s.op().matrix()));
    ens.push_back(std::move(party));
  }
  j["ensembles"] = std::move(ens);
  j["probs"] = b.probs();
  j["meta"] = {{"provenance", b.provenance()}};
  return j;
}

Behaviour behaviour_from_json(const json& j) {
  const auto& jp = expect(j, "parties", "");
  if (!jp.is_number_integer()) fail("/parties", "expected integer");
  const int parties = jp.get<int>();

  const auto& joc = expect(j, "outcome_counts", "");
  if (!joc.is_array() || static_cast<int>(joc.size()) != parties)
    fail("/outcome_counts", "expected array of length 'parties'");
  std::vector<int> outcome_counts;
  for (const auto& v : joc) {
    if (!v.is_number_integer()) fail("/outcome_counts", "expected integers");
    outcome_counts.push_back(v.get<int>());
  }

  const auto& je = expect(j, "ensembles", "");
  if (!je.is_array() || static_cast<int>(je.size()) != parties)
    fail("/ensembles", "expected one ensemble per party");
  std::vector<InputEnsemble> ensembles;
  for (int p = 0; p < parties; ++p) {
    const std::string path = "/ensembles/" + std::to_string(p);
    if (!je[p].is_array() || je[p].empty()) fail(path, "expected array of states");
    std::vector<QuantumState> states;
    for (std::size_t s = 0; s < je[p].size(); ++s) {
      const ComplexMatrix m =
          matrix_from_json(je[p][s], path + "/" + std::to_string(s));
      try {
        states.emplace_back(HermitianOperator(m));
      } catch (const std::exception& ex) {
        fail(path + "/" + std::to_string(s), ex.what());
      }
    }
    ensembles.emplace_back(std::move(states));
  }

  const auto& jpr = expect(j, "probs", "");
  if (!jpr.is_array()) fail("/probs", "expected array");
  std::vector<double> probs;
  for (const auto& v : jpr) {
    if (!v.is_number()) fail("/probs", "expected numbers");
    probs.push_back(v.get<double>());
  }

  std::string provenance = "file";
  if (j.contains("meta") && j["meta"].is_object() &&
      j["meta"].contains("provenance") && j["meta"]["provenance"].is_string())
    provenance = j["meta"]["provenance"].get<std::string>();

  try {
    return Behaviour(std::move(outcome_counts), std::move(ensembles),
                     std::move(probs), std::move(provenance));
  } catch (const std::exception& ex) {
    fail("", ex.what());
  }
}

void save_behaviour(const Behaviour& b, const std::string& path) {
  save_json_file(behaviour_to_json(b), path);
}

Behaviour load_behaviour(const std::string& path) {
  return behaviour_from_json(load_json_file(path));
}

json witness_to_json(const WitnessCoefficients& w) {
  json j;
  j["coefficients"] = w.coefficients;
  j["threshold"] = w.threshold;
  j["normalization"] = w.normalization;
  return j;
}

WitnessCoefficients witness_from_json(const json& j) {
  WitnessCoefficients w;
  const auto& jc = expect(j, "coefficients", "");
  if (!jc.is_array()) fail("/coefficients", "expected array");
  for (const auto& v : jc) w.coefficients.push_back(v.get<double>());
  w.threshold = expect(j, "threshold", "").get<double>();
  if (j.contains("normalization") && j["normalization"].is_string())
    w.normalization = j["normalization"].get<std::string>();
  return w;
}

std::string status_name(conic::SolveStatus s) {
  switch (s) {
    case conic::SolveStatus::Optimal: return "optimal";
    case conic::SolveStatus::InfeasibleCertified: return "infeasible-certified";
    case conic::SolveStatus::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

std::string verdict_name(conic::Verdict v) {
  switch (v) {
    case conic::Verdict::Feasible: return "feasible";
    case conic::Verdict::Infeasible: return "infeasible";
    case conic::Verdict::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "w,guessing_probability,min_entropy_bits,status,runtime_ms\n";
  for (const auto& r : rows) {
    out += fmt15(r.w) + "," + fmt15(r.guessing_probability) + "," +
           fmt15(r.min_entropy_bits) + "," + status_name(r.status) + "," +
           fmt15(r.runtime_ms) + "\n";
  }
  return out;
}

std::string robustness_sweep_to_csv(const std::vector<RobustnessSweepRow>& rows) {
  std::string out = "w,value,status,runtime_ms\n";
  for (const auto& r : rows)
    out += fmt15(r.w) + "," + fmt15(r.value) + "," + status_name(r.status) +
           "," + fmt15(r.runtime_ms) + "\n";
  return out;
}

QuantumState state_from_json(const json& j) {
  const auto& jf = expect(j, "factors", "");
  if (!jf.is_array() || jf.empty()) fail("/factors", "expected array");
  std::vector<int> factors;
  for (const auto& v : jf) factors.push_back(v.get<int>());
  const ComplexMatrix m = matrix_from_json(expect(j, "entries", ""), "/entries");
  try {
    return QuantumState(HermitianOperator(m, factors));
  } catch (const std::exception& ex) {
    fail("/entries", ex.what());
  }
}

json state_to_json(const QuantumState& s) {
  json j;
  j["factors"] = s.factors();
  j["entries"] = matrix_to_json(s.op().matrix());
  return j;
}

Povm povm_from_json(const json& j) {
  const auto& jf = expect(j, "factors", "");
  std::vector<int> factors;
  for (const auto& v : jf) factors.push_back(v.get<int>());
  const auto& je = expect(j, "elements", "");
  if (!je.is_array() || je.empty()) fail("/elements", "expected array");
  std::vector<HermitianOperator> els;
  for (std::size_t k = 0; k < je.size(); ++k) {
    const ComplexMatrix m =
        matrix_from_json(je[k], "/elements/" + std::to_string(k));
    try {
      els.emplace_back(m, factors);
    } catch (const std::exception& ex) {
      fail("/elements/" + std::to_string(k), ex.what());
    }
  }
  std::string label = "file";
  if (j.contains("label") && j["label"].is_string())
    label = j["label"].get<std::string>();
  try {
    return Povm(std::move(els), std::move(label));
  } catch (const std::exception& ex) {
    fail("/elements", ex.what());
  }
}

InputEnsemble ensemble_from_json(const json& j) {
  const auto& js = expect(j, "states", "");
  if (!js.is_array() || js.empty()) fail("/states", "expected array of states");
  std::vector<QuantumState> states;
  for (std::size_t k = 0; k < js.size(); ++k) {
    const ComplexMatrix m =
        matrix_from_json(js[k], "/states/" + std::to_string(k));
    try {
      states.emplace_back(HermitianOperator(m));
    } catch (const std::exception& ex) {
      fail("/states/" + std::to_string(k), ex.what());
    }
  }
  return InputEnsemble(std::move(states));
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& ex) {
    throw std::runtime_error("cannot parse " + path + ": " + ex.what());
  }
  return j;
}

void save_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace mdiq::io
