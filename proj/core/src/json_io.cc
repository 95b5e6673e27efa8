#include "phaserelax/json_io.h"

#include <fstream>
#include <sstream>

namespace phaserelax {

using nlohmann::json;

namespace {

json matrix_rows(const MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_rows(const json& rows, int expected_n) {
  if (!rows.is_array()) throw Error("matrix must be a list of rows");
  const int n = static_cast<int>(rows.size());
  if (expected_n >= 0 && n != expected_n) throw Error("matrix has wrong dimension");
  MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n) {
      throw Error("matrix must be square");
    }
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::kLessEqual:
      return "<=";
    case Relation::kGreaterEqual:
      return ">=";
    case Relation::kEqual:
      return "=";
  }
  return "<=";
}

Relation relation_from(const std::string& s) {
  if (s == "<=" || s == "le") return Relation::kLessEqual;
  if (s == ">=" || s == "ge") return Relation::kGreaterEqual;
  if (s == "=" || s == "==" || s == "eq") return Relation::kEqual;
  throw Error("unknown relation '" + s + "'");
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("missing key '") + key + "'");
  return j.at(key).get<T>();
}

}  // namespace

json to_json(const HermitianMatrix& m) {
  return json{{"re", matrix_rows(m.re())}, {"im", matrix_rows(m.im())}};
}

HermitianMatrix hermitian_from_json(const json& j) {
  if (!j.contains("re")) throw Error("Hermitian matrix needs 're'");
  const MatrixXd re = matrix_from_rows(j.at("re"), -1);
  const MatrixXd im = j.contains("im") ? matrix_from_rows(j.at("im"), static_cast<int>(re.rows()))
                                       : MatrixXd::Zero(re.rows(), re.cols());
  return HermitianMatrix(re, im);
}

json to_json(const PhaseSet& p) {
  switch (p.kind()) {
    case PhaseSet::Kind::kInterval:
      return json{{"type", "interval"}, {"lo", p.lo()}, {"hi", p.hi()}};
    case PhaseSet::Kind::kDiscrete:
      return json{{"type", "discrete"}, {"angles", p.angles()}};
    case PhaseSet::Kind::kUniform:
      return json{{"type", "uniform"}, {"M", p.uniform_m()}};
  }
  return json();
}

PhaseSet phase_set_from_json(const json& j) {
  const auto type = required<std::string>(j, "type");
  PhaseSet raw = PhaseSet::uniform(2);
  if (type == "interval") {
    raw = PhaseSet::interval(required<double>(j, "lo"), required<double>(j, "hi"));
  } else if (type == "discrete") {
    raw = PhaseSet::discrete(required<std::vector<double>>(j, "angles"));
  } else if (type == "uniform") {
    raw = PhaseSet::uniform(required<int>(j, "M"));
  } else {
    throw Error("unknown phase set type '" + type + "'");
  }
  return normalize_phase_set(raw);
}

json to_json(const Instance& inst) {
  json j;
  j["n"] = inst.n;
  j["sense"] = inst.sense == Sense::kMaximize ? "maximize" : "minimize";
  j["Q0"] = to_json(inst.q0);
  if (inst.objective_scale != 1.0) j["objective_scale"] = inst.objective_scale;

  json cons = json::array();
  for (const auto& c : inst.constraints) {
    cons.push_back({{"Q", to_json(c.q)}, {"b", c.b}, {"rel", relation_name(c.rel)}});
  }
  j["constraints"] = std::move(cons);

  json bounds = json::array();
  for (const auto& b : inst.bounds) bounds.push_back({{"l", b.l}, {"u", b.u}});
  j["bounds"] = std::move(bounds);

  json edges = json::array();
  for (const auto& e : inst.edges) {
    edges.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"phase", to_json(e.phase)}});
  }
  j["edges"] = std::move(edges);

  if (!inst.variable_phases.empty()) {
    json vp = json::array();
    for (const auto& p : inst.variable_phases) vp.push_back(p ? to_json(*p) : json(nullptr));
    j["variable_phases"] = std::move(vp);
  }
  if (!inst.modulus_levels.empty()) j["modulus_levels"] = inst.modulus_levels;
  if (inst.has_ratio_objective()) {
    json terms = json::array();
    for (const auto& t : inst.ratio_terms) terms.push_back({{"Q", to_json(t.q)}, {"weight", t.weight}});
    j["ratio_objective"] = std::move(terms);
  }
  if (inst.homogenized_from) j["homogenized_from"] = *inst.homogenized_from;
  return j;
}

Instance instance_from_json(const json& j) {
  try {
    Instance inst;
    inst.n = required<int>(j, "n");
    const auto sense = j.value("sense", std::string("minimize"));
    if (sense == "maximize" || sense == "max") {
      inst.sense = Sense::kMaximize;
    } else if (sense == "minimize" || sense == "min") {
      inst.sense = Sense::kMinimize;
    } else {
      throw Error("unknown sense '" + sense + "'");
    }
    inst.q0 = j.contains("Q0") ? hermitian_from_json(j.at("Q0")) : HermitianMatrix::zero(inst.n);
    inst.objective_scale = j.value("objective_scale", 1.0);

    for (const auto& c : j.value("constraints", json::array())) {
      inst.constraints.push_back({hermitian_from_json(c.at("Q")), required<double>(c, "b"),
                                  relation_from(c.value("rel", std::string("<=")))});
    }
    for (const auto& b : required<json>(j, "bounds")) {
      inst.bounds.push_back({required<double>(b, "l"), required<double>(b, "u")});
    }
    for (const auto& e : j.value("edges", json::array())) {
      inst.edges.push_back({required<int>(e, "i") - 1, required<int>(e, "j") - 1,
                            phase_set_from_json(e.at("phase"))});
    }
    if (j.contains("variable_phases")) {
      for (const auto& p : j.at("variable_phases")) {
        inst.variable_phases.push_back(p.is_null() ? std::nullopt
                                                   : std::optional<PhaseSet>(phase_set_from_json(p)));
      }
    }
    if (j.contains("modulus_levels")) {
      inst.modulus_levels = j.at("modulus_levels").get<std::vector<std::vector<double>>>();
    }
    if (j.contains("ratio_objective")) {
      for (const auto& t : j.at("ratio_objective")) {
        inst.ratio_terms.push_back({hermitian_from_json(t.at("Q")), required<double>(t, "weight")});
      }
    }
    if (j.contains("homogenized_from")) inst.homogenized_from = j.at("homogenized_from").get<int>();
    return inst;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed instance: ") + e.what());
  }
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  write_text_file(path, dump_canonical(to_json(inst)));
}

Instance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json_file(path));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace phaserelax
