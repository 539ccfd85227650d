#pragma once

#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "convergence.hpp"
#include "errors.hpp"
#include "operator_model.hpp"
#include "ritz.hpp"

namespace ritzlab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON configuration.  Every validation failure raises ConfigInvalid naming
// the offending field by dotted path, so callers can print the message as-is.
// ---------------------------------------------------------------------------

namespace config_detail {

inline std::string join(const std::string& path, const char* name) {
  return path.empty() ? std::string(name) : path + "." + name;
}

inline const json& member(const json& j, const std::string& path, const char* name) {
  if (!j.is_object())
    throw ConfigInvalid("field '" + (path.empty() ? std::string("<root>") : path) +
                        "': must be an object");
  const auto it = j.find(name);
  if (it == j.end()) throw ConfigInvalid("field '" + join(path, name) + "': missing");
  return *it;
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigInvalid("field '" + path + "': must be a number");
  return v.get<double>();
}

inline int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer())
    throw ConfigInvalid("field '" + path + "': must be an integer");
  return v.get<int>();
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigInvalid("field '" + path + "': must be a string");
  return v.get<std::string>();
}

inline std::uint64_t as_seed(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigInvalid("field '" + path + "': must be a non-negative integer");
}

inline double number_or(const json& j, const std::string& path, const char* name,
                        double fallback) {
  if (!j.is_object() || !j.contains(name)) return fallback;
  return as_number(j.at(name), join(path, name));
}

inline int int_or(const json& j, const std::string& path, const char* name, int fallback) {
  if (!j.is_object() || !j.contains(name)) return fallback;
  return as_int(j.at(name), join(path, name));
}

inline std::string string_or(const json& j, const std::string& path, const char* name,
                             const std::string& fallback) {
  if (!j.is_object() || !j.contains(name)) return fallback;
  return as_string(j.at(name), join(path, name));
}

inline Complex as_complex(const json& v, const std::string& path) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && (v.size() == 1 || v.size() == 2)) {
    const double re = as_number(v[0], path + "[0]");
    const double im = v.size() == 2 ? as_number(v[1], path + "[1]") : 0.0;
    return Complex(re, im);
  }
  throw ConfigInvalid("field '" + path + "': must be a number or [re, im]");
}

// Interval lengths may be given numerically or as the literal string "pi".
inline double as_length(const json& v, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() == "pi") return std::numbers::pi;
    throw ConfigInvalid("field '" + path + "': unknown length name '" +
                        v.get<std::string>() + "' (only \"pi\" is recognized)");
  }
  return as_number(v, path);
}

struct ParsedRule {
  std::function<double(int)> fn;
  std::optional<double> ess_inf;
};

inline ParsedRule parse_rule(const json& j, const std::string& path) {
  const std::string type = as_string(member(j, path, "type"), join(path, "type"));
  ParsedRule out;
  if (type == "affine") {
    const double offset = as_number(member(j, path, "offset"), join(path, "offset"));
    const double slope = as_number(member(j, path, "slope"), join(path, "slope"));
    out.fn = [offset, slope](int i) { return offset + slope * i; };
    return out;
  }
  if (type == "prefix_affine") {
    const json& pj = member(j, path, "prefix");
    if (!pj.is_array() || pj.empty())
      throw ConfigInvalid("field '" + join(path, "prefix") + "': must be a non-empty array");
    auto prefix = std::make_shared<std::vector<double>>();
    for (std::size_t i = 0; i < pj.size(); ++i)
      prefix->push_back(
          as_number(pj[i], join(path, "prefix") + "[" + std::to_string(i) + "]"));
    const double offset = number_or(j, path, "offset", 0.0);
    const double slope = number_or(j, path, "slope", 1.0);
    out.fn = [prefix, offset, slope](int i) {
      if (i < static_cast<int>(prefix->size())) return (*prefix)[i];
      return offset + slope * i;
    };
    return out;
  }
  if (type == "saturating") {
    const double limit = as_number(member(j, path, "limit"), join(path, "limit"));
    const double scale = as_number(member(j, path, "scale"), join(path, "scale"));
    if (!(scale > 0.0))
      throw ConfigInvalid("field '" + join(path, "scale") + "': must be positive");
    out.fn = [limit, scale](int i) { return limit - scale / (i + 1); };
    out.ess_inf = limit;
    return out;
  }
  throw ConfigInvalid("field '" + join(path, "type") + "': unknown rule type '" + type +
                      "' (expected affine, prefix_affine or saturating)");
}

}  // namespace config_detail

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file: " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigInvalid("config is not valid JSON: " + std::string(e.what()));
  }
}

inline OperatorModel parse_operator(const json& j, const std::string& path = "operator") {
  namespace cd = config_detail;
  const std::string kind = cd::as_string(cd::member(j, path, "kind"), cd::join(path, "kind"));

  if (kind == "matrix") {
    const json& ej = cd::member(j, path, "entries");
    const std::string ep = cd::join(path, "entries");
    if (!ej.is_array() || ej.empty())
      throw ConfigInvalid("field '" + ep + "': must be a non-empty array of rows");
    const int n = static_cast<int>(ej.size());
    ComplexMatrix cm(n, n);
    for (int i = 0; i < n; ++i) {
      const json& row = ej[i];
      const std::string rp = ep + "[" + std::to_string(i) + "]";
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw ConfigInvalid("field '" + rp + "': must be a row of " + std::to_string(n) +
                            " entries");
      for (int c = 0; c < n; ++c)
        cm(i, c) = cd::as_complex(row[c], rp + "[" + std::to_string(c) + "]");
    }
    // The model needs a Hermitian matrix; reject input that merely looks like
    // one after symmetrization instead of silently averaging a typo away.
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < n; ++c) scale = std::max(scale, std::abs(cm(i, c)));
    for (int i = 0; i < n; ++i)
      for (int c = i; c < n; ++c)
        if (std::abs(cm(i, c) - std::conj(cm(c, i))) > 1e-12 * std::max(1.0, scale))
          throw ConfigInvalid("field '" + ep + "': matrix is not Hermitian at (" +
                              std::to_string(i) + ", " + std::to_string(c) + ")");
    const double shift = cd::number_or(j, path, "shift", 0.0);
    return make_matrix_operator(HermitianMatrix(cm), shift);
  }

  if (kind == "diagonal") {
    cd::ParsedRule rule =
        cd::parse_rule(cd::member(j, path, "rule"), cd::join(path, "rule"));
    if (j.contains("ess_inf"))
      rule.ess_inf = cd::as_number(j.at("ess_inf"), cd::join(path, "ess_inf"));
    const int limit = cd::int_or(j, path, "enumeration_limit", 4096);
    if (j.contains("mixing_seed")) {
      const std::uint64_t seed =
          cd::as_seed(j.at("mixing_seed"), cd::join(path, "mixing_seed"));
      const double tail_exponent = cd::number_or(j, path, "tail_exponent", 1.0);
      const int tail_support = cd::int_or(j, path, "tail_support", 50000);
      return make_mixed_diagonal_operator(std::move(rule.fn), rule.ess_inf, seed,
                                          tail_exponent, tail_support, limit);
    }
    return make_diagonal_operator(std::move(rule.fn), rule.ess_inf, limit);
  }

  if (kind == "dirichlet_laplacian") {
    const double length =
        cd::as_length(cd::member(j, path, "length"), cd::join(path, "length"));
    const int nodes = cd::as_int(cd::member(j, path, "nodes"), cd::join(path, "nodes"));
    return make_dirichlet_laplacian(length, nodes);
  }

  if (kind == "schrodinger_1d") {
    const std::string potential =
        cd::as_string(cd::member(j, path, "potential"), cd::join(path, "potential"));
    const double half_width =
        cd::as_number(cd::member(j, path, "half_width"), cd::join(path, "half_width"));
    const int nodes = cd::as_int(cd::member(j, path, "nodes"), cd::join(path, "nodes"));
    return make_schrodinger_named(potential, half_width, nodes);
  }

  throw ConfigInvalid("field '" + cd::join(path, "kind") + "': unknown operator kind '" +
                      kind +
                      "' (expected matrix, diagonal, dirichlet_laplacian or "
                      "schrodinger_1d)");
}

inline ApproximatingFamily parse_family(const json& j, const OperatorModel& op, int m,
                                        const std::string& path = "family") {
  namespace cd = config_detail;
  std::string kind;
  if (j.is_string())
    kind = j.get<std::string>();
  else
    kind = cd::as_string(cd::member(j, path, "kind"), cd::join(path, "kind"));
  if (kind == "truncation") return family_truncation(op, m);
  if (kind == "mesh_interpolation") return family_mesh_interpolation(op, m);
  if (kind == "oracle") return family_discrete_oracle(op, m);
  throw ConfigInvalid("field '" + cd::join(path, "kind") + "': unknown family '" + kind +
                      "' (expected truncation, mesh_interpolation or oracle)");
}

// Trial vectors arrive either dense ([c0, c1, ...], entries number or
// [re, im]) or sparse ({"entries": [[index, re] or [index, re, im], ...]}).
inline TrialBasis parse_basis(const json& j, const std::string& path = "basis") {
  namespace cd = config_detail;
  if (!j.is_array() || j.empty())
    throw ConfigInvalid("field '" + path + "': must be a non-empty array");
  TrialBasis basis;
  for (std::size_t v = 0; v < j.size(); ++v) {
    const json& vec = j[v];
    const std::string vp = path + "[" + std::to_string(v) + "]";
    std::vector<CoefficientVector::Entry> entries;
    if (vec.is_array()) {
      for (std::size_t i = 0; i < vec.size(); ++i)
        entries.push_back({static_cast<int>(i),
                           cd::as_complex(vec[i], vp + "[" + std::to_string(i) + "]")});
    } else if (vec.is_object() && vec.contains("entries")) {
      const json& es = vec.at("entries");
      const std::string esp = vp + ".entries";
      if (!es.is_array())
        throw ConfigInvalid("field '" + esp + "': must be an array of [index, re, im]");
      for (std::size_t i = 0; i < es.size(); ++i) {
        const json& e = es[i];
        const std::string epath = esp + "[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() < 2 || e.size() > 3)
          throw ConfigInvalid("field '" + epath + "': must be [index, re] or [index, re, im]");
        const int index = cd::as_int(e[0], epath + "[0]");
        if (index < 0) throw ConfigInvalid("field '" + epath + "[0]': must be >= 0");
        const double re = cd::as_number(e[1], epath + "[1]");
        const double im = e.size() == 3 ? cd::as_number(e[2], epath + "[2]") : 0.0;
        entries.push_back({index, Complex(re, im)});
      }
    } else {
      throw ConfigInvalid("field '" + vp +
                          "': must be a coefficient array or an object with 'entries'");
    }
    basis.push_back(CoefficientVector(std::move(entries)));
  }
  return basis;
}

struct StudyConfig {
  OperatorModel op;
  ApproximatingFamily family;
  int m = 0;
  int steps = 0;
  double target_tol = 1e-6;
  double prune_tol = 1e-8;
  int threads = 0;  // 0: not set here, the caller decides
  std::string output_path;
};

inline StudyConfig parse_study_config(const json& j) {
  namespace cd = config_detail;
  StudyConfig cfg;
  cfg.op = parse_operator(cd::member(j, "", "operator"));
  cfg.m = cd::as_int(cd::member(j, "", "m"), "m");
  if (cfg.m < 1) throw ConfigInvalid("field 'm': must be >= 1");
  cfg.steps = cd::as_int(cd::member(j, "", "steps"), "steps");
  if (cfg.steps < 1) throw ConfigInvalid("field 'steps': must be >= 1");
  cfg.family = parse_family(cd::member(j, "", "family"), cfg.op, cfg.m);
  cfg.target_tol = cd::number_or(j, "", "target_tol", 1e-6);
  if (!(cfg.target_tol > 0.0)) throw ConfigInvalid("field 'target_tol': must be positive");
  cfg.prune_tol = cd::number_or(j, "", "prune_tol", 1e-8);
  if (!(cfg.prune_tol >= 0.0)) throw ConfigInvalid("field 'prune_tol': must be >= 0");
  cfg.threads = cd::int_or(j, "", "threads", 0);
  if (j.contains("threads") && cfg.threads < 1)
    throw ConfigInvalid("field 'threads': must be >= 1");
  cfg.output_path = cd::string_or(j, "", "output_path", "");
  return cfg;
}

struct SpectrumConfig {
  OperatorModel op;
  TrialBasis basis;
  int threads = 0;
};

inline SpectrumConfig parse_spectrum_config(const json& j) {
  namespace cd = config_detail;
  SpectrumConfig cfg;
  cfg.op = parse_operator(cd::member(j, "", "operator"));
  cfg.basis = parse_basis(cd::member(j, "", "basis"));
  cfg.threads = cd::int_or(j, "", "threads", 0);
  if (j.contains("threads") && cfg.threads < 1)
    throw ConfigInvalid("field 'threads': must be >= 1");
  return cfg;
}

}  // namespace ritzlab
