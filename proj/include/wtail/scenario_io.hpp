#pragma once
// Scenario file grammar: a single JSON document with top-level keys
//   n, losses, weights, links, regime, stopping, grids
// (links, stopping, grids optional; unknown keys anywhere are errors).
// Marginals are {"family": ..., named parameters}; links are declared as
//   links: {x_theta: [{i, copula, kappa}],
//           x_x:     [{i, j, copula:"fgm", kappa}] | {copula, rho|theta|kappa},
//           theta_theta: {copula, rho|kappa}}
// with 1-based coordinate indices.  write_scenario_text emits a canonical
// form: fixed key order, 2-space indent, shortest round-trip numbers, so
// write -> read -> write is byte-identical.

#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wtail/model.hpp"

namespace wtail {

/// Parse failure with field or line context baked into the message.
class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(const std::string& where, const std::string& what)
      : std::runtime_error("scenario parse error at " + where + ": " + what) {
  }
};

namespace scenario_detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& where,
                              const std::string& what) {
  throw ScenarioParseError(where, what);
}

inline void check_keys(const Json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(where, "unknown key \"" + it.key() + "\"");
  }
}

inline const Json& field(const Json& obj, const std::string& where,
                         const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail(where, std::string("missing key \"") + key + "\"");
  return *it;
}

inline double number(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

inline int integer(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

inline std::string text(const Json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

inline std::vector<double> number_list(const Json& v,
                                       const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k)
    out.push_back(number(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

inline Distribution parse_distribution(const Json& obj,
                                       const std::string& where) {
  if (!obj.is_object()) fail(where, "expected a distribution object");
  const std::string family =
      text(field(obj, where, "family"), where + ".family");
  try {
    if (family == "pareto" || family == "frechet") {
      check_keys(obj, where, {"family", "alpha", "scale"});
      const double alpha = number(field(obj, where, "alpha"), where);
      const double scale = number(field(obj, where, "scale"), where);
      return family == "pareto" ? Distribution::pareto(alpha, scale)
                                : Distribution::frechet(alpha, scale);
    }
    if (family == "lognormal") {
      check_keys(obj, where, {"family", "mu", "sigma"});
      return Distribution::lognormal(number(field(obj, where, "mu"), where),
                                     number(field(obj, where, "sigma"),
                                            where));
    }
    if (family == "weibull") {
      check_keys(obj, where, {"family", "shape", "scale"});
      return Distribution::weibull_heavy(
          number(field(obj, where, "shape"), where),
          number(field(obj, where, "scale"), where));
    }
    if (family == "uniform") {
      check_keys(obj, where, {"family", "lo", "hi"});
      return Distribution::uniform(number(field(obj, where, "lo"), where),
                                   number(field(obj, where, "hi"), where));
    }
    if (family == "two_point" || family == "discrete") {
      check_keys(obj, where, {"family", "atoms", "probs"});
      const std::vector<double> atoms =
          number_list(field(obj, where, "atoms"), where + ".atoms");
      const std::vector<double> probs =
          number_list(field(obj, where, "probs"), where + ".probs");
      if (family == "discrete")
        return Distribution::bounded_discrete(atoms, probs);
      if (atoms.size() != probs.size() || atoms.empty() || atoms.size() > 2)
        fail(where, "two_point needs matching atom/prob lists of size 1 or 2");
      if (atoms.size() == 1)
        return Distribution::two_point(atoms[0], probs[0], atoms[0], 0.0);
      return Distribution::two_point(atoms[0], probs[0], atoms[1], probs[1]);
    }
    if (family == "perturbed_pareto") {
      check_keys(obj, where, {"family", "alpha", "scale", "drop", "period"});
      return Distribution::perturbed_pareto(
          number(field(obj, where, "alpha"), where),
          number(field(obj, where, "scale"), where),
          number(field(obj, where, "drop"), where),
          number(field(obj, where, "period"), where));
    }
  } catch (const ScenarioParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  fail(where + ".family", "unknown family \"" + family + "\"");
}

inline int coordinate(const Json& v, const std::string& where, int n) {
  const int i = integer(v, where);
  if (i < 1 || i > n)
    fail(where, "coordinate index " + std::to_string(i) +
                    " outside 1.." + std::to_string(n));
  return i - 1;
}

/// Block declared as an object: {copula: ..., rho|kappa|theta: ...}.
inline void parse_block_object(const Json& obj, const std::string& where,
                               BlockFamily* family, double* param) {
  const std::string copula =
      text(field(obj, where, "copula"), where + ".copula");
  if (copula == "independence") {
    check_keys(obj, where, {"copula"});
    *family = BlockFamily::kIndependence;
    *param = 0.0;
  } else if (copula == "fgm") {
    check_keys(obj, where, {"copula", "kappa"});
    *family = BlockFamily::kFGM;
    *param = number(field(obj, where, "kappa"), where + ".kappa");
  } else if (copula == "gaussian") {
    check_keys(obj, where, {"copula", "rho"});
    *family = BlockFamily::kGaussian;
    *param = number(field(obj, where, "rho"), where + ".rho");
  } else if (copula == "survival_clayton") {
    check_keys(obj, where, {"copula", "theta"});
    *family = BlockFamily::kSurvivalClayton;
    *param = number(field(obj, where, "theta"), where + ".theta");
  } else {
    fail(where + ".copula", "unknown copula \"" + copula + "\"");
  }
}

inline void parse_links(const Json& obj, const std::string& where,
                        ScenarioRecord* record) {
  check_keys(obj, where, {"x_theta", "x_x", "theta_theta"});
  const int n = record->n;

  if (obj.contains("x_theta")) {
    const Json& arr = obj["x_theta"];
    const std::string aw = where + ".x_theta";
    if (!arr.is_array()) fail(aw, "expected an array of link entries");
    std::vector<bool> seen(std::size_t(n), false);
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string ew = aw + "[" + std::to_string(k) + "]";
      check_keys(arr[k], ew, {"i", "copula", "kappa"});
      const int i = coordinate(field(arr[k], ew, "i"), ew + ".i", n);
      if (seen[std::size_t(i)])
        fail(ew, "duplicate entry for coordinate " + std::to_string(i + 1));
      seen[std::size_t(i)] = true;
      const std::string copula =
          text(field(arr[k], ew, "copula"), ew + ".copula");
      if (copula == "independence") {
        if (arr[k].contains("kappa") &&
            number(arr[k]["kappa"], ew + ".kappa") != 0.0)
          fail(ew, "independence link cannot carry a nonzero kappa");
      } else if (copula == "fgm") {
        record->link_kappa[std::size_t(i)] =
            number(field(arr[k], ew, "kappa"), ew + ".kappa");
      } else {
        fail(ew + ".copula",
             "loss-weight links support only independence or fgm");
      }
    }
  }

  if (obj.contains("x_x")) {
    const Json& xx = obj["x_x"];
    const std::string xw = where + ".x_x";
    if (xx.is_array()) {
      record->x_block.family = BlockFamily::kIndependence;
      bool any = false;
      auto& kappa = record->x_block.kappa;
      kappa.assign(std::size_t(n), std::vector<double>(std::size_t(n), 0.0));
      std::vector<std::vector<bool>> seen(
          std::size_t(n), std::vector<bool>(std::size_t(n), false));
      for (std::size_t k = 0; k < xx.size(); ++k) {
        const std::string ew = xw + "[" + std::to_string(k) + "]";
        check_keys(xx[k], ew, {"i", "j", "copula", "kappa"});
        const std::string copula =
            text(field(xx[k], ew, "copula"), ew + ".copula");
        if (copula != "fgm")
          fail(ew + ".copula",
               "pairwise loss-loss entries must use the fgm copula; declare "
               "gaussian or survival_clayton blocks as a single object");
        const int i = coordinate(field(xx[k], ew, "i"), ew + ".i", n);
        const int j = coordinate(field(xx[k], ew, "j"), ew + ".j", n);
        if (i == j) fail(ew, "loss-loss entry needs two distinct coordinates");
        if (seen[std::size_t(i)][std::size_t(j)])
          fail(ew, "duplicate entry for pair (" + std::to_string(i + 1) +
                       ", " + std::to_string(j + 1) + ")");
        seen[std::size_t(i)][std::size_t(j)] = true;
        seen[std::size_t(j)][std::size_t(i)] = true;
        const double value = number(field(xx[k], ew, "kappa"), ew + ".kappa");
        kappa[std::size_t(i)][std::size_t(j)] = value;
        kappa[std::size_t(j)][std::size_t(i)] = value;
        any = any || value != 0.0;
      }
      if (any)
        record->x_block.family = BlockFamily::kFGM;
      else
        record->x_block.kappa.clear();
    } else if (xx.is_object()) {
      parse_block_object(xx, xw, &record->x_block.family,
                         &record->x_block.param);
      if (record->x_block.family == BlockFamily::kFGM) {
        const double value = record->x_block.param;
        record->x_block.param = 0.0;
        record->x_block.kappa.assign(
            std::size_t(n), std::vector<double>(std::size_t(n), value));
        for (int i = 0; i < n; ++i)
          record->x_block.kappa[std::size_t(i)][std::size_t(i)] = 0.0;
      }
    } else {
      fail(xw, "expected an array of pair entries or a block object");
    }
  }

  if (obj.contains("theta_theta")) {
    parse_block_object(obj["theta_theta"], where + ".theta_theta",
                       &record->theta_block.family,
                       &record->theta_block.param);
  }
}

inline StoppingLaw parse_stopping(const Json& obj, const std::string& where) {
  check_keys(obj, where, {"pmf"});
  const Json& pmf = field(obj, where, "pmf");
  const std::string pw = where + ".pmf";
  if (!pmf.is_object()) fail(pw, "expected an object of {\"k\": probability}");
  std::vector<std::pair<int, double>> entries;
  for (auto it = pmf.begin(); it != pmf.end(); ++it) {
    const std::string& key = it.key();
    char* end = nullptr;
    const long k = std::strtol(key.c_str(), &end, 10);
    if (key.empty() || *end != '\0' || k < 0)
      fail(pw, "pmf keys must be nonnegative integers; got \"" + key + "\"");
    entries.emplace_back(int(k), number(it.value(), pw + "." + key));
  }
  try {
    return StoppingLaw::from_pairs(entries);
  } catch (const std::invalid_argument& e) {
    fail(pw, e.what());
  }
}

inline OrderedJson distribution_to_json(const Distribution& d) {
  OrderedJson out;
  switch (d.family()) {
    case Family::kPareto:
    case Family::kFrechet:
      out["family"] = d.family() == Family::kPareto ? "pareto" : "frechet";
      out["alpha"] = d.param_a();
      out["scale"] = d.param_b();
      break;
    case Family::kLognormal:
      out["family"] = "lognormal";
      out["mu"] = d.param_a();
      out["sigma"] = d.param_b();
      break;
    case Family::kWeibullHeavy:
      out["family"] = "weibull";
      out["shape"] = d.param_a();
      out["scale"] = d.param_b();
      break;
    case Family::kUniform:
      out["family"] = "uniform";
      out["lo"] = d.param_a();
      out["hi"] = d.param_b();
      break;
    case Family::kTwoPoint:
    case Family::kBoundedDiscrete:
      out["family"] =
          d.family() == Family::kTwoPoint ? "two_point" : "discrete";
      out["atoms"] = d.atoms();
      out["probs"] = d.atom_probs();
      break;
    case Family::kPerturbedPareto:
      out["family"] = "perturbed_pareto";
      out["alpha"] = d.param_a();
      out["scale"] = d.param_b();
      out["drop"] = d.param_c();
      out["period"] = d.param_p();
      break;
  }
  return out;
}

inline OrderedJson block_to_json(BlockFamily family, double param) {
  OrderedJson out;
  switch (family) {
    case BlockFamily::kIndependence:
      out["copula"] = "independence";
      break;
    case BlockFamily::kFGM:
      out["copula"] = "fgm";
      out["kappa"] = param;
      break;
    case BlockFamily::kGaussian:
      out["copula"] = "gaussian";
      out["rho"] = param;
      break;
    case BlockFamily::kSurvivalClayton:
      out["copula"] = "survival_clayton";
      out["theta"] = param;
      break;
  }
  return out;
}

}  // namespace scenario_detail

/// Parse a scenario document; throws ScenarioParseError with line or field
/// context on any syntactic or structural problem.
inline ScenarioRecord parse_scenario_text(const std::string& body) {
  namespace sd = scenario_detail;
  sd::Json root;
  try {
    root = sd::Json::parse(body);
  } catch (const sd::Json::parse_error& e) {
    // nlohmann's message already carries line and column for text input.
    sd::fail("input", e.what());
  }
  const std::string top = "scenario";
  sd::check_keys(root, top,
                 {"n", "losses", "weights", "links", "regime", "stopping",
                  "grids"});

  ScenarioRecord record;
  record.n = sd::integer(sd::field(root, top, "n"), top + ".n");
  if (record.n < 1) sd::fail(top + ".n", "n must be >= 1");

  for (const char* key : {"losses", "weights"}) {
    const sd::Json& arr = sd::field(root, top, key);
    const std::string aw = top + "." + key;
    if (!arr.is_array() || arr.size() != std::size_t(record.n))
      sd::fail(aw, "expected an array of exactly n distributions");
    auto& into = key == std::string("losses") ? record.losses : record.weights;
    for (std::size_t k = 0; k < arr.size(); ++k)
      into.push_back(sd::parse_distribution(
          arr[k], aw + "[" + std::to_string(k) + "]"));
  }

  record.link_kappa.assign(std::size_t(record.n), 0.0);
  if (root.contains("links"))
    sd::parse_links(root["links"], top + ".links", &record);

  try {
    record.regime = regime_from_name(
        sd::text(sd::field(root, top, "regime"), top + ".regime"));
  } catch (const std::invalid_argument& e) {
    sd::fail(top + ".regime", e.what());
  }

  if (root.contains("stopping"))
    record.stopping = sd::parse_stopping(root["stopping"], top + ".stopping");

  if (root.contains("grids")) {
    const sd::Json& grids = root["grids"];
    const std::string gw = top + ".grids";
    sd::check_keys(grids, gw, {"levels"});
    if (grids.contains("levels"))
      record.levels = sd::number_list(grids["levels"], gw + ".levels");
  }
  return record;
}

/// Canonical serialization: write -> read -> write is byte-identical.
inline std::string write_scenario_text(const ScenarioRecord& record) {
  namespace sd = scenario_detail;
  sd::OrderedJson root;
  root["n"] = record.n;
  root["losses"] = sd::OrderedJson::array();
  for (const auto& d : record.losses)
    root["losses"].push_back(sd::distribution_to_json(d));
  root["weights"] = sd::OrderedJson::array();
  for (const auto& d : record.weights)
    root["weights"].push_back(sd::distribution_to_json(d));

  sd::OrderedJson links = sd::OrderedJson::object();
  sd::OrderedJson x_theta = sd::OrderedJson::array();
  for (std::size_t i = 0; i < record.link_kappa.size(); ++i) {
    if (record.link_kappa[i] == 0.0) continue;
    sd::OrderedJson entry;
    entry["i"] = int(i) + 1;
    entry["copula"] = "fgm";
    entry["kappa"] = record.link_kappa[i];
    x_theta.push_back(std::move(entry));
  }
  if (!x_theta.empty()) links["x_theta"] = std::move(x_theta);
  if (record.x_block.family == BlockFamily::kFGM) {
    sd::OrderedJson x_x = sd::OrderedJson::array();
    for (int i = 0; i < record.n; ++i) {
      for (int j = i + 1; j < record.n; ++j) {
        const double value =
            record.x_block.kappa[std::size_t(i)][std::size_t(j)];
        if (value == 0.0) continue;
        sd::OrderedJson entry;
        entry["i"] = i + 1;
        entry["j"] = j + 1;
        entry["copula"] = "fgm";
        entry["kappa"] = value;
        x_x.push_back(std::move(entry));
      }
    }
    if (!x_x.empty()) links["x_x"] = std::move(x_x);
  } else if (record.x_block.family != BlockFamily::kIndependence) {
    links["x_x"] =
        sd::block_to_json(record.x_block.family, record.x_block.param);
  }
  if (record.theta_block.family != BlockFamily::kIndependence)
    links["theta_theta"] =
        sd::block_to_json(record.theta_block.family, record.theta_block.param);
  if (!links.empty()) root["links"] = std::move(links);

  root["regime"] = regime_name(record.regime);

  if (record.stopping.has_value()) {
    sd::OrderedJson pmf = sd::OrderedJson::object();
    const auto& probs = record.stopping->probabilities();
    for (std::size_t k = 0; k < probs.size(); ++k)
      if (probs[k] > 0.0) pmf[std::to_string(k)] = probs[k];
    root["stopping"] = sd::OrderedJson::object();
    root["stopping"]["pmf"] = std::move(pmf);
  }

  if (!record.levels.empty()) {
    root["grids"] = sd::OrderedJson::object();
    root["grids"]["levels"] = record.levels;
  }
  return root.dump(2) + "\n";
}

}  // namespace wtail
