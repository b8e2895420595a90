#pragma once
// Convergence reports: tabulate Monte Carlo estimates of a tail functional
// against its closed-form first-order value and two-sided bounds over a grid
// of exceedance levels, attach a per-row verdict, and serialize the table
// (CSV, JSON, plot curves) under content-addressed file names with an
// append-only run manifest.  Result files never mention the worker count or
// the wall clock, so reruns with identical (scenario, quantity, levels, m,
// seed) are byte-identical no matter how the work was sharded; timing lives
// only in the manifest.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wtail/diagnostics.hpp"
#include "wtail/simulate.hpp"

namespace wtail {

inline constexpr const char* kVerdictWithinTol = "within-tol";
inline constexpr const char* kVerdictOutsideTol = "outside-tol";
inline constexpr const char* kToolVersion = "wtail 1.0.0";

/// Monte Carlo run configuration shared by every report row.
struct MCSettings {
  std::size_t m = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
  double tol = 0.10;        // relative tolerance band around the references
  bool conditional = true;  // variance-reduced estimators where available
};

/// Which functional to tabulate.  `tag` picks the estimator/reference pair;
/// the remaining fields parameterize the tags that need them.
struct QuantityRequest {
  std::string tag;               // one of report_quantities()
  PhiSpec phi = PhiSpec::one();  // genmoment only
  int coordinate = 0;            // mes only
  int horizon = 0;               // ruin only; 0 means the full dimension
};

inline const std::vector<std::string>& report_quantities() {
  static const std::vector<std::string> tags = {
      "sum",         "partial-max",         "max-summand",
      "genmoment",   "es",                  "mes",
      "stopped-sum", "stopped-partial-max", "stopped-max-summand",
      "ruin",        "ruin-random"};
  return tags;
}

/// One grid point of a convergence report.
struct ReportRow {
  double x = 0.0;
  double level = 0.0;   // nominal exceedance probability defining x
  double mc = 0.0;      // Monte Carlo point estimate
  double mc_lo = 0.0;   // 95% interval
  double mc_hi = 0.0;
  double stderror = 0.0;
  double asym = 0.0;    // first-order reference (midpoint of bounds where
                        // only bounds exist)
  double lower = 0.0;   // two-sided asymptotic bounds (NaN when the theory
  double upper = 0.0;   // provides none for this scenario)
  double ratio = 0.0;   // mc / asym, NaN where undefined
  std::string method;   // "crude" or "conditional"
  std::vector<std::string> flags;
  std::string verdict;  // within-tol / outside-tol / inconclusive
};

/// Grid table comparing Monte Carlo against the asymptotic references.
struct ConvergenceReport {
  std::string quantity;
  double tol = 0.10;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;

  bool all_ok() const {
    for (const ReportRow& r : rows)
      if (r.verdict == kVerdictOutsideTol) return false;
    return true;
  }
  const ReportRow* first_failure() const {
    for (const ReportRow& r : rows)
      if (r.verdict == kVerdictOutsideTol) return &r;
    return nullptr;
  }
};

namespace report_detail {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] inline void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

inline bool known_tag(const std::string& tag) {
  for (const std::string& t : report_quantities())
    if (t == tag) return true;
  return false;
}

inline void check_request(const Scenario& s, const QuantityRequest& q,
                          const std::vector<double>& levels,
                          const MCSettings& cfg) {
  if (!known_tag(q.tag)) fail("unknown quantity tag: " + q.tag);
  if (levels.empty()) fail("report needs at least one exceedance level");
  double prev = 1.0;
  for (double lv : levels) {
    if (!(lv > 0.0 && lv < 1.0))
      fail("levels must be exceedance probabilities in (0, 1)");
    if (!(lv < prev))
      fail("levels must be strictly decreasing so the threshold grid "
           "increases");
    prev = lv;
  }
  if (!(cfg.tol > 0.0) || !std::isfinite(cfg.tol))
    fail("tolerance must be positive and finite");
  if (q.tag == "mes" && (q.coordinate < 0 || q.coordinate >= s.dimension()))
    fail("mes coordinate index out of range");
  if (q.tag == "ruin" &&
      (q.horizon < 0 || q.horizon > s.dimension()))
    fail("ruin horizon must lie between 1 and the scenario dimension");
  const bool wants_max_summand =
      q.tag == "max-summand" || q.tag == "stopped-max-summand";
  if (wants_max_summand && s.regime() == Regime::kPQAI)
    throw std::domain_error(
        "theorem scope: the weaker quadrant regime does not cover the "
        "max-summand tail");
}

/// References for one row: the first-order value plus two-sided bounds.
/// NaN bounds mean the theory offers none for this scenario; the verdict
/// then falls back to the first-order value alone.
struct Reference {
  double asym = kNaN;
  double lower = kNaN;
  double upper = kNaN;
  std::vector<std::string> flags;
};

/// The tail tags tabulate the would-be first-order sum of product tails with
/// no regime mask: the negative-control report exists precisely to show the
/// Monte Carlo answer drifting away from that formula.  (The asymptotics
/// operations themselves keep refusing out-of-scope regimes.)
inline Reference tail_reference(const Scenario& s, double x) {
  Reference ref;
  double base = 0.0;
  for (int i = 0; i < s.dimension(); ++i) base += product_tail(s, i, x);
  ref.asym = base;
  try {
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < s.dimension(); ++i) {
      const double l_index = asym_detail::require_l_index(s, i);
      const double tail = product_tail(s, i, x);
      lo += l_index * tail;
      hi += tail / l_index;
    }
    ref.lower = lo;
    ref.upper = hi;
  } catch (const std::domain_error&) {
    ref.flags.push_back("no-bounds");
  }
  return ref;
}

inline Reference bounds_reference(const AsymptoticValue& lower,
                                  const AsymptoticValue& upper) {
  Reference ref;
  ref.lower = lower.value;
  ref.upper = upper.value;
  ref.asym = 0.5 * (lower.value + upper.value);
  return ref;
}

inline Reference point_reference(const AsymptoticValue& value) {
  Reference ref;
  ref.asym = ref.lower = ref.upper = value.value;
  return ref;
}

inline Reference reference_for(const Scenario& s, const QuantityRequest& q,
                               double x) {
  if (q.tag == "sum" || q.tag == "partial-max" || q.tag == "max-summand")
    return tail_reference(s, x);
  if (q.tag == "genmoment") {
    const auto [lo, hi] = genmoment_bounds(s, q.phi, x);
    return bounds_reference(lo, hi);
  }
  if (q.tag == "es") {
    double tail = 0.0;
    for (int i = 0; i < s.dimension(); ++i) tail += product_tail(s, i, x);
    const auto [lo, hi] = es_bounds(s, x, tail);
    return bounds_reference(lo, hi);
  }
  if (q.tag == "mes") {
    double tail = 0.0;
    for (int i = 0; i < s.dimension(); ++i) tail += product_tail(s, i, x);
    const MesBounds b = mes_bounds(s, q.coordinate, x, tail);
    Reference ref;
    ref.upper = b.upper.value;
    if (b.lower) {
      ref.lower = b.lower->value;
      ref.asym = 0.5 * (ref.lower + ref.upper);
    } else {
      ref.asym = b.upper.value;
      ref.flags.push_back("no-lower-bound");
    }
    if (b.dominance_warning) ref.flags.push_back("dominance-warning");
    return ref;
  }
  if (q.tag == "stopped-sum" || q.tag == "stopped-partial-max" ||
      q.tag == "stopped-max-summand")
    return point_reference(stopped_first_order(s, x));
  if (q.tag == "ruin") {
    const int h = q.horizon > 0 ? q.horizon : s.dimension();
    return point_reference(ruin_first_order(s, x, h));
  }
  // ruin-random
  return point_reference(ruin_random_horizon(s, x));
}

inline TailEstimate estimate_for(const Scenario& s, const QuantityRequest& q,
                                 double x, const MCSettings& cfg) {
  if (q.tag == "sum")
    return cfg.conditional
               ? tail_sum_condmc(s, x, cfg.m, cfg.seed, cfg.workers)
               : tails_all_mc(s, x, cfg.m, cfg.seed, cfg.workers).sum;
  if (q.tag == "partial-max")
    return (cfg.conditional
                ? tails_all_condmc(s, x, cfg.m, cfg.seed, cfg.workers)
                : tails_all_mc(s, x, cfg.m, cfg.seed, cfg.workers))
        .partial_max;
  if (q.tag == "max-summand")
    return (cfg.conditional
                ? tails_all_condmc(s, x, cfg.m, cfg.seed, cfg.workers)
                : tails_all_mc(s, x, cfg.m, cfg.seed, cfg.workers))
        .max_summand;
  if (q.tag == "genmoment")
    return genmoment_mc(s, q.phi, x, cfg.m, cfg.seed, cfg.workers);
  if (q.tag == "es") return es_mc(s, x, cfg.m, cfg.seed, cfg.workers);
  if (q.tag == "mes")
    return mes_mc(s, q.coordinate, x, cfg.m, cfg.seed, cfg.workers);
  if (q.tag == "stopped-sum")
    return stopped_tails_mc(s, x, cfg.m, cfg.seed, cfg.workers).sum;
  if (q.tag == "stopped-partial-max")
    return stopped_tails_mc(s, x, cfg.m, cfg.seed, cfg.workers).partial_max;
  if (q.tag == "stopped-max-summand")
    return stopped_tails_mc(s, x, cfg.m, cfg.seed, cfg.workers).max_summand;
  if (q.tag == "ruin") {
    const int h = q.horizon > 0 ? q.horizon : s.dimension();
    return ruin_finite_mc(s, x, h, cfg.m, cfg.seed, cfg.workers);
  }
  // ruin-random: ruin over the random horizon is the stopped running-max
  // exceedance.
  return stopped_tails_mc(s, x, cfg.m, cfg.seed, cfg.workers).partial_max;
}

inline std::string judge_row(const TailEstimate& est, const Reference& ref,
                             double tol) {
  if (!(ref.asym > 0.0) || !std::isfinite(ref.asym))
    return kVerdictInconclusive;
  if (est.zero_hits || est.widened_ci) return kVerdictInconclusive;
  // An interval wider than the tolerance band cannot resolve the verdict.
  if (est.ci_hi - est.ci_lo > 2.0 * tol * ref.asym)
    return kVerdictInconclusive;
  const double lo_ref = std::isnan(ref.lower) ? ref.asym : ref.lower;
  const double hi_ref = std::isnan(ref.upper) ? ref.asym : ref.upper;
  const bool inside = est.estimate >= lo_ref * (1.0 - tol) &&
                      est.estimate <= hi_ref * (1.0 + tol);
  return inside ? kVerdictWithinTol : kVerdictOutsideTol;
}

}  // namespace report_detail

/// Build the grid table for one quantity.  Levels are nominal exceedance
/// probabilities, strictly decreasing; each maps to its threshold through
/// the first-order inverse so grids stay comparable across scenarios.
inline ConvergenceReport convergence_report(const Scenario& s,
                                            const QuantityRequest& q,
                                            const std::vector<double>& levels,
                                            const MCSettings& cfg) {
  report_detail::check_request(s, q, levels, cfg);
  ConvergenceReport report;
  report.quantity = q.tag;
  report.tol = cfg.tol;
  report.m = cfg.m;
  report.seed = cfg.seed;
  report.rows.reserve(levels.size());
  for (double level : levels) {
    ReportRow row;
    row.level = level;
    row.x = level_to_x(s, level);
    const report_detail::Reference ref =
        report_detail::reference_for(s, q, row.x);
    const TailEstimate est = report_detail::estimate_for(s, q, row.x, cfg);
    row.mc = est.estimate;
    row.mc_lo = est.ci_lo;
    row.mc_hi = est.ci_hi;
    row.stderror = est.stderror;
    row.asym = ref.asym;
    row.lower = ref.lower;
    row.upper = ref.upper;
    row.ratio = (est.estimate > 0.0 && ref.asym > 0.0)
                    ? est.estimate / ref.asym
                    : report_detail::kNaN;
    row.method = est.method;
    row.flags = est.flags();
    for (const std::string& f : ref.flags) row.flags.push_back(f);
    row.verdict = report_detail::judge_row(est, ref, cfg.tol);
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---- serialization ---------------------------------------------------------

namespace report_detail {

inline void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace report_detail

/// CSV table: fixed column set, %.17g numbers, one row per grid point.
inline std::string report_to_csv(const ConvergenceReport& r) {
  std::string out = "x,level,mc,mc_lo,mc_hi,asym,lower,upper,ratio,verdict\n";
  for (const ReportRow& row : r.rows) {
    const double cols[] = {row.x,    row.level, row.mc,    row.mc_lo,
                           row.mc_hi, row.asym,  row.lower, row.upper,
                           row.ratio};
    for (double v : cols) {
      report_detail::append_g17(out, v);
      out += ',';
    }
    out += row.verdict;
    out += '\n';
  }
  return out;
}

/// Canonical JSON document: insertion-ordered keys, compact dump, one MC
/// record per row carrying the full estimator provenance.
inline std::string report_to_json(const ConvergenceReport& r) {
  nlohmann::ordered_json doc;
  doc["quantity"] = r.quantity;
  doc["tol"] = r.tol;
  doc["m"] = r.m;
  doc["seed"] = r.seed;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const ReportRow& row : r.rows) {
    nlohmann::ordered_json j;
    j["quantity"] = r.quantity;
    j["x"] = row.x;
    j["level"] = row.level;
    j["estimate"] = row.mc;
    j["stderr"] = row.stderror;
    j["ci"] = {row.mc_lo, row.mc_hi};
    j["m"] = r.m;
    j["seed"] = r.seed;
    j["method"] = row.method;
    j["flags"] = row.flags;
    j["asym"] = row.asym;
    j["lower"] = row.lower;
    j["upper"] = row.upper;
    j["ratio"] = row.ratio;
    j["verdict"] = row.verdict;
    doc["rows"].push_back(std::move(j));
  }
  return doc.dump();
}

/// One plottable curve: two space-separated %.17g columns per line.
struct PlotCurve {
  std::string name;     // mc / asym / lower / upper
  std::string content;  // "x value\n" rows
};

inline std::vector<PlotCurve> report_plot_curves(const ConvergenceReport& r) {
  std::vector<PlotCurve> curves(4);
  curves[0].name = "mc";
  curves[1].name = "asym";
  curves[2].name = "lower";
  curves[3].name = "upper";
  for (const ReportRow& row : r.rows) {
    const double vals[] = {row.mc, row.asym, row.lower, row.upper};
    for (std::size_t c = 0; c < 4; ++c) {
      report_detail::append_g17(curves[c].content, row.x);
      curves[c].content += ' ';
      report_detail::append_g17(curves[c].content, vals[c]);
      curves[c].content += '\n';
    }
  }
  return curves;
}

// ---- persistence -----------------------------------------------------------

/// FNV-1a 64-bit content hash, the basis of output file names.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

/// Content-addressed stem shared by every file of one report.
inline std::string report_stem(const std::string& command,
                               const ConvergenceReport& r) {
  return command + "_" + r.quantity + "_" + hex16(fnv1a64(report_to_json(r)));
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " +
                                     path.string());
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Files produced for one report (relative names within the out dir).
struct WrittenReport {
  std::string stem;
  std::vector<std::string> files;
};

inline WrittenReport write_report_files(const std::filesystem::path& out_dir,
                                        const std::string& command,
                                        const ConvergenceReport& r,
                                        const std::string& format) {
  const bool csv = format == "csv" || format == "both";
  const bool json = format == "json" || format == "both";
  if (!csv && !json)
    throw std::invalid_argument("format must be csv, json, or both");
  std::filesystem::create_directories(out_dir);
  WrittenReport out;
  out.stem = report_stem(command, r);
  if (csv) {
    const std::string name = out.stem + ".csv";
    write_text_file(out_dir / name, report_to_csv(r));
    out.files.push_back(name);
  }
  if (json) {
    const std::string name = out.stem + ".json";
    write_text_file(out_dir / name, report_to_json(r));
    out.files.push_back(name);
  }
  for (const PlotCurve& curve : report_plot_curves(r)) {
    const std::string name = out.stem + "_" + curve.name + ".dat";
    write_text_file(out_dir / name, curve.content);
    out.files.push_back(name);
  }
  return out;
}

/// Provenance record for one command invocation.  The manifest is the only
/// place the worker count and the wall clock appear; result files stay
/// byte-identical across shardings.
struct ExperimentManifest {
  std::string command;
  std::string scenario_hash;  // hex16 FNV-1a of the scenario file bytes
  std::uint64_t seed = 0;
  std::size_t m = 0;
  int workers = 1;
  std::vector<double> levels;
  std::string version = kToolVersion;
  double wall_ms = 0.0;
  std::vector<std::string> outputs;
};

inline std::string manifest_to_json(const ExperimentManifest& mf) {
  nlohmann::ordered_json j;
  j["command"] = mf.command;
  j["scenario_hash"] = mf.scenario_hash;
  j["seed"] = mf.seed;
  j["m"] = mf.m;
  j["workers"] = mf.workers;
  j["levels"] = mf.levels;
  j["version"] = mf.version;
  j["wall_ms"] = mf.wall_ms;
  j["outputs"] = mf.outputs;
  return j.dump();
}

/// Append one manifest line to <out>/manifests.jsonl (created on demand).
inline void append_manifest(const std::filesystem::path& out_dir,
                            const ExperimentManifest& mf) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path path = out_dir / "manifests.jsonl";
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open for appending: " +
                                     path.string());
  const std::string line = manifest_to_json(mf) + "\n";
  out.write(line.data(), std::streamsize(line.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace wtail
