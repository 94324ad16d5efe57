#include "mudomains/cli/output.hpp"

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#ifndef MUDOMAINS_VERSION
#define MUDOMAINS_VERSION "0.0.0"
#endif

namespace mudomains::cli {

const char* tool_version() { return MUDOMAINS_VERSION; }

json tolerances_json(const Tolerances& tol) {
  json j = json::object();
  j["n_max"] = tol.n_max;
  for (const auto& [name, value] : tolerance_fields(tol)) j[name] = value;
  return j;
}

json config_json(const RunConfig& cfg) {
  json j = json::object();
  j["command"] = cfg.command;
  j["params"] = cfg.params;
  j["seed"] = cfg.seed;
  j["beta_variant"] = std::string(to_string(cfg.beta));
  j["format"] = cfg.format;
  j["out"] = cfg.out.empty() ? json(nullptr) : json(cfg.out);
  j["tolerances"] = tolerances_json(cfg.tol);
  return j;
}

json make_envelope(const RunConfig& cfg, json payload, const std::string& timestamp) {
  json j = json::object();
  j["tool"] = kToolName;
  j["version"] = tool_version();
  j["timestamp"] = timestamp;
  j["config"] = config_json(cfg);
  j["payload"] = std::move(payload);
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const DomainPoint& pt) {
  json j = json::array();
  for (int i = 0; i < pt.dim(); ++i) j.push_back(to_json(pt.z[i]));
  return j;
}

json to_json(const MembershipVerdict& v) {
  json j = json::object();
  j["status"] = std::string(to_string(v.status));
  j["margin"] = v.margin;
  j["witness"] = v.witness ? json(*v.witness) : json(nullptr);
  return j;
}

json to_json(const OrbitVerdict& v) {
  json j = json::object();
  j["tag"] = std::string(to_string(v.tag));
  j["fixed_point"] = v.fixed_point ? to_json(*v.fixed_point) : json(nullptr);
  j["period"] = v.period;
  json cycle = json::array();
  for (const auto& p : v.cycle) cycle.push_back(to_json(p));
  j["cycle"] = std::move(cycle);
  json clusters = json::array();
  for (const auto& p : v.tail_clusters) clusters.push_back(to_json(p));
  j["tail_clusters"] = std::move(clusters);
  j["final_margin"] = v.final_margin;
  j["final_displacement"] = v.final_displacement;
  return j;
}

json to_json(const TrialResult& t) {
  json j = json::object();
  j["index"] = t.index;
  j["skipped"] = t.skipped;
  j["error"] = t.error.empty() ? json(nullptr) : json(t.error);
  json tags = json::array();
  for (auto tag : t.verdicts) tags.push_back(std::string(to_string(tag)));
  j["verdicts"] = std::move(tags);
  j["expect_divergent"] = t.expect_divergent ? json(*t.expect_divergent) : json(nullptr);
  return j;
}

json to_json(const ScanSummary& s) {
  json j = json::object();
  j["domain"] = std::string(to_string(s.domain));
  j["recipe"] = std::string(to_string(s.recipe));
  j["seed"] = s.seed;
  j["trials"] = s.trials;
  j["starts"] = s.starts;
  j["skipped"] = s.skipped;
  j["errors"] = s.errors;
  json hist = json::object();
  for (auto tag : {VerdictTag::ConvergedFixedPoint, VerdictTag::Periodic, VerdictTag::BoundaryDivergent,
                   VerdictTag::BoundedWithFixedPoint, VerdictTag::Undecided}) {
    const auto it = s.histogram.find(tag);
    hist[std::string(to_string(tag))] = it == s.histogram.end() ? 0 : it->second;
  }
  j["histogram"] = std::move(hist);
  j["undecided_fraction"] = s.undecided_fraction;
  json viol = json::array();
  for (const auto& t : s.violations) viol.push_back(to_json(t));
  j["violations"] = std::move(viol);
  j["oracle_checked"] = s.oracle_checked;
  json mism = json::array();
  for (const auto& t : s.oracle_mismatches) mism.push_back(to_json(t));
  j["oracle_mismatches"] = std::move(mism);
  j["pass"] = s.pass;
  return j;
}

json to_json(const FixSetReport& r) {
  json j = json::object();
  j["domain"] = std::string(to_string(r.domain));
  j["classification"] = std::string(to_string(r.classification));
  j["predicted"] = r.predicted ? json(std::string(to_string(*r.predicted))) : json(nullptr);
  j["consistent"] = r.consistent;
  j["needs_review"] = r.needs_review;
  j["retract"] = r.retract;
  j["witness"] = r.witness;
  j["max_residual"] = r.max_residual;
  j["model_distance"] = r.model_distance;
  j["curve_residual"] = r.curve_residual;
  j["retraction_idempotency"] = r.retraction_idempotency;
  j["image_fixed_residual"] = r.image_fixed_residual;
  j["f2_identity_residual"] = r.f2_identity_residual;
  j["f4_f2_residual"] = r.f4_f2_residual;
  j["note"] = r.note;
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back(to_json(p));
  j["points"] = std::move(pts);
  return j;
}

json to_json(const TargetReport& r) {
  json j = json::object();
  j["pass"] = r.pass;
  j["royal_propagates"] = r.royal_propagates;
  j["mixed_propagates"] = r.mixed_propagates;
  j["theta"] = r.theta ? json(*r.theta) : json(nullptr);
  j["max_royal_distance"] = r.max_royal_distance;
  json starts = json::array();
  for (const auto& s : r.starts) {
    json st = json::object();
    st["start"] = to_json(s.start);
    st["verdict"] = std::string(to_string(s.verdict));
    st["royal_distance"] = s.royal_distance;
    if (s.estimate) {
      st["classification"] = std::string(to_string(s.estimate->classification));
      st["thetas"] = s.estimate->thetas;
      json clusters = json::array();
      for (std::size_t i = 0; i < s.estimate->clusters.size(); ++i) {
        const auto& c = s.estimate->clusters[i];
        json cj = json::object();
        cj["s"] = to_json(c.representative.s);
        cj["p"] = to_json(c.representative.p);
        cj["multiplicity"] = c.multiplicity;
        cj["factors"] = json::array({to_json(c.factors[0]), to_json(c.factors[1])});
        cj["margin"] = c.margin;
        if (i < s.estimate->unimodular_factor.size()) cj["unimodular_factor"] = s.estimate->unimodular_factor[i];
        clusters.push_back(std::move(cj));
      }
      st["clusters"] = std::move(clusters);
    } else {
      st["classification"] = nullptr;
      st["thetas"] = json::array();
      st["clusters"] = json::array();
    }
    starts.push_back(std::move(st));
  }
  j["starts"] = std::move(starts);
  return j;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + ": " + std::strerror(errno));
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
  }
}

namespace {

void append_g17(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string orbit_csv(const OrbitRecord& rec) {
  const int dim = rec.start.dim();
  std::string out = "step";
  for (int i = 0; i < dim; ++i) out += ",re" + std::to_string(i) + ",im" + std::to_string(i);
  out += ",margin\n";
  for (std::size_t k = 0; k < rec.points.size(); ++k) {
    out += std::to_string(k);
    for (int i = 0; i < dim; ++i) {
      out += ',';
      append_g17(out, rec.points[k].z[i].real());
      out += ',';
      append_g17(out, rec.points[k].z[i].imag());
    }
    out += ',';
    append_g17(out, rec.margins[k]);
    out += '\n';
  }
  return out;
}

CsvOrbit parse_orbit_csv(const std::string& text) {
  CsvOrbit out;
  std::istringstream is(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(is, line)) throw std::runtime_error("empty orbit CSV");
  out.header = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != out.header.size()) throw std::runtime_error("ragged orbit CSV row");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace mudomains::cli
