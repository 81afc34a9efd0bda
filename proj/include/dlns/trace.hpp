#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlns/errors.hpp"
#include "dlns/utility.hpp"

namespace dlns {

struct TraceRow {
  std::size_t k = 0;
  double sim_time = 0.0;  // cumulative simulated clock
  double wall_ms = 0.0;   // cumulative wall time
  Utility lb = 0.0;
  std::optional<Utility> ub;  // absent for algorithms without bounds
  Utility best_lb = 0.0;
  std::optional<Utility> best_ub;
  std::optional<double> rho;
  std::uint64_t msgs = 0;  // this iteration only
  std::uint64_t payload = 0;
  std::uint64_t max_payload = 0;
  std::uint64_t ccs = 0;
};

struct RunTrace {
  std::string algorithm;
  std::vector<TraceRow> rows;

  const TraceRow& last() const {
    if (rows.empty()) throw ConfigError("trace has no rows");
    return rows.back();
  }
};

inline constexpr const char* kTraceHeader = "k,sim_time,wall_ms,lb,ub,best_lb,best_ub,rho,msgs,payload,max_payload,ccs";

// best_ub / best_lb when the lower bound is positive.
inline std::optional<double> approximation_ratio(Utility best_lb, std::optional<Utility> best_ub) {
  if (!best_ub || !best_lb.is_finite() || best_lb.value() <= 0.0 || !best_ub->is_finite()) return std::nullopt;
  return best_ub->value() / best_lb.value();
}

namespace detail {

inline std::string number(double x) { return to_string(Utility(x)); }

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Utility parse_utility(const std::string& s, std::size_t line) {
  if (s == "-inf") return kNegInf;
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("trace line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

inline std::uint64_t parse_count(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("trace line " + std::to_string(line) + ": bad count '" + s + "'");
  }
}

}  // namespace detail

inline void write_csv(std::ostream& os, const RunTrace& trace) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace.rows) {
    os << r.k << ',' << detail::number(r.sim_time) << ',' << detail::number(r.wall_ms) << ',' << to_string(r.lb) << ',';
    if (r.ub) os << to_string(*r.ub);
    os << ',' << to_string(r.best_lb) << ',';
    if (r.best_ub) os << to_string(*r.best_ub);
    os << ',';
    if (r.rho) os << detail::number(*r.rho);
    os << ',' << r.msgs << ',' << r.payload << ',' << r.max_payload << ',' << r.ccs << '\n';
  }
}

inline RunTrace read_csv(std::istream& is, std::string algorithm = {}) {
  RunTrace trace;
  trace.algorithm = std::move(algorithm);
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader) throw ParseError("trace line 1: unexpected header");
  for (std::size_t no = 2; std::getline(is, line); ++no) {
    if (line.empty()) continue;
    auto c = detail::split_csv(line);
    if (c.size() != 12) throw ParseError("trace line " + std::to_string(no) + ": expected 12 columns");
    TraceRow r;
    r.k = detail::parse_count(c[0], no);
    r.sim_time = detail::parse_utility(c[1], no).value();
    r.wall_ms = detail::parse_utility(c[2], no).value();
    r.lb = detail::parse_utility(c[3], no);
    if (!c[4].empty()) r.ub = detail::parse_utility(c[4], no);
    r.best_lb = detail::parse_utility(c[5], no);
    if (!c[6].empty()) r.best_ub = detail::parse_utility(c[6], no);
    if (!c[7].empty()) r.rho = detail::parse_utility(c[7], no).value();
    r.msgs = detail::parse_count(c[8], no);
    r.payload = detail::parse_count(c[9], no);
    r.max_payload = detail::parse_count(c[10], no);
    r.ccs = detail::parse_count(c[11], no);
    trace.rows.push_back(r);
  }
  return trace;
}

/// Quality ratio of one algorithm against the best quality in its pool, so
/// that the pool's best scores 1 and everything else scores below it.
inline double quality_ratio(Utility own, Utility pool_best) {
  if (!pool_best.is_finite() || pool_best.value() <= 0.0) return own == pool_best ? 1.0 : 0.0;
  if (!own.is_finite()) return 0.0;
  return own.value() / pool_best.value();
}

struct NormalizedSeries {
  std::vector<double> bucket_times;
  // [algorithm][bucket]; absent before an algorithm's first row or, for the
  // upper bound, when it reports none.
  std::vector<std::vector<std::optional<double>>> lb;
  std::vector<std::vector<std::optional<double>>> ub;
};

namespace detail {

// Last row reached by time t, if any.
inline const TraceRow* row_at(const RunTrace& t, double time) {
  const TraceRow* hit = nullptr;
  for (const auto& r : t.rows) {
    if (r.sim_time > time) break;
    hit = &r;
  }
  return hit;
}

// Min-max scaling across the pool; -inf maps to 0 and equal values to 1.
inline void normalize_column(std::vector<std::optional<Utility>>& raw, bool larger_is_better,
                             std::vector<std::vector<std::optional<double>>>& out, std::size_t bucket) {
  std::optional<double> lo;
  std::optional<double> hi;
  for (const auto& v : raw) {
    if (!v || !v->is_finite()) continue;
    lo = lo ? std::min(*lo, v->value()) : v->value();
    hi = hi ? std::max(*hi, v->value()) : v->value();
  }
  for (std::size_t a = 0; a < raw.size(); ++a) {
    if (!raw[a]) continue;
    if (!raw[a]->is_finite()) {
      out[a][bucket] = lo ? 0.0 : 1.0;
      continue;
    }
    if (*hi - *lo <= 1e-12) {
      out[a][bucket] = 1.0;
      continue;
    }
    double x = raw[a]->value();
    out[a][bucket] = larger_is_better ? (x - *lo) / (*hi - *lo) : (*hi - x) / (*hi - *lo);
  }
}

}  // namespace detail

/// Normalized best-bound series over log-spaced simulated-time buckets.
/// At each bucket the best lower bound maps to 1 and the worst to 0; upper
/// bounds are inverted so the tightest maps to 1.
inline NormalizedSeries normalize_quality(const std::vector<RunTrace>& pool, std::size_t buckets = 20) {
  if (pool.empty()) throw ConfigError("normalize_quality needs at least one trace");
  if (buckets == 0) throw ConfigError("normalize_quality needs at least one bucket");
  double t_min = INFINITY;
  double t_max = 0.0;
  for (const auto& t : pool) {
    for (const auto& r : t.rows) {
      if (r.sim_time > 0.0) t_min = std::min(t_min, r.sim_time);
      t_max = std::max(t_max, r.sim_time);
    }
  }
  NormalizedSeries s;
  if (!std::isfinite(t_min)) t_min = t_max = 0.0;
  for (std::size_t b = 0; b < buckets; ++b) {
    double f = buckets == 1 ? 1.0 : static_cast<double>(b) / static_cast<double>(buckets - 1);
    s.bucket_times.push_back(t_min > 0.0 ? t_min * std::pow(t_max / t_min, f) : t_max);
  }
  s.bucket_times.back() = t_max;
  s.lb.assign(pool.size(), std::vector<std::optional<double>>(buckets));
  s.ub.assign(pool.size(), std::vector<std::optional<double>>(buckets));
  for (std::size_t b = 0; b < buckets; ++b) {
    std::vector<std::optional<Utility>> lbs(pool.size());
    std::vector<std::optional<Utility>> ubs(pool.size());
    for (std::size_t a = 0; a < pool.size(); ++a) {
      const TraceRow* r = detail::row_at(pool[a], s.bucket_times[b]);
      if (!r) continue;
      lbs[a] = r->best_lb;
      ubs[a] = r->best_ub;
    }
    detail::normalize_column(lbs, true, s.lb, b);
    detail::normalize_column(ubs, false, s.ub, b);
  }
  return s;
}

inline nlohmann::json utility_json(const Utility& u) {
  if (!u.is_finite()) return "-inf";
  return u.value();
}

// Per-run summary: final bounds, rho, totals of the network load and clocks.
inline nlohmann::json summarize(const RunTrace& trace) {
  const TraceRow& last = trace.last();
  std::uint64_t msgs = 0;
  std::uint64_t payload = 0;
  std::uint64_t max_payload = 0;
  std::uint64_t ccs = 0;
  for (const auto& r : trace.rows) {
    msgs += r.msgs;
    payload += r.payload;
    max_payload = std::max(max_payload, r.max_payload);
    ccs += r.ccs;
  }
  nlohmann::json j;
  j["algorithm"] = trace.algorithm;
  j["iterations"] = last.k;
  j["best_lb"] = utility_json(last.best_lb);
  j["best_ub"] = last.best_ub ? utility_json(*last.best_ub) : nlohmann::json(nullptr);
  j["rho"] = last.rho ? nlohmann::json(*last.rho) : nlohmann::json(nullptr);
  j["sim_time"] = last.sim_time;
  j["wall_ms"] = last.wall_ms;
  j["messages"] = msgs;
  j["payload"] = payload;
  j["max_payload"] = max_payload;
  j["constraint_checks"] = ccs;
  return j;
}

// Adds "epsilon" to every summary, relative to the pool's best final lower bound.
inline void add_quality_ratios(std::vector<nlohmann::json>& summaries, const std::vector<RunTrace>& pool) {
  Utility best = kNegInf;
  for (const auto& t : pool) best = max(best, t.last().best_lb);
  for (std::size_t a = 0; a < pool.size(); ++a) summaries.at(a)["epsilon"] = quality_ratio(pool[a].last().best_lb, best);
}

}  // namespace dlns
