#include "hmix/sim/occupation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "hmix/core/autocorr.hpp"

namespace hmix::sim {

Binning Binning::log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo && count > 0)) throw std::invalid_argument("log binning needs 0 < lo < hi, count > 0");
  return {Kind::Log, lo, hi, count};
}

std::size_t Binning::index(double value) const noexcept {
  if (kind == Kind::Integer) return static_cast<std::size_t>(value);
  if (value < lo) return 0;
  if (value >= hi) return count + 1;
  const auto i = static_cast<std::size_t>(std::log(value / lo) / std::log(hi / lo) * static_cast<double>(count));
  return 1 + std::min(i, count - 1);
}

double Binning::upper_edge(std::size_t i) const noexcept {
  if (kind == Kind::Integer) return static_cast<double>(i + 1);
  if (i == 0) return lo;
  if (i > count) return std::numeric_limits<double>::infinity();
  return lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count));
}

void FluxCounters::merge(const FluxCounters& other) {
  injected_a += other.injected_a;
  extracted_a += other.extracted_a;
  injected_b += other.injected_b;
  extracted_b += other.extracted_b;
  if (bond_current.size() < other.bond_current.size()) bond_current.resize(other.bond_current.size(), 0.0);
  for (std::size_t i = 0; i < other.bond_current.size(); ++i) bond_current[i] += other.bond_current[i];
}

// ---------------------------------------------------------------------------

namespace {
std::size_t idx(int x) { return static_cast<std::size_t>(x); }
}  // namespace

double OccupationStats::mean(int x) const { return site_integral.at(idx(x)) / total_time; }

double OccupationStats::mean_se(int x) const { return std::sqrt(var_site_integral.at(idx(x))) / total_time; }

double OccupationStats::covariance(int x, int y) const {
  return pair_integral.at(idx(x * sites + y)) / total_time - mean(x) * mean(y);
}

double OccupationStats::covariance_se(int x, int y) const {
  return std::sqrt(var_pair_integral.at(idx(x * sites + y))) / total_time;
}

std::vector<double> OccupationStats::distribution(int x) const {
  std::vector<double> out = histogram.at(idx(x));
  for (double& v : out) v /= total_time;
  return out;
}

double OccupationStats::effective_samples(int x) const {
  const double t2 = total_time * total_time;
  double best = std::numeric_limits<double>::infinity();
  const double var_pi = covariance(x, x);
  if (var_site_integral[idx(x)] > 0.0 && var_pi > 0.0) best = var_pi * t2 / var_site_integral[idx(x)];
  const auto& h = histogram[idx(x)];
  for (std::size_t j = 0; j < threshold_bins.size(); ++j) {
    double mass = 0.0;
    for (std::size_t b = 0; b <= threshold_bins[j] && b < h.size(); ++b) mass += h[b];
    const double p = mass / total_time;
    const double v = var_threshold_integral[idx(x) * threshold_bins.size() + j];
    if (p < 0.01 || p > 0.99 || !(v > 0.0)) continue;
    best = std::min(best, p * (1.0 - p) * t2 / v);
  }
  return best;
}

void OccupationStats::merge(const OccupationStats& other) {
  if (sites != other.sites || !(binning == other.binning) || threshold_bins != other.threshold_bins)
    throw std::invalid_argument("OccupationStats::merge: incompatible layouts");
  total_time += other.total_time;
  events += other.events;
  replicas += other.replicas;
  auto add = [](std::vector<double>& into, const std::vector<double>& from) {
    if (into.size() < from.size()) into.resize(from.size(), 0.0);
    for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
  };
  add(site_integral, other.site_integral);
  add(pair_integral, other.pair_integral);
  add(var_site_integral, other.var_site_integral);
  add(var_pair_integral, other.var_pair_integral);
  add(var_threshold_integral, other.var_threshold_integral);
  for (std::size_t x = 0; x < histogram.size(); ++x) add(histogram[x], other.histogram[x]);
  flux.merge(other.flux);
}

void to_json(nlohmann::json& j, const Binning& b) {
  j = {{"kind", b.kind == Binning::Kind::Integer ? "integer" : "log"}, {"lo", b.lo}, {"hi", b.hi}, {"count", b.count}};
}

void from_json(const nlohmann::json& j, Binning& b) {
  b.kind = j.at("kind").get<std::string>() == "integer" ? Binning::Kind::Integer : Binning::Kind::Log;
  b.lo = j.at("lo").get<double>();
  b.hi = j.at("hi").get<double>();
  b.count = j.at("count").get<std::size_t>();
}

void to_json(nlohmann::json& j, const OccupationStats& s) {
  j = {{"sites", s.sites},
       {"binning", s.binning},
       {"total_time", s.total_time},
       {"events", s.events},
       {"replicas", s.replicas},
       {"site_integral", s.site_integral},
       {"pair_integral", s.pair_integral},
       {"histogram", s.histogram},
       {"var_site_integral", s.var_site_integral},
       {"var_pair_integral", s.var_pair_integral},
       {"threshold_bins", s.threshold_bins},
       {"var_threshold_integral", s.var_threshold_integral},
       {"flux",
        {{"injected_a", s.flux.injected_a},
         {"extracted_a", s.flux.extracted_a},
         {"injected_b", s.flux.injected_b},
         {"extracted_b", s.flux.extracted_b},
         {"bond_current", s.flux.bond_current}}}};
}

void from_json(const nlohmann::json& j, OccupationStats& s) {
  j.at("sites").get_to(s.sites);
  j.at("binning").get_to(s.binning);
  j.at("total_time").get_to(s.total_time);
  j.at("events").get_to(s.events);
  j.at("replicas").get_to(s.replicas);
  j.at("site_integral").get_to(s.site_integral);
  j.at("pair_integral").get_to(s.pair_integral);
  j.at("histogram").get_to(s.histogram);
  j.at("var_site_integral").get_to(s.var_site_integral);
  j.at("var_pair_integral").get_to(s.var_pair_integral);
  j.at("threshold_bins").get_to(s.threshold_bins);
  j.at("var_threshold_integral").get_to(s.var_threshold_integral);
  const auto& f = j.at("flux");
  f.at("injected_a").get_to(s.flux.injected_a);
  f.at("extracted_a").get_to(s.flux.extracted_a);
  f.at("injected_b").get_to(s.flux.injected_b);
  f.at("extracted_b").get_to(s.flux.extracted_b);
  f.at("bond_current").get_to(s.flux.bond_current);
}

// ---------------------------------------------------------------------------

OccupationAccumulator::OccupationAccumulator(int sites, Binning binning, double burn_in, double t_max,
                                             std::size_t batches, std::vector<std::size_t> threshold_bins)
    : sites_(sites),
      binning_(binning),
      burn_in_(burn_in),
      t_max_(t_max),
      batch_count_(std::max<std::size_t>(batches, 1)),
      batch_length_((t_max - burn_in) / static_cast<double>(batch_count_)),
      thresholds_(std::move(threshold_bins)),
      batch_end_(batch_count_ == 1 ? t_max : burn_in + batch_length_),
      batch_site_(idx(sites), 0.0),
      batch_pair_(idx(sites * sites), 0.0),
      histogram_(idx(sites), std::vector<double>(binning.size(), 0.0)),
      threshold_snapshot_(idx(sites) * thresholds_.size(), 0.0) {
  if (!(t_max > burn_in && burn_in >= 0.0)) throw std::invalid_argument("requires t_max > burn_in >= 0");
  flux_.bond_current.assign(idx(std::max(sites - 1, 0)), 0.0);
  series_site_.reserve(batch_count_ * idx(sites));
  series_duration_.reserve(batch_count_);
}

void OccupationAccumulator::accumulate(std::span<const double> values, std::span<const std::size_t> bins,
                                       double dt) {
  const auto n = idx(sites_);
  for (std::size_t x = 0; x < n; ++x) {
    const double vx = values[x];
    const double w = vx * dt;
    batch_site_[x] += w;
    double* row = &batch_pair_[x * n];
    for (std::size_t y = x; y < n; ++y) row[y] += w * values[y];
    auto& h = histogram_[x];
    if (bins[x] >= h.size()) h.resize(bins[x] + 1, 0.0);
    h[bins[x]] += dt;
  }
}

void OccupationAccumulator::add(std::span<const double> values, std::span<const std::size_t> bins,
                                double start, double duration) {
  double t0 = std::max(start, burn_in_);
  const double t1 = std::min(start + duration, t_max_);
  while (t0 < t1 && current_batch_ < batch_count_) {
    const double end = std::min(t1, batch_end_);
    accumulate(values, bins, end - t0);
    t0 = end;
    if (end >= batch_end_) close_batch();
  }
}

void OccupationAccumulator::close_batch() {
  const auto n = idx(sites_);
  const double start = burn_in_ + batch_length_ * static_cast<double>(current_batch_);
  series_duration_.push_back(std::min(batch_end_, t_max_) - start);
  series_site_.insert(series_site_.end(), batch_site_.begin(), batch_site_.end());
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x; y < n; ++y) series_pair_.push_back(batch_pair_[x * n + y]);
  for (std::size_t x = 0; x < n; ++x) {
    const auto& h = histogram_[x];
    double mass = 0.0;
    std::size_t b = 0;
    for (std::size_t j = 0; j < thresholds_.size(); ++j) {
      for (; b <= thresholds_[j] && b < h.size(); ++b) mass += h[b];
      double& snap = threshold_snapshot_[x * thresholds_.size() + j];
      series_threshold_.push_back(mass - snap);
      snap = mass;
    }
  }
  std::fill(batch_site_.begin(), batch_site_.end(), 0.0);
  std::fill(batch_pair_.begin(), batch_pair_.end(), 0.0);
  ++current_batch_;
  batch_end_ = current_batch_ + 1 == batch_count_ ? t_max_
                                                   : burn_in_ + batch_length_ * static_cast<double>(current_batch_ + 1);
}

OccupationStats OccupationAccumulator::finalize() const {
  const auto n = idx(sites_);
  const std::size_t batches = series_duration_.size();
  const std::size_t pairs = n * (n + 1) / 2;
  const std::size_t nthr = thresholds_.size();

  OccupationStats s;
  s.sites = sites_;
  s.binning = binning_;
  s.events = events_;
  s.flux = flux_;
  s.histogram = histogram_;
  s.threshold_bins = thresholds_;
  s.site_integral.assign(n, 0.0);
  s.pair_integral.assign(n * n, 0.0);
  s.var_site_integral.assign(n, 0.0);
  s.var_pair_integral.assign(n * n, 0.0);
  s.var_threshold_integral.assign(n * nthr, 0.0);

  for (std::size_t i = 0; i < batches; ++i) {
    s.total_time += series_duration_[i];
    for (std::size_t x = 0; x < n; ++x) s.site_integral[x] += series_site_[i * n + x];
    std::size_t p = 0;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x; y < n; ++y, ++p) s.pair_integral[x * n + y] += series_pair_[i * pairs + p];
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < x; ++y) s.pair_integral[x * n + y] = s.pair_integral[y * n + x];
  if (batches == 0 || s.total_time <= 0.0) return s;

  const double total = s.total_time;
  const double t2 = total * total;
  std::vector<double> means(n);
  for (std::size_t x = 0; x < n; ++x) means[x] = s.site_integral[x] / total;

  // batch averages; the last batch may be marginally shorter than the rest
  std::vector<double> series(batches);
  auto site_avg = [&](std::size_t i, std::size_t x) { return series_site_[i * n + x] / series_duration_[i]; };
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t i = 0; i < batches; ++i) series[i] = site_avg(i, x);
    s.var_site_integral[x] = t2 * variance_of_mean(series);
  }
  std::size_t p = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x; y < n; ++y, ++p) {
      for (std::size_t i = 0; i < batches; ++i)
        series[i] = series_pair_[i * pairs + p] / series_duration_[i] - means[y] * site_avg(i, x) -
                    means[x] * site_avg(i, y);
      const double v = t2 * variance_of_mean(series);
      s.var_pair_integral[x * n + y] = v;
      s.var_pair_integral[y * n + x] = v;
    }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t j = 0; j < nthr; ++j) {
      for (std::size_t i = 0; i < batches; ++i)
        series[i] = series_threshold_[(i * n + x) * nthr + j] / series_duration_[i];
      s.var_threshold_integral[x * nthr + j] = t2 * variance_of_mean(series);
    }
  return s;
}

std::vector<double> OccupationAccumulator::stationarity_z() const {
  const auto n = idx(sites_);
  const std::size_t batches = series_duration_.size();
  std::vector<double> z(n, 0.0);
  if (batches < 8) return z;
  const std::size_t half = batches / 2;
  std::vector<double> first(half), second(batches - half);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t i = 0; i < half; ++i) first[i] = series_site_[i * n + x] / series_duration_[i];
    for (std::size_t i = half; i < batches; ++i)
      second[i - half] = series_site_[i * n + x] / series_duration_[i];
    double m1 = 0.0, m2 = 0.0;
    for (double v : first) m1 += v;
    for (double v : second) m2 += v;
    m1 /= static_cast<double>(first.size());
    m2 /= static_cast<double>(second.size());
    const double se = std::sqrt(variance_of_mean(first) + variance_of_mean(second));
    z[x] = se > 0.0 ? (m2 - m1) / se : 0.0;
  }
  return z;
}

}  // namespace hmix::sim
