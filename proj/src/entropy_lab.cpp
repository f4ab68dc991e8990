#include "pntlab/entropy_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "pntlab/error.hpp"

namespace pntlab {

namespace {

// Dense ranks of the projected tuples, in lexicographic order.
struct Grouping {
  std::vector<std::uint32_t> id;
  std::size_t count = 0;
};

Grouping group(const EmpiricalDistribution& d, std::span<const std::size_t> coords) {
  Grouping g;
  g.id.assign(d.size(), 0);
  if (d.size() == 0) return g;
  if (coords.empty()) {
    g.count = 1;
    return g;
  }
  std::vector<std::uint32_t> order(d.size());
  std::iota(order.begin(), order.end(), 0u);
  auto less = [&](std::uint32_t a, std::uint32_t b) {
    const auto ra = d.outcome(a), rb = d.outcome(b);
    for (std::size_t c : coords)
      if (ra[c] != rb[c]) return ra[c] < rb[c];
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && less(order[i - 1], order[i])) ++next;
    g.id[order[i]] = next;
  }
  g.count = next + 1;
  return g;
}

void check_coords(const EmpiricalDistribution& d, std::span<const std::size_t> coords) {
  for (std::size_t c : coords)
    if (c >= d.arity())
      throw InvalidArgument("coordinate " + std::to_string(c) +
                            " outside arity " + std::to_string(d.arity()));
}

void check_disjoint(std::span<const std::size_t> a, std::span<const std::size_t> b,
                    const char* names) {
  for (std::size_t c : a)
    if (std::find(b.begin(), b.end(), c) != b.end())
      throw InvalidArgument(std::string("coordinate sets ") + names +
                            " overlap at " + std::to_string(c));
}

std::vector<std::size_t> concat(std::span<const std::size_t> a,
                                std::span<const std::size_t> b) {
  std::vector<std::size_t> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Aggregated weights for each (outer, inner) pair of group ids.
struct PairCell {
  std::uint64_t key;
  double w;
};

std::vector<PairCell> pair_cells(const EmpiricalDistribution& d, const Grouping& outer,
                                 const Grouping& inner) {
  std::vector<PairCell> cells(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    cells[i] = {static_cast<std::uint64_t>(outer.id[i]) * inner.count + inner.id[i],
                d.weight(i)};
  std::sort(cells.begin(), cells.end(),
            [](const PairCell& a, const PairCell& b) { return a.key < b.key; });
  std::vector<PairCell> merged;
  for (const auto& c : cells) {
    if (!merged.empty() && merged.back().key == c.key)
      merged.back().w += c.w;
    else
      merged.push_back(c);
  }
  return merged;
}

std::uint64_t block_code(const ArithTable& mu, std::uint64_t start, std::size_t w) {
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < w; ++i)
    code = code * 3 + static_cast<std::uint64_t>(std::lround(mu[start + i]) + 1);
  return code;
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::size_t arity,
                                             std::vector<std::int32_t> rows,
                                             std::vector<double> weights,
                                             Weighting weighting)
    : arity_(arity), weighting_(weighting) {
  if (arity == 0) throw InvalidArgument("arity must be >= 1");
  if (rows.size() != arity * weights.size())
    throw InvalidArgument("row data does not match weight count");
  const std::size_t n = weights.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  auto cmp = [&](std::uint32_t a, std::uint32_t b) {
    return std::lexicographical_compare(rows.begin() + a * arity,
                                        rows.begin() + (a + 1) * arity,
                                        rows.begin() + b * arity,
                                        rows.begin() + (b + 1) * arity);
  };
  std::stable_sort(order.begin(), order.end(), cmp);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = order[i];
    if (!(weights[r] >= 0.0))
      throw InvalidArgument("weight " + std::to_string(r) + " is negative");
    if (i > 0 && !cmp(order[i - 1], r)) {
      weights_.back() += weights[r];
      continue;
    }
    rows_.insert(rows_.end(), rows.begin() + r * arity, rows.begin() + (r + 1) * arity);
    weights_.push_back(weights[r]);
  }
  long double t = 0.0L;
  for (double w : weights_) t += w;
  total_ = static_cast<double>(t);
  if (!(total_ > 0.0)) throw InvalidArgument("distribution has zero mass");
}

EmpiricalDistribution EmpiricalDistribution::marginal(
    std::span<const std::size_t> coords) const {
  check_coords(*this, coords);
  if (coords.empty()) throw InvalidArgument("marginal needs at least one coordinate");
  std::vector<std::int32_t> rows;
  rows.reserve(size() * coords.size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto r = outcome(i);
    for (std::size_t c : coords) rows.push_back(r[c]);
  }
  return EmpiricalDistribution(coords.size(), std::move(rows), weights_, weighting_);
}

EmpiricalDistribution empirical_joint(const ArithTable& mu, std::uint64_t N,
                                      std::size_t window,
                                      std::span<const std::uint64_t> primes,
                                      Weighting weighting, std::uint64_t budget) {
  if (window == 0) throw InvalidArgument("window must be >= 1");
  if (N == 0) throw InvalidArgument("N must be >= 1");
  if (N + window > mu.limit())
    throw InvalidArgument("N + window = " + std::to_string(N + window) +
                          " exceeds table limit " + std::to_string(mu.limit()));
  long double product = std::pow(3.0L, static_cast<long double>(window));
  for (std::uint64_t p : primes) {
    if (p < 2 || p > 0x7fffffffULL)
      throw InvalidArgument("residue modulus " + std::to_string(p) + " out of range");
    product *= static_cast<long double>(p);
  }
  if (std::min(product, static_cast<long double>(N)) > static_cast<long double>(budget))
    throw ResourceError("outcome space prod(p) * 3^w = " +
                        std::to_string(static_cast<double>(product)) +
                        " with N = " + std::to_string(N) +
                        " exceeds outcome budget " + std::to_string(budget));

  const std::size_t arity = window + primes.size();
  std::vector<std::int32_t> rows;
  rows.reserve(N * arity);
  std::vector<double> weights(N);
  for (std::uint64_t n = 1; n <= N; ++n) {
    for (std::size_t i = 1; i <= window; ++i)
      rows.push_back(static_cast<std::int32_t>(std::lround(mu[n + i])));
    for (std::uint64_t p : primes) rows.push_back(static_cast<std::int32_t>(n % p));
    weights[n - 1] = weighting == Weighting::uniform ? 1.0 : 1.0 / static_cast<double>(n);
  }
  return EmpiricalDistribution(arity, std::move(rows), std::move(weights), weighting);
}

double entropy(const EmpiricalDistribution& joint, std::span<const std::size_t> coords) {
  check_coords(joint, coords);
  const Grouping g = group(joint, coords);
  std::vector<double> mass(g.count, 0.0);
  for (std::size_t i = 0; i < joint.size(); ++i) mass[g.id[i]] += joint.weight(i);
  double h = 0.0;
  for (double m : mass) {
    if (m <= 0.0) continue;
    const double q = m / joint.total();
    h -= q * std::log(q);
  }
  return h;
}

double conditional_entropy(const EmpiricalDistribution& joint,
                           std::span<const std::size_t> x,
                           std::span<const std::size_t> z) {
  check_coords(joint, x);
  check_coords(joint, z);
  check_disjoint(x, z, "x and z");
  const Grouping gz = group(joint, z);
  const Grouping gx = group(joint, x);
  const auto cells = pair_cells(joint, gz, gx);
  std::vector<double> zmass(gz.count, 0.0);
  for (std::size_t i = 0; i < joint.size(); ++i) zmass[gz.id[i]] += joint.weight(i);
  double h = 0.0;
  for (const auto& c : cells) {
    if (c.w <= 0.0) continue;
    const double pz = zmass[c.key / gx.count];
    h += (c.w / joint.total()) * std::log(pz / c.w);
  }
  return h;
}

InfoMeasures info_measures(const EmpiricalDistribution& joint,
                           std::span<const std::size_t> x,
                           std::span<const std::size_t> y,
                           std::span<const std::size_t> z, std::uint64_t samples) {
  check_disjoint(x, y, "x and y");
  check_disjoint(x, z, "x and z");
  check_disjoint(y, z, "y and z");
  InfoMeasures m;
  m.H_x = entropy(joint, x);
  m.H_x_given_z = conditional_entropy(joint, x, z);
  const auto yz = concat(y, z);
  m.H_x_given_yz = conditional_entropy(joint, x, yz);
  m.I = m.H_x_given_z - m.H_x_given_yz;
  m.states = joint.size();
  if (samples > 0) m.bias = static_cast<double>(m.states) / (2.0 * static_cast<double>(samples));
  return m;
}

DecrementReport entropy_decrement_scan(const ArithTable& mu, std::uint64_t N,
                                       std::span<const std::uint64_t> primes,
                                       double epsilon, std::uint64_t condition_max,
                                       std::uint64_t budget) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!std::is_sorted(primes.begin(), primes.end()))
    throw InvalidArgument("primes must be ascending");
  DecrementReport r;
  r.N = N;
  r.epsilon = epsilon;
  {
    const auto single = empirical_joint(mu, N, 1, {}, Weighting::uniform, budget);
    const std::size_t c0 = 0;
    r.H_x1 = entropy(single, std::span<const std::size_t>(&c0, 1));
  }
  r.budget = r.H_x1 / epsilon;

  for (std::size_t j = 0; j < primes.size(); ++j) {
    DecrementEntry e;
    e.p = primes[j];
    e.window = static_cast<std::size_t>(e.p);
    for (std::size_t i = 0; i < j; ++i)
      if (primes[i] <= condition_max) e.conditioned_on.push_back(primes[i]);
    std::vector<std::uint64_t> moduli = e.conditioned_on;
    moduli.push_back(e.p);
    const auto joint = empirical_joint(mu, N, e.window, moduli, Weighting::uniform, budget);
    const auto x = coord_range(0, e.window);
    const auto z = coord_range(e.window, e.conditioned_on.size());
    const auto y = coord_range(e.window + e.conditioned_on.size(), 1);
    const auto m = info_measures(joint, x, y, z, N);
    e.I = m.I;
    e.bad = e.I >= epsilon;
    e.states = m.states;
    e.bias = m.bias;
    if (e.bad) r.bad_reciprocal_sum += 1.0 / static_cast<double>(e.p);
    r.entries.push_back(std::move(e));
  }
  return r;
}

PinskerGap pinsker_gap(const EmpiricalDistribution& joint,
                       std::span<const std::size_t> x,
                       std::span<const std::size_t> y) {
  check_coords(joint, x);
  check_coords(joint, y);
  check_disjoint(x, y, "x and y");
  if (x.empty() || y.empty()) throw InvalidArgument("x and y must be non-empty");
  const Grouping gx = group(joint, x);
  const Grouping gy = group(joint, y);
  std::vector<double> px(gx.count, 0.0), py(gy.count, 0.0);
  for (std::size_t i = 0; i < joint.size(); ++i) {
    px[gx.id[i]] += joint.weight(i) / joint.total();
    py[gy.id[i]] += joint.weight(i) / joint.total();
  }
  const auto cells = pair_cells(joint, gx, gy);
  double abs_sum = 0.0, product_on_support = 0.0, info = 0.0;
  for (const auto& c : cells) {
    const double pxy = c.w / joint.total();
    const double prod = px[c.key / gy.count] * py[c.key % gy.count];
    abs_sum += std::abs(pxy - prod);
    product_on_support += prod;
    if (pxy > 0.0) info += pxy * std::log(pxy / prod);
  }
  PinskerGap g;
  // Cells outside the joint support carry product mass only.
  g.d_tv = 0.5 * (abs_sum + std::max(0.0, 1.0 - product_on_support));
  g.sqrt_I = std::sqrt(std::max(0.0, info));
  g.margin = g.sqrt_I - g.d_tv;
  return g;
}

PinskerAudit pinsker_audit(std::size_t trials, std::uint64_t seed, int rows, int cols) {
  if (rows < 1 || cols < 1) throw InvalidArgument("table shape must be positive");
  PinskerAudit a;
  a.trials = trials;
  a.seed = seed;
  a.min_margin = trials ? 1e300 : 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t cx = 0, cy = 1;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<std::int32_t> cells;
    std::vector<double> w;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        const double u = unit(rng);
        const double v = unit(rng);
        cells.push_back(i);
        cells.push_back(j);
        w.push_back(v < 0.25 ? 0.0 : u);
      }
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) w[0] = 1.0;
    const EmpiricalDistribution d(2, std::move(cells), std::move(w));
    const auto g = pinsker_gap(d, std::span<const std::size_t>(&cx, 1),
                               std::span<const std::size_t>(&cy, 1));
    a.min_margin = std::min(a.min_margin, g.margin);
    a.max_d_tv = std::max(a.max_d_tv, g.d_tv);
    if (g.margin < -1e-9) ++a.failures;
  }
  return a;
}

double stationarity_gap(const ArithTable& mu, std::uint64_t N, std::size_t window,
                        std::uint64_t shift) {
  if (window == 0 || window > 40) throw InvalidArgument("window must lie in [1, 40]");
  if (N == 0) throw InvalidArgument("N must be >= 1");
  if (N + window + shift > mu.limit())
    throw InvalidArgument("N + window + shift exceeds table limit " +
                          std::to_string(mu.limit()));
  if (shift == 0) return 0.0;
  std::unordered_map<std::uint64_t, std::int64_t> diff;
  for (std::uint64_t n = 1; n <= N; ++n) {
    ++diff[block_code(mu, n + 1, window)];
    --diff[block_code(mu, n + 1 + shift, window)];
  }
  std::int64_t sum = 0;
  for (const auto& [code, c] : diff) sum += c < 0 ? -c : c;
  return 0.5 * static_cast<double>(sum) / static_cast<double>(N);
}

std::vector<std::size_t> coord_range(std::size_t first, std::size_t count) {
  std::vector<std::size_t> out(count);
  std::iota(out.begin(), out.end(), first);
  return out;
}

}  // namespace pntlab
