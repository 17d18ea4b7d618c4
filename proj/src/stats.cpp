#include "cm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace cm::statistics {

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double kolmogorov_sf(double x) {
  if (x <= 0) return 1.0;
  if (x < 0.3) {
    // small-x form: 1 - sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2))
    double s = 0;
    for (int k = 1; k <= 20; ++k) {
      const double t = (2 * k - 1) * M_PI;
      s += std::exp(-t * t / (8 * x * x));
    }
    return std::clamp(1.0 - std::sqrt(2 * M_PI) / x * s, 0.0, 1.0);
  }
  double s = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(2 * s, 0.0, 1.0);
}

double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m) {
  const double en = std::sqrt(static_cast<double>(n) * m / static_cast<double>(n + m));
  return kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
}

KsResult ks_exponential(std::span<const double> sample, double rate) {
  if (sample.empty()) throw std::invalid_argument("ks_exponential: empty sample");
  if (!(rate > 0)) throw std::invalid_argument("ks_exponential: rate must be positive");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = -std::expm1(-rate * std::max(x[i], 0.0));
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)};
}

namespace {

ChiSquareResult finish(double stat, int bins, int dof) {
  ChiSquareResult r;
  r.statistic = stat;
  r.bins = bins;
  r.dof = dof;
  if (dof <= 0) {
    r.p_value = 1.0;
    return r;
  }
  boost::math::chi_squared dist(dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  return r;
}

}  // namespace

ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed,
                               std::span<const double> probabilities, double min_expected) {
  if (observed.size() != probabilities.size())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
  if (total <= 0) throw std::invalid_argument("chi_square_gof: no observations");
  std::vector<std::pair<double, double>> bins;  // (expected, observed)
  double pool_e = 0, pool_o = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probabilities[i] * total;
    const double o = static_cast<double>(observed[i]);
    if (e <= 0 && o > 0) {
      // impossible category observed
      return finish(std::numeric_limits<double>::infinity(), static_cast<int>(observed.size()),
                    static_cast<int>(observed.size()) - 1);
    }
    if (e < min_expected) {
      pool_e += e;
      pool_o += o;
    } else {
      bins.emplace_back(e, o);
    }
  }
  if (pool_e > 0) {
    if (pool_e >= min_expected || bins.empty()) {
      bins.emplace_back(pool_e, pool_o);
    } else {
      auto it = std::min_element(bins.begin(), bins.end());
      it->first += pool_e;
      it->second += pool_o;
    }
  }
  double stat = 0;
  for (const auto& [e, o] : bins) stat += (o - e) * (o - e) / e;
  const int k = static_cast<int>(bins.size());
  return finish(stat, k, k - 1);
}

ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a,
                                      std::span<const std::int64_t> b, double min_expected) {
  if (a.empty() || b.empty()) throw std::invalid_argument("chi_square_two_sample: empty sample");
  std::int64_t vmax = 0;
  for (auto v : a) vmax = std::max(vmax, v);
  for (auto v : b) vmax = std::max(vmax, v);
  std::vector<double> ca(static_cast<std::size_t>(vmax) + 1, 0), cb(ca.size(), 0);
  for (auto v : a) {
    if (v < 0) throw std::invalid_argument("chi_square_two_sample: negative value");
    ca[static_cast<std::size_t>(v)] += 1;
  }
  for (auto v : b) {
    if (v < 0) throw std::invalid_argument("chi_square_two_sample: negative value");
    cb[static_cast<std::size_t>(v)] += 1;
  }
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double fa = na / (na + nb), fb = nb / (na + nb);
  std::vector<std::pair<double, double>> bins;
  double oa = 0, ob = 0;
  for (std::size_t v = 0; v < ca.size(); ++v) {
    oa += ca[v];
    ob += cb[v];
    const double t = oa + ob;
    if (t * fa >= min_expected && t * fb >= min_expected) {
      bins.emplace_back(oa, ob);
      oa = ob = 0;
    }
  }
  if (oa + ob > 0) {
    if (bins.empty()) bins.emplace_back(oa, ob);
    else {
      bins.back().first += oa;
      bins.back().second += ob;
    }
  }
  double stat = 0;
  for (const auto& [x, y] : bins) {
    const double t = x + y;
    const double ea = t * fa, eb = t * fb;
    stat += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
  }
  const int k = static_cast<int>(bins.size());
  return finish(stat, k, k - 1);
}

EnergyTest energy_test(std::span<const Point2> a, std::span<const Point2> b, int permutations,
                       Rng& rng) {
  if (a.empty() || b.empty()) throw std::invalid_argument("energy_test: empty sample");
  const std::size_t n = a.size(), m = b.size(), N = n + m;
  std::vector<Point2> pts(a.begin(), a.end());
  pts.insert(pts.end(), b.begin(), b.end());
  std::vector<double> dist(N * N);
  std::vector<double> row(N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const double dx = pts[i][0] - pts[j][0], dy = pts[i][1] - pts[j][1];
      dist[i * N + j] = std::sqrt(dx * dx + dy * dy);
      row[i] += dist[i * N + j];
    }
  const double total = std::accumulate(row.begin(), row.end(), 0.0);

  // With group A given, sum_AA and the row totals determine the statistic.
  std::vector<double> mask(N, 0.0);
  auto statistic = [&](const std::vector<std::size_t>& members) {
    std::fill(mask.begin(), mask.end(), 0.0);
    for (auto i : members) mask[i] = 1.0;
    double aa = 0, row_a = 0;
    for (auto i : members) {
      const double* d = &dist[i * N];
      double s = 0;
      for (std::size_t j = 0; j < N; ++j) s += d[j] * mask[j];
      aa += s;
      row_a += row[i];
    }
    const double ab = row_a - aa;
    const double bb = total - row_a - ab;
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    const double e = 2 * ab / (nn * mm) - aa / (nn * nn) - bb / (mm * mm);
    return nn * mm / (nn + mm) * e;
  };

  std::vector<std::size_t> idx(N);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  EnergyTest out;
  out.permutations = permutations;
  out.statistic = statistic(std::vector<std::size_t>(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n)));
  int at_least = 0;
  std::vector<std::size_t> members(n);
  for (int r = 0; r < permutations; ++r) {
    for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + uniform_below(rng, N - i)]);
    std::copy(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), members.begin());
    if (statistic(members) >= out.statistic) ++at_least;
  }
  out.p_value = (1.0 + at_least) / (1.0 + permutations);
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean: empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("variance: need two values");
  const double m = mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

Interval bootstrap_ks(std::span<const double> a, std::span<const double> b, int resamples,
                      double level, Rng& rng) {
  std::vector<double> ds, ra(a.size()), rb(b.size());
  for (int r = 0; r < resamples; ++r) {
    for (auto& v : ra) v = a[uniform_below(rng, a.size())];
    for (auto& v : rb) v = b[uniform_below(rng, b.size())];
    ds.push_back(ks_distance(ra, rb));
  }
  const double tail = (1 - level) / 2;
  return {quantile(ds, tail), quantile(ds, 1 - tail)};
}

double ks_split_null_quantile(std::span<const double> pool, std::size_t size_a,
                              std::size_t size_b, int splits, double q, Rng& rng) {
  const std::size_t used = size_a + size_b;
  if (size_a == 0 || size_b == 0 || used > pool.size())
    throw std::invalid_argument("ks_split_null_quantile: pool too small");
  std::vector<double> v(pool.begin(), pool.end()), ds;
  for (int s = 0; s < splits; ++s) {
    for (std::size_t i = 0; i < used; ++i) std::swap(v[i], v[i + uniform_below(rng, v.size() - i)]);
    ds.push_back(ks_distance(std::span(v).subspan(0, size_a), std::span(v).subspan(size_a, size_b)));
  }
  return quantile(ds, q);
}

}  // namespace cm::statistics
