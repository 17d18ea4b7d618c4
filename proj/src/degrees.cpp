#include "cm/degrees.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cm {

DegreeSequence::DegreeSequence(std::vector<int> degrees) : d_(std::move(degrees)) {
  if (d_.empty()) throw std::invalid_argument("degree sequence needs n >= 1");
  for (int d : d_) {
    if (d < 0) throw std::invalid_argument("negative degree");
    ell_ += d;
  }
  if (ell_ == 0) throw std::invalid_argument("degree sequence has total degree 0");
  if (ell_ % 2 != 0) throw std::invalid_argument("total degree is odd");
}

std::vector<std::pair<int, std::int64_t>> DegreeSequence::counts() const {
  std::map<int, std::int64_t> m;
  for (int d : d_) ++m[d];
  return {m.begin(), m.end()};
}

DegreeStats stats(const std::vector<int>& degrees) {
  DegreeStats s;
  s.n = static_cast<std::int64_t>(degrees.size());
  if (s.n == 0) throw std::invalid_argument("stats: empty sequence");
  std::int64_t s1 = 0, s11 = 0;
  long double s2 = 0, s3 = 0;
  for (int d : degrees) {
    s1 += d;
    s11 += static_cast<std::int64_t>(d) * (d - 1);
    s2 += static_cast<long double>(d) * d;
    s3 += static_cast<long double>(d) * d * d;
    s.d_max = std::max(s.d_max, d);
  }
  if (s1 == 0) throw std::invalid_argument("stats: total degree is 0");
  s.ell = s1;
  const auto n = static_cast<long double>(s.n);
  s.mu = static_cast<double>(s1 / n);
  s.sigma2 = static_cast<double>(s2 / n);
  s.sigma3 = static_cast<double>(s3 / n);
  s.nu = static_cast<double>(static_cast<long double>(s11) / static_cast<long double>(s1));
  return s;
}

DegreeStats stats(const DegreeSequence& ds) { return stats(ds.degrees()); }

ProbabilityVector::ProbabilityVector(std::vector<std::pair<int, double>> support) {
  std::sort(support.begin(), support.end());
  double total = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto [k, p] = support[i];
    if (k < 0) throw std::invalid_argument("negative degree in distribution");
    if (!(p >= 0) || !std::isfinite(p)) throw std::invalid_argument("bad probability");
    if (i > 0 && support[i - 1].first == k)
      throw std::invalid_argument("duplicate degree " + std::to_string(k));
    total += p;
    if (p > 0) support_.emplace_back(k, p);
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("probabilities sum to " + std::to_string(total));
}

double ProbabilityVector::probability(int k) const {
  for (const auto& [d, p] : support_)
    if (d == k) return p;
  return 0.0;
}

double ProbabilityVector::moment(int r) const {
  double m = 0;
  for (const auto& [k, p] : support_) m += std::pow(static_cast<double>(k), r) * p;
  return m;
}

double ProbabilityVector::nu() const {
  double a = 0, b = 0;
  for (const auto& [k, p] : support_) {
    a += static_cast<double>(k) * (k - 1) * p;
    b += k * p;
  }
  if (b <= 0) throw std::invalid_argument("distribution has zero mean");
  return a / b;
}

namespace {

void fix_parity(std::vector<int>& d, Rng& rng) {
  std::int64_t ell = 0;
  for (int x : d) ell += x;
  if (ell % 2 != 0) d[uniform_below(rng, d.size())] += 1;
}

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

double nu_of_counts(const std::vector<std::pair<int, std::int64_t>>& counts) {
  long double a = 0, b = 0;
  for (const auto& [k, c] : counts) {
    a += static_cast<long double>(k) * (k - 1) * c;
    b += static_cast<long double>(k) * c;
  }
  return b > 0 ? static_cast<double>(a / b) : 0.0;
}

}  // namespace

DegreeSequence sample_iid(const ProbabilityVector& dist, std::int64_t n, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("sample_iid: n must be positive");
  const auto& sup = dist.support();
  std::vector<double> cdf;
  double acc = 0;
  for (const auto& [k, p] : sup) cdf.push_back(acc += p);
  std::vector<int> d(static_cast<std::size_t>(n));
  for (auto& x : d) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    x = sup[static_cast<std::size_t>(it - cdf.begin())].first;
  }
  fix_parity(d, rng);
  return DegreeSequence(std::move(d));
}

namespace {

ProbabilityVector mixture_with_weight(const ProbabilityVector& dist, double w) {
  double r = 0;
  for (const auto& [k, p] : dist.support())
    if (k >= 2) r += p;
  std::vector<std::pair<int, double>> law{{1, w}};
  for (const auto& [k, p] : dist.support())
    if (k >= 2) law.emplace_back(k, (1 - w) * p / r);
  double total = 0;
  for (const auto& e : law) total += e.second;
  for (auto& e : law) e.second /= total;
  return ProbabilityVector(std::move(law));
}

}  // namespace

ProbabilityVector critical_mixture(const ProbabilityVector& dist, double target_nu) {
  if (!(target_nu > 0)) throw std::invalid_argument("target nu must be positive");
  double r = 0, a = 0, b = 0;
  for (const auto& [k, p] : dist.support()) {
    if (k < 2) continue;
    r += p;
    a += static_cast<double>(k) * (k - 1) * p;
    b += static_cast<double>(k) * p;
  }
  if (r <= 0)
    throw std::invalid_argument("infeasible target: no mass at degrees >= 2, nu fixed at 0");
  a /= r;
  b /= r;
  // nu(w) = (1-w) a / (w + (1-w) b), decreasing from a/b at w=0 to 0 at w=1.
  if (a - target_nu * b <= 0) {
    std::ostringstream msg;
    msg << "infeasible target nu=" << target_nu << ": achievable range is (0, " << a / b
        << ") with positive degree-one mass";
    throw std::invalid_argument(msg.str());
  }
  return mixture_with_weight(dist, (a - target_nu * b) / (a - target_nu * b + target_nu));
}

std::vector<std::pair<int, std::int64_t>> materialize_counts(const ProbabilityVector& law,
                                                             std::int64_t n) {
  const auto& sup = law.support();
  std::vector<std::pair<int, std::int64_t>> out;
  std::vector<std::pair<double, std::size_t>> rem;
  std::int64_t used = 0;
  for (std::size_t i = 0; i < sup.size(); ++i) {
    const long double x = static_cast<long double>(n) * sup[i].second;
    const auto f = static_cast<std::int64_t>(std::floor(x));
    out.emplace_back(sup[i].first, f);
    used += f;
    rem.emplace_back(static_cast<double>(x - f), i);
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t i = 0; used < n; ++i, ++used) out[rem[i % rem.size()].second].second += 1;
  return out;
}

DegreeSequence materialize_sequence(const ProbabilityVector& law, std::int64_t n, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("materialize_sequence: n must be positive");
  std::vector<int> d;
  d.reserve(static_cast<std::size_t>(n));
  for (const auto& [k, c] : materialize_counts(law, n)) d.insert(d.end(), static_cast<std::size_t>(c), k);
  shuffle(d, rng);
  fix_parity(d, rng);
  return DegreeSequence(std::move(d));
}

DegreeSequence tune_to_critical(const ProbabilityVector& dist, std::int64_t n, double lambda,
                                Rng& rng) {
  if (n <= 0) throw std::invalid_argument("tune_to_critical: n must be positive");
  const double scale = std::cbrt(static_cast<double>(n));
  const double target = 1.0 + lambda / scale;
  const double tol = 0.1 / scale;
  const ProbabilityVector analytic = critical_mixture(dist, target);

  auto counts_for = [&](double w) { return materialize_counts(mixture_with_weight(dist, w), n); };
  auto counts = materialize_counts(analytic, n);
  double best_err = std::abs(nu_of_counts(counts) - target);
  if (best_err > tol / 4) {
    // nu of the materialized counts is non-increasing in w; bisect on it.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && best_err > tol / 4; ++it) {
      const double mid = 0.5 * (lo + hi);
      auto c = counts_for(mid);
      const double v = nu_of_counts(c);
      if (std::abs(v - target) < best_err) {
        best_err = std::abs(v - target);
        counts = c;
      }
      if (v > target) lo = mid; else hi = mid;
    }
  }

  std::vector<int> d;
  d.reserve(static_cast<std::size_t>(n));
  for (const auto& [k, c] : counts) d.insert(d.end(), static_cast<std::size_t>(c), k);
  shuffle(d, rng);
  fix_parity(d, rng);
  if (std::find(d.begin(), d.end(), 1) == d.end())
    throw std::invalid_argument("infeasible target: no degree-one vertex at this n");
  DegreeSequence ds(std::move(d));
  const double achieved = stats(ds).nu;
  if (std::abs(achieved - target) > tol) {
    std::ostringstream msg;
    msg << "infeasible target nu=" << target << " at n=" << n << ": achieved nu_n=" << achieved
        << " (tolerance " << tol << ")";
    throw std::invalid_argument(msg.str());
  }
  return ds;
}

double total_variation(const DegreeSequence& ds, const ProbabilityVector& law) {
  std::map<int, double> diff;
  for (const auto& [k, c] : ds.counts()) diff[k] += static_cast<double>(c) / ds.n();
  for (const auto& [k, p] : law.support()) diff[k] -= p;
  double tv = 0;
  for (const auto& e : diff) tv += std::abs(e.second);
  return tv / 2;
}

namespace {

DegreeSequence from_counts_json(const nlohmann::json& j) {
  if (!j.contains("counts") || !j["counts"].is_object())
    throw std::invalid_argument("degree JSON needs a \"counts\" object");
  std::vector<std::pair<int, std::int64_t>> counts;
  for (const auto& [key, val] : j["counts"].items())
    counts.emplace_back(std::stoi(key), val.get<std::int64_t>());
  std::sort(counts.begin(), counts.end());
  std::vector<int> d;
  for (const auto& [k, c] : counts) {
    if (c < 0) throw std::invalid_argument("negative count");
    d.insert(d.end(), static_cast<std::size_t>(c), k);
  }
  if (j.contains("n") && j["n"].get<std::int64_t>() != static_cast<std::int64_t>(d.size()))
    throw std::invalid_argument("degree JSON: n does not match the counts");
  return DegreeSequence(std::move(d));
}

}  // namespace

DegreeSequence read_degrees(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return from_counts_json(nlohmann::json::parse(text));
  std::istringstream ss(text);
  std::vector<int> d;
  std::string tok;
  while (ss >> tok) {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("bad degree token '" + tok + "'");
    d.push_back(static_cast<int>(v));
  }
  return DegreeSequence(std::move(d));
}

DegreeSequence read_degrees_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_degrees(in);
}

void write_degrees_text(std::ostream& out, const DegreeSequence& ds) {
  for (int d : ds.degrees()) out << d << '\n';
}

void write_degrees_json(std::ostream& out, const DegreeSequence& ds) {
  nlohmann::json j;
  j["n"] = ds.n();
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [k, c] : ds.counts()) counts[std::to_string(k)] = c;
  j["counts"] = counts;
  out << j.dump() << '\n';
}

ProbabilityVector read_distribution(std::istream& in) {
  const auto j = nlohmann::json::parse(in);
  const auto& probs = j.contains("probabilities") ? j["probabilities"] : j;
  if (!probs.is_object()) throw std::invalid_argument("distribution JSON must be an object");
  std::vector<std::pair<int, double>> sup;
  for (const auto& [key, val] : probs.items()) sup.emplace_back(std::stoi(key), val.get<double>());
  return ProbabilityVector(std::move(sup));
}

ProbabilityVector read_distribution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_distribution(in);
}

}  // namespace cm
