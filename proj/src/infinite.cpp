#include "eccc/infinite.hpp"

#include <cmath>
#include <numeric>

#include "eccc/cloning.hpp"
#include "eccc/parallel.hpp"

namespace eccc {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double j_double_circle_closed(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::invalid_argument("j_double_circle_closed: theta must be in [0, pi]");
  }
  const double s2 = std::sin(theta) * std::sin(theta);
  if (s2 <= 2.0 / 3.0) return 1.0 - 0.5 * s2;
  return 0.5 + 0.25 * s2;
}

double f_ave_double_circle(double theta, double theta1, double /*phi1*/) {
  const double s2 = std::sin(theta) * std::sin(theta);
  const double s12 = std::sin(theta1) * std::sin(theta1);
  return 1.0 - 0.5 * s2 + 0.25 * s12 * (3.0 * s2 - 2.0);
}

double pure_overlap_moment(Index dim, int n) {
  if (dim < 1) throw std::invalid_argument("pure_overlap_moment: dim must be >= 1");
  if (n < 0) throw std::invalid_argument("pure_overlap_moment: n must be >= 0");
  // (d-1)! n! / (d+n-1)! = prod_{k=1..n} k / (d-1+k), kept exact with a
  // gcd-reduced integer fraction.
  unsigned long long num = 1;
  unsigned long long den = 1;
  for (int k = 1; k <= n; ++k) {
    unsigned long long a = static_cast<unsigned long long>(k);
    unsigned long long b = static_cast<unsigned long long>(dim - 1 + k);
    unsigned long long g = std::gcd(a, b);
    a /= g;
    b /= g;
    g = std::gcd(a, den);
    a /= g;
    den /= g;
    g = std::gcd(num, b);
    num /= g;
    b /= g;
    if ((a != 0 && num > ~0ULL / a) || (b != 0 && den > ~0ULL / b)) {
      throw std::overflow_error("pure_overlap_moment: arguments too large for exact arithmetic");
    }
    num *= a;
    den *= b;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

double haar_average_cloning_fidelity(Index dim) {
  return static_cast<double>(dim) * pure_overlap_moment(dim, 2);
}

InfiniteEstimate estimate_j_infinite(const ParametricEnsemble& pe, Index n_states,
                                     const EcccOptions& opts, std::uint64_t seed, int batches) {
  if (n_states < 100) throw std::invalid_argument("estimate_j_infinite: need at least 100 states");
  if (batches < 10) throw std::invalid_argument("estimate_j_infinite: need at least 10 batches");

  const Ensemble sampled = sample_ensemble(pe, n_states, seed);
  InfiniteEstimate est;
  est.samples = n_states;
  est.batches = batches;
  est.result = classicality(sampled, opts);
  if (sampled.all_states_identical(1e-12)) {
    est.stderr_val = 0.0;
    return est;
  }

  // Batch means of F_ave at the chosen basis.
  std::vector<double> means(static_cast<std::size_t>(batches), 0.0);
  const Index per = n_states / batches;
  for (int b = 0; b < batches; ++b) {
    const Index lo = b * per;
    const Index hi = (b == batches - 1) ? n_states : lo + per;
    double acc = 0.0;
    for (Index i = lo; i < hi; ++i) {
      acc += cloning_fidelity(sampled.item(i).state, est.result.basis);
    }
    means[static_cast<std::size_t>(b)] = acc / static_cast<double>(hi - lo);
  }
  const double mean =
      std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
  double var = 0.0;
  for (const double m : means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(batches - 1);
  est.stderr_val = std::sqrt(var / static_cast<double>(batches));
  return est;
}

std::vector<SweepPoint> double_circle_sweep(const std::vector<double>& thetas, Index samples,
                                            const EcccOptions& opts, std::uint64_t seed,
                                            int workers) {
  if (thetas.empty()) throw std::invalid_argument("double_circle_sweep: empty theta grid");
  std::vector<SweepPoint> out(thetas.size());
  parallel_for(static_cast<Index>(thetas.size()), workers, [&](Index i) {
    const double theta = thetas[static_cast<std::size_t>(i)];
    const InfiniteEstimate est = estimate_j_infinite(
        make_double_circle(theta), samples, opts, derive_seed(seed, static_cast<std::uint64_t>(i)));
    out[static_cast<std::size_t>(i)] = SweepPoint{theta, j_double_circle_closed(theta),
                                                  est.result.j, est.stderr_val, samples};
  });
  return out;
}

}  // namespace eccc
