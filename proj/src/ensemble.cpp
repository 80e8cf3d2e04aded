#include "eccc/ensemble.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include <json.hpp>

#include "eccc/random.hpp"

namespace eccc {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Ensemble

Ensemble::Ensemble(Index dim, std::vector<Item> items) : dim_(dim) {
  if (dim_ < 1) throw std::invalid_argument("ensemble: dimension must be >= 1");
  items_.reserve(items.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double q = items[i].weight;
    if (!std::isfinite(q) || q < 0.0) {
      throw std::invalid_argument("ensemble: item " + std::to_string(i) +
                                  ": weight must be nonnegative, got " + fmt(q));
    }
    if (items[i].state.dim() != dim_) {
      throw std::invalid_argument("ensemble: item " + std::to_string(i) +
                                  ": state dimension " + std::to_string(items[i].state.dim()) +
                                  " does not match ensemble dimension " + std::to_string(dim_));
    }
    if (q == 0.0) {
      ++dropped_;
      continue;
    }
    sum += q;
    items_.push_back(std::move(items[i]));
  }
  if (items_.empty()) throw std::invalid_argument("ensemble: no items with positive weight");
  if (std::abs(sum - 1.0) > tol().weight_sum) {
    throw std::invalid_argument("ensemble: weights sum to " + fmt(sum) + " (deficit " +
                                fmt(1.0 - sum) + "), expected 1");
  }
}

double Ensemble::max_weight() const {
  double m = 0.0;
  for (const Item& it : items_) m = std::max(m, it.weight);
  return m;
}

DensityMatrix Ensemble::mixture() const {
  Matrix m = Matrix::Zero(dim_, dim_);
  for (const Item& it : items_) m += it.weight * it.state.entries();
  m = (m + Matrix(m.adjoint())) / 2.0;
  return DensityMatrix(std::move(m));
}

bool Ensemble::all_pure() const {
  for (const Item& it : items_) {
    if (!it.state.is_pure()) return false;
  }
  return true;
}

bool Ensemble::all_states_identical(double tolerance) const {
  for (std::size_t i = 1; i < items_.size(); ++i) {
    if (max_entry_distance(items_[i].state.entries(), items_[0].state.entries()) > tolerance) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Named families

namespace {

PureState qubit_state(Complex a0, Complex a1) {
  Vector v(2);
  v << a0, a1;
  v /= v.norm();
  return PureState(std::move(v));
}

}  // namespace

Ensemble make_bb84_weighted(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("make_bb84_weighted: p must be in [0, 1], got " + fmt(p));
  }
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<Ensemble::Item> items;
  items.push_back({p / 2.0, DensityMatrix::pure(PureState::basis_state(2, 0))});
  items.push_back({p / 2.0, DensityMatrix::pure(PureState::basis_state(2, 1))});
  items.push_back({(1.0 - p) / 2.0, DensityMatrix::pure(qubit_state(s, s))});
  items.push_back({(1.0 - p) / 2.0, DensityMatrix::pure(qubit_state(s, -s))});
  return Ensemble(2, std::move(items));
}

Ensemble make_six_state() {
  const double w = 1.0 / 6.0;
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<Ensemble::Item> items;
  items.push_back({w, DensityMatrix::pure(PureState::basis_state(2, 0))});   // +z
  items.push_back({w, DensityMatrix::pure(PureState::basis_state(2, 1))});   // -z
  items.push_back({w, DensityMatrix::pure(qubit_state(s, s))});              // +x
  items.push_back({w, DensityMatrix::pure(qubit_state(s, -s))});             // -x
  items.push_back({w, DensityMatrix::pure(qubit_state(s, Complex(0, 1) * s))});   // +y
  items.push_back({w, DensityMatrix::pure(qubit_state(s, Complex(0, -1) * s))});  // -y
  return Ensemble(2, std::move(items));
}

Ensemble product_ensemble(const Ensemble& a, const Ensemble& b, Index max_items) {
  const Index n = a.size() * b.size();
  if (n > max_items) {
    throw std::invalid_argument("product_ensemble: " + std::to_string(n) +
                                " items exceed the cap of " + std::to_string(max_items));
  }
  std::vector<Ensemble::Item> items;
  items.reserve(static_cast<std::size_t>(n));
  for (const auto& ia : a.items()) {
    for (const auto& ib : b.items()) {
      Matrix m = Eigen::kroneckerProduct(ia.state.entries(), ib.state.entries());
      items.push_back({ia.weight * ib.weight, DensityMatrix(std::move(m))});
    }
  }
  return Ensemble(a.dim() * b.dim(), std::move(items));
}

// ---------------------------------------------------------------------------
// Parametric families

namespace {

// Pure qubit state cos(theta/2)|0> + sign * sin(theta/2) e^{i phi} |1>,
// i.e. the point at polar angle +/-theta on the z = cos(theta) latitude.
DensityMatrix circle_state(double theta, double phi, double sign) {
  const Complex phase(std::cos(phi), std::sin(phi));
  return DensityMatrix::pure(
      qubit_state(std::cos(theta / 2.0), sign * std::sin(theta / 2.0) * phase));
}

}  // namespace

ParametricEnsemble make_double_circle(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::invalid_argument("make_double_circle: theta must be in [0, pi], got " + fmt(theta));
  }
  ParametricEnsemble pe;
  pe.dim = 2;
  pe.label = "double-circle";
  pe.theta = theta;
  pe.sample = [theta](std::uint64_t seed, std::uint64_t index) {
    std::mt19937_64 rng(derive_seed(seed, index));
    std::uniform_real_distribution<double> uphi(0.0, 2.0 * kPi);
    const double phi = uphi(rng);
    // Fair coin for the +/-theta branch; both land on the z = cos(theta)
    // latitude, and theta = 0 degenerates to the single state |0><0|.
    const double sign = (rng() & 1ULL) == 0ULL ? 1.0 : -1.0;
    return circle_state(theta, phi, sign);
  };
  return pe;
}

ParametricEnsemble make_bloch_uniform() {
  ParametricEnsemble pe;
  pe.dim = 2;
  pe.label = "bloch-uniform";
  pe.known_j = 2.0 / 3.0;
  pe.sample = [](std::uint64_t seed, std::uint64_t index) {
    return DensityMatrix::pure(random_pure_state(2, derive_seed(seed, index)));
  };
  return pe;
}

ParametricEnsemble make_haar_uniform(Index dim) {
  if (dim < 1) throw std::invalid_argument("make_haar_uniform: dim must be >= 1");
  ParametricEnsemble pe;
  pe.dim = dim;
  pe.label = "haar-uniform";
  pe.known_j = 2.0 / (static_cast<double>(dim) + 1.0);
  pe.sample = [dim](std::uint64_t seed, std::uint64_t index) {
    return DensityMatrix::pure(random_pure_state(dim, derive_seed(seed, index)));
  };
  return pe;
}

Ensemble sample_ensemble(const ParametricEnsemble& pe, Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_ensemble: need at least one draw");
  if (!pe.sample) throw std::invalid_argument("sample_ensemble: family has no sampler");
  std::vector<Ensemble::Item> items;
  items.reserve(static_cast<std::size_t>(n));
  const double w = 1.0 / static_cast<double>(n);
  for (Index i = 0; i < n; ++i) {
    items.push_back({w, pe.sample(seed, static_cast<std::uint64_t>(i))});
  }
  return Ensemble(pe.dim, std::move(items));
}

Ensemble random_ensemble(Index dim, Index n, bool pure_only, std::uint64_t seed) {
  if (dim < 1 || n < 1) throw std::invalid_argument("random_ensemble: bad dimensions");
  std::mt19937_64 rng(derive_seed(seed, 0xE25));
  std::uniform_real_distribution<double> uw(0.05, 1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (double& x : w) {
    x = uw(rng);
    sum += x;
  }
  std::vector<Ensemble::Item> items;
  for (Index i = 0; i < n; ++i) {
    const std::uint64_t s = derive_seed(seed, 0x57A7E, static_cast<std::uint64_t>(i));
    const bool pure = pure_only || (rng() & 1ULL) == 0ULL;
    DensityMatrix state = pure
        ? DensityMatrix::pure(random_pure_state(dim, s))
        : random_density(dim, s, 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(dim)));
    items.push_back({w[static_cast<std::size_t>(i)] / sum, std::move(state)});
  }
  return Ensemble(dim, std::move(items));
}

Ensemble make_double_circle_discretized(double theta, Index phi_points) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::invalid_argument("make_double_circle_discretized: theta out of range");
  }
  if (phi_points < 1) throw std::invalid_argument("make_double_circle_discretized: need phi points");
  std::vector<Ensemble::Item> items;
  items.reserve(static_cast<std::size_t>(2 * phi_points));
  const double w = 1.0 / (2.0 * static_cast<double>(phi_points));
  for (Index k = 0; k < phi_points; ++k) {
    const double phi = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(phi_points);
    items.push_back({w, circle_state(theta, phi, 1.0)});
    items.push_back({w, circle_state(theta, phi, -1.0)});
  }
  return Ensemble(2, std::move(items));
}

// ---------------------------------------------------------------------------
// File I/O

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      row.push_back({m(r, c).real(), m(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& rows, Index dim, const std::string& where) {
  if (!rows.is_array() || static_cast<Index>(rows.size()) != dim) {
    throw std::runtime_error(where + ": matrix must have " + std::to_string(dim) + " rows");
  }
  Matrix m(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
      throw std::runtime_error(where + ": row " + std::to_string(r) + " must have " +
                               std::to_string(dim) + " entries");
    }
    for (Index c = 0; c < dim; ++c) {
      const auto& entry = row[static_cast<std::size_t>(c)];
      if (!entry.is_array() || entry.size() != 2) {
        throw std::runtime_error(where + ": entry (" + std::to_string(r) + "," +
                                 std::to_string(c) + ") must be [re, im]");
      }
      m(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return m;
}

}  // namespace

Ensemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ensemble file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw std::runtime_error("malformed JSON in " + path + ": " + ex.what());
  }
  if (!j.contains("dim") || !j["dim"].is_number_integer()) {
    throw std::runtime_error(path + ": missing integer field \"dim\"");
  }
  const Index dim = j["dim"].get<Index>();
  if (!j.contains("items") || !j["items"].is_array()) {
    throw std::runtime_error(path + ": missing array field \"items\"");
  }
  std::vector<Ensemble::Item> items;
  Index idx = 0;
  for (const auto& ji : j["items"]) {
    const std::string where = path + ": item " + std::to_string(idx);
    if (!ji.contains("weight") || !ji["weight"].is_number()) {
      throw std::runtime_error(where + ": missing numeric field \"weight\"");
    }
    if (!ji.contains("matrix")) throw std::runtime_error(where + ": missing field \"matrix\"");
    Matrix m = matrix_from_json(ji["matrix"], dim, where);
    try {
      items.push_back({ji["weight"].get<double>(), DensityMatrix(std::move(m))});
    } catch (const std::exception& ex) {
      throw std::runtime_error(where + ": " + ex.what());
    }
    ++idx;
  }
  try {
    return Ensemble(dim, std::move(items));
  } catch (const std::exception& ex) {
    throw std::runtime_error(path + ": " + ex.what());
  }
}

void save_ensemble(const Ensemble& e, const std::string& path) {
  nlohmann::json j;
  j["dim"] = e.dim();
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : e.items()) {
    items.push_back({{"weight", it.weight}, {"matrix", matrix_to_json(it.state.entries())}});
  }
  j["items"] = std::move(items);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ensemble file: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace eccc
