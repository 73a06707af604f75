#include "wh/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "wh/quadrature.hpp"

namespace wh {
namespace {

constexpr int kMaxMultiplicity = 4;

// Local cubic through four consecutive samples around interval j; the
// stencil shifts to one-sided at the grid ends.
std::array<cplx, 4> interval_cubic(const std::vector<cplx>& v, std::size_t j, double h) {
  const std::size_t n = v.size();
  int offset = -1;
  std::size_t start = j - 1;
  if (j == 0) {
    offset = 0;
    start = 0;
  } else if (j + 2 >= n) {
    offset = -2;
    start = n - 4;
  }
  return cubic_coeffs(v.data() + start, h, offset);
}

// J(t_j) = int_{t_j}^{T} e^{-(s - t_j)} phi(s) ds by backward product
// integration with local cubics (exact exponential weight per step).
std::vector<cplx> decaying_tail_integral(const GridFunction& phi) {
  const std::size_t n = std::size_t(phi.size());
  const double h = phi.step();
  const auto& v = phi.samples();
  const auto M = exp_monomial_integrals(h, 1.0);
  const double damp = std::exp(-h);
  std::vector<cplx> J(n);
  J[n - 1] = 0.0;  // zero tail beyond T
  for (std::size_t j = n - 1; j-- > 0;) {
    const auto c = interval_cubic(v, j, h);
    const cplx local = c[0] * M[0] + c[1] * M[1] + c[2] * M[2] + c[3] * M[3];
    J[j] = damp * J[j + 1] + local;
  }
  return J;
}

// W(t_j) = e^{-i a t_j} int_0^{t_j} e^{i a s} phi(s) ds by forward product
// integration.
std::vector<cplx> oscillatory_running_integral(const GridFunction& phi, double alpha) {
  const std::size_t n = std::size_t(phi.size());
  const double h = phi.step();
  const auto& v = phi.samples();
  const cplx mu = cplx(0.0, -alpha);  // weight e^{i a u} = e^{-mu u}
  const auto M = exp_monomial_integrals(h, mu);
  const cplx shift = std::exp(cplx(0.0, -alpha * h));
  std::vector<cplx> W(n);
  W[0] = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const auto c = interval_cubic(v, j, h);
    const cplx local = c[0] * M[0] + c[1] * M[1] + c[2] * M[2] + c[3] * M[3];
    W[j + 1] = shift * (W[j] + local);
  }
  return W;
}

}  // namespace

GridFunction::GridFunction(double T, std::vector<cplx> samples, QuadRule rule)
    : T_(T), samples_(std::move(samples)), rule_(rule) {
  if (!(T > 0.0)) throw std::invalid_argument("grid length must be positive");
  if (samples_.size() < 16) throw std::invalid_argument("grid needs at least 16 samples");
  for (const auto& x : samples_)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw std::invalid_argument("grid samples must be finite");
}

GridFunction GridFunction::sample(double T, int n, const std::function<cplx(double)>& f,
                                  QuadRule rule) {
  std::vector<cplx> v(static_cast<std::size_t>(n));
  const double h = T / double(n - 1);
  for (int j = 0; j < n; ++j) v[std::size_t(j)] = f(h * j);
  return GridFunction(T, std::move(v), rule);
}

double GridFunction::norm() const {
  const std::size_t n = samples_.size();
  const double h = step();
  double acc = 0.0;
  if (rule_ == QuadRule::Trapezoid) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      acc += w * std::norm(samples_[j]);
    }
    return std::sqrt(h * acc);
  }
  // composite Simpson; a trailing interval (even sample count) goes trapezoid
  std::size_t last = (n % 2 == 1) ? n - 1 : n - 2;
  for (std::size_t j = 0; j + 2 <= last; j += 2) {
    acc += h / 3.0 *
           (std::norm(samples_[j]) + 4.0 * std::norm(samples_[j + 1]) +
            std::norm(samples_[j + 2]));
  }
  if (last != n - 1)
    acc += h / 2.0 * (std::norm(samples_[n - 2]) + std::norm(samples_[n - 1]));
  return std::sqrt(acc);
}

GridFunction GridFunction::derivative(int stride) const {
  const int n = size();
  if (stride < 1 || n <= 4 * stride)
    throw std::invalid_argument("derivative stride too large for the grid");
  const double d = step() * stride;
  std::vector<cplx> out(static_cast<std::size_t>(n));
  auto at = [&](int j) { return samples_[std::size_t(j)]; };
  for (int j = 0; j < n; ++j) {
    if (j >= 2 * stride && j + 2 * stride < n) {
      out[std::size_t(j)] = (at(j - 2 * stride) - 8.0 * at(j - stride) +
                             8.0 * at(j + stride) - at(j + 2 * stride)) /
                            (12.0 * d);
    } else if (j + 4 * stride < n) {
      out[std::size_t(j)] = (-25.0 * at(j) + 48.0 * at(j + stride) -
                             36.0 * at(j + 2 * stride) + 16.0 * at(j + 3 * stride) -
                             3.0 * at(j + 4 * stride)) /
                            (12.0 * d);
    } else {
      out[std::size_t(j)] = (25.0 * at(j) - 48.0 * at(j - stride) +
                             36.0 * at(j - 2 * stride) - 16.0 * at(j - 3 * stride) +
                             3.0 * at(j - 4 * stride)) /
                            (12.0 * d);
    }
  }
  return GridFunction(T_, std::move(out), rule_);
}

GridFunction GridFunction::operator+(const GridFunction& other) const {
  if (other.size() != size() || other.T() != T_)
    throw std::invalid_argument("grid mismatch");
  std::vector<cplx> out = samples_;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += other.samples_[j];
  return GridFunction(T_, std::move(out), rule_);
}

GridFunction GridFunction::operator-(const GridFunction& other) const {
  return *this + other.scaled(-1.0);
}

GridFunction GridFunction::scaled(cplx factor) const {
  std::vector<cplx> out = samples_;
  for (auto& x : out) x *= factor;
  return GridFunction(T_, std::move(out), rule_);
}

GridFunction apply_B(const GridFunction& phi, double alpha) {
  const std::vector<cplx> J = decaying_tail_integral(phi);
  std::vector<cplx> out(J.size());
  if (std::isinf(alpha)) {
    for (std::size_t j = 0; j < J.size(); ++j) out[j] = kImag * J[j];
  } else {
    const cplx w = cplx(1.0, alpha);
    for (std::size_t j = 0; j < J.size(); ++j)
      out[j] = phi.samples()[j] - w * J[j];
  }
  return GridFunction(phi.T(), std::move(out), phi.quadrature());
}

GridFunction apply_G(const GridFunction& phi, double alpha) {
  if (std::isinf(alpha)) {
    const GridFunction d = phi.derivative();
    std::vector<cplx> out(std::size_t(phi.size()));
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = kImag * (phi.samples()[j] + d.samples()[j]);
    return GridFunction(phi.T(), std::move(out), phi.quadrature());
  }
  const std::vector<cplx> W = oscillatory_running_integral(phi, alpha);
  const cplx w = cplx(1.0, -alpha);
  std::vector<cplx> out(W.size());
  for (std::size_t j = 0; j < W.size(); ++j) out[j] = phi.samples()[j] + w * W[j];
  return GridFunction(phi.T(), std::move(out), phi.quadrature());
}

GridFunction compose(const GridFunction& phi, const MultiplicityData& mult,
                     OperatorFamily family) {
  if (mult.alphas.size() != mult.m_prime.size() ||
      mult.alphas.size() != mult.m_dblprime.size())
    throw std::invalid_argument("multiplicity lists must align with alphas");
  const int m_inf =
      family == OperatorFamily::B ? mult.m_inf_dblprime : mult.m_inf_prime;
  const auto& m_per =
      family == OperatorFamily::B ? mult.m_dblprime : mult.m_prime;
  auto check = [](int m) {
    if (m < 0 || m > kMaxMultiplicity)
      throw std::invalid_argument("multiplicities must lie in [0, 4]");
  };
  check(m_inf);
  for (int m : m_per) check(m);

  const double inf = std::numeric_limits<double>::infinity();
  GridFunction out = phi;
  for (int p = 0; p < m_inf; ++p)
    out = family == OperatorFamily::B ? apply_B(out, inf) : apply_G(out, inf);
  for (std::size_t j = 0; j < mult.alphas.size(); ++j)
    for (int p = 0; p < m_per[j]; ++p)
      out = family == OperatorFamily::B ? apply_B(out, mult.alphas[j])
                                        : apply_G(out, mult.alphas[j]);
  return out;
}

MembershipVerdict invert_B_inf(const GridFunction& f) {
  // Derived inverse of B_inf: phi = i (f' - f).  Decide membership by
  // comparing against the stride-2 (coarse-grid) recovery; differentiation
  // noise grows under refinement while a genuine preimage is stable.
  const GridFunction fine = (f.derivative(1) - f).scaled(kImag);
  const GridFunction coarse = (f.derivative(2) - f).scaled(kImag);
  const double n1 = fine.norm();
  const double n2 = coarse.norm();

  MembershipVerdict v;
  v.space = "Ē₊(1/(λ−i))";
  v.preimage_norm = n1;
  const double scale = std::max(n1, n2);
  v.belongs = scale == 0.0 || std::abs(n1 - n2) < 0.10 * scale;
  if (v.belongs) v.recovered_preimage = fine;
  return v;
}

double ebar_norm(const GridFunction& f) {
  const MembershipVerdict v = invert_B_inf(f);
  if (!v.belongs)
    throw NotInSpace("recovered preimage is dominated by differentiation noise");
  return v.preimage_norm;
}

void write_grid_csv(std::ostream& os, const GridFunction& f) {
  os << "t,value\n";
  os.precision(17);
  for (int j = 0; j < f.size(); ++j) {
    const cplx v = f[j];
    os << f.t(j) << ',' << v.real() << (v.imag() < 0 ? '-' : '+')
       << std::abs(v.imag()) << "i\n";
  }
}

GridFunction read_grid_csv(std::istream& is, QuadRule rule) {
  std::string line;
  std::vector<double> ts;
  std::vector<cplx> vs;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == 't' || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw SchemaError("grid CSV row missing comma");
    ts.push_back(std::stod(line.substr(0, comma)));
    std::string value = line.substr(comma + 1);
    double re = 0, im = 0;
    std::size_t used = 0;
    re = std::stod(value, &used);
    if (used < value.size() && value.back() == 'i')
      im = std::stod(value.substr(used, value.size() - used - 1));
    vs.push_back(cplx(re, im));
  }
  if (ts.size() < 2) throw SchemaError("grid CSV needs at least two rows");
  const double T = ts.back();
  const double h = ts[1] - ts[0];
  for (std::size_t j = 1; j < ts.size(); ++j)
    if (std::abs(ts[j] - ts[j - 1] - h) > 1e-9 * std::max(1.0, T))
      throw SchemaError("grid CSV must be uniformly spaced");
  if (std::abs(ts.front()) > 1e-12 * std::max(1.0, T))
    throw SchemaError("grid CSV must start at t = 0");
  return GridFunction(T, std::move(vs), rule);
}

}  // namespace wh
