#include "homlab/media.hpp"

#include "homlab/drift.hpp"
#include "homlab/errors.hpp"
#include "homlab/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace homlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Max entry magnitude of sigma, a, H, V and the drift over a tensor grid
// of `n` points per axis on [0, periods) in (t, x).
double sampled_bound(const CoefficientField& field, const std::vector<double>& periods, int n) {
  const int d = field.dim();
  PointEval p;
  p.resize(d);
  Vec x(d);
  double bound = 0.0;
  std::vector<int> idx(d + 1, 0);
  while (true) {
    const double t = periods[0] * idx[0] / n;
    for (int i = 0; i < d; ++i) x(i) = periods[i + 1] * idx[i + 1] / n;
    field.evaluate(t, x, p);
    const Vec b = drift(p);
    bound = std::max({bound, p.sigma.cwiseAbs().maxCoeff(), p.a.cwiseAbs().maxCoeff(),
                      p.H.cwiseAbs().maxCoeff(), std::abs(p.V), b.cwiseAbs().maxCoeff()});
    int k = 0;
    while (k <= d && ++idx[k] == n) idx[k++] = 0;
    if (k > d) break;
  }
  return bound;
}

Mat rotation(double angle) {
  Mat R(2, 2);
  R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return R;
}

Mat symplectic() {
  Mat J(2, 2);
  J << 0.0, 1.0, -1.0, 0.0;
  return J;
}

}  // namespace

// ---------------------------------------------------------------------------

USpec::Kind USpec::parse_kind(const std::string& name) {
  if (name == "identity") return Kind::kIdentity;
  if (name == "rotation") return Kind::kRotation;
  if (name == "breathing") return Kind::kBreathing;
  throw ConfigError("unknown U field kind '" + name + "' (expected identity, rotation or breathing)");
}

std::string USpec::kind_name(Kind kind) {
  switch (kind) {
    case Kind::kIdentity: return "identity";
    case Kind::kRotation: return "rotation";
    case Kind::kBreathing: return "breathing";
  }
  return "identity";
}

PeriodicField::PeriodicField(double alpha, USpec u) : alpha_(alpha), u_(u) {
  bound_ = sampled_bound(*this, {kTwoPi, kTwoPi, kTwoPi}, 24);
}

void PeriodicField::u_field(double t, double x, double y, Mat& U, Mat& gram, Mat& gram_t, Mat& gram_x,
                            Mat& gram_y) const {
  const Mat I = Mat::Identity(2, 2);
  gram_t = Mat::Zero(2, 2);
  gram_x = Mat::Zero(2, 2);
  gram_y = Mat::Zero(2, 2);
  switch (u_.kind) {
    case USpec::Kind::kIdentity:
      U = I;
      gram = I;
      break;
    case USpec::Kind::kRotation:
      U = rotation(u_.amplitude * (std::sin(t) + std::sin(x) * std::cos(y)));
      gram = I;
      break;
    case USpec::Kind::kBreathing: {
      const double g2 = 1.0 + u_.amplitude * std::sin(t + x);
      const double dg2 = u_.amplitude * std::cos(t + x);
      U = std::sqrt(g2) * I;
      gram = g2 * I;
      gram_t = dg2 * I;
      gram_x = dg2 * I;
      break;
    }
  }
}

void PeriodicField::evaluate(double t, const Vec& x, PointEval& out) const {
  out.resize(2);
  const double cx = std::cos(x(0)), sx = std::sin(x(0));
  const double cy = std::cos(x(1)), sy = std::sin(x(1));
  const double s = (1.0 - cx) * (1.0 - cy);
  const double s_x = sx * (1.0 - cy);
  const double s_y = (1.0 - cx) * sy;
  Mat U, G, G_t, G_x, G_y;
  u_field(t, x(0), x(1), U, G, G_t, G_x, G_y);
  out.sigma = s * U;
  out.a = s * s * G;
  out.grad_a[0] = 2.0 * s * s_x * G + s * s * G_x;
  out.grad_a[1] = 2.0 * s * s_y * G + s * s * G_y;
  out.dt_a = s * s * G_t;
}

void PeriodicField::evaluate_control(const Vec& x, ControlEval& out) const {
  out.resize(2);
  const double cx = std::cos(x(0)), sx = std::sin(x(0));
  const double cy = std::cos(x(1)), sy = std::sin(x(1));
  const double s = (1.0 - cx) * (1.0 - cy);
  const Mat I = Mat::Identity(2, 2);
  out.sigma_tilde = s * I;
  out.a_tilde = s * s * I;
  out.grad_a_tilde[0] = 2.0 * s * sx * (1.0 - cy) * I;
  out.grad_a_tilde[1] = 2.0 * s * (1.0 - cx) * sy * I;
}

CellGeometry PeriodicField::geometry() const { return {std::vector<double>{kTwoPi, kTwoPi, kTwoPi}}; }

bool PeriodicField::time_dependent() const noexcept { return u_.kind == USpec::Kind::kBreathing; }

ControlConstants PeriodicField::control_constants() const {
  ControlConstants c;
  c.m = 1.0 / alpha_;
  c.M = alpha_;
  c.C2_a = u_.kind == USpec::Kind::kBreathing ? u_.amplitude : 0.0;
  return c;
}

MediumInstance make_periodic_medium(double alpha, const USpec& u) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw ConfigError("periodic medium needs alpha >= 1");
  if (u.kind == USpec::Kind::kBreathing && !(u.amplitude >= 0.0 && u.amplitude < 1.0))
    throw ConfigError("breathing U needs amplitude in [0, 1)");
  if (!std::isfinite(u.amplitude)) throw ConfigError("U amplitude must be finite");

  auto field = std::make_shared<PeriodicField>(alpha, u);
  constexpr int n = 16;
  constexpr double tol = 1e-12;
  Mat U, G, G_t, G_x, G_y;
  for (int it = 0; it < n; ++it)
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        field->u_field(kTwoPi * it / n, kTwoPi * ix / n, kTwoPi * iy / n, U, G, G_t, G_x, G_y);
        const Eigen::SelfAdjointEigenSolver<Mat> eig(G, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < 1.0 / alpha - tol || eig.eigenvalues().maxCoeff() > alpha + tol)
          throw ConfigError("U field violates alpha^-1 Id <= U U^T <= alpha Id");
      }
  return MediumInstance(field, "periodic/" + USpec::kind_name(u.kind));
}

// ---------------------------------------------------------------------------

std::array<std::int64_t, 3> ChessboardRandomness::extent() const {
  return {static_cast<std::int64_t>(stripes[0].colors.size()), static_cast<std::int64_t>(stripes[1].colors.size()),
          static_cast<std::int64_t>(stripes[2].colors.size())};
}

ChessboardRandomness sample_chessboard(double p, const MollifierSpec& mollifier, std::uint64_t seed,
                                       const std::array<std::int64_t, 3>& extent, bool periodic) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("chessboard parameter p must lie in [0, 1]");
  for (auto e : extent)
    if (e < 1) throw ConfigError("chessboard extent must be at least one cell per axis");
  ChessboardRandomness r;
  r.p = p;
  r.seed = seed;
  r.periodic = periodic;
  r.mollifier = mollifier;
  for (int j = 0; j < 3; ++j) {
    const CounterStream stream(seed, static_cast<std::uint64_t>(j));
    StripeRandomness& s = r.stripes[j];
    s.first_cell = -(extent[j] / 2);
    s.colors.resize(static_cast<std::size_t>(extent[j]));
    double u = 0.0;
    for (std::int64_t k = 0; k < extent[j]; ++k) {
      stream.uniforms(static_cast<std::uint64_t>(k), StreamTag::kMedium, {&u, 1});
      s.colors[static_cast<std::size_t>(k)] = u < p ? 1 : 0;
    }
    stream.uniforms(0, StreamTag::kInitialShift, {&u, 1});
    s.shift = u;
  }
  return r;
}

StripeProcess::StripeProcess(const StripeRandomness& randomness, const Mollifier& mollifier, bool periodic)
    : r_(&randomness), mollifier_(&mollifier), periodic_(periodic) {
  if (r_->colors.empty()) throw ConfigError("stripe process needs at least one cell");
}

int StripeProcess::color(std::int64_t cell) const {
  const auto n = static_cast<std::int64_t>(r_->colors.size());
  std::int64_t k = cell - r_->first_cell;
  if (periodic_) {
    k %= n;
    if (k < 0) k += n;
  } else if (k < 0 || k >= n) {
    throw ExtentError("chessboard medium evaluated outside its sampled extent (cell " + std::to_string(cell) +
                      ")");
  }
  return r_->colors[static_cast<std::size_t>(k)];
}

void StripeProcess::evaluate(double x, double& value, double& derivative) const {
  const double y = x + r_->shift;
  const double fl = std::floor(y);
  const auto k = static_cast<std::int64_t>(fl);
  const double f = y - fl;
  const double r = mollifier_->radius();

  const double inner = mollifier_->cumulative(f) - mollifier_->cumulative(f - 1.0);
  value = color(k) * inner;
  derivative = color(k) * (mollifier_->density(f) - mollifier_->density(f - 1.0));
  if (f < r) {
    const int c = color(k - 1);
    value += c * (1.0 - mollifier_->cumulative(f));
    derivative -= c * mollifier_->density(f);
  }
  if (f > 1.0 - r) {
    const int c = color(k + 1);
    value += c * mollifier_->cumulative(f - 1.0);
    derivative += c * mollifier_->density(f - 1.0);
  }
}

double StripeProcess::value(double x) const {
  double v, dv;
  evaluate(x, v, dv);
  return v;
}

ChessboardField::ChessboardField(ChessboardRandomness randomness)
    : r_(std::move(randomness)), mollifier_(r_.mollifier) {
  stripes_.reserve(3);
  for (int j = 0; j < 3; ++j) stripes_.emplace_back(r_.stripes[j], mollifier_, r_.periodic);
}

void ChessboardField::evaluate(double t, const Vec& x, PointEval& out) const {
  out.resize(2);
  double beta, dbeta, al, dal, al2, dal2;
  stripes_[0].evaluate(t, beta, dbeta);
  stripes_[1].evaluate(x(0), al, dal);
  stripes_[2].evaluate(x(1), al2, dal2);  // unused by the coefficients; enforces the extent
  const Mat J = symplectic();
  out.sigma(0, 0) = 1.0;
  out.sigma(1, 1) = al;
  out.a(0, 0) = 1.0;
  out.a(1, 1) = al * al;
  out.H = al * al * beta * J;
  out.grad_a[0](1, 1) = 2.0 * al * dal;
  out.grad_H[0] = 2.0 * al * dal * beta * J;
  out.dt_H = al * al * dbeta * J;
}

void ChessboardField::evaluate_control(const Vec& x, ControlEval& out) const {
  out.resize(2);
  double al, dal, al2, dal2;
  stripes_[1].evaluate(x(0), al, dal);
  stripes_[2].evaluate(x(1), al2, dal2);
  out.sigma_tilde(0, 0) = 1.0;
  out.sigma_tilde(1, 1) = al;
  out.a_tilde(0, 0) = 1.0;
  out.a_tilde(1, 1) = al * al;
  out.grad_a_tilde[0](1, 1) = 2.0 * al * dal;
}

CellGeometry ChessboardField::geometry() const {
  if (!r_.periodic) return {};
  const auto e = r_.extent();
  return {std::vector<double>{static_cast<double>(e[0]), static_cast<double>(e[1]), static_cast<double>(e[2])}};
}

double ChessboardField::bound() const { return std::max(1.0, mollifier_.density(0.0)); }

ControlConstants ChessboardField::control_constants() const {
  ControlConstants c;
  c.m = 1.0;
  c.M = 1.0;
  c.C1_H = 1.0;
  c.C2_H = mollifier_.density(0.0);
  c.C2_a = 0.0;
  return c;
}

MediumInstance make_chessboard_medium(ChessboardRandomness randomness) {
  const auto seed = randomness.seed;
  return MediumInstance(std::make_shared<ChessboardField>(std::move(randomness)),
                        "chessboard/" + std::to_string(seed));
}

MediumInstance make_chessboard_medium(double p, const MollifierSpec& mollifier, std::uint64_t seed,
                                      const std::array<std::int64_t, 3>& extent, bool periodic) {
  return make_chessboard_medium(sample_chessboard(p, mollifier, seed, extent, periodic));
}

// ---------------------------------------------------------------------------

ConstantField::ConstantField(Mat sigma, Mat H, Vec drift_bias)
    : sigma_(std::move(sigma)), H_(std::move(H)), bias_(std::move(drift_bias)) {
  const auto d = sigma_.rows();
  if (d < 1 || d > kMaxDim || sigma_.cols() != d) throw ConfigError("constant medium needs a square sigma, d <= 3");
  if (H_.rows() != d || H_.cols() != d || bias_.size() != d)
    throw ConfigError("constant medium: H and drift must match the dimension of sigma");
  if (antisymmetry_defect(H_) > 1e-12) throw ConfigError("stream matrix H must be antisymmetric");
  (void)control_constants();
}

void ConstantField::evaluate(double, const Vec&, PointEval& out) const {
  out.resize(dim());
  out.sigma = sigma_;
  out.a = sigma_ * sigma_.transpose();
  out.H = H_;
}

void ConstantField::evaluate_control(const Vec&, ControlEval& out) const {
  out.resize(dim());
  out.sigma_tilde = sigma_;
  out.a_tilde = sigma_ * sigma_.transpose();
}

CellGeometry ConstantField::geometry() const { return {std::vector<double>(dim() + 1, kTwoPi)}; }

double ConstantField::bound() const {
  const Mat a = sigma_ * sigma_.transpose();
  double k = std::max({sigma_.cwiseAbs().maxCoeff(), a.cwiseAbs().maxCoeff(), H_.cwiseAbs().maxCoeff()});
  if (bias_.size() > 0) k = std::max(k, bias_.cwiseAbs().maxCoeff());
  return k;
}

ControlConstants ConstantField::control_constants() const {
  ControlConstants c;
  if (H_.cwiseAbs().maxCoeff() == 0.0) return c;
  const Mat a = sigma_ * sigma_.transpose();
  const Eigen::SelfAdjointEigenSolver<Mat> eig(a);
  if (eig.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff()))
    throw ConfigError("constant medium: nonzero H requires a nondegenerate sigma");
  const Mat inv_sqrt = eig.operatorInverseSqrt();
  const Mat rel = inv_sqrt * matrix_abs(H_) * inv_sqrt;
  c.C1_H = Eigen::SelfAdjointEigenSolver<Mat>(rel, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  return c;
}

MediumInstance make_constant_medium(const Mat& sigma, const Mat& H, const Vec& drift_bias) {
  return MediumInstance(std::make_shared<ConstantField>(sigma, H, drift_bias), "constant");
}

MediumInstance make_constant_medium(const Mat& sigma) {
  const auto d = sigma.rows();
  return make_constant_medium(sigma, Mat::Zero(d, d), Vec::Zero(d));
}

// ---------------------------------------------------------------------------

Periodic1DField::Periodic1DField(double a0, double a1, double v1) : a0_(a0), a1_(a1), v1_(v1) {
  if (!(a0_ - std::abs(a1_) > 0.0)) throw ConfigError("periodic1d medium needs a0 > |a1|");
  if (!std::isfinite(v1_)) throw ConfigError("periodic1d medium needs a finite v1");
}

void Periodic1DField::evaluate(double, const Vec& x, PointEval& out) const {
  out.resize(1);
  const double a = a0_ + a1_ * std::sin(x(0));
  out.a(0, 0) = a;
  out.sigma(0, 0) = std::sqrt(a);
  out.grad_a[0](0, 0) = a1_ * std::cos(x(0));
  out.V = v1_ * std::cos(x(0));
  out.grad_V(0) = -v1_ * std::sin(x(0));
}

void Periodic1DField::evaluate_control(const Vec& x, ControlEval& out) const {
  out.resize(1);
  const double a = a0_ + a1_ * std::sin(x(0));
  out.a_tilde(0, 0) = a;
  out.sigma_tilde(0, 0) = std::sqrt(a);
  out.grad_a_tilde[0](0, 0) = a1_ * std::cos(x(0));
}

double Periodic1DField::potential(const Vec& x) const { return v1_ * std::cos(x(0)); }

CellGeometry Periodic1DField::geometry() const { return {std::vector<double>{kTwoPi, kTwoPi}}; }

double Periodic1DField::bound() const {
  const double amax = a0_ + std::abs(a1_);
  return std::max({std::sqrt(amax), amax, 0.5 * std::abs(a1_) + amax * std::abs(v1_), std::abs(v1_)});
}

ControlConstants Periodic1DField::control_constants() const { return {}; }

MediumInstance make_periodic1d_medium(double a0, double a1, double v1) {
  return MediumInstance(std::make_shared<Periodic1DField>(a0, a1, v1), "periodic1d");
}

// ---------------------------------------------------------------------------

Elliptic2DField::Elliptic2DField(double kappa, double eta) : kappa_(kappa), eta_(eta) {
  if (!(kappa_ >= 0.0 && kappa_ < 1.0)) throw ConfigError("elliptic2d medium needs kappa in [0, 1)");
  if (!(eta_ >= 0.0) || !std::isfinite(eta_)) throw ConfigError("elliptic2d medium needs a finite eta >= 0");
}

void Elliptic2DField::evaluate(double, const Vec& x, PointEval& out) const {
  out.resize(2);
  const double cx = std::cos(x(0)), sx = std::sin(x(0));
  const double cy = std::cos(x(1)), sy = std::sin(x(1));
  const double s = 1.0 + kappa_ * cx * cy;
  const Mat I = Mat::Identity(2, 2);
  const Mat J = symplectic();
  out.sigma = s * I;
  out.a = s * s * I;
  out.grad_a[0] = -2.0 * s * kappa_ * sx * cy * I;
  out.grad_a[1] = -2.0 * s * kappa_ * cx * sy * I;
  out.H = eta_ * sx * sy * J;
  out.grad_H[0] = eta_ * cx * sy * J;
  out.grad_H[1] = eta_ * sx * cy * J;
}

void Elliptic2DField::evaluate_control(const Vec&, ControlEval& out) const {
  out.resize(2);
  out.sigma_tilde = Mat::Identity(2, 2);
  out.a_tilde = Mat::Identity(2, 2);
}

CellGeometry Elliptic2DField::geometry() const { return {std::vector<double>{kTwoPi, kTwoPi, kTwoPi}}; }

double Elliptic2DField::bound() const {
  const double s = 1.0 + kappa_;
  return std::max({s * s, eta_, s * kappa_ + eta_});
}

ControlConstants Elliptic2DField::control_constants() const {
  ControlConstants c;
  c.m = (1.0 - kappa_) * (1.0 - kappa_);
  c.M = (1.0 + kappa_) * (1.0 + kappa_);
  c.C1_H = eta_;
  return c;
}

MediumInstance make_elliptic2d_medium(double kappa, double eta) {
  return MediumInstance(std::make_shared<Elliptic2DField>(kappa, eta), "elliptic2d");
}

const ChessboardField* as_chessboard(const MediumInstance& medium) noexcept {
  return dynamic_cast<const ChessboardField*>(medium.field_ptr().get());
}

}  // namespace homlab
