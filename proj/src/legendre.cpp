#include "bregkit/legendre.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <sstream>

namespace bregkit {

const char* to_string(LegendreKind k) {
  switch (k) {
    case LegendreKind::SquaredNorm: return "SquaredNorm";
    case LegendreKind::QuadraticForm: return "QuadraticForm";
    case LegendreKind::PNorm: return "PNorm";
    case LegendreKind::NegativeEntropy: return "NegativeEntropy";
  }
  return "?";
}

struct LegendreFunction::Impl {
  LegendreKind kind;
  int dim = 0;
  double p = 0.0;  // PNorm exponent
  double q = 0.0;  // conjugate exponent p/(p-1)
  Mat Q;
  Eigen::LLT<Mat> llt;
};

LegendreFunction::LegendreFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

LegendreFunction LegendreFunction::squared_norm(int dim) {
  if (dim < 1) throw ArgumentError("squared_norm: dim must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = LegendreKind::SquaredNorm;
  impl->dim = dim;
  return LegendreFunction(std::move(impl));
}

LegendreFunction LegendreFunction::quadratic_form(Mat q) {
  if (q.rows() < 1 || q.rows() != q.cols())
    throw ArgumentError("quadratic_form: matrix must be square and nonempty");
  if (!q.allFinite()) throw ArgumentError("quadratic_form: matrix entries must be finite");
  const double sym_gap = (q - q.transpose()).cwiseAbs().maxCoeff();
  if (sym_gap > 1e-12 * (1.0 + q.cwiseAbs().maxCoeff()))
    throw ArgumentError("quadratic_form: matrix must be symmetric");
  auto impl = std::make_shared<Impl>();
  impl->kind = LegendreKind::QuadraticForm;
  impl->dim = static_cast<int>(q.rows());
  impl->Q = 0.5 * (q + q.transpose());
  impl->llt.compute(impl->Q);
  if (impl->llt.info() != Eigen::Success)
    throw ArgumentError("quadratic_form: matrix must be positive definite");
  return LegendreFunction(std::move(impl));
}

LegendreFunction LegendreFunction::p_norm(int dim, double p) {
  if (dim < 1) throw ArgumentError("p_norm: dim must be >= 1");
  if (!(p > 1.0) || !std::isfinite(p)) throw ArgumentError("p_norm: exponent must satisfy p > 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = LegendreKind::PNorm;
  impl->dim = dim;
  impl->p = p;
  impl->q = p / (p - 1.0);
  return LegendreFunction(std::move(impl));
}

LegendreFunction LegendreFunction::negative_entropy(int dim) {
  if (dim < 1) throw ArgumentError("negative_entropy: dim must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = LegendreKind::NegativeEntropy;
  impl->dim = dim;
  return LegendreFunction(std::move(impl));
}

LegendreKind LegendreFunction::kind() const { return impl_->kind; }
int LegendreFunction::dim() const { return impl_->dim; }

double LegendreFunction::exponent() const {
  if (impl_->kind != LegendreKind::PNorm) throw ArgumentError("exponent: only PNorm has one");
  return impl_->p;
}

const Mat& LegendreFunction::matrix() const {
  if (impl_->kind != LegendreKind::QuadraticForm) throw ArgumentError("matrix: only QuadraticForm has one");
  return impl_->Q;
}

bool LegendreFunction::in_interior(const Vec& x) const {
  if (x.size() != impl_->dim || !x.allFinite()) return false;
  if (impl_->kind == LegendreKind::NegativeEntropy) return (x.array() > kEntropyFloor).all();
  return true;
}

bool LegendreFunction::in_closure(const Vec& x) const {
  if (x.size() != impl_->dim || !x.allFinite()) return false;
  if (impl_->kind == LegendreKind::NegativeEntropy) return (x.array() >= 0.0).all();
  return true;
}

namespace {

void require_interior(const LegendreFunction& f, const Vec& x, const char* what) {
  check_dim(x, f.dim(), what);
  check_finite(x, what);
  if (!f.in_interior(x))
    throw DomainError(std::string(what) + ": point outside the interior of dom " + to_string(f.kind()));
}

}  // namespace

double LegendreFunction::value(const Vec& x) const {
  require_interior(*this, x, "value");
  switch (impl_->kind) {
    case LegendreKind::SquaredNorm:
      return 0.5 * x.squaredNorm();
    case LegendreKind::QuadraticForm:
      return 0.5 * x.dot(impl_->Q * x);
    case LegendreKind::PNorm:
      return x.array().abs().pow(impl_->p).sum() / impl_->p;
    case LegendreKind::NegativeEntropy:
      return (x.array() * x.array().log()).sum();
  }
  return 0.0;
}

double LegendreFunction::value_closure(const Vec& x) const {
  if (impl_->kind != LegendreKind::NegativeEntropy) return value(x);
  check_dim(x, impl_->dim, "value_closure");
  check_finite(x, "value_closure");
  if ((x.array() < 0.0).any())
    throw DomainError("value_closure: negative coordinate outside dom NegativeEntropy");
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i)
    if (x[i] > kEntropyFloor) s += x[i] * std::log(x[i]);
  return s;
}

Vec LegendreFunction::gradient(const Vec& x) const {
  require_interior(*this, x, "gradient");
  switch (impl_->kind) {
    case LegendreKind::SquaredNorm:
      return x;
    case LegendreKind::QuadraticForm:
      return impl_->Q * x;
    case LegendreKind::PNorm: {
      Vec g(x.size());
      for (int i = 0; i < x.size(); ++i)
        g[i] = x[i] == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x[i]), impl_->p - 1.0), x[i]);
      return g;
    }
    case LegendreKind::NegativeEntropy:
      return (1.0 + x.array().log()).matrix();
  }
  return Vec();
}

double LegendreFunction::conj_value(const Vec& xstar) const {
  check_dim(xstar, impl_->dim, "conj_value");
  check_finite(xstar, "conj_value");
  switch (impl_->kind) {
    case LegendreKind::SquaredNorm:
      return 0.5 * xstar.squaredNorm();
    case LegendreKind::QuadraticForm:
      return 0.5 * xstar.dot(impl_->llt.solve(xstar));
    case LegendreKind::PNorm:
      return xstar.array().abs().pow(impl_->q).sum() / impl_->q;
    case LegendreKind::NegativeEntropy:
      return (xstar.array() - 1.0).exp().sum();
  }
  return 0.0;
}

Vec LegendreFunction::conj_gradient(const Vec& xstar) const {
  check_dim(xstar, impl_->dim, "conj_gradient");
  check_finite(xstar, "conj_gradient");
  switch (impl_->kind) {
    case LegendreKind::SquaredNorm:
      return xstar;
    case LegendreKind::QuadraticForm:
      return impl_->llt.solve(xstar);
    case LegendreKind::PNorm: {
      Vec g(xstar.size());
      for (int i = 0; i < xstar.size(); ++i)
        g[i] = xstar[i] == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(xstar[i]), impl_->q - 1.0), xstar[i]);
      return g;
    }
    case LegendreKind::NegativeEntropy:
      return (xstar.array() - 1.0).exp().matrix();
  }
  return Vec();
}

Vec LegendreFunction::conj_hessian_diag(const Vec& xstar) const {
  check_dim(xstar, impl_->dim, "conj_hessian_diag");
  check_finite(xstar, "conj_hessian_diag");
  switch (impl_->kind) {
    case LegendreKind::SquaredNorm:
      return Vec::Ones(impl_->dim);
    case LegendreKind::QuadraticForm:
      throw ArgumentError("conj_hessian_diag: QuadraticForm conjugate Hessian is not diagonal");
    case LegendreKind::PNorm: {
      Vec h(xstar.size());
      for (int i = 0; i < xstar.size(); ++i) {
        const double a = std::abs(xstar[i]);
        h[i] = (impl_->q - 1.0) * (a == 0.0 && impl_->q < 2.0
                                       ? std::numeric_limits<double>::infinity()
                                       : std::pow(a, impl_->q - 2.0));
      }
      return h;
    }
    case LegendreKind::NegativeEntropy:
      return (xstar.array() - 1.0).exp().matrix();
  }
  return Vec();
}

std::string LegendreFunction::describe() const {
  std::ostringstream os;
  os << to_string(impl_->kind) << "(d=" << impl_->dim;
  if (impl_->kind == LegendreKind::PNorm) os << ", p=" << impl_->p;
  os << ")";
  return os.str();
}

}  // namespace bregkit
