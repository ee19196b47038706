#include "bregkit/operators.hpp"

#include <sstream>

#include "bregkit/geometry.hpp"

namespace bregkit {

struct QbneOperator::Impl {
  Kind kind;
  int dim = 0;
  std::optional<LegendreFunction> f;
  std::optional<ConvexSet> target;
  std::optional<Bifunction> g;
  double tol = 1e-10;
  std::vector<QbneOperator> factors;
  std::optional<Vec> fixed_point;
};

QbneOperator::QbneOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

QbneOperator QbneOperator::projection(LegendreFunction f, ConvexSet target) {
  if (f.dim() != target.dim()) throw ArgumentError("projection operator: dimension mismatch");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Projection;
  impl->dim = f.dim();
  impl->f = std::move(f);
  impl->target = std::move(target);
  impl->fixed_point = impl->target->witness();
  return QbneOperator(std::move(impl));
}

QbneOperator QbneOperator::resolvent(LegendreFunction f, Bifunction g, double tol) {
  if (f.dim() != g.dim()) throw ArgumentError("resolvent operator: dimension mismatch");
  if (!(tol > 0.0)) throw ArgumentError("resolvent operator: tol must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Resolvent;
  impl->dim = f.dim();
  impl->f = std::move(f);
  impl->g = std::move(g);
  impl->tol = tol;
  return QbneOperator(std::move(impl));
}

QbneOperator QbneOperator::composition(std::vector<QbneOperator> factors) {
  if (factors.empty()) throw ArgumentError("composition: needs at least one factor");
  const int d = factors.front().dim();
  for (const auto& t : factors)
    if (t.dim() != d) throw ArgumentError("composition: factor dimensions disagree");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Composition;
  impl->dim = d;
  impl->factors = std::move(factors);
  // A fixed point shared by every factor is fixed by the chain.
  for (const auto& t : impl->factors) {
    if (!t.known_fixed_point()) continue;
    const Vec& cand = *t.known_fixed_point();
    bool common = true;
    for (const auto& u : impl->factors) {
      if (u.known_fixed_point() && (*u.known_fixed_point() - cand).norm() > 1e-9) common = false;
    }
    if (common) {
      impl->fixed_point = cand;
      break;
    }
  }
  return QbneOperator(std::move(impl));
}

QbneOperator::Kind QbneOperator::kind() const { return impl_->kind; }
int QbneOperator::dim() const { return impl_->dim; }
const std::optional<Vec>& QbneOperator::known_fixed_point() const { return impl_->fixed_point; }

QbneOperator QbneOperator::with_fixed_point(Vec p) const {
  check_dim(p, impl_->dim, "with_fixed_point");
  auto impl = std::make_shared<Impl>(*impl_);
  impl->fixed_point = std::move(p);
  return QbneOperator(std::move(impl));
}

const ConvexSet& QbneOperator::target_set() const {
  if (impl_->kind != Kind::Projection) throw ArgumentError("target_set: not a projection operator");
  return *impl_->target;
}

const Bifunction& QbneOperator::bifunction() const {
  if (impl_->kind != Kind::Resolvent) throw ArgumentError("bifunction: not a resolvent operator");
  return *impl_->g;
}

const std::vector<QbneOperator>& QbneOperator::factors() const {
  if (impl_->kind != Kind::Composition) throw ArgumentError("factors: not a composition");
  return impl_->factors;
}

Vec QbneOperator::apply(const Vec& x) const {
  check_dim(x, impl_->dim, "QbneOperator::apply");
  check_finite(x, "QbneOperator::apply");
  switch (impl_->kind) {
    case Kind::Projection:
      return bregman_project(*impl_->f, *impl_->target, x);
    case Kind::Resolvent: {
      ResolveOptions opts;
      opts.tol = impl_->tol;
      return resolve(*impl_->f, *impl_->g, x, opts);
    }
    case Kind::Composition: {
      Vec y = x;
      for (const auto& t : impl_->factors) y = t.apply(y);
      return y;
    }
  }
  return x;
}

std::string QbneOperator::describe() const {
  std::ostringstream os;
  switch (impl_->kind) {
    case Kind::Projection:
      os << "Projection onto " << impl_->target->describe();
      break;
    case Kind::Resolvent:
      os << "Resolvent of " << impl_->g->describe();
      break;
    case Kind::Composition: {
      os << "Composition(";
      for (std::size_t i = 0; i < impl_->factors.size(); ++i)
        os << (i ? " -> " : "") << impl_->factors[i].describe();
      os << ")";
      break;
    }
  }
  return os.str();
}

const QbneOperator& cyclic_select(const std::vector<QbneOperator>& family, long n) {
  if (family.empty()) throw ArgumentError("cyclic_select: empty family");
  if (n < 1) throw ArgumentError("cyclic_select: iteration index is 1-based");
  return family[static_cast<std::size_t>((n - 1) % static_cast<long>(family.size()))];
}

double qbne_gap(const QbneOperator& T, const LegendreFunction& f, const Vec& p, const Vec& x) {
  const Vec tp = T.apply(p);
  if ((tp - p).norm() > 1e-7)
    throw ArgumentError("qbne_gap: p is not a fixed point of T");
  return bregman_distance(f, p, x) - bregman_distance(f, p, T.apply(x));
}

}  // namespace bregkit
