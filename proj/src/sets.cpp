#include "bregkit/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bregkit/rng.hpp"

namespace bregkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

struct ConvexSet::Impl {
  Kind kind;
  int dim = 0;
  Vec a;       // halfspace / hyperplane normal
  double b = 0.0;
  Vec lo, hi;  // box
  Vec c;       // ball center
  double r = 0.0;
  double s = 0.0;  // simplex scale
  std::vector<ConvexSet> members;
  Vec witness;
};

ConvexSet::ConvexSet(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

ConvexSet ConvexSet::halfspace(Vec normal, double offset) {
  check_finite(normal, "halfspace");
  if (normal.size() < 1 || normal.norm() == 0.0)
    throw ArgumentError("halfspace: normal must be nonzero");
  if (!std::isfinite(offset)) throw ArgumentError("halfspace: offset must be finite");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Halfspace;
  impl->dim = static_cast<int>(normal.size());
  impl->a = std::move(normal);
  impl->b = offset;
  impl->witness = impl->a * (impl->b - 1.0) / impl->a.squaredNorm();
  return ConvexSet(std::move(impl));
}

ConvexSet ConvexSet::hyperplane(Vec normal, double offset) {
  check_finite(normal, "hyperplane");
  if (normal.size() < 1 || normal.norm() == 0.0)
    throw ArgumentError("hyperplane: normal must be nonzero");
  if (!std::isfinite(offset)) throw ArgumentError("hyperplane: offset must be finite");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Hyperplane;
  impl->dim = static_cast<int>(normal.size());
  impl->a = std::move(normal);
  impl->b = offset;
  impl->witness = impl->a * impl->b / impl->a.squaredNorm();
  return ConvexSet(std::move(impl));
}

ConvexSet ConvexSet::box(Vec lo, Vec hi) {
  check_finite(lo, "box");
  check_finite(hi, "box");
  if (lo.size() < 1 || lo.size() != hi.size()) throw ArgumentError("box: lo/hi sizes must match");
  if ((lo.array() > hi.array()).any()) throw ArgumentError("box: needs lo <= hi componentwise");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Box;
  impl->dim = static_cast<int>(lo.size());
  impl->lo = std::move(lo);
  impl->hi = std::move(hi);
  impl->witness = 0.5 * (impl->lo + impl->hi);
  return ConvexSet(std::move(impl));
}

ConvexSet ConvexSet::ball(Vec center, double radius) {
  check_finite(center, "ball");
  if (center.size() < 1) throw ArgumentError("ball: empty center");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ArgumentError("ball: radius must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Ball;
  impl->dim = static_cast<int>(center.size());
  impl->c = std::move(center);
  impl->r = radius;
  impl->witness = impl->c;
  return ConvexSet(std::move(impl));
}

ConvexSet ConvexSet::simplex(int dim, double scale) {
  if (dim < 1) throw ArgumentError("simplex: dim must be >= 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ArgumentError("simplex: scale must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Simplex;
  impl->dim = dim;
  impl->s = scale;
  impl->witness = Vec::Constant(dim, scale / dim);
  return ConvexSet(std::move(impl));
}

namespace {

// Plain Dykstra projection onto an intersection, members projected in turn
// with correction terms. Converges to the Euclidean projection for closed
// convex members with a common point. The stopping rule watches the change
// in the corrections, not in x: the iterate itself can sit still for long
// stretches (a box correction pinning a corner, say) while the corrections
// keep draining, and a displacement-based rule would quit there with a
// feasible but wrong point.
Vec dykstra(const std::vector<ConvexSet>& members, const Vec& x0, int max_cycles, double tol) {
  const int m = static_cast<int>(members.size());
  Vec x = x0;
  std::vector<Vec> corr(m, Vec::Zero(x0.size()));
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    double shift = 0.0;
    for (int i = 0; i < m; ++i) {
      const Vec y = members[i].euclidean_project(x + corr[i]);
      const Vec next_corr = x + corr[i] - y;
      shift += (next_corr - corr[i]).squaredNorm();
      corr[i] = next_corr;
      x = y;
    }
    if (std::sqrt(shift) <= tol * (1.0 + x.norm())) break;
  }
  return x;
}

double max_violation(const std::vector<ConvexSet>& members, const Vec& x) {
  double v = -kInf;
  for (const auto& s : members) v = std::max(v, s.violation(x));
  return v;
}

}  // namespace

ConvexSet ConvexSet::intersection(std::vector<ConvexSet> members, std::optional<Vec> witness) {
  if (members.empty()) throw ArgumentError("intersection: needs at least one member");
  const int d = members.front().dim();
  for (const auto& s : members)
    if (s.dim() != d) throw ArgumentError("intersection: member dimensions disagree");

  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Intersection;
  impl->dim = d;
  impl->members = std::move(members);

  if (witness) {
    check_dim(*witness, d, "intersection witness");
    if (max_violation(impl->members, *witness) > kMembershipTol)
      throw ArgumentError("intersection: supplied witness is not in every member");
    impl->witness = *witness;
  } else {
    // Feasibility search: run Dykstra from each member's witness and keep
    // the first output that lands in all members.
    bool found = false;
    std::vector<Vec> starts;
    for (const auto& s : impl->members) starts.push_back(s.witness());
    starts.push_back(Vec::Zero(d));
    for (const auto& s0 : starts) {
      const Vec cand = dykstra(impl->members, s0, 20000, 1e-14);
      if (max_violation(impl->members, cand) <= kMembershipTol) {
        impl->witness = cand;
        found = true;
        break;
      }
    }
    if (!found)
      throw InfeasibleError("intersection: could not certify a common point; pass a witness");
  }
  return ConvexSet(std::move(impl));
}

ConvexSet::Kind ConvexSet::kind() const { return impl_->kind; }
int ConvexSet::dim() const { return impl_->dim; }
const Vec& ConvexSet::witness() const { return impl_->witness; }

double ConvexSet::violation(const Vec& x) const {
  check_dim(x, impl_->dim, "violation");
  check_finite(x, "violation");
  switch (impl_->kind) {
    case Kind::Halfspace:
      return impl_->a.dot(x) - impl_->b;
    case Kind::Hyperplane:
      return std::abs(impl_->a.dot(x) - impl_->b);
    case Kind::Box:
      return std::max((impl_->lo - x).maxCoeff(), (x - impl_->hi).maxCoeff());
    case Kind::Ball:
      return (x - impl_->c).norm() - impl_->r;
    case Kind::Simplex:
      return std::max(std::abs(x.sum() - impl_->s), -x.minCoeff());
    case Kind::Intersection:
      return max_violation(impl_->members, x);
  }
  return 0.0;
}

bool ConvexSet::contains(const Vec& x, double tol) const { return violation(x) <= tol; }

Vec project_simplex_euclidean(const Vec& v, double scale) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0, theta = 0.0;
  for (int j = 0; j < n; ++j) {
    cumsum += u[j];
    const double t = (cumsum - scale) / (j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

Vec ConvexSet::euclidean_project(const Vec& x) const {
  check_dim(x, impl_->dim, "euclidean_project");
  check_finite(x, "euclidean_project");
  switch (impl_->kind) {
    case Kind::Halfspace: {
      const double excess = impl_->a.dot(x) - impl_->b;
      if (excess <= 0.0) return x;
      return x - (excess / impl_->a.squaredNorm()) * impl_->a;
    }
    case Kind::Hyperplane:
      return x - ((impl_->a.dot(x) - impl_->b) / impl_->a.squaredNorm()) * impl_->a;
    case Kind::Box:
      return x.cwiseMax(impl_->lo).cwiseMin(impl_->hi);
    case Kind::Ball: {
      const Vec delta = x - impl_->c;
      const double nrm = delta.norm();
      if (nrm <= impl_->r) return x;
      return impl_->c + (impl_->r / nrm) * delta;
    }
    case Kind::Simplex:
      return project_simplex_euclidean(x, impl_->s);
    case Kind::Intersection: {
      const Vec z = dykstra(impl_->members, x, 20000, 1e-14);
      if (max_violation(impl_->members, z) > 1e-7)
        throw ConvergenceError("euclidean_project: Dykstra failed to reach the intersection");
      return z;
    }
  }
  return x;
}

std::vector<Vec> ConvexSet::vertices(int cap) const {
  std::vector<Vec> out;
  switch (impl_->kind) {
    case Kind::Box: {
      const int d = impl_->dim;
      if (d <= 20 && (1LL << d) <= cap) {
        for (long long mask = 0; mask < (1LL << d); ++mask) {
          Vec v(d);
          for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? impl_->hi[i] : impl_->lo[i];
          out.push_back(std::move(v));
        }
      } else {
        Rng rng(0x9e3779b9u ^ static_cast<std::uint64_t>(d));
        for (int k = 0; k < cap; ++k) {
          Vec v(d);
          for (int i = 0; i < d; ++i) v[i] = rng.uniform01() < 0.5 ? impl_->lo[i] : impl_->hi[i];
          out.push_back(std::move(v));
        }
      }
      break;
    }
    case Kind::Simplex:
      for (int i = 0; i < impl_->dim && static_cast<int>(out.size()) < cap; ++i) {
        Vec v = Vec::Zero(impl_->dim);
        v[i] = impl_->s;
        out.push_back(std::move(v));
      }
      break;
    case Kind::Intersection:
      for (const auto& m : impl_->members)
        for (const auto& v : m.vertices(cap))
          if (contains(v) && static_cast<int>(out.size()) < cap) out.push_back(v);
      break;
    default:
      break;
  }
  return out;
}

namespace {

Vec interior_sample(const ConvexSet& s, Rng& rng);

Vec boundary_sample(const ConvexSet& s, Rng& rng) {
  switch (s.kind()) {
    case ConvexSet::Kind::Halfspace: {
      const Vec& a = s.normal();
      const Vec y = interior_sample(s, rng);
      return y + ((s.offset() - a.dot(y)) / a.squaredNorm()) * a;
    }
    case ConvexSet::Kind::Hyperplane:
      return interior_sample(s, rng);
    case ConvexSet::Kind::Box: {
      Vec y = interior_sample(s, rng);
      const int i = rng.index(s.dim());
      y[i] = rng.uniform01() < 0.5 ? s.lower()[i] : s.upper()[i];
      return y;
    }
    case ConvexSet::Kind::Ball:
      return s.center() + s.radius() * rng.unit_vector(s.dim());
    case ConvexSet::Kind::Simplex: {
      if (s.dim() == 1) return Vec::Constant(1, s.scale());
      Vec y = interior_sample(s, rng);
      y[rng.index(s.dim())] = 0.0;
      const double total = y.sum();
      if (total <= 0.0) return s.witness();
      return y * (s.scale() / total);
    }
    case ConvexSet::Kind::Intersection: {
      // No repair step here: repairing would pull the point off the boundary.
      // Callers filter by membership.
      const auto& members = s.members();
      return boundary_sample(members[rng.index(static_cast<int>(members.size()))], rng);
    }
  }
  return s.witness();
}

Vec interior_sample(const ConvexSet& s, Rng& rng) {
  switch (s.kind()) {
    case ConvexSet::Kind::Halfspace: {
      const Vec& a = s.normal();
      const double span = 1.0 + s.witness().norm();
      Vec y = s.witness() + span * rng.gaussian(s.dim());
      const double excess = a.dot(y) - s.offset();
      if (excess > 0.0) y -= (2.0 * excess / a.squaredNorm()) * a;
      return y;
    }
    case ConvexSet::Kind::Hyperplane: {
      const Vec& a = s.normal();
      const double span = 1.0 + s.witness().norm();
      const Vec y = s.witness() + span * rng.gaussian(s.dim());
      return y - ((a.dot(y) - s.offset()) / a.squaredNorm()) * a;
    }
    case ConvexSet::Kind::Box: {
      Vec y(s.dim());
      for (int i = 0; i < s.dim(); ++i) y[i] = rng.uniform(s.lower()[i], s.upper()[i]);
      return y;
    }
    case ConvexSet::Kind::Ball: {
      const double rad = s.radius() * std::pow(rng.uniform01(), 1.0 / s.dim());
      return s.center() + rad * rng.unit_vector(s.dim());
    }
    case ConvexSet::Kind::Simplex: {
      Vec y(s.dim());
      for (int i = 0; i < s.dim(); ++i) y[i] = -std::log(1.0 - rng.uniform01());
      return y * (s.scale() / y.sum());
    }
    case ConvexSet::Kind::Intersection: {
      const auto& members = s.members();
      for (int attempt = 0; attempt < 16; ++attempt) {
        const auto& member = members[rng.index(static_cast<int>(members.size()))];
        const Vec repaired = s.euclidean_project(interior_sample(member, rng));
        if (s.contains(repaired)) return repaired;
      }
      return s.witness();
    }
  }
  return s.witness();
}

}  // namespace

std::vector<Vec> ConvexSet::probe_points(int n_interior, int n_boundary, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<Vec> probes = vertices();
  for (int k = 0; k < n_interior; ++k) {
    const Vec y = interior_sample(*this, rng);
    if (contains(y)) probes.push_back(y);
  }
  for (int k = 0; k < n_boundary; ++k) {
    const Vec y = boundary_sample(*this, rng);
    if (contains(y)) probes.push_back(y);
  }
  if (probes.empty()) probes.push_back(impl_->witness);
  return probes;
}

double ConvexSet::diameter_hint() const {
  switch (impl_->kind) {
    case Kind::Halfspace:
    case Kind::Hyperplane:
      return kInf;
    case Kind::Box:
      return (impl_->hi - impl_->lo).norm();
    case Kind::Ball:
      return 2.0 * impl_->r;
    case Kind::Simplex:
      return impl_->s * std::sqrt(2.0);
    case Kind::Intersection: {
      double d = kInf;
      for (const auto& m : impl_->members) d = std::min(d, m.diameter_hint());
      return d;
    }
  }
  return kInf;
}

std::string ConvexSet::describe() const {
  std::ostringstream os;
  switch (impl_->kind) {
    case Kind::Halfspace: os << "Halfspace(d=" << impl_->dim << ")"; break;
    case Kind::Hyperplane: os << "Hyperplane(d=" << impl_->dim << ")"; break;
    case Kind::Box: os << "Box(d=" << impl_->dim << ")"; break;
    case Kind::Ball: os << "Ball(d=" << impl_->dim << ", r=" << impl_->r << ")"; break;
    case Kind::Simplex: os << "Simplex(d=" << impl_->dim << ", s=" << impl_->s << ")"; break;
    case Kind::Intersection: os << "Intersection(" << impl_->members.size() << " members)"; break;
  }
  return os.str();
}

namespace {
[[noreturn]] void wrong_kind(const char* what) {
  throw ArgumentError(std::string(what) + ": accessor does not apply to this set kind");
}
}  // namespace

const Vec& ConvexSet::normal() const {
  if (impl_->kind != Kind::Halfspace && impl_->kind != Kind::Hyperplane) wrong_kind("normal");
  return impl_->a;
}
double ConvexSet::offset() const {
  if (impl_->kind != Kind::Halfspace && impl_->kind != Kind::Hyperplane) wrong_kind("offset");
  return impl_->b;
}
const Vec& ConvexSet::lower() const {
  if (impl_->kind != Kind::Box) wrong_kind("lower");
  return impl_->lo;
}
const Vec& ConvexSet::upper() const {
  if (impl_->kind != Kind::Box) wrong_kind("upper");
  return impl_->hi;
}
const Vec& ConvexSet::center() const {
  if (impl_->kind != Kind::Ball) wrong_kind("center");
  return impl_->c;
}
double ConvexSet::radius() const {
  if (impl_->kind != Kind::Ball) wrong_kind("radius");
  return impl_->r;
}
double ConvexSet::scale() const {
  if (impl_->kind != Kind::Simplex) wrong_kind("scale");
  return impl_->s;
}
const std::vector<ConvexSet>& ConvexSet::members() const {
  if (impl_->kind != Kind::Intersection) wrong_kind("members");
  return impl_->members;
}

}  // namespace bregkit
