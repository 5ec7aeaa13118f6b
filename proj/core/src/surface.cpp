#include "rolljoint/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rolljoint/errors.hpp"

namespace rolljoint {

namespace {

double polyval(const std::vector<double>& c, double s) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc;
}

// Tangent angle relative to the reference frame: integral of u from 0 to s.
double polyint(const std::vector<double>& c, double s) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * s + c[k] / static_cast<double>(k + 1);
  return acc * s;
}

}  // namespace

// Positions of the profile curve (relative to the reference frame) cached at
// nodes s = k h. Angles are closed form, so each RK4 step on the position
// equation p' = (cos theta, sin theta) is a Simpson rule step.
struct ContactSurface::ProfileGrid {
  double step = 0.0;
  long first = 0;  // node index of positions.front()
  std::vector<Vec2> positions;

  Vec2 tangent(const std::vector<double>& c, double s) const {
    const double th = polyint(c, s);
    return {std::cos(th), std::sin(th)};
  }

  Vec2 integrate(const std::vector<double>& c, double s0, const Vec2& p0, double s1) const {
    const double h = s1 - s0;
    const Vec2 k1 = tangent(c, s0);
    const Vec2 k23 = tangent(c, s0 + 0.5 * h);
    const Vec2 k4 = tangent(c, s1);
    return p0 + h / 6.0 * (k1 + 4.0 * k23 + k4);
  }

  Vec2 position(const std::vector<double>& c, double s) const {
    // Start from the node between 0 and s so that the answer does not depend
    // on which side of a node s falls for s near zero.
    long k = static_cast<long>(s >= 0.0 ? std::floor(s / step) : std::ceil(s / step));
    k = std::clamp(k, first, first + static_cast<long>(positions.size()) - 1);
    const double sk = static_cast<double>(k) * step;
    return integrate(c, sk, positions[static_cast<std::size_t>(k - first)], s);
  }
};

ContactSurface ContactSurface::circular_arc(const CircularArc& arc, Interval domain) {
  if (!(domain.hi > domain.lo)) throw DomainError("surface domain must satisfy s_max > s_min");
  if (!(arc.radius > 0.0)) throw DomainError("circular arc radius must be positive");
  if (arc.orientation_sign != 1 && arc.orientation_sign != -1)
    throw DomainError("circular arc orientation_sign must be +1 or -1");
  return {arc, domain};
}

ContactSurface ContactSurface::curvature_profile(CurvatureProfile profile, Interval domain) {
  if (!(domain.hi > domain.lo)) throw DomainError("surface domain must satisfy s_max > s_min");

  auto grid = std::make_shared<ProfileGrid>();
  grid->step = domain.width() / 1000.0;
  const double lo = std::min(domain.lo, 0.0);
  const double hi = std::max(domain.hi, 0.0);
  grid->first = static_cast<long>(std::floor(lo / grid->step));
  const long last = static_cast<long>(std::ceil(hi / grid->step));
  grid->positions.assign(static_cast<std::size_t>(last - grid->first + 1), Vec2::Zero());

  const auto& c = profile.curvature_coeffs;
  const auto idx = [&](long k) { return static_cast<std::size_t>(k - grid->first); };
  for (long k = 1; k <= last; ++k) {
    grid->positions[idx(k)] = grid->integrate(c, (k - 1) * grid->step, grid->positions[idx(k - 1)],
                                              k * grid->step);
  }
  for (long k = -1; k >= grid->first; --k) {
    grid->positions[idx(k)] = grid->integrate(c, (k + 1) * grid->step, grid->positions[idx(k + 1)],
                                              k * grid->step);
  }
  return {Profile{std::move(profile), std::move(grid)}, domain};
}

ContactSurface::Kind ContactSurface::kind() const {
  return std::holds_alternative<CircularArc>(shape_) ? Kind::circular_arc : Kind::curvature_profile;
}

const CurvatureProfile* ContactSurface::as_curvature_profile() const {
  const auto* p = std::get_if<Profile>(&shape_);
  return p ? &p->profile : nullptr;
}

void ContactSurface::check_domain(double s) const {
  const double slack = 1e-9 * domain_.width();
  if (!domain_.contains(s, slack) || !std::isfinite(s)) {
    std::ostringstream os;
    os << "contact parameter s = " << s << " outside surface domain [" << domain_.lo << ", "
       << domain_.hi << "]";
    throw DomainError(os.str());
  }
}

Pose2 ContactSurface::frame_at(double s) const {
  check_domain(s);
  if (const auto* arc = std::get_if<CircularArc>(&shape_)) {
    const double sign = arc->orientation_sign;
    const double phi = arc->reference_angle + sign * s / arc->radius;
    const Vec2 point = arc->center + arc->radius * Vec2(std::cos(phi), std::sin(phi));
    return {phi + sign * 0.5 * std::numbers::pi, point};
  }
  const auto& p = std::get<Profile>(shape_);
  const auto& c = p.profile.curvature_coeffs;
  const Pose2 local(polyint(c, s), p.grid->position(c, s));
  return p.profile.reference_frame * local;
}

double ContactSurface::curvature_at(double s) const {
  check_domain(s);
  if (const auto* arc = std::get_if<CircularArc>(&shape_)) return arc->orientation_sign / arc->radius;
  return polyval(std::get<Profile>(shape_).profile.curvature_coeffs, s);
}

Twist2 ContactSurface::twist_at(double s) const { return {curvature_at(s), Vec2::UnitX()}; }

}  // namespace rolljoint
