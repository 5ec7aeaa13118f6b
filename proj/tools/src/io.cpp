#include "rolljoint/cli/io.hpp"

#include <fstream>
#include <string>

#include "rolljoint/errors.hpp"

namespace rolljoint::cli {
namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ParseError(where + ": " + msg);
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

Vec2 vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected [x, y]");
  return {number(j[0], where + "/0"), number(j[1], where + "/1")};
}

TendonPair pair(const json& j, const std::string& where) {
  const Vec2 v = vec2(j, where);
  return {v.x(), v.y()};
}

Pose2 pose(const json& j, const std::string& where) {
  return Pose2(number(require(j, "theta", where), where + "/theta"),
               Vec2(number(require(j, "x", where), where + "/x"), number(require(j, "y", where), where + "/y")));
}

json pose_json(const Pose2& T) {
  return {{"x", T.translation().x()}, {"y", T.translation().y()}, {"theta", T.angle()}};
}

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

ContactSurface surface(const json& j, const std::string& where) {
  const json& type = require(j, "type", where);
  const Vec2 d = vec2(require(j, "domain", where), where + "/domain");
  const Interval domain{d.x(), d.y()};
  try {
    if (type == "circular_arc") {
      CircularArc arc;
      arc.center = vec2(require(j, "center", where), where + "/center");
      arc.radius = number(require(j, "radius", where), where + "/radius");
      arc.reference_angle = number(require(j, "reference_angle", where), where + "/reference_angle");
      const double sign = number(require(j, "orientation_sign", where), where + "/orientation_sign");
      if (sign != 1.0 && sign != -1.0) fail(where + "/orientation_sign", "must be +1 or -1");
      arc.orientation_sign = static_cast<int>(sign);
      return ContactSurface::circular_arc(arc, domain);
    }
    if (type == "curvature_profile") {
      CurvatureProfile profile;
      profile.reference_frame = pose(require(j, "reference_frame", where), where + "/reference_frame");
      const json& coeffs = require(j, "curvature_coeffs", where);
      if (!coeffs.is_array() || coeffs.empty()) fail(where + "/curvature_coeffs", "expected a non-empty array");
      for (std::size_t k = 0; k < coeffs.size(); ++k)
        profile.curvature_coeffs.push_back(number(coeffs[k], where + "/curvature_coeffs/" + std::to_string(k)));
      return ContactSurface::curvature_profile(std::move(profile), domain);
    }
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
  fail(where + "/type", "unknown surface type");
}

json surface_json(const ContactSurface& s) {
  json j;
  if (const auto* arc = s.as_circular_arc()) {
    j["type"] = "circular_arc";
    j["center"] = vec_json(arc->center);
    j["radius"] = arc->radius;
    j["reference_angle"] = arc->reference_angle;
    j["orientation_sign"] = arc->orientation_sign;
  } else {
    const auto* p = s.as_curvature_profile();
    j["type"] = "curvature_profile";
    j["reference_frame"] = pose_json(p->reference_frame);
    j["curvature_coeffs"] = p->curvature_coeffs;
  }
  j["domain"] = json::array({s.domain().lo, s.domain().hi});
  return j;
}

void check_units(const json& j, const std::string& where) {
  auto it = j.find("units");
  if (it == j.end()) return;
  if (it->contains("length") && (*it)["length"] != "mm") fail(where + "/units/length", "only \"mm\" is supported");
  if (it->contains("force") && (*it)["force"] != "N") fail(where + "/units/force", "only \"N\" is supported");
}

ExternalLoad load(const json& j, const std::string& where, std::size_t link_count) {
  const json& variant = require(j, "variant", where);
  const double target = number(require(j, "target_link", where), where + "/target_link");
  if (target < 1 || target > static_cast<double>(link_count) || target != static_cast<std::size_t>(target))
    fail(where + "/target_link", "must be a link number in 1.." + std::to_string(link_count));
  ExternalLoad out;
  out.link = static_cast<std::size_t>(target) - 1;
  auto wrench = [&] {
    const json& w = require(j, "wrench", where);
    return Wrench2{number(w.value("m", json(0.0)), where + "/wrench/m"),
                   vec2(require(w, "f", where + "/wrench"), where + "/wrench/f")};
  };
  if (variant == "constant_body") {
    out.model = ConstantBody{wrench()};
  } else if (variant == "constant_workspace") {
    ConstantWorkspace cw{wrench(), Vec2::Zero()};
    if (j.contains("attach")) cw.attach = vec2(j["attach"], where + "/attach");
    out.model = cw;
  } else if (variant == "linear_spring") {
    const double k = number(require(j, "stiffness", where), where + "/stiffness");
    if (k < 0) fail(where + "/stiffness", "must be non-negative");
    out.model = LinearSpring{k, vec2(require(j, "anchor", where), where + "/anchor")};
  } else {
    fail(where + "/variant", "unknown load variant");
  }
  return out;
}

void solver_overrides(const json& j, const std::string& where, SolverOptions& o) {
  if (j.contains("tol")) o.tol_residual = number(j["tol"], where + "/tol");
  if (j.contains("max_iters")) o.max_iters = static_cast<int>(number(j["max_iters"], where + "/max_iters"));
  if (j.contains("line_search")) o.line_search = j["line_search"].get<bool>();
  if (j.contains("backtrack_factor")) o.backtrack_factor = number(j["backtrack_factor"], where + "/backtrack_factor");
  if (j.contains("max_backtracks"))
    o.max_backtracks = static_cast<int>(number(j["max_backtracks"], where + "/max_backtracks"));
}

void displacement_overrides(const json& j, const std::string& where, DisplacementOptions& o) {
  if (j.contains("alpha")) o.alpha = number(j["alpha"], where + "/alpha");
  if (j.contains("grad_tol")) o.grad_tol = number(j["grad_tol"], where + "/grad_tol");
  if (j.contains("max_outer_iters"))
    o.max_outer_iters = static_cast<int>(number(j["max_outer_iters"], where + "/max_outer_iters"));
  if (j.contains("tension_floor")) o.tension_floor = number(j["tension_floor"], where + "/tension_floor");
  if (j.contains("normalized_min_tension"))
    o.normalized_min_tension = number(j["normalized_min_tension"], where + "/normalized_min_tension");
}

TendonPair tensions(const json& a, const std::string& where, const char* key) {
  TendonPair tau;
  if (a.contains(key)) {
    tau = pair(a[key], where + "/" + key);
  } else {
    const std::string gkey = std::string(key) + "_gram";
    if (!a.contains(gkey)) fail(where, std::string("missing field '") + key + "'");
    const TendonPair g = pair(a[gkey], where + "/" + gkey);
    tau = {gram_force_to_newton(g[0]), gram_force_to_newton(g[1])};
  }
  if (!(tau[0] > 0 && tau[1] > 0)) fail(where + "/" + key, "tensions must be positive");
  return tau;
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

MechanismDesign parse_design(const json& j) {
  check_units(j, "");
  const json& links = require(j, "links", "");
  if (!links.is_array()) fail("/links", "expected an array");
  std::vector<LinkDesign> out;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string where = "/links/" + std::to_string(i);
    const json& l = links[i];
    LinkDesign d;
    d.name = l.value("name", "link" + std::to_string(i + 1));
    if (l.contains("parent_surface") && !l["parent_surface"].is_null())
      d.parent_surface = surface(l["parent_surface"], where + "/parent_surface");
    if (l.contains("child_surface") && !l["child_surface"].is_null())
      d.child_surface = surface(l["child_surface"], where + "/child_surface");
    d.parent_entry = {vec2(require(l, "p_l", where), where + "/p_l"), vec2(require(l, "p_r", where), where + "/p_r")};
    d.child_entry = {vec2(require(l, "c_l", where), where + "/c_l"), vec2(require(l, "c_r", where), where + "/c_r")};
    out.push_back(std::move(d));
  }
  Pose2 base = Pose2::identity();
  if (j.contains("base_pose")) base = pose(j["base_pose"], "/base_pose");
  try {
    return MechanismDesign(std::move(out), base);
  } catch (const Error& e) {
    throw ParseError(std::string("design: ") + e.what());
  }
}

MechanismDesign load_design(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    return parse_design(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + e.what());
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json design_to_json(const MechanismDesign& design) {
  json j;
  j["version"] = 1;
  j["units"] = {{"length", "mm"}, {"force", "N"}};
  j["base_pose"] = pose_json(design.base_pose());
  j["links"] = json::array();
  for (const LinkDesign& l : design.links()) {
    json o;
    o["name"] = l.name;
    if (l.parent_surface) o["parent_surface"] = surface_json(*l.parent_surface);
    if (l.child_surface) o["child_surface"] = surface_json(*l.child_surface);
    o["p_l"] = vec_json(l.p(Side::left));
    o["p_r"] = vec_json(l.p(Side::right));
    o["c_l"] = vec_json(l.c(Side::left));
    o["c_r"] = vec_json(l.c(Side::right));
    j["links"].push_back(o);
  }
  return j;
}

Scenario parse_scenario(const json& j, std::size_t link_count) {
  check_units(j, "");
  Scenario sc;
  const json& a = require(j, "actuation", "");
  const json& mode = require(a, "mode", "/actuation");
  if (mode == "tension") {
    sc.mode = ActuationMode::tension;
    sc.tension = tensions(a, "/actuation", "tau");
  } else if (mode == "displacement") {
    sc.mode = ActuationMode::displacement;
    sc.lengths = pair(require(a, "lengths", "/actuation"), "/actuation/lengths");
    if (!(sc.lengths[0] > 0 && sc.lengths[1] > 0)) fail("/actuation/lengths", "lengths must be positive");
    if (a.contains("tau_init") || a.contains("tau_init_gram")) sc.tension_init = tensions(a, "/actuation", "tau_init");
  } else {
    fail("/actuation/mode", "expected \"tension\" or \"displacement\"");
  }
  if (j.contains("loads")) {
    const json& loads = j["loads"];
    if (!loads.is_array()) fail("/loads", "expected an array");
    for (std::size_t i = 0; i < loads.size(); ++i)
      sc.loads.push_back(load(loads[i], "/loads/" + std::to_string(i), link_count));
  }
  if (j.contains("solver")) solver_overrides(j["solver"], "/solver", sc.solver);
  if (j.contains("displacement")) displacement_overrides(j["displacement"], "/displacement", sc.displacement);
  sc.displacement.inner = sc.solver;
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path, std::size_t link_count) {
  const json j = read_json(path);
  try {
    return parse_scenario(j, link_count);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + e.what());
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace rolljoint::cli
