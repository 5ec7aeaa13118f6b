#include "rolljoint/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "rolljoint/errors.hpp"

namespace rolljoint::cli {
namespace {

constexpr double kArrowScale = 10.0;  // mm per N

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  return os;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string svg_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

// Outline of a link: samples of its contact surfaces plus entry points, ordered by angle about their centroid.
std::vector<Vec2> outline(const LinkDesign& link) {
  std::vector<Vec2> pts;
  for (const auto* surf : {&link.parent_surface, &link.child_surface}) {
    if (!*surf) continue;
    const Interval d = (*surf)->domain();
    for (int i = 0; i <= 24; ++i) pts.push_back((*surf)->frame_at(d.lo + d.width() * i / 24.0).translation());
  }
  for (Side j : kSides) {
    pts.push_back(link.p(j));
    pts.push_back(link.c(j));
  }
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vec2& a, const Vec2& b) {
    return std::atan2(a.y() - centroid.y(), a.x() - centroid.x()) < std::atan2(b.y() - centroid.y(), b.x() - centroid.x());
  });
  return pts;
}

struct Arrow {
  Vec2 from, to;
};

std::vector<Arrow> load_arrows(const ExternalLoad& load, const Pose2& T, std::vector<std::pair<Vec2, Vec2>>& springs) {
  std::vector<Arrow> out;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ConstantWorkspace>) {
          const Vec2 at = T.apply(m.attach);
          if (m.wrench.f.norm() > 0) out.push_back({at, at + kArrowScale * m.wrench.f});
        } else if constexpr (std::is_same_v<M, ConstantBody>) {
          const Vec2 f = T.rotation() * m.wrench.f;
          if (f.norm() > 0) out.push_back({T.translation(), T.translation() + kArrowScale * f});
        } else {
          springs.emplace_back(T.translation(), m.anchor);
        }
      },
      load.model);
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

void write_solution_csv(std::ostream& os, const MechanismDesign& design, const Configuration& config) {
  os << "link_index,x_mm,y_mm,theta_rad,s_mm,f_x_N,f_y_N,l_left_mm,l_right_mm\n";
  for (std::size_t i = 0; i < design.link_count(); ++i) {
    const Pose2& T = config.poses[i];
    os << i + 1 << ',' << format_number(T.translation().x()) << ',' << format_number(T.translation().y()) << ','
       << format_number(T.angle()) << ',';
    if (i == 0) {
      os << ",,";
    } else {
      os << format_number(config.s[i - 1]) << ',' << format_number(config.f[i - 1].x()) << ','
         << format_number(config.f[i - 1].y());
    }
    os << ",,\n";
  }
  const TendonPair l = tendon_lengths(design, config);
  os << "summary,,,,,,," << format_number(l[0]) << ',' << format_number(l[1]) << '\n';
}

void write_solution_csv(const std::filesystem::path& path, const MechanismDesign& design, const Configuration& config) {
  auto os = open_out(path);
  write_solution_csv(os, design, config);
}

std::vector<Pose2> read_solution_poses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::string line;
  std::getline(in, line);
  std::vector<Pose2> poses;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    if (cells.size() < 4 || cells[0] == "summary") continue;
    try {
      poses.emplace_back(std::stod(cells[3]), Vec2(std::stod(cells[1]), std::stod(cells[2])));
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": malformed row '" + line + "'");
    }
  }
  return poses;
}

nlohmann::json report_json(const SolveReport& report) {
  nlohmann::json j;
  j["converged"] = report.converged;
  j["iterations"] = report.iterations;
  j["final_residual_norm"] = round12(report.final_residual_norm);
  j["backtrack_count"] = report.backtrack_count;
  j["clamped_joints"] = nlohmann::json::array();
  for (std::size_t k : report.clamped_joints) j["clamped_joints"].push_back(k + 1);
  j["residual_history"] = nlohmann::json::array();
  for (double r : report.residual_history) j["residual_history"].push_back(round12(r));
  j["block_inversions"] = report.block_inversions;
  j["boundary_solves"] = report.boundary_solves;
  return j;
}

nlohmann::json displacement_report_json(const DisplacementReport& report, const TendonPair& target) {
  nlohmann::json j;
  j["converged"] = report.converged;
  j["outer_iterations"] = report.outer_iterations;
  j["floor_active"] = report.floor_active;
  j["objective"] = round12(report.objective);
  j["gradient_norm"] = round12(report.gradient_norm);
  j["rejected_steps"] = report.rejected_steps;
  j["target_lengths"] = {round12(target[0]), round12(target[1])};
  j["achieved_lengths"] = {round12(report.achieved_lengths[0]), round12(report.achieved_lengths[1])};
  j["objective_history"] = nlohmann::json::array();
  for (double v : report.objective_history) j["objective_history"].push_back(round12(v));
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

void write_svg(const std::filesystem::path& path, const MechanismDesign& design, std::span<const SvgFrame> frames) {
  std::vector<std::vector<Vec2>> outlines;
  for (const auto& l : design.links()) outlines.push_back(outline(l));

  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  auto grow = [&](const Vec2& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  };
  std::ostringstream body;
  for (const auto& frame : frames) {
    body << "<g opacity=\"" << svg_num(frame.opacity) << "\">\n";
    for (std::size_t i = 0; i < design.link_count(); ++i) {
      body << "<polygon class=\"link\" points=\"";
      for (const Vec2& p : outlines[i]) {
        const Vec2 w = frame.poses[i].apply(p);
        grow(w);
        body << svg_num(w.x()) << ',' << svg_num(-w.y()) << ' ';
      }
      body << "\"/>\n";
    }
    for (Side j : kSides) {
      body << "<polyline class=\"tendon " << (j == Side::left ? "left" : "right") << "\" points=\"";
      for (std::size_t i = 0; i < design.link_count(); ++i) {
        for (const Vec2& p : {design.link(i).p(j), design.link(i).c(j)}) {
          const Vec2 w = frame.poses[i].apply(p);
          body << svg_num(w.x()) << ',' << svg_num(-w.y()) << ' ';
        }
      }
      body << "\"/>\n";
    }
    std::vector<std::pair<Vec2, Vec2>> springs;
    for (const auto& load : frame.loads) {
      for (const Arrow& a : load_arrows(load, frame.poses[load.link], springs)) {
        grow(a.to);
        body << "<line class=\"load\" x1=\"" << svg_num(a.from.x()) << "\" y1=\"" << svg_num(-a.from.y())
             << "\" x2=\"" << svg_num(a.to.x()) << "\" y2=\"" << svg_num(-a.to.y())
             << "\" marker-end=\"url(#arrow)\"/>\n";
      }
    }
    for (const auto& [a, b] : springs) {
      grow(b);
      body << "<line class=\"spring\" x1=\"" << svg_num(a.x()) << "\" y1=\"" << svg_num(-a.y()) << "\" x2=\""
           << svg_num(b.x()) << "\" y2=\"" << svg_num(-b.y()) << "\"/>\n";
    }
    body << "</g>\n";
  }
  const double margin = 10.0;
  lo -= Vec2::Constant(margin);
  hi += Vec2::Constant(margin);

  auto os = open_out(path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << svg_num(lo.x()) << ' ' << svg_num(-hi.y()) << ' '
     << svg_num(hi.x() - lo.x()) << ' ' << svg_num(hi.y() - lo.y()) << "\" width=\""
     << svg_num(4 * (hi.x() - lo.x())) << "\" height=\"" << svg_num(4 * (hi.y() - lo.y())) << "\">\n"
     << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"4\" "
        "markerHeight=\"4\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#c0392b\"/></marker></defs>\n"
     << "<style>.link{fill:#d6dde5;stroke:#34495e;stroke-width:0.4}"
        ".tendon{fill:none;stroke-width:0.5}.left{stroke:#2471a3}.right{stroke:#ca6f1e}"
        ".load{stroke:#c0392b;stroke-width:0.8}.spring{stroke:#7d3c98;stroke-width:0.5;stroke-dasharray:2 1}</style>\n"
     << body.str() << "</svg>\n";
}

}  // namespace rolljoint::cli
