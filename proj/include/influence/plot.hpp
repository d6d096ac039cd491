#pragma once

// Hand-written SVG figures on a fixed 800 x 600 viewBox.
//
// Data are mapped into the plot area [60, 740] x [60, 540]; the vertical
// axis points up (larger data values have smaller SVG y). Coordinates are
// printed with two decimals so output is byte-stable.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "influence/errors.hpp"
#include "influence/poset.hpp"
#include "influence/scenario_io.hpp"

namespace influence {

namespace svg {

inline constexpr double kWidth = 800;
inline constexpr double kHeight = 600;
inline constexpr double kLeft = 60;
inline constexpr double kRight = 740;
inline constexpr double kTop = 60;
inline constexpr double kBottom = 540;

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

/// Affine map from a data box onto the plot area.
struct Frame {
  double x0, x1, y0, y1;
  double sx, sy, ox, oy;

  static Frame fit(double x0, double x1, double y0, double y1,
                   bool equal_aspect) {
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    Frame f{x0, x1, y0, y1, (kRight - kLeft) / (x1 - x0),
            (kBottom - kTop) / (y1 - y0), kLeft, kBottom};
    if (equal_aspect) {
      const double s = std::min(f.sx, f.sy);
      f.ox = kLeft + 0.5 * ((kRight - kLeft) - s * (x1 - x0));
      f.oy = kBottom - 0.5 * ((kBottom - kTop) - s * (y1 - y0));
      f.sx = f.sy = s;
    }
    return f;
  }

  double px(double x) const { return ox + (x - x0) * sx; }
  double py(double y) const { return oy - (y - y0) * sy; }
};

inline void open(std::ostream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" "
        "width=\"800\" height=\"600\">\n"
     << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
     << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-size=\"18\">"
     << title << "</text>\n";
}

inline void line(std::ostream& os, const Frame& f, double xa, double ya,
                 double xb, double yb, const char* cls, const char* style) {
  os << "<line class=\"" << cls << "\" x1=\"" << num(f.px(xa)) << "\" y1=\""
     << num(f.py(ya)) << "\" x2=\"" << num(f.px(xb)) << "\" y2=\""
     << num(f.py(yb)) << "\" " << style << "/>\n";
}

}  // namespace svg

/// Spacetime diagram of a poset with observer chains `p_name` (left) and
/// `q_name` (right). Every event projecting onto both observers is placed at
/// t = (vp + vq) / 2, x = (vp - vq) / 2 from its forward-projection
/// valuations. Observer worldlines are class "observer"; an event of any
/// other chain that influences P draws a half-unit "step-right" segment, one
/// that influences Q a "step-left" segment, and the influence itself is
/// class "influence". Observer-to-observer influences are class "relay".
inline std::string spacetime_svg(const Poset& poset, const std::string& p_name = "P",
                                 const std::string& q_name = "Q") {
  const auto cp = poset.find_chain(p_name);
  const auto cq = poset.find_chain(q_name);
  if (!cp || !cq) {
    throw DomainError("spacetime diagram needs observer chains " + p_name +
                      " and " + q_name);
  }
  struct Pt {
    double t, x;
  };
  std::vector<std::optional<Pt>> at(poset.event_count());
  double tmin = 1e300, tmax = -1e300, xmin = 1e300, xmax = -1e300;
  for (std::uint32_t i = 0; i < poset.event_count(); ++i) {
    const EventId e{i};
    auto vp = poset.forward_project(e, *cp);
    auto vq = poset.forward_project(e, *cq);
    if (!vp || !vq) continue;
    const double a = static_cast<double>(*poset.valuation(*vp));
    const double b = static_cast<double>(*poset.valuation(*vq));
    Pt p{0.5 * (a + b), 0.5 * (a - b)};
    at[i] = p;
    tmin = std::min(tmin, p.t);
    tmax = std::max(tmax, p.t + 0.5);
    xmin = std::min(xmin, p.x - 0.5);
    xmax = std::max(xmax, p.x + 0.5);
  }
  if (tmin > tmax) throw DomainError("no event projects onto both observers");
  const auto f = svg::Frame::fit(xmin, xmax, tmin, tmax, true);

  std::ostringstream os;
  svg::open(os, "Spacetime diagram");
  auto observer = [&](ChainId c, const char* cls) {
    os << "<polyline class=\"observer " << cls << "\" fill=\"none\" "
          "stroke=\"black\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (auto e : poset.chain(c).events()) {
      if (!at[e.value]) continue;
      os << (first ? "" : " ") << svg::num(f.px(at[e.value]->x)) << ','
         << svg::num(f.py(at[e.value]->t));
      first = false;
    }
    os << "\"/>\n";
  };
  observer(*cp, "observer-p");
  observer(*cq, "observer-q");

  auto is_observer = [&](EventId e) {
    const auto c = poset.chain_of(e);
    return c && (*c == *cp || *c == *cq);
  };
  std::vector<Edge> edges(poset.edges().begin(), poset.edges().end());
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  for (const auto& e : edges) {
    if (e.kind != EdgeKind::influence) continue;
    const auto& s = at[e.src.value];
    const auto& d = at[e.dst.value];
    if (!s || !d) continue;
    if (is_observer(e.src) && is_observer(e.dst)) {
      svg::line(os, f, s->x, s->t, d->x, d->t, "relay",
                "stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"");
      continue;
    }
    svg::line(os, f, s->x, s->t, d->x, d->t, "influence",
              "stroke=\"#3366cc\" stroke-width=\"1\"");
    if (!is_observer(e.src) && is_observer(e.dst)) {
      const bool right = *poset.chain_of(e.dst) == *cp;
      svg::line(os, f, s->x, s->t, s->x + (right ? 0.5 : -0.5), s->t + 0.5,
                right ? "step-right" : "step-left",
                "stroke=\"#cc3333\" stroke-width=\"3\"");
    }
  }
  for (std::uint32_t i = 0; i < poset.event_count(); ++i) {
    if (!at[i] || is_observer(EventId{i})) continue;
    os << "<circle class=\"event\" cx=\"" << svg::num(f.px(at[i]->x))
       << "\" cy=\"" << svg::num(f.py(at[i]->t)) << "\" r=\"4\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// beta_hat against proper time. With an analytic column the curve is drawn
/// as class "analytic" inside a +/-`band` polygon (class "band"); without
/// one, a horizontal "mean" line marks the average beta_hat.
inline std::string beta_svg(const std::vector<MeasuredRow>& rows,
                            double band = 0.02) {
  if (rows.empty()) throw DomainError("beta plot needs at least one window");
  double tmin = rows.front().tau_mid, tmax = tmin;
  for (const auto& r : rows) {
    tmin = std::min(tmin, r.tau_mid);
    tmax = std::max(tmax, r.tau_mid);
  }
  const auto f = svg::Frame::fit(tmin, tmax, -1.0, 1.0, false);
  std::ostringstream os;
  svg::open(os, "Coarse-grained velocity");

  svg::line(os, f, tmin, -1, tmax, -1, "axis", "stroke=\"black\"");
  svg::line(os, f, tmin, -1, tmin, 1, "axis", "stroke=\"black\"");
  svg::line(os, f, tmin, 0, tmax, 0, "zero", "stroke=\"#dddddd\"");
  for (double b : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    os << "<text class=\"tick\" x=\"" << svg::num(svg::kLeft - 8) << "\" y=\""
       << svg::num(f.py(b) + 4) << "\" text-anchor=\"end\" font-size=\"12\">"
       << svg::num(b) << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double t = tmin + (tmax - tmin) * i / 4.0;
    os << "<text class=\"tick\" x=\"" << svg::num(f.px(t)) << "\" y=\""
       << svg::num(svg::kBottom + 18) << "\" text-anchor=\"middle\" "
          "font-size=\"12\">" << svg::num(t) << "</text>\n";
  }
  os << "<text x=\"400\" y=\"585\" text-anchor=\"middle\" font-size=\"14\">"
        "proper time</text>\n"
     << "<text x=\"18\" y=\"300\" text-anchor=\"middle\" font-size=\"14\" "
        "transform=\"rotate(-90 18 300)\">beta</text>\n";

  const bool analytic =
      std::all_of(rows.begin(), rows.end(),
                  [](const MeasuredRow& r) { return r.beta_analytic.has_value(); });
  if (analytic) {
    os << "<polygon class=\"band\" fill=\"#cce0ff\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      os << (i ? " " : "") << svg::num(f.px(rows[i].tau_mid)) << ','
         << svg::num(f.py(*rows[i].beta_analytic + band));
    }
    for (std::size_t i = rows.size(); i-- > 0;) {
      os << ' ' << svg::num(f.px(rows[i].tau_mid)) << ','
         << svg::num(f.py(*rows[i].beta_analytic - band));
    }
    os << "\"/>\n<polyline class=\"analytic\" fill=\"none\" stroke=\"#3366cc\" "
          "stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      os << (i ? " " : "") << svg::num(f.px(rows[i].tau_mid)) << ','
         << svg::num(f.py(*rows[i].beta_analytic));
    }
    os << "\"/>\n";
  } else {
    double mean = 0;
    for (const auto& r : rows) mean += r.beta_hat;
    mean /= static_cast<double>(rows.size());
    svg::line(os, f, tmin, mean, tmax, mean, "mean",
              "stroke=\"#3366cc\" stroke-width=\"2\"");
  }
  for (const auto& r : rows) {
    os << "<circle class=\"window\" cx=\"" << svg::num(f.px(r.tau_mid))
       << "\" cy=\"" << svg::num(f.py(r.beta_hat)) << "\" r=\"2.5\" "
          "fill=\"#cc3333\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace influence
