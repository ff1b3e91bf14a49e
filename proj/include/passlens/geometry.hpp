#pragma once

#include <array>
#include <cmath>

namespace passlens {

/// Canonical pitch coordinates: x runs across the pitch width, y runs along
/// the attacking direction of the team in possession. The possessing team's
/// own goal line is y = 0.
struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(const Point2D& a, const Point2D& b) { return a.x == b.x && a.y == b.y; }
inline bool operator!=(const Point2D& a, const Point2D& b) { return !(a == b); }
inline Point2D operator+(const Point2D& a, const Point2D& b) { return {a.x + b.x, a.y + b.y}; }
inline Point2D operator-(const Point2D& a, const Point2D& b) { return {a.x - b.x, a.y - b.y}; }

inline double squared_norm(const Point2D& p) { return p.x * p.x + p.y * p.y; }
inline double norm(const Point2D& p) { return std::sqrt(squared_norm(p)); }
inline double distance(const Point2D& a, const Point2D& b) { return norm(a - b); }

/// Pitch geometry. The final third starts two thirds of the length away from
/// the possessing team's own goal line; the penalty box is the rectangle in
/// front of the opponent's goal.
struct Pitch {
  double length = 105.0;
  double width = 68.0;
  double box_depth = 16.5;
  double box_width = 40.32;

  double final_third_line() const { return 2.0 * length / 3.0; }

  bool in_final_third(const Point2D& p) const { return p.y > final_third_line(); }

  bool in_box(const Point2D& p) const {
    const double half = box_width / 2.0;
    return p.y >= length - box_depth && p.x >= width / 2.0 - half && p.x <= width / 2.0 + half;
  }

  bool in_bounds(const Point2D& p, double tolerance_m) const {
    return p.x >= -tolerance_m && p.x <= width + tolerance_m && p.y >= -tolerance_m &&
           p.y <= length + tolerance_m;
  }

  bool valid() const {
    return length > 0.0 && width > 0.0 && box_depth > 0.0 && box_depth <= length &&
           box_width > 0.0 && box_width <= width;
  }
};

/// File coordinates put the origin at one corner with x along the pitch
/// length and y along the width. A TeamFrame maps between that frame and the
/// canonical frame of one team for one period.
struct TeamFrame {
  Pitch pitch;
  bool attacks_positive_x = true;

  Point2D to_canonical(double file_x, double file_y) const {
    if (attacks_positive_x) return {file_y, file_x};
    return {pitch.width - file_y, pitch.length - file_x};
  }

  std::array<double, 2> to_file(const Point2D& p) const {
    if (attacks_positive_x) return {p.y, p.x};
    return {pitch.length - p.y, pitch.width - p.x};
  }
};

/// Teams swap ends every period; `home_first` is the home team's direction in
/// period 1.
inline bool attacks_positive_x(bool home_attacks_positive_x_first, bool is_home, int period) {
  bool dir = is_home ? home_attacks_positive_x_first : !home_attacks_positive_x_first;
  if (period % 2 == 0) dir = !dir;
  return dir;
}

}  // namespace passlens
