#pragma once

#include "mls/numerics/bigfloat.hpp"

namespace mls {

struct Vec2 {
  BigFloat x{0};
  BigFloat y{0};

  Vec2() = default;
  Vec2(BigFloat x_, BigFloat y_) : x(std::move(x_)), y(std::move(y_)) {}

  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(const BigFloat& s, const Vec2& a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(const Vec2& a, const BigFloat& s) { return {s * a.x, s * a.y}; }
  friend Vec2 operator/(const Vec2& a, const BigFloat& s) { return {a.x / s, a.y / s}; }
};

inline BigFloat dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline BigFloat cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline BigFloat norm(const Vec2& a) { return sqrt(dot(a, a)); }
/// Counter-clockwise quarter turn.
inline Vec2 rot90(const Vec2& a) { return {-a.y, a.x}; }
inline Vec2 unit_at(const BigFloat& angle) { return {cos(angle), sin(angle)}; }

}  // namespace mls
