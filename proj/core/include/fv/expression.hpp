#pragma once

#include "fv/types.hpp"

#include <memory>
#include <string>

namespace fv::expr {

/// Compiled closed-form scalar expression in the coordinate variables
/// x, y, z, w (aliases x0..x3). Supports + - * / ^, unary minus,
/// parentheses, the functions sin cos tan exp log sqrt abs sign floor
/// min max pow atan2, and the constants pi, e.
class Expression {
 public:
  static Expression parse(const std::string& text);

  double operator()(const Vec& coords) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace fv::expr
