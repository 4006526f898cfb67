#include "fv/expression.hpp"

#include <cctype>
#include <functional>
#include <map>

namespace fv::expr {

struct Expression::Node {
  enum class Kind { constant, variable, unary, binary, call } kind;
  double value = 0.0;
  int var = 0;
  char op = 0;
  std::string fn;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    auto e = expression();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return e;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("expression: " + msg + " at position " + std::to_string(pos_) +
                                " in '" + s_ + "'");
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
    return false;
  }

  NodePtr expression() {
    auto lhs = term();
    for (;;) {
      if (eat('+')) {
        auto rhs = term();
        lhs = binary('+', lhs, rhs);
      } else if (eat('-')) {
        auto rhs = term();
        lhs = binary('-', lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = power();
    for (;;) {
      if (eat('*')) {
        lhs = binary('*', lhs, power());
      } else if (eat('/')) {
        lhs = binary('/', lhs, power());
      } else {
        return lhs;
      }
    }
  }

  NodePtr power() {
    auto base = unary();
    if (eat('^')) return binary('^', base, power());  // right associative
    return base;
  }

  NodePtr unary() {
    if (eat('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::unary;
      n->a = unary();
      return n;
    }
    eat('+');
    return atom();
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expression();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character");
  }

  NodePtr number() {
    size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
            s_[end] == 'e' || s_[end] == 'E' ||
            ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
             (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
      ++end;
    const double v = std::stod(s_.substr(pos_, end - pos_));
    pos_ = end;
    return make_const(v);
  }

  NodePtr identifier() {
    size_t end = pos_;
    while (end < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
      ++end;
    std::string name = s_.substr(pos_, end - pos_);
    pos_ = end;
    static const std::map<std::string, int> vars = {{"x", 0},  {"y", 1},  {"z", 2},  {"w", 3},
                                                    {"x0", 0}, {"x1", 1}, {"x2", 2}, {"x3", 3}};
    if (auto it = vars.find(name); it != vars.end()) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::variable;
      n->var = it->second;
      return n;
    }
    if (name == "pi") return make_const(M_PI);
    if (name == "e") return make_const(M_E);
    // function call
    if (!eat('(')) fail("unknown identifier '" + name + "'");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::call;
    n->fn = name;
    n->a = expression();
    if (eat(',')) n->b = expression();
    if (!eat(')')) fail("missing ')' after arguments of '" + name + "'");
    return n;
  }

  NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::binary;
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }
};

double eval_node(const Node& n, const Vec& coords) {
  switch (n.kind) {
    case Node::Kind::constant:
      return n.value;
    case Node::Kind::variable:
      if (n.var >= coords.size())
        throw std::invalid_argument("expression: variable index exceeds point dimension");
      return coords[n.var];
    case Node::Kind::unary:
      return -eval_node(*n.a, coords);
    case Node::Kind::binary: {
      const double a = eval_node(*n.a, coords);
      const double b = eval_node(*n.b, coords);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return std::pow(a, b);
      }
      throw std::logic_error("expression: bad operator");
    }
    case Node::Kind::call: {
      const double a = eval_node(*n.a, coords);
      if (n.fn == "sin") return std::sin(a);
      if (n.fn == "cos") return std::cos(a);
      if (n.fn == "tan") return std::tan(a);
      if (n.fn == "exp") return std::exp(a);
      if (n.fn == "log") return std::log(a);
      if (n.fn == "sqrt") return std::sqrt(a);
      if (n.fn == "abs") return std::abs(a);
      if (n.fn == "sign") return a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
      if (n.fn == "floor") return std::floor(a);
      if (!n.b) throw std::invalid_argument("expression: function '" + n.fn + "' needs two arguments");
      const double b = eval_node(*n.b, coords);
      if (n.fn == "min") return std::min(a, b);
      if (n.fn == "max") return std::max(a, b);
      if (n.fn == "pow") return std::pow(a, b);
      if (n.fn == "atan2") return std::atan2(a, b);
      throw std::invalid_argument("expression: unknown function '" + n.fn + "'");
    }
  }
  throw std::logic_error("expression: bad node");
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.text_ = text;
  return e;
}

double Expression::operator()(const Vec& coords) const {
  if (!root_) throw std::logic_error("expression: empty");
  return eval_node(*root_, coords);
}

}  // namespace fv::expr
