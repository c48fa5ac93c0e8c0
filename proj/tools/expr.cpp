#include "expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hyperbreg::tools {

struct Expr::Node {
  enum class Kind { Constant, VarT, VarX, Sum, Product, Negate, Sin, Cos, Power };

  Kind kind;
  double value = 0.0;                                   // Constant
  int exponent = 0;                                     // Power
  std::vector<std::shared_ptr<const Node>> children;    // Sum/Product/unary

  static std::shared_ptr<const Node> constant(double v) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Constant;
    node->value = v;
    return node;
  }
  static std::shared_ptr<const Node> leaf(Kind kind) {
    auto node = std::make_shared<Node>();
    node->kind = kind;
    return node;
  }
  static std::shared_ptr<const Node> unary(Kind kind, std::shared_ptr<const Node> child) {
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->children.push_back(std::move(child));
    return node;
  }
  static std::shared_ptr<const Node> nary(Kind kind,
                                          std::vector<std::shared_ptr<const Node>> children) {
    if (children.size() == 1) return children.front();
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->children = std::move(children);
    return node;
  }
  static std::shared_ptr<const Node> power(std::shared_ptr<const Node> base, int exponent) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Power;
    node->exponent = exponent;
    node->children.push_back(std::move(base));
    return node;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Node::Kind;

double eval_node(const Expr::Node& node, double t, double x) {
  switch (node.kind) {
    case Kind::Constant: return node.value;
    case Kind::VarT: return t;
    case Kind::VarX: return x;
    case Kind::Sum: {
      double acc = 0.0;
      for (const auto& child : node.children) acc += eval_node(*child, t, x);
      return acc;
    }
    case Kind::Product: {
      double acc = 1.0;
      for (const auto& child : node.children) acc *= eval_node(*child, t, x);
      return acc;
    }
    case Kind::Negate: return -eval_node(*node.children.front(), t, x);
    case Kind::Sin: return std::sin(eval_node(*node.children.front(), t, x));
    case Kind::Cos: return std::cos(eval_node(*node.children.front(), t, x));
    case Kind::Power: return std::pow(eval_node(*node.children.front(), t, x), node.exponent);
  }
  return 0.0;
}

NodePtr derive(const NodePtr& node);

NodePtr product_of(std::vector<NodePtr> factors) {
  return Expr::Node::nary(Kind::Product, std::move(factors));
}

NodePtr derive(const NodePtr& node) {
  switch (node->kind) {
    case Kind::Constant:
    case Kind::VarX:
      return Expr::Node::constant(0.0);
    case Kind::VarT:
      return Expr::Node::constant(1.0);
    case Kind::Sum: {
      std::vector<NodePtr> terms;
      terms.reserve(node->children.size());
      for (const auto& child : node->children) terms.push_back(derive(child));
      return Expr::Node::nary(Kind::Sum, std::move(terms));
    }
    case Kind::Product: {
      std::vector<NodePtr> terms;
      for (size_t i = 0; i < node->children.size(); ++i) {
        std::vector<NodePtr> factors;
        for (size_t j = 0; j < node->children.size(); ++j) {
          factors.push_back(i == j ? derive(node->children[j]) : node->children[j]);
        }
        terms.push_back(product_of(std::move(factors)));
      }
      return Expr::Node::nary(Kind::Sum, std::move(terms));
    }
    case Kind::Negate:
      return Expr::Node::unary(Kind::Negate, derive(node->children.front()));
    case Kind::Sin:
      return product_of({Expr::Node::unary(Kind::Cos, node->children.front()),
                         derive(node->children.front())});
    case Kind::Cos:
      return Expr::Node::unary(
          Kind::Negate, product_of({Expr::Node::unary(Kind::Sin, node->children.front()),
                                    derive(node->children.front())}));
    case Kind::Power: {
      if (node->exponent == 0) return Expr::Node::constant(0.0);
      return product_of({Expr::Node::constant(static_cast<double>(node->exponent)),
                         Expr::Node::power(node->children.front(), node->exponent - 1),
                         derive(node->children.front())});
    }
  }
  return Expr::Node::constant(0.0);
}

void print_node(const Expr::Node& node, std::ostringstream& out) {
  switch (node.kind) {
    case Kind::Constant: out << node.value; return;
    case Kind::VarT: out << 't'; return;
    case Kind::VarX: out << 'x'; return;
    case Kind::Sum: {
      out << '(';
      for (size_t i = 0; i < node.children.size(); ++i) {
        if (i) out << " + ";
        print_node(*node.children[i], out);
      }
      out << ')';
      return;
    }
    case Kind::Product: {
      out << '(';
      for (size_t i = 0; i < node.children.size(); ++i) {
        if (i) out << '*';
        print_node(*node.children[i], out);
      }
      out << ')';
      return;
    }
    case Kind::Negate:
      out << "(-";
      print_node(*node.children.front(), out);
      out << ')';
      return;
    case Kind::Sin:
      out << "sin(";
      print_node(*node.children.front(), out);
      out << ')';
      return;
    case Kind::Cos:
      out << "cos(";
      print_node(*node.children.front(), out);
      out << ')';
      return;
    case Kind::Power:
      print_node(*node.children.front(), out);
      out << '^' << node.exponent;
      return;
  }
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_spaces();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  NodePtr expr() {
    std::vector<NodePtr> terms;
    terms.push_back(term());
    while (true) {
      skip_spaces();
      if (consume('+')) {
        terms.push_back(term());
      } else if (consume('-')) {
        terms.push_back(Expr::Node::unary(Kind::Negate, term()));
      } else {
        break;
      }
    }
    return Expr::Node::nary(Kind::Sum, std::move(terms));
  }

  NodePtr term() {
    std::vector<NodePtr> factors;
    factors.push_back(factor());
    while (true) {
      skip_spaces();
      if (consume('*')) {
        factors.push_back(factor());
      } else {
        break;
      }
    }
    return Expr::Node::nary(Kind::Product, std::move(factors));
  }

  NodePtr factor() {
    skip_spaces();
    if (consume('-')) return Expr::Node::unary(Kind::Negate, factor());
    NodePtr base = primary();
    skip_spaces();
    if (consume('^')) {
      skip_spaces();
      const int exponent = integer();
      return Expr::Node::power(std::move(base), exponent);
    }
    return base;
  }

  NodePtr primary() {
    skip_spaces();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::string word = identifier();
      if (word == "t") return Expr::Node::leaf(Kind::VarT);
      if (word == "x") return Expr::Node::leaf(Kind::VarX);
      if (word == "pi") return Expr::Node::constant(std::numbers::pi);
      if (word == "sin" || word == "cos") {
        skip_spaces();
        expect('(');
        NodePtr inner = expr();
        expect(')');
        return Expr::Node::unary(word == "sin" ? Kind::Sin : Kind::Cos, std::move(inner));
      }
      fail("unknown identifier '" + word + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    size_t end = pos_;
    while (end < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
            text_[end] == 'e' || text_[end] == 'E' ||
            ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
             (text_[end - 1] == 'e' || text_[end - 1] == 'E')))) {
      ++end;
    }
    const std::string token = text_.substr(pos_, end - pos_);
    try {
      const double value = std::stod(token);
      pos_ = end;
      return Expr::Node::constant(value);
    } catch (const std::exception&) {
      fail("bad number '" + token + "'");
    }
  }

  int integer() {
    size_t end = pos_;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    if (end == pos_) fail("expected integer exponent");
    const int value = std::stoi(text_.substr(pos_, end - pos_));
    pos_ = end;
    return value;
  }

  std::string identifier() {
    size_t end = pos_;
    while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
    std::string word = text_.substr(pos_, end - pos_);
    pos_ = end;
    return word;
  }

  void skip_spaces() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_spaces();
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& reason) {
    std::ostringstream msg;
    msg << "expression parse error at position " << pos_ << ": " << reason << " in \"" << text_
        << "\"";
    throw std::invalid_argument(msg.str());
  }

  const std::string& text_;
  size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).parse()); }

double Expr::eval(double t, double x) const { return eval_node(*root_, t, x); }

Expr Expr::derivative_t() const { return Expr(derive(root_)); }

std::string Expr::to_string() const {
  std::ostringstream out;
  print_node(*root_, out);
  return out.str();
}

}  // namespace hyperbreg::tools
