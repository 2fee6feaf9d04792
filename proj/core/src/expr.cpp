#include "pwsreg/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "pwsreg/errors.hpp"

namespace pwsreg {

struct Expr::Node {
  Op op = Op::constant;
  double value = 0.0;
  unsigned exponent = 0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr zero_node() {
  static const NodePtr zero = std::make_shared<const Expr::Node>();
  return zero;
}

double ipow(double base, unsigned n) {
  double result = 1.0;
  while (n != 0) {
    if ((n & 1U) != 0) result *= base;
    n >>= 1U;
    if (n != 0) base *= base;
  }
  return result;
}

double checked_div(double num, double den, Point2 p) {
  if (den == 0.0) throw DomainError("division by zero", p);
  return num / den;
}

double apply(Expr::Op op, double a, double b, double value, unsigned n, Point2 p) {
  switch (op) {
    case Expr::Op::constant: return value;
    case Expr::Op::var_x: return p.x;
    case Expr::Op::var_y: return p.y;
    case Expr::Op::neg: return -a;
    case Expr::Op::sin: return std::sin(a);
    case Expr::Op::cos: return std::cos(a);
    case Expr::Op::exp: return std::exp(a);
    case Expr::Op::add: return a + b;
    case Expr::Op::sub: return a - b;
    case Expr::Op::mul: return a * b;
    case Expr::Op::div: return checked_div(a, b, p);
    case Expr::Op::pow: return ipow(a, n);
  }
  return 0.0;
}

bool is_unary(Expr::Op op) {
  return op == Expr::Op::neg || op == Expr::Op::sin || op == Expr::Op::cos || op == Expr::Op::exp ||
         op == Expr::Op::pow;
}

bool is_binary(Expr::Op op) {
  return op == Expr::Op::add || op == Expr::Op::sub || op == Expr::Op::mul || op == Expr::Op::div;
}

bool is_const(const NodePtr& n, double v) { return n->op == Expr::Op::constant && n->value == v; }

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr::Expr(double value) : node_(value == 0.0 && !std::signbit(value) ? zero_node() : nullptr) {
  if (!node_) {
    auto n = std::make_shared<Node>();
    n->value = value;
    node_ = std::move(n);
  }
}

Expr Expr::constant(double value) { return Expr(value); }

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->op = v == Var::x ? Op::var_x : Op::var_y;
  return Expr(NodePtr(std::move(n)));
}

Expr Expr::make(Op op, Expr a, Expr b, unsigned exponent) {
  const NodePtr& na = a.node_;
  const NodePtr& nb = b.node_;
  const bool ca = na->op == Op::constant;
  const bool cb = nb->op == Op::constant;

  // Constant folding. Division is never folded when the denominator is a
  // zero constant so that evaluation still reports the domain error.
  if (is_unary(op) && ca) {
    return Expr(apply(op, na->value, 0.0, 0.0, exponent, {}));
  }
  if (is_binary(op) && ca && cb && !(op == Op::div && nb->value == 0.0)) {
    return Expr(apply(op, na->value, nb->value, 0.0, 0, {}));
  }
  switch (op) {
    case Op::add:
      if (is_const(na, 0.0)) return b;
      if (is_const(nb, 0.0)) return a;
      break;
    case Op::sub:
      if (is_const(nb, 0.0)) return a;
      if (is_const(na, 0.0)) return make(Op::neg, b);
      break;
    case Op::mul:
      if (is_const(na, 0.0) || is_const(nb, 0.0)) return Expr(0.0);
      if (is_const(na, 1.0)) return b;
      if (is_const(nb, 1.0)) return a;
      break;
    case Op::div:
      if (is_const(nb, 1.0)) return a;
      break;
    case Op::neg:
      if (na->op == Op::neg) return Expr(na->a);
      break;
    case Op::pow:
      if (exponent == 0) return Expr(1.0);
      if (exponent == 1) return a;
      break;
    default:
      break;
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->exponent = exponent;
  n->a = na;
  if (is_binary(op)) n->b = nb;
  return Expr(NodePtr(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::div, a, b); }
Expr operator-(const Expr& a) { return Expr::make(Expr::Op::neg, a); }
Expr pow(const Expr& base, unsigned exponent) { return Expr::make(Expr::Op::pow, base, {}, exponent); }
Expr sin(const Expr& a) { return Expr::make(Expr::Op::sin, a); }
Expr cos(const Expr& a) { return Expr::make(Expr::Op::cos, a); }
Expr exp(const Expr& a) { return Expr::make(Expr::Op::exp, a); }

Expr::Op Expr::op() const { return node_->op; }
double Expr::constant_value() const { return node_->value; }
unsigned Expr::exponent() const { return node_->exponent; }

std::size_t Expr::arity() const {
  if (is_binary(node_->op)) return 2;
  if (is_unary(node_->op)) return 1;
  return 0;
}

Expr Expr::child(std::size_t i) const {
  if (i >= arity()) throw PreconditionError("expression child index out of range");
  return Expr(i == 0 ? node_->a : node_->b);
}

double Expr::eval(Point2 p) const {
  struct Rec {
    Point2 p;
    double operator()(const Node& n) const {
      switch (n.op) {
        case Op::constant:
        case Op::var_x:
        case Op::var_y:
          return apply(n.op, 0.0, 0.0, n.value, 0, p);
        default:
          break;
      }
      const double a = (*this)(*n.a);
      const double b = n.b ? (*this)(*n.b) : 0.0;
      return apply(n.op, a, b, n.value, n.exponent, p);
    }
  };
  return Rec{p}(*node_);
}

Expr Expr::diff(Var v) const {
  std::unordered_map<const Node*, Expr> memo;
  const Op target = v == Var::x ? Op::var_x : Op::var_y;
  auto rec = [&](auto&& self, const NodePtr& np) -> Expr {
    if (auto it = memo.find(np.get()); it != memo.end()) return it->second;
    const Node& n = *np;
    Expr out;
    switch (n.op) {
      case Op::constant:
        out = Expr(0.0);
        break;
      case Op::var_x:
      case Op::var_y:
        out = Expr(n.op == target ? 1.0 : 0.0);
        break;
      default: {
        const Expr u(n.a);
        const Expr du = self(self, n.a);
        switch (n.op) {
          case Op::neg: out = -du; break;
          case Op::sin: out = cos(u) * du; break;
          case Op::cos: out = -(sin(u) * du); break;
          case Op::exp: out = Expr(np) * du; break;
          case Op::pow:
            out = Expr(static_cast<double>(n.exponent)) * pow(u, n.exponent - 1) * du;
            break;
          default: {
            const Expr w(n.b);
            const Expr dw = self(self, n.b);
            switch (n.op) {
              case Op::add: out = du + dw; break;
              case Op::sub: out = du - dw; break;
              case Op::mul: out = du * w + u * dw; break;
              case Op::div: out = (du * w - u * dw) / pow(w, 2); break;
              default: break;
            }
          }
        }
      }
    }
    memo.emplace(np.get(), out);
    return out;
  };
  return rec(rec, node_);
}

Expr Expr::substitute(Var v, const Expr& with) const {
  std::unordered_map<const Node*, Expr> memo;
  const Op target = v == Var::x ? Op::var_x : Op::var_y;
  auto rec = [&](auto&& self, const NodePtr& np) -> Expr {
    if (auto it = memo.find(np.get()); it != memo.end()) return it->second;
    const Node& n = *np;
    Expr out;
    if (n.op == target) {
      out = with;
    } else if (n.op == Op::constant || n.op == Op::var_x || n.op == Op::var_y) {
      out = Expr(np);
    } else {
      const Expr a = self(self, n.a);
      const Expr b = n.b ? self(self, n.b) : Expr();
      out = make(n.op, a, b, n.exponent);
    }
    memo.emplace(np.get(), out);
    return out;
  };
  return rec(rec, node_);
}

namespace {

// Precedence levels used by the printer: 1 add/sub, 2 mul/div, 3 unary
// minus, 4 power, 5 atoms.
int precedence(const Expr::Node& n) {
  switch (n.op) {
    case Expr::Op::add:
    case Expr::Op::sub: return 1;
    case Expr::Op::mul:
    case Expr::Op::div: return 2;
    case Expr::Op::neg: return 3;
    case Expr::Op::pow: return 4;
    case Expr::Op::constant: return n.value < 0.0 || std::signbit(n.value) ? 3 : 5;
    default: return 5;
  }
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

void print(const Expr::Node& n, std::string& out);

void print_child(const Expr::Node& n, int min_prec, std::string& out) {
  if (precedence(n) < min_prec) {
    out += '(';
    print(n, out);
    out += ')';
  } else {
    print(n, out);
  }
}

void print(const Expr::Node& n, std::string& out) {
  switch (n.op) {
    case Expr::Op::constant: out += format_number(n.value); return;
    case Expr::Op::var_x: out += 'x'; return;
    case Expr::Op::var_y: out += 'y'; return;
    case Expr::Op::neg:
      out += '-';
      print_child(*n.a, 4, out);
      return;
    case Expr::Op::sin:
    case Expr::Op::cos:
    case Expr::Op::exp:
      out += n.op == Expr::Op::sin ? "sin(" : n.op == Expr::Op::cos ? "cos(" : "exp(";
      print(*n.a, out);
      out += ')';
      return;
    case Expr::Op::pow:
      print_child(*n.a, 5, out);
      out += '^';
      out += std::to_string(n.exponent);
      return;
    default: {
      const int p = precedence(n);
      print_child(*n.a, p, out);
      out += n.op == Expr::Op::add ? " + " : n.op == Expr::Op::sub ? " - " : n.op == Expr::Op::mul ? "*" : "/";
      print_child(*n.b, p + 1, out);
    }
  }
}

}  // namespace

std::string Expr::to_string() const {
  std::string out;
  print(*node_, out);
  return out;
}

std::size_t Expr::node_count() const {
  std::unordered_map<const Node*, bool> seen;
  auto rec = [&](auto&& self, const Node* n) -> void {
    if (n == nullptr || !seen.emplace(n, true).second) return;
    self(self, n->a.get());
    self(self, n->b.get());
  };
  rec(rec, node_.get());
  return seen.size();
}

bool Expr::same_as(const Expr& other) const {
  auto rec = [](auto&& self, const Node* a, const Node* b) -> bool {
    if (a == b) return true;
    if (a == nullptr || b == nullptr) return false;
    if (a->op != b->op || a->exponent != b->exponent) return false;
    if (a->op == Op::constant && a->value != b->value) return false;
    return self(self, a->a.get(), b->a.get()) && self(self, a->b.get(), b->b.get());
  };
  return rec(rec, node_.get(), other.node_.get());
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    Expr e = parse_sum();
    skip_ws();
    if (pos_ < src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + parse_product();
      } else if (accept('-')) {
        lhs = lhs - parse_product();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * parse_unary();
      } else if (accept('/')) {
        lhs = lhs / parse_unary();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    const Expr e = parse_unary();
    if (!e.is_constant()) throw ParseError("exponent must be a constant", at);
    const double v = e.constant_value();
    if (v < 0.0) throw ParseError("negative exponent", at);
    if (v != std::floor(v)) throw ParseError("non-integer exponent", at);
    if (v > 1024.0) throw ParseError("exponent too large", at);
    return pow(base, static_cast<unsigned>(v));
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_])) != 0) ++pos_;
      const std::string_view name = src_.substr(start, pos_ - start);
      if (name == "x") return Expr::x();
      if (name == "y") return Expr::y();
      if (name == "sin" || name == "cos" || name == "exp") {
        if (!accept('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
        Expr arg = parse_sum();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        if (name == "sin") return sin(arg);
        if (name == "cos") return cos(arg);
        return exp(arg);
      }
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    double value = 0.0;
    const char* first = src_.data() + pos_;
    const char* last = src_.data() + src_.size();
    auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
    if (ec != std::errc() || ptr == first) throw ParseError("malformed number", start);
    pos_ += static_cast<std::size_t>(ptr - first);
    if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) != 0 || src_[pos_] == '.')) {
      throw ParseError("malformed number", start);
    }
    return Expr(value);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view src) { return Parser(src).parse(); }
double eval_expr(const Expr& e, Point2 p) { return e.eval(p); }
Expr diff_expr(const Expr& e, Var v) { return e.diff(v); }

// ---------------------------------------------------------------------------
// CompiledExpr

CompiledExpr::CompiledExpr(const Expr& e) {
  std::unordered_map<const Expr::Node*, std::uint32_t> slot;
  auto rec = [&](auto&& self, const Expr::Node* n) -> std::uint32_t {
    if (auto it = slot.find(n); it != slot.end()) return it->second;
    Instr in{n->op};
    if (n->a) in.a = self(self, n->a.get());
    if (n->b) in.b = self(self, n->b.get());
    in.value = n->op == Expr::Op::pow ? static_cast<double>(n->exponent) : n->value;
    code_.push_back(in);
    const auto idx = static_cast<std::uint32_t>(code_.size() - 1);
    slot.emplace(n, idx);
    return idx;
  };
  rec(rec, e.node());
}

double CompiledExpr::operator()(Point2 p) const {
  constexpr std::size_t kInline = 96;
  std::array<double, kInline> small{};
  thread_local std::vector<double> large;
  double* r = small.data();
  if (code_.size() > kInline) {
    large.resize(code_.size());
    r = large.data();
  }
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    switch (in.op) {
      case Expr::Op::constant: r[i] = in.value; break;
      case Expr::Op::var_x: r[i] = p.x; break;
      case Expr::Op::var_y: r[i] = p.y; break;
      case Expr::Op::neg: r[i] = -r[in.a]; break;
      case Expr::Op::sin: r[i] = std::sin(r[in.a]); break;
      case Expr::Op::cos: r[i] = std::cos(r[in.a]); break;
      case Expr::Op::exp: r[i] = std::exp(r[in.a]); break;
      case Expr::Op::add: r[i] = r[in.a] + r[in.b]; break;
      case Expr::Op::sub: r[i] = r[in.a] - r[in.b]; break;
      case Expr::Op::mul: r[i] = r[in.a] * r[in.b]; break;
      case Expr::Op::div: r[i] = checked_div(r[in.a], r[in.b], p); break;
      case Expr::Op::pow: r[i] = ipow(r[in.a], static_cast<unsigned>(in.value)); break;
    }
  }
  return code_.empty() ? 0.0 : r[code_.size() - 1];
}

}  // namespace pwsreg
