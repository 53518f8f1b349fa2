#pragma once

// Text grammar for joint models (used by scenario configs):
//
//   model    := 'product' '(' marginal ',' marginal ')'
//             | 'PB' '(' num ')' | 'PBmod' '(' num ')'
//             | 'BvM' '(' num ')' | 'BvM' '(' num ',' num ',' num ',' num ')'
//             | 'BWC' '(' num ')' | 'BWC' '(' num ',' num ',' num ')'
//             | 'BCvM' '(' num ')' | 'BCvM' '(' num ',' num ',' num ')'
//             | 'Mix' '(' marginal ',' marginal ',' num ')'
//             | 'vMFMix' '(' int sep num sep num ')'        dim; p, kappa
//             | 'PN' '(' int sep num sep num sep num ')'    d; s12, s13, s23
//             | 'VMC' '(' num ')'
//   marginal := 'VM' '(' num ',' num ')' | 'WC' '(' num ',' num ')' | 'Unif'
//   num      := arithmetic over literals, 'pi' and 'exp(...)' with + - * /
//   sep      := ',' | ';'
//
// Names are case-insensitive; 'VC' is accepted as an alias of 'WC'.

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "dirdep/distributions.hpp"
#include "dirdep/errors.hpp"
#include "dirdep/samplers.hpp"

namespace dirdep {

namespace detail {

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : text_(text) {}

  ModelSpec parse_model() {
    const std::string name = lower(identifier());
    ModelSpec out = dispatch(name);
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return out;
  }

 private:
  ModelSpec dispatch(const std::string& name) {
    if (name == "product") {
      expect('(');
      auto f = marginal();
      separator();
      auto g = marginal();
      expect(')');
      return ModelSpec::product(f, g);
    }
    if (name == "mix") {
      expect('(');
      auto f = marginal();
      separator();
      auto g = marginal();
      separator();
      const double p = number();
      expect(')');
      return ModelSpec::mixture(f, g, p);
    }
    const auto args = number_list();
    auto arity = [&](std::initializer_list<std::size_t> allowed) {
      for (auto a : allowed) {
        if (args.size() == a) return;
      }
      fail("wrong number of arguments for " + name);
    };
    if (name == "pb" || name == "pbmod") {
      arity({1});
      return ModelSpec::parabolic(args[0], name == "pbmod");
    }
    if (name == "bvm") {
      arity({1, 4});
      return args.size() == 1 ? ModelSpec::bivariate_von_mises(args[0])
                              : ModelSpec::bivariate_von_mises(args[0], args[1], args[2], args[3]);
    }
    if (name == "bwc") {
      arity({1, 3});
      return args.size() == 1 ? ModelSpec::bivariate_wrapped_cauchy(args[0])
                              : ModelSpec::bivariate_wrapped_cauchy(args[0], args[1], args[2]);
    }
    if (name == "bcvm") {
      arity({1, 3});
      return args.size() == 1 ? ModelSpec::bivariate_cosine(args[0])
                              : ModelSpec::bivariate_cosine(args[0], args[1], args[2]);
    }
    if (name == "vmfmix") {
      arity({3});
      return ModelSpec::vmf_mixture_pair(integer(args[0]), args[1], args[2]);
    }
    if (name == "pn") {
      arity({4});
      return ModelSpec::projected_normal(integer(args[0]), args[1], args[2], args[3]);
    }
    if (name == "vmc") {
      arity({1});
      return ModelSpec::von_mises_copula(args[0]);
    }
    fail("unknown model '" + name + "'");
  }

  CircularMarginal marginal() {
    const std::string name = lower(identifier());
    if (name == "unif") return CircularMarginal::uniform();
    const auto args = number_list();
    if (args.size() != 2) fail("marginal " + name + " takes two arguments");
    if (name == "vm") return CircularMarginal::von_mises(args[0], args[1]);
    if (name == "wc" || name == "vc") return CircularMarginal::wrapped_cauchy(args[0], args[1]);
    fail("unknown marginal '" + name + "'");
  }

  std::vector<double> number_list() {
    expect('(');
    std::vector<double> out{number()};
    while (peek() == ',' || peek() == ';') {
      ++pos_;
      out.push_back(number());
    }
    expect(')');
    return out;
  }

  // num := term (('+'|'-') term)*
  double number() {
    double v = term();
    for (;;) {
      const char c = peek();
      if (c == '+') {
        ++pos_;
        v += term();
      } else if (c == '-') {
        ++pos_;
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = factor();
    for (;;) {
      const char c = peek();
      if (c == '*') {
        ++pos_;
        v *= factor();
      } else if (c == '/') {
        ++pos_;
        v /= factor();
      } else {
        return v;
      }
    }
  }

  double factor() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (c == '+') {
      ++pos_;
      return factor();
    }
    if (c == '(') {
      ++pos_;
      const double v = number();
      expect(')');
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::string name = lower(identifier());
      if (name == "pi") return std::numbers::pi;
      if (name == "exp") {
        expect('(');
        const double v = number();
        expect(')');
        return std::exp(v);
      }
      fail("unknown constant or function '" + name + "'");
    }
    skip_space();
    const char* begin = text_.data() + pos_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, text_.data() + text_.size(), v);
    if (ec != std::errc() || ptr == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  int integer(double v) {
    if (v != std::floor(v) || v < 0 || v > 1e6) fail("expected a non-negative integer dimension");
    return static_cast<int>(v);
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  void separator() {
    const char c = peek();
    if (c != ',' && c != ';') fail("expected ',' or ';'");
    ++pos_;
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  static std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("model spec '" + std::string(text_) + "' at position " +
                      std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ModelSpec parse_model(std::string_view text) {
  return detail::ModelParser(text).parse_model();
}

}  // namespace dirdep
