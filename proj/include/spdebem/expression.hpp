#ifndef SPDEBEM_EXPRESSION_HPP
#define SPDEBEM_EXPRESSION_HPP

#include <memory>
#include <string>

namespace spdebem {

/// Real-valued expression in one variable `x`.
/// Grammar: + - * / ^, unary minus, parentheses, numbers, constants pi and e,
/// functions exp log sqrt sin cos tan tanh abs.
class Expression {
 public:
  /// Throws DomainError with the offending position on a syntax error.
  explicit Expression(const std::string& source);
  ~Expression();
  Expression(const Expression&);
  Expression& operator=(const Expression&);
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  double operator()(double x) const;
  const std::string& source() const { return source_; }

  struct Node;

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace spdebem

#endif  // SPDEBEM_EXPRESSION_HPP
