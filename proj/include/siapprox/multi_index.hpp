#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace sia {

// Exponent vector in Z_+^d.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int d) : e_(static_cast<std::size_t>(d), 0) {}
  MultiIndex(std::initializer_list<int> v) : e_(v) {}
  explicit MultiIndex(std::vector<int> v);

  int dim() const { return static_cast<int>(e_.size()); }
  int operator[](int i) const { return e_[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return e_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& entries() const { return e_; }

  int order() const;  // |alpha|
  // Partial order: *this <= other iff other - *this has no negative entry.
  bool leq(const MultiIndex& other) const;
  bool lt(const MultiIndex& other) const { return leq(other) && *this != other; }
  double factorial() const;  // alpha!

  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;  // requires o <= *this

  static MultiIndex unit(int d, int j);

  std::string str() const;  // "(1,0)"

  bool operator==(const MultiIndex& o) const = default;
  // Strict weak order used for map keys: graded, then ascending lexicographic.
  bool operator<(const MultiIndex& o) const;

 private:
  std::vector<int> e_;
};

enum class GradedOrder {
  Ascending,   // within a degree: (0,2), (1,1), (2,0)
  Descending,  // within a degree: (2,0), (1,1), (0,2)
};

// All alpha in Z_+^d with |alpha| <= n, graded by degree, without repetition.
std::vector<MultiIndex> enumerate_upto(int d, int n, GradedOrder ord = GradedOrder::Ascending);
// All alpha with |alpha| == n in the given within-degree order.
std::vector<MultiIndex> enumerate_exact(int d, int n, GradedOrder ord = GradedOrder::Ascending);
// Number of alpha with |alpha| <= n.
std::size_t count_upto(int d, int n);

// Accepts "(0,1)", "0,1", "[0,1]" or a bare integer.
std::vector<int> parse_int_tuple(const std::string& text);
MultiIndex parse_multi_index(const std::string& text);

double factorial(int n);
double binomial(int n, int k);

}  // namespace sia
