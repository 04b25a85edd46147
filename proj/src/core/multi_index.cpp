#include "siapprox/multi_index.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "siapprox/errors.hpp"

namespace sia {

MultiIndex::MultiIndex(std::vector<int> v) : e_(std::move(v)) {
  for (int x : e_)
    if (x < 0) throw InputError("multi-index entries must be nonnegative");
}

int MultiIndex::order() const { return std::accumulate(e_.begin(), e_.end(), 0); }

bool MultiIndex::leq(const MultiIndex& other) const {
  if (dim() != other.dim()) throw DimensionMismatch("multi-index comparison");
  for (int i = 0; i < dim(); ++i)
    if (e_[i] > other.e_[i]) return false;
  return true;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int x : e_) f *= sia::factorial(x);
  return f;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  if (dim() != o.dim()) throw DimensionMismatch("multi-index sum");
  MultiIndex r(*this);
  for (int i = 0; i < dim(); ++i) r.e_[i] += o.e_[i];
  return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
  if (!o.leq(*this)) throw DimensionMismatch("multi-index difference would be negative");
  MultiIndex r(*this);
  for (int i = 0; i < dim(); ++i) r.e_[i] -= o.e_[i];
  return r;
}

MultiIndex MultiIndex::unit(int d, int j) {
  MultiIndex r(d);
  r[j] = 1;
  return r;
}

std::string MultiIndex::str() const {
  std::string s = "(";
  for (int i = 0; i < dim(); ++i) {
    if (i) s += ",";
    s += std::to_string(e_[i]);
  }
  return s + ")";
}

bool MultiIndex::operator<(const MultiIndex& o) const {
  int a = order(), b = o.order();
  if (a != b) return a < b;
  return e_ < o.e_;
}

namespace {
void fill_exact(int d, int n, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == d - 1) {
    cur[pos] = n;
    out.push_back(cur);
    return;
  }
  for (int x = 0; x <= n; ++x) {
    cur[pos] = x;
    fill_exact(d, n - x, pos + 1, cur, out);
  }
}
}  // namespace

std::vector<MultiIndex> enumerate_exact(int d, int n, GradedOrder ord) {
  std::vector<MultiIndex> out;
  if (d <= 0 || n < 0) return out;
  MultiIndex cur(d);
  fill_exact(d, n, 0, cur, out);  // ascending lexicographic by construction
  if (ord == GradedOrder::Descending) std::reverse(out.begin(), out.end());
  return out;
}

std::vector<MultiIndex> enumerate_upto(int d, int n, GradedOrder ord) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= n; ++k) {
    auto part = enumerate_exact(d, k, ord);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::size_t count_upto(int d, int n) {
  if (n < 0) return 0;
  // binomial(n + d, d)
  double b = binomial(n + d, d);
  return static_cast<std::size_t>(b + 0.5);
}

std::vector<int> parse_int_tuple(const std::string& text) {
  std::vector<int> v;
  std::string num;
  for (char c : text) {
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      num += c;
    } else if (!num.empty()) {
      v.push_back(std::stoi(num));
      num.clear();
    }
  }
  if (!num.empty()) v.push_back(std::stoi(num));
  if (v.empty()) throw InputError("cannot parse integer tuple '" + text + "'");
  return v;
}

MultiIndex parse_multi_index(const std::string& text) { return MultiIndex(parse_int_tuple(text)); }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace sia
