#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace distflow {

/// Element of Z^d_+ indexing a tensor Hermite function.
struct MultiIndex {
  std::vector<int> entries;

  int dim() const { return static_cast<int>(entries.size()); }

  /// |k| = sum of entries.
  long total() const {
    long s = 0;
    for (int e : entries) s += e;
    return s;
  }

  int operator[](int i) const { return entries[static_cast<std::size_t>(i)]; }
  bool operator==(const MultiIndex& o) const { return entries == o.entries; }
};

/// Finite approximation of the basis {h_k}: keep all k with |k| <= N.
/// Enumeration is graded lexicographic (by |k|, then lex) and frozen;
/// file formats depend on it.
class TruncationScheme {
 public:
  TruncationScheme(int dimension, int max_total_degree);

  int dimension() const { return d_; }
  int max_total_degree() const { return n_; }

  /// Basis size C(N+d, d).
  std::size_t size() const { return indices_->size(); }

  const std::vector<MultiIndex>& indices() const { return *indices_; }
  const MultiIndex& index(std::size_t i) const { return (*indices_)[i]; }

  /// Position of k in the enumeration, or nullopt if |k| > N or dim mismatch.
  std::optional<std::size_t> position(const MultiIndex& k) const;

  bool operator==(const TruncationScheme& o) const {
    return d_ == o.d_ && n_ == o.n_;
  }

 private:
  int d_;
  int n_;
  std::shared_ptr<const std::vector<MultiIndex>> indices_;
};

}  // namespace distflow
