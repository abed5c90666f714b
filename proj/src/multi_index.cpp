#include "distflow/multi_index.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace distflow {

namespace {

void enumerate_degree(int d, int degree, std::vector<int>& scratch,
                      std::vector<MultiIndex>& out) {
  if (static_cast<int>(scratch.size()) == d - 1) {
    int used = 0;
    for (int e : scratch) used += e;
    scratch.push_back(degree - used);
    out.push_back(MultiIndex{scratch});
    scratch.pop_back();
    return;
  }
  int used = 0;
  for (int e : scratch) used += e;
  for (int e = 0; e <= degree - used; ++e) {
    scratch.push_back(e);
    enumerate_degree(d, degree, scratch, out);
    scratch.pop_back();
  }
}

std::shared_ptr<const std::vector<MultiIndex>> build(int d, int n) {
  auto out = std::make_shared<std::vector<MultiIndex>>();
  std::vector<int> scratch;
  if (d == 1) {
    for (int k = 0; k <= n; ++k) out->push_back(MultiIndex{{k}});
    return out;
  }
  for (int degree = 0; degree <= n; ++degree) {
    enumerate_degree(d, degree, scratch, *out);
  }
  return out;
}

// Shared cache so scheme copies stay cheap and enumeration is computed once.
std::shared_ptr<const std::vector<MultiIndex>> cached(int d, int n) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const std::vector<MultiIndex>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto built = build(d, n);
  cache.emplace(key, built);
  return built;
}

}  // namespace

TruncationScheme::TruncationScheme(int dimension, int max_total_degree)
    : d_(dimension), n_(max_total_degree) {
  if (dimension < 1 || dimension > 3) {
    throw std::invalid_argument("TruncationScheme: dimension must be 1..3");
  }
  if (max_total_degree < 0) {
    throw std::invalid_argument("TruncationScheme: negative degree");
  }
  indices_ = cached(d_, n_);
}

std::optional<std::size_t> TruncationScheme::position(const MultiIndex& k) const {
  if (k.dim() != d_ || k.total() > n_) return std::nullopt;
  for (int e : k.entries) {
    if (e < 0) return std::nullopt;
  }
  // Offset of the degree block, then lex rank inside the block.
  // For desk-scale sizes a linear scan inside the block is fine.
  long deg = k.total();
  std::size_t lo = 0;
  while (lo < indices_->size() && (*indices_)[lo].total() < deg) ++lo;
  for (std::size_t i = lo; i < indices_->size() && (*indices_)[i].total() == deg; ++i) {
    if ((*indices_)[i] == k) return i;
  }
  return std::nullopt;
}

}  // namespace distflow
