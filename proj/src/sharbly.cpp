#include "shtor/sharbly.hpp"

#include <algorithm>

namespace shtor::sharbly {

Normalized normalize(int m, std::vector<RowVec> vectors) {
  for (auto& v : vectors) {
    if (content(v) == 0) throw ZeroVector("normalize: zero vector in symbol");
    v = canonical_sign(primitivize(v));
  }
  // a repeated vector (up to sign) makes the symbol its own negative
  {
    std::vector<RowVec> sorted = vectors;
    std::sort(sorted.begin(), sorted.end(), lex_less);
    for (size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] == sorted[i - 1]) return {std::nullopt, 1};
  }
  if ((int)vectors.size() < m || row_rank(vectors) < m) return {std::nullopt, 1};
  // sort by insertion, counting inversions for the permutation sign
  int sign = 1;
  for (size_t i = 1; i < vectors.size(); ++i) {
    RowVec v = vectors[i];
    size_t j = i;
    while (j > 0 && lex_less(v, vectors[j - 1])) {
      vectors[j] = vectors[j - 1];
      --j;
      sign = -sign;
    }
    vectors[j] = std::move(v);
  }
  Symbol s;
  s.m = m;
  s.vectors = std::move(vectors);
  return {std::move(s), sign};
}

std::string symbol_to_string(const Symbol& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.vectors.size(); ++i) {
    if (i) out += ", ";
    out += to_string(s.vectors[i]);
  }
  out += "]";
  return out;
}

}  // namespace shtor::sharbly
