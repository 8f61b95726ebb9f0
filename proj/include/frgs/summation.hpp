#pragma once

#include <cstddef>
#include <span>

namespace frgs {

namespace detail {
inline constexpr std::size_t pairwise_block = 32;
}

/// Pairwise (cascade) sum of term(i) for i in [begin, end). The split tree
/// depends only on the range, never on threading, so results are bit-stable.
template<class Term>
double pairwise_reduce(std::size_t begin, std::size_t end, const Term& term)
{
  const std::size_t n = end - begin;
  if (n <= detail::pairwise_block) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i)
      acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + n / 2;
  return pairwise_reduce(begin, mid, term) + pairwise_reduce(mid, end, term);
}

template<class Term>
double pairwise_reduce(std::size_t count, const Term& term)
{
  return pairwise_reduce(std::size_t{0}, count, term);
}

inline double pairwise_sum(std::span<const double> values)
{
  return pairwise_reduce(values.size(), [values](std::size_t i) { return values[i]; });
}

} // namespace frgs
