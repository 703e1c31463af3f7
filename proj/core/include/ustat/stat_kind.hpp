#pragma once

#include <string>
#include <vector>

namespace ustat {

// Indices in the definitions are 1-based:
//   classic     sum_{i<j} f(X_i, X_j)
//   cyclic      sum_{i in Z_n} sum_{1<=j<n/2} f(X_i, X_{i+j mod n})
//   cyclic_sym  cyclic applied to f - swap(f)
//   alt_first   sum_{i<j} (-1)^{i+1} f(X_i, X_j)
//   alt_second  sum_{i<j} (-1)^j f(X_i, X_j)
//   bialt       sum_{i<j} (-1)^{i+j} f(X_i, X_j)
//   full        sum_{i != j} f(X_i, X_j)
enum class StatKind { classic, cyclic, cyclic_sym, alt_first, alt_second, bialt, full };

const char* stat_name(StatKind s);
StatKind parse_stat(const std::string& name);
const std::vector<StatKind>& all_stats();

enum class Parity { even, odd };

}  // namespace ustat
