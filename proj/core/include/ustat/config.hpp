#pragma once

#include <string>

#include "ustat/kernel.hpp"
#include "ustat/limitlaws.hpp"
#include "ustat/space.hpp"

namespace ustat {

// Kernel grammar:
//   kernel := "sign" | "product" ["(" shift ")"] | "bilinear" | "left" | "right"
//           | "constant(" c ["," dim] ")"
//           | "sum(" kernel "," kernel {"," kernel} ")" | "scale(" c "," kernel ")"
//           | "swap(" kernel ")" | "sym-part(" kernel ")" | "antisym-part(" kernel ")"
// Whitespace is ignored. describe() output parses back to an equal kernel.
KernelSpec parse_kernel(const std::string& text);

// Measure grammar:
//   measure := "uniform01" | "stdnormal" | "rademacher" | "bernoulli" p | "bernoulli(" p ")"
//            | "atoms [" v ":" p {"," v ":" p} "]" | "product(" measure "," measure ")"
//            | "ranks" n
MeasureSpec parse_measure(const std::string& text);

// JSON object {"gaussian_var", "chi", "eta", "xeta", "tail_var", "scale_exponent"}
// or one of the names "eta", "xeta", "chi", "writhe" (writhe uses K terms).
MixtureLaw parse_law(const std::string& text, int writhe_terms = 64);
std::string law_to_json(const MixtureLaw& law);

}  // namespace ustat
