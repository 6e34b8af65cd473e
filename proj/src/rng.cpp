#include "afm/rng.hpp"

#include "afm/normal.hpp"

namespace afm {

double RandomStream::next_normal() { return norm_quantile(next_open_unit()); }

}  // namespace afm
