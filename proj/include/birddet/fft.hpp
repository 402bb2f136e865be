#pragma once

#include <vector>

namespace birddet {

// One-sided power spectrum |X_k|^2, k = 0..n/2, of a real frame.
std::vector<double> power_spectrum(const std::vector<double>& frame);

}  // namespace birddet
