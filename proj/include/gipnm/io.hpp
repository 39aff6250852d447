#pragma once

#include "gipnm/gaussian.hpp"

#include <string>

// Covariance-matrix file formats: JSON {"sigma": [[... 4 rows of 4 ...]]}
// and flat CSV (16 reals, row-major).

namespace gipnm {

TwoModeCovariance read_sigma(const std::string& path);
TwoModeCovariance read_sigma_json(const std::string& text);
TwoModeCovariance read_sigma_csv(const std::string& text);

void write_sigma_json(const TwoModeCovariance& sigma, const std::string& path);
void write_sigma_csv(const TwoModeCovariance& sigma, const std::string& path);

}  // namespace gipnm
